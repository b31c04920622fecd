//! Built-in macro volumes.
//!
//! The blade-like volume is a synthetic stand-in with the same spline
//! orders (3×2×2) and control-mesh size (5×2×2) as a typical blade
//! trivariate: spanwise-quadratic, tapered, twisted, with a gentle bow.

use super::{KnotVector, SplineVolume};

/// Parameters of the synthetic blade-like macro volume. Lengths in
/// meters; the span runs along +x with the root section at x = 0.
#[derive(Debug, Clone, Copy)]
pub struct BladeParams {
    pub length: f64,
    pub chord: f64,
    pub thickness_root: f64,
    pub thickness_tip: f64,
    pub twist_deg: f64,
    pub bow: f64,
    pub taper: f64,
}

impl Default for BladeParams {
    fn default() -> Self {
        Self {
            length: 0.090,
            chord: 0.040,
            thickness_root: 0.0075,
            thickness_tip: 0.0060,
            twist_deg: 25.0,
            bow: 0.004,
            taper: 0.20,
        }
    }
}

/// Synthetic twisted-and-tapered blade-like trivariate: degree (2,1,1),
/// control mesh (5,2,2), domain `[0,1]^3`. `u` runs root→tip, `v` along
/// the chord, `w` through the thickness.
pub fn blade_like_macro(p: &BladeParams) -> SplineVolume {
    let nu = 5;
    let ku = KnotVector::uniform(2, nu, 0.0, 1.0).unwrap();
    let kl = KnotVector::bezier(1);
    let mut points = Vec::with_capacity(nu * 2 * 2 * 3);
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..nu {
                let s = i as f64 / (nu - 1) as f64;
                let half_chord = 0.5 * p.chord * (1.0 - p.taper * s);
                let half_thick = 0.5 * (p.thickness_root + (p.thickness_tip - p.thickness_root) * s);
                let phi = p.twist_deg.to_radians() * s;
                let yl = if j == 0 { -half_chord } else { half_chord };
                let zl = if k == 0 { -half_thick } else { half_thick };
                let x = p.length * s;
                let y = yl * phi.cos() - zl * phi.sin() + p.bow * s * s;
                let z = yl * phi.sin() + zl * phi.cos();
                points.extend_from_slice(&[x, y, z]);
            }
        }
    }
    SplineVolume::new(ku, kl.clone(), kl, 3, points, None).unwrap()
}

/// Mildly twisted unit-scale box: degree (2,1,1), mesh (3,2,2), domain
/// `[0,1]^3`. Used where a gentle non-affine macro is needed.
pub fn twisted_box_macro(scale: f64, twist_rad: f64) -> SplineVolume {
    let ku = KnotVector::uniform(2, 3, 0.0, 1.0).unwrap();
    let kl = KnotVector::bezier(1);
    let mut points = Vec::new();
    for k in 0..2 {
        for j in 0..2 {
            for i in 0..3 {
                let s = i as f64 / 2.0;
                let phi = twist_rad * s;
                let yl = (j as f64 - 0.5) * scale;
                let zl = (k as f64 - 0.5) * scale;
                let x = s * scale;
                let y = yl * phi.cos() - zl * phi.sin() + 0.5 * scale;
                let z = yl * phi.sin() + zl * phi.cos() + 0.5 * scale;
                points.extend_from_slice(&[x, y, z]);
            }
        }
    }
    SplineVolume::new(ku, kl.clone(), kl, 3, points, None).unwrap()
}
