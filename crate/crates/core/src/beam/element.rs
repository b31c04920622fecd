//! Element stiffness and lumped mass for the 2-node circular-section
//! Timoshenko beam.

use super::{BeamError, BeamModel, Result};
use nalgebra::{Matrix3, SMatrix, Vector3};

pub type Matrix12 = SMatrix<f64, 12, 12>;

/// Timoshenko (shear-flexible) or the shear-rigid limit used by tests
/// to recover the Euler–Bernoulli solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShearModel {
    #[default]
    Timoshenko,
    Rigid,
}

/// Scalar stiffness coefficients of the local beam matrix.
struct Coeffs {
    axial: f64,
    torsion: f64,
    shear_f: f64,   // 12EI/(L³(1+Φ))
    shear_m: f64,   // 6EI/(L²(1+Φ))
    bend_d: f64,    // (4+Φ)EI/(L(1+Φ))
    bend_o: f64,    // (2−Φ)EI/(L(1+Φ))
}

fn local_matrix(c: &Coeffs) -> Matrix12 {
    let mut k = Matrix12::zeros();
    let (ax, t) = (c.axial, c.torsion);
    let (a, b, cc, d) = (c.shear_f, c.shear_m, c.bend_d, c.bend_o);

    // DOF order per node: ux uy uz rx ry rz.
    let set = |k: &mut Matrix12, i: usize, j: usize, v: f64| {
        k[(i, j)] = v;
        k[(j, i)] = v;
    };
    // Axial (local x).
    set(&mut k, 0, 0, ax);
    set(&mut k, 6, 6, ax);
    set(&mut k, 0, 6, -ax);
    // Torsion (rx).
    set(&mut k, 3, 3, t);
    set(&mut k, 9, 9, t);
    set(&mut k, 3, 9, -t);
    // Bending in the x-y plane: uy with rz.
    set(&mut k, 1, 1, a);
    set(&mut k, 1, 5, b);
    set(&mut k, 1, 7, -a);
    set(&mut k, 1, 11, b);
    set(&mut k, 5, 5, cc);
    set(&mut k, 5, 7, -b);
    set(&mut k, 5, 11, d);
    set(&mut k, 7, 7, a);
    set(&mut k, 7, 11, -b);
    set(&mut k, 11, 11, cc);
    // Bending in the x-z plane: uz with ry (opposite moment sign).
    set(&mut k, 2, 2, a);
    set(&mut k, 2, 4, -b);
    set(&mut k, 2, 8, -a);
    set(&mut k, 2, 10, -b);
    set(&mut k, 4, 4, cc);
    set(&mut k, 4, 8, b);
    set(&mut k, 4, 10, d);
    set(&mut k, 8, 8, a);
    set(&mut k, 8, 10, b);
    set(&mut k, 10, 10, cc);
    k
}

/// Rotation from global to local element coordinates (rows are the
/// local axes). Circular sections make the roll angle irrelevant.
pub(crate) fn element_rotation(axis: Vector3<f64>) -> Matrix3<f64> {
    let ex = axis.normalize();
    let seed = if ex.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let ey = ex.cross(&seed).normalize();
    let ez = ex.cross(&ey);
    Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()])
}

fn expand_rotation(r: &Matrix3<f64>) -> Matrix12 {
    let mut t = Matrix12::zeros();
    for blk in 0..4 {
        for i in 0..3 {
            for j in 0..3 {
                t[(3 * blk + i, 3 * blk + j)] = r[(i, j)];
            }
        }
    }
    t
}

struct SectionState {
    length: f64,
    rot: Matrix3<f64>,
    e: f64,
    g: f64,
    kappa: f64,
}

fn section_state(model: &BeamModel, idx: usize) -> Result<SectionState> {
    let el = &model.elements[idx];
    let d = model.nodes[el.b] - model.nodes[el.a];
    let length = d.norm();
    if length == 0.0 {
        return Err(BeamError::ZeroLengthElement(idx));
    }
    if !(el.radius > 0.0) {
        return Err(BeamError::BadRadius(idx));
    }
    Ok(SectionState {
        length,
        rot: element_rotation(d),
        e: el.material.youngs_modulus,
        g: el.material.shear_modulus(),
        kappa: el.material.shear_correction(),
    })
}

fn coeffs(s: &SectionState, radius: f64, shear: ShearModel) -> Coeffs {
    let r2 = radius * radius;
    let area = std::f64::consts::PI * r2;
    let inertia = std::f64::consts::PI * r2 * r2 / 4.0;
    let torsion_j = 2.0 * inertia;
    let l = s.length;
    let phi = match shear {
        ShearModel::Timoshenko => 12.0 * s.e * inertia / (s.kappa * s.g * area * l * l),
        ShearModel::Rigid => 0.0,
    };
    let ei = s.e * inertia;
    let denom = 1.0 + phi;
    Coeffs {
        axial: s.e * area / l,
        torsion: s.g * torsion_j / l,
        shear_f: 12.0 * ei / (l * l * l * denom),
        shear_m: 6.0 * ei / (l * l * denom),
        bend_d: (4.0 + phi) * ei / (l * denom),
        bend_o: (2.0 - phi) * ei / (l * denom),
    }
}

/// Radius derivatives of the same coefficients (chain rule through
/// A, I, J and the shear parameter Φ).
fn coeffs_dr(s: &SectionState, radius: f64, shear: ShearModel) -> Coeffs {
    let r2 = radius * radius;
    let inertia = std::f64::consts::PI * r2 * r2 / 4.0;
    let d_area = 2.0 * std::f64::consts::PI * radius;
    let d_inertia = std::f64::consts::PI * radius * r2;
    let d_torsion = 2.0 * d_inertia;
    let l = s.length;
    let (phi, d_phi) = match shear {
        // Φ = 3 E r² / (κ G L²) for a circular section.
        ShearModel::Timoshenko => (
            3.0 * s.e * r2 / (s.kappa * s.g * l * l),
            6.0 * s.e * radius / (s.kappa * s.g * l * l),
        ),
        ShearModel::Rigid => (0.0, 0.0),
    };
    let denom = 1.0 + phi;
    let ei = s.e * inertia;
    let d_ei = s.e * d_inertia;
    // d/dr of EI/(1+Φ) patterns.
    let d_over = (d_ei * denom - ei * d_phi) / (denom * denom);
    Coeffs {
        axial: s.e * d_area / l,
        torsion: s.g * d_torsion / l,
        shear_f: 12.0 * d_over / (l * l * l),
        shear_m: 6.0 * d_over / (l * l),
        bend_d: (((4.0 + phi) * d_ei + d_phi * ei) * denom - (4.0 + phi) * ei * d_phi)
            / (denom * denom)
            / l,
        bend_o: (((2.0 - phi) * d_ei - d_phi * ei) * denom - (2.0 - phi) * ei * d_phi)
            / (denom * denom)
            / l,
    }
}

/// Global-frame 12×12 stiffness of element `idx`.
pub fn element_stiffness(model: &BeamModel, idx: usize) -> Result<Matrix12> {
    let s = section_state(model, idx)?;
    let k_local = local_matrix(&coeffs(&s, model.elements[idx].radius, model.shear));
    let t = expand_rotation(&s.rot);
    Ok(t.transpose() * k_local * t)
}

/// `∂K/∂r` of element `idx` in the global frame.
pub fn element_stiffness_radius_derivative(model: &BeamModel, idx: usize) -> Result<Matrix12> {
    let s = section_state(model, idx)?;
    let k_local = local_matrix(&coeffs_dr(&s, model.elements[idx].radius, model.shear));
    let t = expand_rotation(&s.rot);
    Ok(t.transpose() * k_local * t)
}

/// Local stiffness and rotation, for stress recovery.
pub(crate) fn element_local(model: &BeamModel, idx: usize) -> Result<(Matrix12, Matrix3<f64>)> {
    let s = section_state(model, idx)?;
    let k_local = local_matrix(&coeffs(&s, model.elements[idx].radius, model.shear));
    Ok((k_local, s.rot))
}

/// Diagonal lumped mass of element `idx` (12 entries). Half the strut
/// mass to each node's translations; an isotropic rotary term keeps the
/// matrix diagonal and positive (negligible for slender struts).
pub fn element_mass_lumped(model: &BeamModel, idx: usize) -> Result<[f64; 12]> {
    let el = &model.elements[idx];
    let d = model.nodes[el.b] - model.nodes[el.a];
    let length = d.norm();
    if length == 0.0 {
        return Err(BeamError::ZeroLengthElement(idx));
    }
    let r2 = el.radius * el.radius;
    let area = std::f64::consts::PI * r2;
    let half_mass = 0.5 * el.material.density * area * length;
    let inertia = std::f64::consts::PI * r2 * r2 / 4.0;
    // Mean of the section's principal rotary inertias (J + 2I)/3 = (4/3)I.
    let rotary = 0.5 * el.material.density * length * (4.0 / 3.0) * inertia;
    let mut m = [0.0; 12];
    for node in 0..2 {
        for c in 0..3 {
            m[6 * node + c] = half_mass;
            m[6 * node + 3 + c] = rotary;
        }
    }
    Ok(m)
}
