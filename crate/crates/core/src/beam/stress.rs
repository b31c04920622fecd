//! Beam stress recovery: axial + extreme-fiber bending with torsional
//! shear folded into a von Mises estimate.

use super::element::Matrix12;
use super::{BeamModel, Result, DOF_PER_NODE};
use nalgebra::{Matrix3, SVector};

#[derive(Debug, Clone, Copy, Default)]
pub struct ElementStress {
    /// N/A, Pa (signed).
    pub axial: f64,
    /// Extreme-fiber bending stress max over both ends, Pa.
    pub bending: f64,
    /// Torsional shear at the surface, Pa.
    pub torsion_shear: f64,
    /// sqrt((|axial| + bending)² + 3 τ²) — an estimate, not a solid
    /// continuum result.
    pub von_mises: f64,
}

type LocalFn = fn(&BeamModel, usize) -> Result<(Matrix12, Matrix3<f64>)>;

pub(crate) fn element_stresses(
    model: &BeamModel,
    displacements: &[f64],
    local: LocalFn,
) -> Result<Vec<ElementStress>> {
    let mut out = Vec::with_capacity(model.elements.len());
    for idx in 0..model.elements.len() {
        let (k_local, rot) = local(model, idx)?;
        let el = &model.elements[idx];
        let mut d = SVector::<f64, 12>::zeros();
        for node in 0..2 {
            let g = if node == 0 { el.a } else { el.b } * DOF_PER_NODE;
            let t = rot
                * nalgebra::Vector3::new(
                    displacements[g],
                    displacements[g + 1],
                    displacements[g + 2],
                );
            let r = rot
                * nalgebra::Vector3::new(
                    displacements[g + 3],
                    displacements[g + 4],
                    displacements[g + 5],
                );
            for c in 0..3 {
                d[6 * node + c] = t[c];
                d[6 * node + 3 + c] = r[c];
            }
        }
        let f = k_local * d;
        let r = el.radius;
        let area = std::f64::consts::PI * r * r;
        let inertia = std::f64::consts::PI * r.powi(4) / 4.0;
        let torsion_j = 2.0 * inertia;
        let axial = f[6] / area; // end-b axial force, tension positive
        let m_a = (f[4] * f[4] + f[5] * f[5]).sqrt();
        let m_b = (f[10] * f[10] + f[11] * f[11]).sqrt();
        let bending = m_a.max(m_b) * r / inertia;
        let torque = f[9].abs();
        let torsion_shear = torque * r / torsion_j;
        let von_mises =
            ((axial.abs() + bending).powi(2) + 3.0 * torsion_shear * torsion_shear).sqrt();
        out.push(ElementStress { axial, bending, torsion_shear, von_mises });
    }
    Ok(out)
}
