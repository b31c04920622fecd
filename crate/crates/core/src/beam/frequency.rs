//! Closed-form first bending frequency of a clamped rectangular
//! cantilever, and the area-reduction scaling used to predict the
//! microstructured blade's frequency from the solid one.

use super::{BeamError, Material, Result};

/// `f = 1.875² / (2π L²) · sqrt(E I / (ρ A))` with `A = b t` and
/// `I = b t³ / 12`.
pub fn cantilever_frequency(length: f64, width: f64, thickness: f64, material: &Material) -> Result<f64> {
    if !(length > 0.0 && width > 0.0 && thickness > 0.0) {
        return Err(BeamError::BadLoadCase("cantilever dimensions must be positive".into()));
    }
    material.validate()?;
    let area = width * thickness;
    let inertia = width * thickness.powi(3) / 12.0;
    let lam = 1.875f64 * 1.875;
    Ok(lam / (2.0 * std::f64::consts::PI * length * length)
        * (material.youngs_modulus * inertia / (material.density * area)).sqrt())
}

/// Frequency after reducing the cross-section area (and hence mass) by
/// `area_reduction` while leaving the inertia unchanged:
/// `f' = f · sqrt(1 / (1 - area_reduction))`.
pub fn frequency_area_scaled(frequency: f64, area_reduction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&area_reduction) {
        return Err(BeamError::BadLoadCase(format!(
            "area reduction {area_reduction} outside [0, 1)"
        )));
    }
    Ok(frequency * (1.0 / (1.0 - area_reduction)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_blade_closed_form_is_677_hz() {
        let f = cantilever_frequency(0.090, 0.040, 0.00675, &Material::inconel_718()).unwrap();
        assert!((f - 677.0).abs() <= 1.0, "f = {f}");
    }

    #[test]
    fn quarter_frequency_at_double_length() {
        let m = Material::inconel_718();
        let f1 = cantilever_frequency(0.090, 0.040, 0.00675, &m).unwrap();
        let f2 = cantilever_frequency(0.180, 0.040, 0.00675, &m).unwrap();
        assert!((f1 / f2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn area_scaling_factor() {
        let s = frequency_area_scaled(1.0, 0.26).unwrap();
        assert!((s - 1.1625).abs() < 1e-3, "factor {s}");
        assert!((frequency_area_scaled(123.0, 0.0).unwrap() - 123.0).abs() < 1e-12);
        assert!(frequency_area_scaled(1.0, 1.0).is_err());
    }
}
