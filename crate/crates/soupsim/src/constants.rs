//! Continuum constants of the decomposition and the central-charge /
//! kappa dictionary.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstError {
    #[error("central charge must lie in (0, 1], got {0}")]
    BadCentralCharge(f64),
    #[error("kappa must lie in (8/3, 4], got {0}")]
    BadKappa(f64),
}

/// Discrete soup intensity for a given central charge.
pub fn alpha_of_c(c: f64) -> f64 {
    c / 2.0
}

/// `lambda = sqrt(pi / 8)`, the one-sided half-plane excursion intensity.
pub fn lambda() -> f64 {
    (std::f64::consts::PI / 8.0).sqrt()
}

/// The flagship excursion intensity: `beta * pi = (2 lambda)^2 / 2` with
/// `lambda^2 = pi/8`, so the pi cancels and beta = 1/4 exactly.
pub fn beta_flagship() -> f64 {
    4.0 * (1.0 / 8.0) / 2.0
}

/// `k = 1 / (2 pi)`, the occupation-density normalization.
pub fn k_constant() -> f64 {
    1.0 / (2.0 * std::f64::consts::PI)
}

/// Mass of excursions from `[-2,-1]` to `[1,2]` on the line,
/// `int_1^2 int_{-2}^{-1} (y - x)^{-2} dx dy`, by 2-d composite Simpson.
/// Closed form: `ln(9/8)`.
pub fn excursion_mass_quadrature(cells_per_axis: usize) -> f64 {
    let n = cells_per_axis.max(2) & !1; // even panel count
    let hx = 1.0 / n as f64;
    let hy = 1.0 / n as f64;
    let weight = |i: usize| -> f64 {
        if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let mut total = 0.0;
    for iy in 0..=n {
        let y = 1.0 + iy as f64 * hy;
        let mut row = 0.0;
        for ix in 0..=n {
            let x = -2.0 + ix as f64 * hx;
            row += weight(ix) * (y - x).powi(-2);
        }
        total += weight(iy) * row;
    }
    total * hx * hy / 9.0
}

/// Probability that independent half-line excursion sets avoid each other:
/// `exp(-mass) = 8/9`.
pub fn avoidance_probability(cells_per_axis: usize) -> f64 {
    (-excursion_mass_quadrature(cells_per_axis)).exp()
}

/// `c(kappa) = (3 kappa - 8)(6 - kappa) / (2 kappa)`.
pub fn c_of_kappa(kappa: f64) -> Result<f64, ConstError> {
    if !(kappa > 8.0 / 3.0 && kappa <= 4.0) {
        return Err(ConstError::BadKappa(kappa));
    }
    Ok((3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa))
}

/// Inverse on the branch `kappa in (8/3, 4]`: the smaller root of
/// `3 kappa^2 - (26 - 2c) kappa + 48 = 0`.
pub fn kappa_of_c(c: f64) -> Result<f64, ConstError> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(ConstError::BadCentralCharge(c));
    }
    let b = 26.0 - 2.0 * c;
    let disc = (b * b - 576.0).max(0.0);
    Ok((b - disc.sqrt()) / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_matches_closed_form() {
        // inner integral 1/(y+1) - 1/(y+2); outer gives ln(9/8)
        let target = (9.0f64 / 8.0).ln();
        assert!((excursion_mass_quadrature(256) - target).abs() < 1e-6);
        assert!((avoidance_probability(256) - 8.0 / 9.0).abs() < 1e-6);
    }

    #[test]
    fn symbolic_constants() {
        assert_eq!(beta_flagship(), 0.25);
        assert!((lambda() - (std::f64::consts::PI / 8.0).sqrt()).abs() < 1e-15);
        assert!((k_constant() * 2.0 * std::f64::consts::PI - 1.0).abs() < 1e-15);
        assert_eq!(alpha_of_c(1.0), 0.5);
    }

    #[test]
    fn kappa_dictionary() {
        assert_eq!(kappa_of_c(1.0).unwrap(), 4.0);
        assert_eq!(kappa_of_c(0.5).unwrap(), 3.0);
        // c -> 0 limit of the branch is 8/3
        assert!((kappa_of_c(1e-12).unwrap() - 8.0 / 3.0).abs() < 1e-9);
        assert!(kappa_of_c(0.0).is_err());
        assert!(kappa_of_c(1.5).is_err());
        assert!(c_of_kappa(2.0).is_err());
        // the (3k-8) factor vanishes at the branch edge
        assert!(c_of_kappa(8.0 / 3.0 + 1e-12).unwrap() < 1e-10);
    }

    #[test]
    fn kappa_round_trip() {
        for i in 1..=100 {
            let c = i as f64 / 100.0;
            let k = kappa_of_c(c).unwrap();
            assert!((c_of_kappa(k).unwrap() - c).abs() < 1e-12, "c = {c}");
        }
    }
}
