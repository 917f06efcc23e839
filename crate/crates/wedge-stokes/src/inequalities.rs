//! Audits of the classical weighted inequalities underpinning the coercivity
//! analysis: Hardy, improved Hardy on the wedge, and the optimal Poincaré
//! constant on the angular interval.
//!
//! Each audit returns the ratio (left side)/(right side × stated constant);
//! a value ≤ 1 (up to discretization tolerance) certifies the instance.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::VectorField;
use crate::norms::field_alpha_sq_scalar;
use crate::ops;
use crate::trig::TrigPoly;

/// Relative decay required of "compactly supported" surrogates at the ends
/// of the radial window.
const DECAY_FLOOR: f64 = 1e-10;

/// Hardy: ∫r^{2α}|u|² dr/r ≤ (1/α²)∫r^{2α}|r∂_r u|² dr/r, for a radial
/// profile given by samples of u and its exact logarithmic derivative on the
/// nodes `s` (uniform). Returns LHS/(RHS/α²).
pub fn hardy_ratio(s: &[f64], u: &[f64], rdr_u: &[f64], alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::InvalidArgument("hardy requires alpha != 0".into()));
    }
    if s.len() != u.len() || s.len() != rdr_u.len() || s.len() < 2 {
        return Err(Error::InvalidArgument(
            "hardy: sample arrays must share a length >= 2".into(),
        ));
    }
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if umax == 0.0 {
        return Err(Error::InvalidArgument("hardy: zero profile".into()));
    }
    if u[0].abs() > DECAY_FLOOR * umax || u[u.len() - 1].abs() > DECAY_FLOOR * umax {
        return Err(Error::Decay(format!(
            "hardy profile not decayed at the window ends: |u| = {:.3e}/{:.3e} vs max {umax:.3e}",
            u[0].abs(),
            u[u.len() - 1].abs()
        )));
    }
    let h = s[1] - s[0];
    let quad = |v: &[f64]| -> f64 {
        let n = v.len();
        v.iter()
            .enumerate()
            .map(|(i, x)| {
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                w * (2.0 * alpha * s[i]).exp() * x * x
            })
            .sum::<f64>()
            * h
    };
    let lhs = quad(u);
    let rhs = quad(rdr_u) / (alpha * alpha);
    if rhs == 0.0 {
        return Err(Error::InvalidArgument("hardy: constant profile".into()));
    }
    Ok(lhs / rhs)
}

/// Default C₀(θ) for the improved Hardy inequality. The two Poincaré
/// applications in its proof give ‖u_r/r‖ ≤ (θ/π)(‖∇u‖ + ‖u_φ/r‖) and the
/// symmetric bound, hence ‖u/r‖² ≤ 4(θ/π)²/(1 − θ/π)²·‖∇u‖², i.e.
/// C₀(θ) = 4/(π − θ)² — increasing in θ and independent of α.
pub fn default_c0(theta: f64) -> f64 {
    4.0 / ((PI - theta) * (PI - theta))
}

/// Improved Hardy: ‖u/r‖²_α ≤ C₀(θ)θ²‖∇u‖²_α for divergence-free tangent
/// fields. Returns LHS/(C₀θ²·RHS); `c0` overrides [`default_c0`].
pub fn improved_hardy_ratio(u: &VectorField, alpha: f64, c0: Option<f64>) -> Result<f64> {
    u.check_finite()?;
    let grid = &u.grid;
    let scale = u.max_abs();
    if scale == 0.0 {
        return Err(Error::InvalidArgument("improved hardy: zero field".into()));
    }
    // Preconditions: tangency on the edges and (interior) divergence-freeness.
    let na = grid.n_angular();
    for i in 0..grid.n_radial() {
        let t = u.phi[grid.idx(i, 0)].abs().max(u.phi[grid.idx(i, na - 1)].abs());
        if t > 1e-8 * scale {
            return Err(Error::Admissibility(format!(
                "improved hardy: field not tangent (|u_phi| = {t:.3e} at edge)"
            )));
        }
    }
    let div = ops::divergence(u);
    let mut div_max = 0.0f64;
    for i in 2..grid.n_radial() - 2 {
        for j in 2..na - 2 {
            div_max = div_max.max(div.at(i, j).abs() * grid.r(i));
        }
    }
    // The check differentiates the samples, so the threshold must absorb
    // the FD truncation error of smooth inputs; it only guards against
    // structurally non-solenoidal fields.
    if div_max > 1e-3 * scale {
        return Err(Error::Admissibility(format!(
            "improved hardy: field not divergence-free (scaled max {div_max:.3e})"
        )));
    }
    let theta = grid.theta;
    let c0 = c0.unwrap_or_else(|| default_c0(theta));
    let lhs = field_alpha_sq_scalar(&ops::mul_r_pow(&u.component_r(), -1.0), alpha)
        + field_alpha_sq_scalar(&ops::mul_r_pow(&u.component_phi(), -1.0), alpha);
    let g = ops::vector_gradient(u);
    let rhs = field_alpha_sq_scalar(&g.rr, alpha)
        + field_alpha_sq_scalar(&g.rphi, alpha)
        + field_alpha_sq_scalar(&g.phir, alpha)
        + field_alpha_sq_scalar(&g.phiphi, alpha);
    if rhs == 0.0 {
        return Err(Error::InvalidArgument("improved hardy: gradient vanishes".into()));
    }
    Ok(lhs / (c0 * theta * theta * rhs))
}

/// Poincaré with the optimal constant θ²/π²: requires f(0) = f(θ) = 0 or
/// zero mean. Both integrals are evaluated in closed form (the input is a
/// trig polynomial), so the equality case sin(πφ/θ) returns exactly 1.
pub fn poincare_ratio(f: &TrigPoly) -> Result<f64> {
    let theta = f.theta;
    let scale = f.max_abs_coeff();
    if scale == 0.0 {
        return Err(Error::InvalidArgument("poincare: zero profile".into()));
    }
    let vanishes = f.eval(0.0).abs() <= 1e-12 * scale && f.eval(theta).abs() <= 1e-12 * scale;
    let zero_mean = f.integral().abs() <= 1e-12 * scale * theta;
    if !vanishes && !zero_mean {
        return Err(Error::Admissibility(
            "poincare requires vanishing endpoints or zero mean".into(),
        ));
    }
    let num = f.mul(f).integral();
    let d = f.deriv();
    let den = d.mul(&d).integral();
    if den == 0.0 {
        return Err(Error::InvalidArgument("poincare: constant profile".into()));
    }
    Ok(num / (theta * theta / (PI * PI) * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{RadialProfile, SeparableScalar, SeparableVector};
    use crate::grid::{Grid, GridSpec};

    #[test]
    fn poincare_equality_for_first_eigenfunction() {
        let theta = 1.3;
        let f = TrigPoly::sin_mode(theta, 1, 1.0);
        let r = poincare_ratio(&f).unwrap();
        assert!((r - 1.0).abs() < 1e-13, "ratio {r}");
    }

    #[test]
    fn poincare_quarter_for_second_mode() {
        let theta = 0.7;
        let f = TrigPoly::sin_mode(theta, 2, 2.3);
        let r = poincare_ratio(&f).unwrap();
        assert!((r - 0.25).abs() < 1e-13, "ratio {r}");
    }

    #[test]
    fn poincare_rejects_inadmissible_profiles() {
        let theta = 1.0;
        // cos(πφ/θ): zero mean, admissible
        assert!(poincare_ratio(&TrigPoly::cos_mode(theta, 1, 1.0)).is_ok());
        // constant + first cosine: nonzero mean and nonzero endpoints
        let bad = TrigPoly::constant(theta, 1.0).add(&TrigPoly::cos_mode(theta, 1, 0.5));
        assert!(poincare_ratio(&bad).is_err());
    }

    #[test]
    fn hardy_holds_for_gaussian_bumps() {
        let p = RadialProfile::gaussian(1.0, 0.0, 1.0);
        let d = p.deriv();
        let s: Vec<f64> = (0..801).map(|i| -12.0 + i as f64 * 24.0 / 800.0).collect();
        let u: Vec<f64> = s.iter().map(|&x| p.eval(x)).collect();
        let du: Vec<f64> = s.iter().map(|&x| d.eval(x)).collect();
        for &alpha in &[0.5, -0.5, 1.3, -2.1] {
            let r = hardy_ratio(&s, &u, &du, alpha).unwrap();
            assert!(r <= 1.0 + 1e-9, "alpha {alpha}: ratio {r}");
        }
        assert!(hardy_ratio(&s, &u, &du, 0.0).is_err());
    }

    #[test]
    fn hardy_rejects_undecayed_profiles() {
        let s: Vec<f64> = (0..101).map(|i| -1.0 + i as f64 * 0.02).collect();
        let u = vec![1.0; 101];
        let du = vec![0.0; 101];
        assert!(matches!(
            hardy_ratio(&s, &u, &du, 0.5),
            Err(Error::Decay(_))
        ));
    }

    #[test]
    fn improved_hardy_holds_for_stream_fields() {
        let theta = 1.2;
        let grid = Grid::new(
            GridSpec {
                s_min: -8.0,
                s_max: 8.0,
                n_radial: 257,
                n_angular: 49,
                t_max: 20.0,
                n_modes: 65,
            },
            theta,
        )
        .unwrap();
        let psi = SeparableScalar::single(
            RadialProfile::gaussian(1.0, 0.0, 1.1),
            TrigPoly::sin_mode(theta, 1, 1.0).add(&TrigPoly::sin_mode(theta, 3, 0.5)),
        );
        let u = SeparableVector::from_stream(&psi).sample(&grid);
        let r = improved_hardy_ratio(&u, 0.4, None).unwrap();
        assert!(r <= 1.0 + 1e-6, "ratio {r}");
        // Non-tangent input is rejected.
        let bad = VectorField::from_fns(&grid, |_, _| 0.0, |s, _| (-s * s).exp());
        assert!(improved_hardy_ratio(&bad, 0.4, None).is_err());
    }
}
