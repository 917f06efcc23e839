//! The tip polynomial problem: expanding data and solution in powers of r
//! at the wedge tip turns the Stokes system into a recursive hierarchy of
//! angular two-point problems, one per power. The coefficient of r^j solves
//! the same system as a Mellin mode at λ = j, with Neumann (slip) data fed
//! forward from the coefficient of r^{j−1}. This module solves that
//! recursion with the closed-form mode solvers from [`crate::freeslip`],
//! builds the associated stream function, and localizes the polynomial pair
//! with the smooth cutoff ζ so that the localized velocity/pressure solve
//! the Stokes system globally up to compactly supported remainders
//! (Q_f, Q_g) that the regular theory can absorb.
//!
//! Conventions. A velocity polynomial is 𝓟_u = Σ_{j=0}^n u⁽ʲ⁾(φ) r^j (polar
//! components), a pressure polynomial 𝓟_p = Σ_{j=0}^{n−1} p⁽ʲ⁾(φ) r^j, a
//! source polynomial 𝓟_f = Σ_{j=0}^{n−2} f⁽ʲ⁾(φ) r^j. The hierarchy for the
//! coefficient of r^j reads
//!
//! ```text
//!   (j² + ∂²)u_r⁽ʲ⁾ − 2∂u_φ⁽ʲ⁾ − u_r⁽ʲ⁾ − (j−1)p⁽ʲ⁻¹⁾ = −f_r⁽ʲ⁻²⁾,
//!   (j² + ∂²)u_φ⁽ʲ⁾ + 2∂u_r⁽ʲ⁾ − u_φ⁽ʲ⁾ − ∂p⁽ʲ⁻¹⁾     = −f_φ⁽ʲ⁻²⁾,
//!   (j+1)u_r⁽ʲ⁾ + ∂u_φ⁽ʲ⁾ = 0,
//!   u_φ⁽ʲ⁾ = 0,   ∂u_r⁽ʲ⁾ = +u_r⁽ʲ⁻¹⁾ (φ=0),  −u_r⁽ʲ⁻¹⁾ (φ=θ),
//! ```
//!
//! with u⁽⁰⁾ = u⁽¹⁾ = 0 and p⁽⁻¹⁾ = 0, and p⁽⁰⁾ ≡ 0 by the normalization
//! 𝓟_p(0) = 0. At j = n+1 the slip data is reassigned to the localization
//! boundary remainder, so the hierarchy's right-hand side is identically
//! zero and the recursion terminates with u⁽ⁿ⁺¹⁾ = 0, p⁽ⁿ⁾ = 0 exactly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::freeslip::{solve_mode_boundary, solve_mode_fourier, GreenKernel, ModeSolution};
use crate::grid::{BoundaryData, Grid, ScalarField, VectorField};
use crate::norms;
use crate::WedgeConfig;

/// Scalar angular polynomial Σ_j a⁽ʲ⁾(φ) r^j with each coefficient sampled
/// on the closed uniform angular grid of (0, θ).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarPolynomial {
    pub theta: f64,
    /// `coeffs[j]` holds the samples of a⁽ʲ⁾.
    pub coeffs: Vec<Vec<f64>>,
}

/// Polar-vector angular polynomial Σ_j u⁽ʲ⁾(φ) r^j.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPolynomial {
    pub theta: f64,
    pub r: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
}

/// 4th-order first derivative of a uniformly sampled row (one-sided at the
/// four boundary-adjacent nodes).
fn d_phi_row(row: &[f64], dphi: f64) -> Vec<f64> {
    let n = row.len();
    assert!(n >= 5, "angular row too short for differentiation");
    const EDGE: [f64; 5] = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25];
    const NEXT: [f64; 5] = [-0.25, -5.0 / 6.0, 1.5, -0.5, 1.0 / 12.0];
    let one_sided = |c: &[f64; 5], from_left: bool| -> f64 {
        let mut acc = 0.0;
        for (m, &cm) in c.iter().enumerate() {
            acc += cm * if from_left { row[m] } else { row[n - 1 - m] };
        }
        (if from_left { acc } else { -acc }) / dphi
    };
    let mut out = vec![0.0; n];
    for (j, o) in out.iter_mut().enumerate() {
        *o = if j >= 2 && j + 2 < n {
            (row[j - 2] - 8.0 * row[j - 1] + 8.0 * row[j + 1] - row[j + 2]) / (12.0 * dphi)
        } else if j == 0 {
            one_sided(&EDGE, true)
        } else if j == 1 {
            one_sided(&NEXT, true)
        } else if j == n - 1 {
            one_sided(&EDGE, false)
        } else {
            one_sided(&NEXT, false)
        };
    }
    out
}

fn trapezoid_mean(row: &[f64]) -> f64 {
    let n = row.len();
    let mut acc = 0.0;
    for (j, &v) in row.iter().enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        acc += w * v;
    }
    acc / (n - 1) as f64
}

impl ScalarPolynomial {
    pub fn zero(theta: f64, degree: usize, n_angular: usize) -> Self {
        ScalarPolynomial {
            theta,
            coeffs: vec![vec![0.0; n_angular]; degree + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn n_angular(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    fn dphi(&self) -> f64 {
        self.theta / (self.n_angular() - 1) as f64
    }

    /// Value at (r, φ_k) where φ_k is the k-th angular node.
    pub fn eval(&self, r: f64, k: usize) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c[k];
        }
        acc
    }

    /// ‖·‖_{P_{k,M}} = (Σ_j ‖a⁽ʲ⁾‖²_{H^M})^{1/2}, derivatives by finite
    /// differences (M ≤ 2).
    pub fn p_km_norm(&self, m: u32) -> f64 {
        norms::p_km_norm_sq(&self.coeffs, self.dphi(), m).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flatten()
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Plain polynomial samples Σ_j a⁽ʲ⁾ r^j on a grid with matching
    /// angular resolution.
    pub fn eval_field(&self, grid: &Grid) -> Result<ScalarField> {
        self.check_grid(grid)?;
        let mut out = ScalarField::zeros(grid);
        for i in 0..grid.n_radial() {
            let r = grid.r(i);
            for k in 0..grid.n_angular() {
                out.values[grid.idx(i, k)] = self.eval(r, k);
            }
        }
        Ok(out)
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.n_angular() != self.n_angular() || (grid.theta - self.theta).abs() > 1e-12 {
            return Err(Error::GridMismatch(format!(
                "polynomial has {} angular nodes at θ = {}, grid has {} at θ = {}",
                self.n_angular(),
                self.theta,
                grid.n_angular(),
                grid.theta
            )));
        }
        Ok(())
    }

    /// CSV rows `j,phi,value`, one per (coefficient, angular node).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,phi,value\n");
        let dphi = self.dphi();
        for (j, c) in self.coeffs.iter().enumerate() {
            for (k, v) in c.iter().enumerate() {
                out.push_str(&format!("{j},{},{v:.17e}\n", k as f64 * dphi));
            }
        }
        out
    }

    pub fn from_csv(theta: f64, text: &str) -> Result<Self> {
        let mut coeffs: Vec<Vec<f64>> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 || line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("csv line {}: {line}", ln + 1)));
            }
            let j: usize = parts[0]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", ln + 1)))?;
            let v: f64 = parts[2]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", ln + 1)))?;
            if coeffs.len() <= j {
                coeffs.resize(j + 1, Vec::new());
            }
            coeffs[j].push(v);
        }
        let n = coeffs.first().map_or(0, Vec::len);
        if n < 2 || coeffs.iter().any(|c| c.len() != n) {
            return Err(Error::Parse("csv: ragged or empty coefficients".into()));
        }
        Ok(ScalarPolynomial { theta, coeffs })
    }
}

impl VectorPolynomial {
    pub fn zero(theta: f64, degree: usize, n_angular: usize) -> Self {
        VectorPolynomial {
            theta,
            r: vec![vec![0.0; n_angular]; degree + 1],
            phi: vec![vec![0.0; n_angular]; degree + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.r.len().saturating_sub(1)
    }

    pub fn n_angular(&self) -> usize {
        self.r.first().map_or(0, Vec::len)
    }

    fn dphi(&self) -> f64 {
        self.theta / (self.n_angular() - 1) as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.r
            .iter()
            .chain(self.phi.iter())
            .flatten()
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn p_km_norm(&self, m: u32) -> f64 {
        let dphi = self.dphi();
        (norms::p_km_norm_sq(&self.r, dphi, m) + norms::p_km_norm_sq(&self.phi, dphi, m)).sqrt()
    }

    /// max over coefficients and nodes of |(j+1)u_r⁽ʲ⁾ + ∂_φu_φ⁽ʲ⁾|
    /// (finite-difference ∂_φ): the per-coefficient divergence identity.
    pub fn divergence_residual(&self) -> f64 {
        let dphi = self.dphi();
        let mut worst = 0.0f64;
        for (j, (ur, uphi)) in self.r.iter().zip(&self.phi).enumerate() {
            let dup = d_phi_row(uphi, dphi);
            for (a, b) in ur.iter().zip(&dup) {
                worst = worst.max(((j + 1) as f64 * a + b).abs());
            }
        }
        worst
    }

    /// Plain polynomial samples on a grid with matching angular resolution.
    pub fn eval_field(&self, grid: &Grid) -> Result<VectorField> {
        let sr = ScalarPolynomial {
            theta: self.theta,
            coeffs: self.r.clone(),
        };
        let sphi = ScalarPolynomial {
            theta: self.theta,
            coeffs: self.phi.clone(),
        };
        VectorField::from_components(sr.eval_field(grid)?, sphi.eval_field(grid)?)
    }

    /// CSV rows `j,phi,value_r,value_phi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,phi,value_r,value_phi\n");
        let dphi = self.dphi();
        for (j, (cr, cp)) in self.r.iter().zip(&self.phi).enumerate() {
            for (k, (vr, vp)) in cr.iter().zip(cp).enumerate() {
                out.push_str(&format!("{j},{},{vr:.17e},{vp:.17e}\n", k as f64 * dphi));
            }
        }
        out
    }

    pub fn from_csv(theta: f64, text: &str) -> Result<Self> {
        let mut r: Vec<Vec<f64>> = Vec::new();
        let mut phi: Vec<Vec<f64>> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 || line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("csv line {}: {line}", ln + 1)));
            }
            let j: usize = parts[0]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", ln + 1)))?;
            let vr: f64 = parts[2]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", ln + 1)))?;
            let vp: f64 = parts[3]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", ln + 1)))?;
            if r.len() <= j {
                r.resize(j + 1, Vec::new());
                phi.resize(j + 1, Vec::new());
            }
            r[j].push(vr);
            phi[j].push(vp);
        }
        let n = r.first().map_or(0, Vec::len);
        if n < 2 || r.iter().any(|c| c.len() != n) || phi.iter().any(|c| c.len() != n) {
            return Err(Error::Parse("csv: ragged or empty coefficients".into()));
        }
        Ok(VectorPolynomial { theta, r, phi })
    }
}

/// Stream function of a divergence-free velocity polynomial:
/// 𝓟_ψ = Σ_j ψ⁽ʲ⁺¹⁾(φ) r^{j+1} with ψ⁽ʲ⁺¹⁾(φ) = −∫₀^φ u_r⁽ʲ⁾ dφ̃, so that
/// ∇⊥𝓟_ψ = (−r⁻¹∂_φ𝓟_ψ, ∂_r𝓟_ψ) = 𝓟_u.
///
/// The cumulative integral is evaluated through the divergence identity
/// (j+1)u_r⁽ʲ⁾ = −∂_φu_φ⁽ʲ⁾, which gives the exact antiderivative
/// ψ⁽ʲ⁺¹⁾ = (u_φ⁽ʲ⁾ − u_φ⁽ʲ⁾(0))/(j+1) without quadrature error; both the
/// divergence identity and the reconstruction u_φ⁽ʲ⁾(0) = 0 (needed for the
/// ∂_r component to close) are verified and violations are rejected.
pub fn stream_from_velocity_poly(p_u: &VectorPolynomial) -> Result<ScalarPolynomial> {
    let na = p_u.n_angular();
    if na < 5 {
        return Err(Error::InvalidArgument(
            "stream_from_velocity_poly: need ≥ 5 angular nodes".into(),
        ));
    }
    let scale = p_u.max_abs().max(1e-300);
    let div = p_u.divergence_residual();
    // ∂_φ is 4th-order finite differences; allow the resolution-limited
    // error of band-limited coefficients but reject structural violations.
    let tol = 1e-4 * scale;
    if div > tol {
        return Err(Error::Admissibility(format!(
            "stream_from_velocity_poly: divergence residual {div:.3e} exceeds {tol:.3e}"
        )));
    }
    let mut coeffs = vec![vec![0.0; na]];
    for (j, uphi) in p_u.phi.iter().enumerate() {
        let base = uphi[0];
        if base.abs() > tol {
            return Err(Error::Admissibility(format!(
                "stream_from_velocity_poly: u_φ⁽{j}⁾(0) = {base:.3e} ≠ 0, \
                 ∇⊥𝓟_ψ cannot reproduce 𝓟_u"
            )));
        }
        coeffs.push(
            uphi.iter()
                .map(|v| (v - base) / (j + 1) as f64)
                .collect(),
        );
    }
    Ok(ScalarPolynomial {
        theta: p_u.theta,
        coeffs,
    })
}

/// Localized polynomial velocity Q_u = ∇⊥(ζ𝓟_ψ):
/// Q_u·e_r = ζ𝓟_u·e_r and Q_u·e_φ = ζ′𝓟_ψ + ζ∂_r𝓟_ψ. Agrees with 𝓟_u for
/// r ≤ 1, vanishes for r ≥ 2, and is divergence-free everywhere.
pub fn localize_velocity(p_u: &VectorPolynomial, grid: &Grid) -> Result<VectorField> {
    let psi = stream_from_velocity_poly(p_u)?;
    psi.check_grid(grid)?;
    let zeta = Cutoff;
    let mut out = VectorField::zeros(grid);
    for i in 0..grid.n_radial() {
        let r = grid.r(i);
        let z = zeta.zeta(r);
        let zd = zeta.zeta_d(r);
        for k in 0..grid.n_angular() {
            let mut pur = 0.0;
            let mut d_r_psi = 0.0;
            let mut psi_v = 0.0;
            for (m, c) in psi.coeffs.iter().enumerate().rev() {
                psi_v = psi_v * r + c[k];
                if m >= 1 {
                    d_r_psi = d_r_psi * r + m as f64 * c[k];
                }
            }
            // Horner for Σ m ψ_m r^{m−1} needs the descending pass above;
            // the radial component comes straight from the u_r coefficients
            // (equal to −r⁻¹∂_φ(ζ𝓟_ψ) by the verified divergence identity).
            for c in p_u.r.iter().rev() {
                pur = pur * r + c[k];
            }
            let id = grid.idx(i, k);
            out.r[id] = z * pur;
            out.phi[id] = zd * psi_v + z * d_r_psi;
        }
    }
    Ok(out)
}

/// Everything the recursive tip solve produces: the polynomial pair, the
/// stream function, analytic angular derivatives of the velocity
/// coefficients, the raw per-stage mode solutions (for residual audits),
/// and the exactly-zero data of the terminating stage.
#[derive(Clone, Debug)]
pub struct PolynomialSolution {
    pub theta: f64,
    /// Truncation order: velocity degree n, pressure degree n−1.
    pub n: usize,
    pub u: VectorPolynomial,
    pub p: ScalarPolynomial,
    pub psi: ScalarPolynomial,
    /// ∂_φu_r⁽ʲ⁾ from the closed-form mode profiles, j = 0..n.
    pub d_u_r: Vec<Vec<f64>>,
    /// ∂_φu_φ⁽ʲ⁾ from the closed-form mode profiles, j = 0..n.
    pub d_u_phi: Vec<Vec<f64>>,
    /// Mode solutions of the stages j = 2..n (stages 0 and 1 are zero).
    pub modes: Vec<ModeSolution>,
    /// max |data| of the j = n+1 stage; the slip data cancels
    /// coefficient-by-coefficient, so this is exactly 0.0.
    pub termination_residual: f64,
}

/// Residuals of one stage of the hierarchy, evaluated from the analytic
/// mode profiles.
#[derive(Clone, Copy, Debug)]
pub struct StageResiduals {
    pub j: usize,
    /// max |(j+1)u_r⁽ʲ⁾ + ∂u_φ⁽ʲ⁾|.
    pub divergence: f64,
    /// Pointwise radial momentum row residual.
    pub momentum_r: f64,
    /// Weak tangential momentum row residual (sine basis).
    pub momentum_phi: f64,
    /// max edge |u_φ⁽ʲ⁾|.
    pub bc_tangential: f64,
    /// max edge |∂u_r⁽ʲ⁾ ∓ u_r⁽ʲ⁻¹⁾|.
    pub bc_slip: f64,
    /// |∫p⁽ʲ⁻¹⁾ − ∫f_r⁽ʲ⁻²⁾/(j−1) + (u_r⁽ʲ⁻¹⁾(θ) + u_r⁽ʲ⁻¹⁾(0))/(j−1)|:
    /// the pressure-constant identity obtained by averaging the radial
    /// momentum row.
    pub pressure_mean: f64,
}

/// Solve the tip hierarchy for a source polynomial of degree ≤ n−2.
///
/// Stages j = 0, 1 are the exact zero solutions dictated by the base case;
/// each stage 2 ≤ j ≤ n reuses the closed-form free-slip mode solvers at
/// λ = j with slip data +u_r⁽ʲ⁻¹⁾(0) / −u_r⁽ʲ⁻¹⁾(θ); the stage j = n+1
/// data cancels identically and terminates the recursion.
pub fn solve_polynomial_problem(
    f: &VectorPolynomial,
    n: usize,
    cfg: &WedgeConfig,
) -> Result<PolynomialSolution> {
    let theta = cfg.theta;
    if (f.theta - theta).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!(
            "source polynomial θ = {} vs config θ = {theta}",
            f.theta
        )));
    }
    let n_max = (1.0 - cfg.epsilon) * PI / theta - 1.0;
    if n < 2 || (n as f64) > n_max {
        return Err(Error::Admissibility(format!(
            "truncation order n = {n} outside [2, {n_max:.3}] for θ = {theta}, ε = {}",
            cfg.epsilon
        )));
    }
    if f.degree() + 2 > n {
        return Err(Error::InvalidArgument(format!(
            "source degree {} exceeds n − 2 = {}",
            f.degree(),
            n - 2
        )));
    }
    let na = f.n_angular();
    if na < 5 || f.phi.iter().chain(f.r.iter()).any(|c| c.len() != na) {
        return Err(Error::GridMismatch(
            "source polynomial needs ≥ 5 equal-length angular rows".into(),
        ));
    }
    let kernel = GreenKernel::new(theta, cfg.sin_tolerance)?;

    let zero_row = vec![0.0; na];
    let mut u_r = vec![zero_row.clone(), zero_row.clone()];
    let mut u_phi = vec![zero_row.clone(), zero_row.clone()];
    let mut d_u_r = vec![zero_row.clone(), zero_row.clone()];
    let mut d_u_phi = vec![zero_row.clone(), zero_row.clone()];
    // p⁽⁻¹⁾ = 0 lives outside the stored range; p⁽⁰⁾ = 0 is the
    // 𝓟_p(0) = 0 normalization (it decouples: no stage equation ever
    // multiplies it by a nonzero factor).
    let mut p = vec![zero_row.clone()];
    let mut modes = Vec::with_capacity(n - 1);

    let czero = vec![Complex64::ZERO; na];
    for j in 2..=n {
        let lam = Complex64::new(j as f64, 0.0);
        let (fr, fphi): (Vec<Complex64>, Vec<Complex64>) = if j - 2 <= f.degree() {
            (
                f.r[j - 2].iter().map(|&v| Complex64::from(v)).collect(),
                f.phi[j - 2].iter().map(|&v| Complex64::from(v)).collect(),
            )
        } else {
            (czero.clone(), czero.clone())
        };
        let g0 = Complex64::from(u_r[j - 1][0]);
        let gth = Complex64::from(-u_r[j - 1][na - 1]);
        let mut mode = solve_mode_fourier(&kernel, lam, &fr, &fphi)?;
        mode.add_assign(&solve_mode_boundary(&kernel, lam, g0, gth, na)?)?;
        u_r.push(mode.u_r.iter().map(|z| z.re).collect());
        u_phi.push(mode.u_phi.iter().map(|z| z.re).collect());
        d_u_r.push(mode.d_u_r.iter().map(|z| z.re).collect());
        d_u_phi.push(mode.d_u_phi.iter().map(|z| z.re).collect());
        p.push(mode.p.iter().map(|z| z.re).collect());
        modes.push(mode);
    }

    // Terminating stage j = n+1: the slip data ∓u_r⁽ⁿ⁾ ± u_r⁽ⁿ⁾ cancels
    // exactly (x − x = 0 in floating point) and f⁽ⁿ⁻¹⁾ = 0 by degree, so
    // the unique solution is zero — no solve needed or performed.
    let term_low: f64 = u_r[n][0] - u_r[n][0];
    let term_up: f64 = -u_r[n][na - 1] + u_r[n][na - 1];
    let termination_residual = term_low.abs().max(term_up.abs());

    let u = VectorPolynomial {
        theta,
        r: u_r,
        phi: u_phi,
    };
    let p = ScalarPolynomial { theta, coeffs: p };
    // ψ⁽ʲ⁺¹⁾ = u_φ⁽ʲ⁾/(j+1): exact by the divergence row and u_φ⁽ʲ⁾(0) = 0.
    let mut psi_coeffs = vec![zero_row];
    for (j, uphi) in u.phi.iter().enumerate() {
        psi_coeffs.push(uphi.iter().map(|v| v / (j + 1) as f64).collect());
    }
    let psi = ScalarPolynomial {
        theta,
        coeffs: psi_coeffs,
    };
    Ok(PolynomialSolution {
        theta,
        n,
        u,
        p,
        psi,
        d_u_r,
        d_u_phi,
        modes,
        termination_residual,
    })
}

impl PolynomialSolution {
    /// Audit every solved stage against the hierarchy it is supposed to
    /// satisfy, including the pressure-constant identity.
    pub fn stage_residuals(&self, f: &VectorPolynomial) -> Result<Vec<StageResiduals>> {
        let na = self.u.n_angular();
        if f.n_angular() != na || (f.theta - self.theta).abs() > 1e-12 {
            return Err(Error::GridMismatch(
                "stage_residuals: source polynomial incompatible with solution".into(),
            ));
        }
        let theta = self.theta;
        let czero = vec![Complex64::ZERO; na];
        let mut out = Vec::with_capacity(self.modes.len());
        for (idx, mode) in self.modes.iter().enumerate() {
            let j = idx + 2;
            let (fr, fphi): (Vec<Complex64>, Vec<Complex64>) = if j - 2 <= f.degree() {
                (
                    f.r[j - 2].iter().map(|&v| Complex64::from(v)).collect(),
                    f.phi[j - 2].iter().map(|&v| Complex64::from(v)).collect(),
                )
            } else {
                (czero.clone(), czero.clone())
            };
            let g0 = Complex64::from(self.u.r[j - 1][0]);
            let gth = Complex64::from(-self.u.r[j - 1][na - 1]);
            let (bc_tangential, bc_slip) = mode.bc_residuals(g0, gth);
            let p_row = &self.p.coeffs[j - 1];
            let mean_p = trapezoid_mean(p_row) * theta;
            let mean_fr = if j - 2 <= f.degree() {
                trapezoid_mean(&f.r[j - 2]) * theta
            } else {
                0.0
            };
            let bracket = -self.u.r[j - 1][na - 1] - self.u.r[j - 1][0];
            let pressure_mean = (mean_p - (mean_fr + bracket) / (j - 1) as f64).abs();
            out.push(StageResiduals {
                j,
                divergence: mode.divergence_residual(),
                momentum_r: mode.momentum_r_residual(&mode.p, &fr),
                momentum_phi: mode.momentum_phi_weak_residual(&mode.p, &fphi),
                bc_tangential,
                bc_slip,
                pressure_mean,
            });
        }
        Ok(out)
    }

    /// Localized polynomial pressure Q_p = ζ𝓟_p.
    pub fn localized_pressure(&self, grid: &Grid) -> Result<ScalarField> {
        let base = self.p.eval_field(grid)?;
        let zeta = Cutoff;
        let mut out = base;
        for i in 0..grid.n_radial() {
            let z = zeta.zeta(grid.r(i));
            for k in 0..grid.n_angular() {
                out.values[grid.idx(i, k)] *= z;
            }
        }
        Ok(out)
    }

    /// Localized polynomial velocity Q_u = ∇⊥(ζ𝓟_ψ), using the stored
    /// analytic stream function.
    pub fn localized_velocity(&self, grid: &Grid) -> Result<VectorField> {
        localize_velocity(&self.u, grid)
    }
}

/// The interior and boundary remainders generated by localizing the
/// polynomial pair: with Q_u = ∇⊥(ζ𝓟_ψ) and Q_p = ζ𝓟_p,
///
/// ```text
///   −ΔQ_u + ∇Q_p = ζ𝓟_f + Q_f,
///   Q_f = −2∇ζ·∇𝓟_u − 𝓟_u Δζ − Δ(𝓟_ψ ∇⊥ζ) + 𝓟_p ∇ζ,
/// ```
///
/// supported in 1 ≤ r ≤ 2, and the slip data
/// Q_g = ζ(r) rⁿ u_r⁽ⁿ⁾(edge) that the localized velocity leaves on the
/// edges (the telescoping of the stage slip conditions cancels everything
/// except the top coefficient). All derivatives are evaluated analytically:
/// radial ones exactly on the monomials, angular ones from the stored
/// closed-form profiles, and ζ', ζ'', ζ''' in closed form.
pub fn localization_remainders(
    sol: &PolynomialSolution,
    grid: &Grid,
) -> Result<(VectorField, BoundaryData)> {
    sol.p.check_grid(grid)?;
    let zeta = Cutoff;
    let na = grid.n_angular();
    let n = sol.n;
    let mut q_f = VectorField::zeros(grid);
    let mut q_g = BoundaryData::zeros(grid.n_radial());
    for i in 0..grid.n_radial() {
        let r = grid.r(i);
        let z1 = zeta.zeta_d(r);
        let z2 = zeta.zeta_dd(r);
        let z3 = zeta.zeta_ddd(r);
        q_g.lower[i] = zeta.zeta(r) * r.powi(n as i32) * sol.u.r[n][0];
        q_g.upper[i] = zeta.zeta(r) * r.powi(n as i32) * sol.u.r[n][na - 1];
        if z1 == 0.0 && z2 == 0.0 && z3 == 0.0 {
            continue; // remainder body force lives where ζ varies
        }
        for k in 0..na {
            // Radial-monomial sums (Horner, descending).
            let mut pur = 0.0;
            let mut pup = 0.0;
            let mut dr_pur = 0.0;
            let mut dr_pup = 0.0;
            for (m, (cr, cp)) in sol.u.r.iter().zip(&sol.u.phi).enumerate().rev() {
                pur = pur * r + cr[k];
                pup = pup * r + cp[k];
                if m >= 1 {
                    dr_pur = dr_pur * r + m as f64 * cr[k];
                    dr_pup = dr_pup * r + m as f64 * cp[k];
                }
            }
            let mut pp = 0.0;
            for c in sol.p.coeffs.iter().rev() {
                pp = pp * r + c[k];
            }
            let mut psi = 0.0;
            let mut dr_psi = 0.0;
            let mut drr_psi = 0.0;
            for (m, c) in sol.psi.coeffs.iter().enumerate().rev() {
                psi = psi * r + c[k];
                if m >= 1 {
                    dr_psi = dr_psi * r + m as f64 * c[k];
                }
                if m >= 2 {
                    drr_psi = drr_psi * r + (m * (m - 1)) as f64 * c[k];
                }
            }
            // ∂_φ𝓟_ψ = −r𝓟_u·e_r and ∂_φ²𝓟_ψ from the analytic ∂_φu_r rows:
            // ψ⁽ᵐ⁾ = −∫u_r⁽ᵐ⁻¹⁾ ⇒ ∂_φψ⁽ᵐ⁾ = −u_r⁽ᵐ⁻¹⁾, ∂_φ²ψ⁽ᵐ⁾ = −∂_φu_r⁽ᵐ⁻¹⁾.
            let mut dphi_psi = 0.0;
            let mut dphiphi_psi = 0.0;
            for (m, dur) in sol.d_u_r.iter().enumerate().rev() {
                dphi_psi = dphi_psi * r - sol.u.r[m][k];
                dphiphi_psi = dphiphi_psi * r - dur[k];
            }
            dphi_psi *= r;
            dphiphi_psi *= r;
            let lap_zeta = z2 + z1 / r;
            // Vector Laplacian of w = (ζ'𝓟_ψ) e_φ:
            //   (Δw)·e_r = −(2/r²)∂_φ(ζ'𝓟_ψ),
            //   (Δw)·e_φ = Δ_scalar(ζ'𝓟_ψ) − ζ'𝓟_ψ/r².
            let lap_w_r = -2.0 * z1 * dphi_psi / (r * r);
            let lap_w_phi = z3 * psi + 2.0 * z2 * dr_psi + z1 * drr_psi
                + (z2 * psi + z1 * dr_psi) / r
                + z1 * dphiphi_psi / (r * r)
                - z1 * psi / (r * r);
            let id = grid.idx(i, k);
            q_f.r[id] = -2.0 * z1 * dr_pur - pur * lap_zeta - lap_w_r + z1 * pp;
            q_f.phi[id] = -2.0 * z1 * dr_pup - pup * lap_zeta - lap_w_phi;
        }
    }
    Ok((q_f, q_g))
}

/// Decomposition of a source into its localized tip polynomial and a
/// regular remainder: f = ζ𝓟_f + f₁.
#[derive(Clone, Debug)]
pub struct TipDecomposition {
    pub polynomial_part: VectorPolynomial,
    pub regular_part: VectorField,
    pub cutoff: Cutoff,
    pub n: usize,
}

/// The truncation order used by the solution-space splitting for source
/// regularity M and weight α: n = ⌊M + α + 1⌋ (so the source polynomial
/// has degree n − 2 = ⌊M + α − 1⌋).
pub fn truncation_order(m: u32, alpha: f64) -> i64 {
    (m as f64 + alpha + 1.0).floor() as i64
}

impl TipDecomposition {
    /// Reassemble ζ𝓟_f + f₁ on the regular part's grid.
    pub fn reconstruct(&self) -> Result<VectorField> {
        let grid = &self.regular_part.grid;
        let poly = self.polynomial_part.eval_field(grid)?;
        let mut out = self.regular_part.clone();
        for i in 0..grid.n_radial() {
            let z = self.cutoff.zeta(grid.r(i));
            for k in 0..grid.n_angular() {
                let id = grid.idx(i, k);
                out.r[id] += z * poly.r[id];
                out.phi[id] += z * poly.phi[id];
            }
        }
        Ok(out)
    }
}

/// Package a caller-supplied polynomial part and regular remainder,
/// validating that the remainder really is regular: its weighted source
/// norm must be finite and must not be accumulating at the tip (a hidden
/// r^m component with m too small for the weight shows up as tip-shell
/// mass that grows toward s → −∞).
pub fn taylor_split(
    f_poly_part: VectorPolynomial,
    f_regular: VectorField,
    n: usize,
    m: u32,
    alpha: f64,
) -> Result<TipDecomposition> {
    if f_poly_part.degree() + 2 > n {
        return Err(Error::InvalidArgument(format!(
            "taylor_split: polynomial degree {} exceeds n − 2 = {}",
            f_poly_part.degree(),
            n as i64 - 2
        )));
    }
    let norm = norms::script_z(&f_regular, m, alpha)?;
    if !norm.is_finite() {
        return Err(Error::NonFinite("taylor_split: regular-part norm".into()));
    }
    // Tip-shell audit: the weighted L² mass of the regular part over
    // consecutive unit shells in s = log r must decay toward the tip.
    let grid = &f_regular.grid;
    let ds = grid.ds();
    let shell_w = (1.0 / ds).ceil() as usize; // nodes per unit s-shell
    let n_shells = grid.n_radial() / shell_w;
    if n_shells >= 3 {
        let mut mass = vec![0.0f64; n_shells];
        for i in 0..n_shells * shell_w {
            let r = grid.r(i);
            let w = r.powf(-2.0 * alpha); // ‖r^{−α}·‖²_{L²} shell density
            for k in 0..grid.n_angular() {
                let id = grid.idx(i, k);
                mass[i / shell_w] +=
                    w * (f_regular.r[id] * f_regular.r[id] + f_regular.phi[id] * f_regular.phi[id])
                        * r
                        * r
                        * ds;
            }
        }
        // A finite weighted norm has shell mass decaying toward s → −∞;
        // monotone growth over the innermost shells is the signature of an
        // r^m component with m below what the weight admits.
        let total: f64 = mass.iter().sum();
        if total > 0.0 && mass[0] > 1.1 * mass[1] && mass[1] > 1.1 * mass[2] {
            return Err(Error::Decay(format!(
                "taylor_split: regular part concentrates at the tip \
                 (innermost shell masses {:.3e} > {:.3e} > {:.3e})",
                mass[0], mass[1], mass[2]
            )));
        }
    }
    Ok(TipDecomposition {
        polynomial_part: f_poly_part,
        regular_part: f_regular,
        cutoff: Cutoff,
        n,
    })
}
