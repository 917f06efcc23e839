//! The variational machinery as computable objects: the bilinear forms
//! B₁, B₂, B₃, the boundary pairing, coercivity/boundedness audits, the
//! pressure recovery map, and the test-function problem.
//!
//! The forms arise from testing the projected momentum equation
//! −ℙΔu = ℙf against r^{−2α}v_test with
//!
//!   v_test = v − |α|θ³ (r∂_r)²v − c₃|α|θ³ r²Δv,
//!
//! and every solution of the projected Navier-slip system satisfies
//!
//!   B(u, v) = (ℙf, r^{−2α}v_test)_{L²} + ⟨g, v_r⟩_α,
//!   B = B₁ + |α|θ³ B₂ + c₃|α|θ³ B₃,
//!
//! for all divergence-free tangent test fields v. All integrals are
//! tensor-product trapezoid sums in (s, φ); the commutator entries
//! [ℙ, r^{−2α}]v and [ℙ, Δ]u come from [`crate::helmholtz::commutator`].
//! This module is the solver's auditor: the solver of record is the
//! Green's-function path plus the fixed point, and the forms here check
//! its output against the coercive variational formulation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{RadialProfile, SeparableScalar, SeparableVector};
use crate::config::WedgeConfig;
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Grid, ScalarField, VectorField};
use crate::helmholtz::{self, CommutatorKind};
use crate::mellin::{self, MellinLine, MellinScalar};
use crate::norms;
use crate::ops::{self, VectorGradient};
use crate::trig::TrigPoly;

/// Constants of the variational formulation. `c3` weighs the vorticity
/// form B₃ inside B; the paper only asserts existence of a small-enough
/// value, so it is a recorded input (default 0.1) with a sweep utility.
/// `gamma` is the Mellin output line used for the embedded projections
/// and commutators.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct VariationalConfig {
    pub c3: f64,
    pub gamma: f64,
    /// Relative curl tolerance for [`pressure_recover`].
    pub curl_tol: f64,
    /// Relative edge-tangency tolerance on the form arguments.
    pub tangency_tol: f64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        VariationalConfig {
            c3: 0.1,
            gamma: 0.1,
            curl_tol: 5e-2,
            tangency_tol: 1e-8,
        }
    }
}

impl VariationalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c3 > 0.0 && self.c3.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "c3 must be positive, got {}",
                self.c3
            )));
        }
        Ok(())
    }

    /// The weight |α|θ³ multiplying B₂ and (with c₃) B₃.
    pub fn scale(&self, alpha: f64, theta: f64) -> f64 {
        alpha.abs() * theta.powi(3)
    }
}

/// Which bilinear form [`bilinear`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilinearKind {
    B1,
    B2,
    B3,
    BTotal,
}

/// Per-term values of one evaluation B(u,v), in the order the forms are
/// derived (T_j^{(1)}, T_j^{(2)}, T_j^{(3)}).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TermBreakdown {
    pub b1: [f64; 5],
    pub b2: [f64; 6],
    pub b3: [f64; 2],
    pub alpha: f64,
    pub theta: f64,
    pub c3: f64,
}

impl TermBreakdown {
    pub fn b1_total(&self) -> f64 {
        self.b1.iter().sum()
    }

    pub fn b2_total(&self) -> f64 {
        self.b2.iter().sum()
    }

    pub fn b3_total(&self) -> f64 {
        self.b3.iter().sum()
    }

    /// B = B₁ + |α|θ³B₂ + c₃|α|θ³B₃ at the stored c₃.
    pub fn total(&self) -> f64 {
        self.total_at(self.c3)
    }

    /// The same combination re-weighted at a different c₃ (sweeps reuse
    /// one evaluation of the parts).
    pub fn total_at(&self, c3: f64) -> f64 {
        let scale = self.alpha.abs() * self.theta.powi(3);
        self.b1_total() + scale * self.b2_total() + c3 * scale * self.b3_total()
    }

    /// Largest |T| across all terms (the natural scale for residuals).
    pub fn max_term_abs(&self) -> f64 {
        let scale = self.alpha.abs() * self.theta.powi(3);
        let m1 = self.b1.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let m2 = self.b2.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let m3 = self.b3.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        m1.max(scale * m2).max(self.c3 * scale * m3)
    }
}

// ---------------------------------------------------------------------------
// Quadrature helpers. Volume element dx = r dr dφ = e^{2s} ds dφ; a ray of
// the boundary carries ds_arc = dr = e^{s} ds.
// ---------------------------------------------------------------------------

#[inline]
fn tw(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5
    } else {
        1.0
    }
}

/// ∫_Ω r^{r_pow} (Σ_k a_k b_k) dx by trapezoid.
fn ip_slices(pairs: &[(&[f64], &[f64])], grid: &Grid, r_pow: f64) -> f64 {
    let (nr, na) = (grid.n_radial(), grid.n_angular());
    let gamma = 2.0 + r_pow;
    let mut sum = 0.0;
    for i in 0..nr {
        let ws = tw(i, nr) * (gamma * grid.s(i)).exp();
        let mut row = 0.0;
        for j in 0..na {
            let idx = grid.idx(i, j);
            let mut v = 0.0;
            for (a, b) in pairs {
                v += a[idx] * b[idx];
            }
            row += tw(j, na) * v;
        }
        sum += ws * row;
    }
    sum * grid.ds() * grid.dphi()
}

/// ∫_Ω r^{r_pow} a·b dx for vector fields.
fn ip_vec(a: &VectorField, b: &VectorField, r_pow: f64) -> f64 {
    ip_slices(&[(&a.r, &b.r), (&a.phi, &b.phi)], &a.grid, r_pow)
}

/// ∫_Ω r^{r_pow} (∇a):(∇b) dx (Frobenius pairing of polar gradients).
fn ip_grad(a: &VectorGradient, b: &VectorGradient, r_pow: f64) -> f64 {
    ip_slices(
        &[
            (&a.rr.values, &b.rr.values),
            (&a.rphi.values, &b.rphi.values),
            (&a.phir.values, &b.phir.values),
            (&a.phiphi.values, &b.phiphi.values),
        ],
        &a.rr.grid,
        r_pow,
    )
}

/// ∫_Ω r^{r_pow} f dx for a plain integrand.
fn integral_scalar(f: &ScalarField, r_pow: f64) -> f64 {
    let ones = vec![1.0; f.values.len()];
    ip_slices(&[(&f.values, &ones)], &f.grid, r_pow)
}

/// ∫_{∂Ω'} r^{r_pow} a b ds over both edges from per-edge samples.
fn edge_ip(
    a_low: &[f64],
    a_up: &[f64],
    b_low: &[f64],
    b_up: &[f64],
    grid: &Grid,
    r_pow: f64,
) -> f64 {
    let nr = grid.n_radial();
    let gamma = 1.0 + r_pow;
    let mut sum = 0.0;
    for i in 0..nr {
        let w = tw(i, nr) * (gamma * grid.s(i)).exp();
        sum += w * (a_low[i] * b_low[i] + a_up[i] * b_up[i]);
    }
    sum * grid.ds()
}

fn lower_trace(f: &ScalarField) -> Vec<f64> {
    let g = &f.grid;
    (0..g.n_radial()).map(|i| f.at(i, 0)).collect()
}

fn upper_trace(f: &ScalarField) -> Vec<f64> {
    let g = &f.grid;
    let na = g.n_angular();
    (0..g.n_radial()).map(|i| f.at(i, na - 1)).collect()
}

/// r∂_r applied componentwise (the polar basis is r-independent).
fn rdr_vec(u: &VectorField) -> VectorField {
    VectorField {
        grid: u.grid.clone(),
        r: ops::d_s(&u.component_r()).values,
        phi: ops::d_s(&u.component_phi()).values,
    }
}

/// ∂_r applied componentwise.
fn dr_vec(u: &VectorField) -> VectorField {
    ops::mul_r_pow_vec(&rdr_vec(u), -1.0)
}

/// Edge-tangency guard: the forms are derived for tangent fields.
fn check_tangent(u: &VectorField, label: &str, tol: f64) -> Result<()> {
    let grid = &u.grid;
    let na = grid.n_angular();
    let mut edge = 0.0f64;
    for i in 0..grid.n_radial() {
        edge = edge
            .max(u.phi[grid.idx(i, 0)].abs())
            .max(u.phi[grid.idx(i, na - 1)].abs());
    }
    if edge > tol * (1.0 + u.max_abs()) {
        return Err(Error::Admissibility(format!(
            "{label}: edge tangential component {edge:.3e} exceeds tolerance"
        )));
    }
    Ok(())
}

/// −? the common commutator coupling ∫ r^{−2}∂_φ((∂_φu_r)c_r) dx, used by
/// T₄^{(1)} (with a minus) and T₅^{(2)} (with a plus).
fn angular_coupling(ur: &ScalarField, c_r: &ScalarField) -> f64 {
    let dphi_ur = ops::d_phi(ur);
    let grid = ur.grid.clone();
    let product = ScalarField {
        grid: grid.clone(),
        values: dphi_ur
            .values
            .iter()
            .zip(c_r.values.iter())
            .map(|(a, b)| a * b)
            .collect(),
    };
    integral_scalar(&ops::d_phi(&product), -2.0)
}

fn b1_terms(
    u: &VectorField,
    v: &VectorField,
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<[f64; 5]> {
    let grid = &u.grid;
    let ur = u.component_r();
    let vr = v.component_r();
    let t1 = edge_ip(
        &lower_trace(&vr),
        &upper_trace(&vr),
        &lower_trace(&ur),
        &upper_trace(&ur),
        grid,
        -2.0 * alpha,
    );
    let gu = ops::vector_gradient(u);
    let gv = ops::vector_gradient(v);
    let t2 = ip_grad(&gv, &gu, -2.0 * alpha);
    let t3 = -2.0 * alpha * ip_vec(v, &dr_vec(u), -2.0 * alpha - 1.0);
    let cv = helmholtz::commutator(CommutatorKind::Weight, v, alpha, vcfg.gamma, cfg)?;
    let t4 = -angular_coupling(&ur, &cv.component_r());
    let t5 = ip_grad(&ops::vector_gradient(&cv), &gu, 0.0);
    Ok([t1, t2, t3, t4, t5])
}

fn b2_terms(
    u: &VectorField,
    v: &VectorField,
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<[f64; 6]> {
    let grid = &u.grid;
    let ur = u.component_r();
    let rdr_u = rdr_vec(u);
    let rdr_v = rdr_vec(v);
    let v2 = rdr_vec(&rdr_v);
    // (r∂_r − 2α + 1)u_r on the edges.
    let b_field = ops::d_s(&ur)
        .axpy(1.0 - 2.0 * alpha, &ur)
        .expect("same grid");
    let rdr_vr = rdr_v.component_r();
    let t1 = edge_ip(
        &lower_trace(&rdr_vr),
        &upper_trace(&rdr_vr),
        &lower_trace(&b_field),
        &upper_trace(&b_field),
        grid,
        -2.0 * alpha,
    );
    let g_rdr_u = ops::vector_gradient(&rdr_u);
    let g_rdr_v = ops::vector_gradient(&rdr_v);
    let gu = ops::vector_gradient(u);
    let t2 = ip_grad(&g_rdr_v, &g_rdr_u, -2.0 * alpha);
    let t3 = -2.0 * alpha * ip_grad(&g_rdr_v, &gu, -2.0 * alpha);
    let t4 = 2.0 * alpha * ip_vec(&v2, &dr_vec(u), -2.0 * alpha - 1.0);
    let cv2 = helmholtz::commutator(CommutatorKind::Weight, &v2, alpha, vcfg.gamma, cfg)?;
    let t5 = angular_coupling(&ur, &cv2.component_r());
    let t6 = -ip_grad(&ops::vector_gradient(&cv2), &gu, 0.0);
    Ok([t1, t2, t3, t4, t5, t6])
}

fn b3_terms(
    u: &VectorField,
    v: &VectorField,
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<[f64; 2]> {
    let lap_u = ops::laplacian_vector(u);
    let lap_v = ops::laplacian_vector(v);
    let t1 = ip_vec(&lap_u, &lap_v, 2.0 - 2.0 * alpha);
    let cu = helmholtz::commutator(CommutatorKind::Laplace, u, alpha, vcfg.gamma, cfg)?;
    let t2 = ip_vec(&cu, &lap_v, 2.0 - 2.0 * alpha);
    Ok([t1, t2])
}

/// All T-terms of B(u,v) in one pass (three commutator solves).
pub fn bilinear_breakdown(
    u: &VectorField,
    v: &VectorField,
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<TermBreakdown> {
    vcfg.validate()?;
    u.grid.assert_same(&v.grid)?;
    check_tangent(u, "bilinear u", vcfg.tangency_tol)?;
    check_tangent(v, "bilinear v", vcfg.tangency_tol)?;
    Ok(TermBreakdown {
        b1: b1_terms(u, v, alpha, cfg, vcfg)?,
        b2: b2_terms(u, v, alpha, cfg, vcfg)?,
        b3: b3_terms(u, v, alpha, cfg, vcfg)?,
        alpha,
        theta: u.grid.theta,
        c3: vcfg.c3,
    })
}

/// One bilinear form, or the weighted total B.
pub fn bilinear(
    kind: BilinearKind,
    u: &VectorField,
    v: &VectorField,
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<f64> {
    vcfg.validate()?;
    u.grid.assert_same(&v.grid)?;
    check_tangent(u, "bilinear u", vcfg.tangency_tol)?;
    check_tangent(v, "bilinear v", vcfg.tangency_tol)?;
    Ok(match kind {
        BilinearKind::B1 => b1_terms(u, v, alpha, cfg, vcfg)?.iter().sum(),
        BilinearKind::B2 => b2_terms(u, v, alpha, cfg, vcfg)?.iter().sum(),
        BilinearKind::B3 => b3_terms(u, v, alpha, cfg, vcfg)?.iter().sum(),
        BilinearKind::BTotal => bilinear_breakdown(u, v, alpha, cfg, vcfg)?.total(),
    })
}

/// ⟨g, v_r⟩_α = ∫_∂ r^{−2α} g v_r ds
///            + |α|θ³ ∫_∂ r^{−2α}((r∂_r − 2α + 1)g)(r∂_r v_r) ds.
pub fn pairing_g(g: &BoundaryData, v: &VectorField, alpha: f64) -> Result<f64> {
    let grid = &v.grid;
    g.check_len(grid.n_radial())?;
    let vr = v.component_r();
    let vr_low = lower_trace(&vr);
    let vr_up = upper_trace(&vr);
    let term1 = edge_ip(&g.lower, &g.upper, &vr_low, &vr_up, grid, -2.0 * alpha);

    let ds = grid.ds();
    let mut dg_low = vec![0.0; g.lower.len()];
    let mut dg_up = vec![0.0; g.upper.len()];
    ops::diff1_line(&g.lower, ds, &mut dg_low);
    ops::diff1_line(&g.upper, ds, &mut dg_up);
    let c = 1.0 - 2.0 * alpha;
    for i in 0..dg_low.len() {
        dg_low[i] += c * g.lower[i];
        dg_up[i] += c * g.upper[i];
    }
    let rdr_vr = ops::d_s(&vr);
    let term2 = edge_ip(
        &dg_low,
        &dg_up,
        &lower_trace(&rdr_vr),
        &upper_trace(&rdr_vr),
        grid,
        -2.0 * alpha,
    );
    let scale = alpha.abs() * grid.theta.powi(3);
    Ok(term1 + scale * term2)
}

/// v_test = v − |α|θ³(r∂_r)²v − c₃|α|θ³r²Δv.
pub fn test_function(v: &VectorField, alpha: f64, vcfg: &VariationalConfig) -> VectorField {
    let scale = vcfg.scale(alpha, v.grid.theta);
    let v2 = rdr_vec(&rdr_vec(v));
    let r2_lap = ops::mul_r_pow_vec(&ops::laplacian_vector(v), 2.0);
    v.axpy(-scale, &v2)
        .and_then(|w| w.axpy(-vcfg.c3 * scale, &r2_lap))
        .expect("same grid")
}

/// Max defect of the variational identity
/// B(u,v) − (ℙf, r^{−2α}v_test)_{L²} − ⟨g, v_r⟩_α over the sample fields.
pub fn variational_residual(
    u: &VectorField,
    f: &VectorField,
    g: &BoundaryData,
    v_samples: &[VectorField],
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<f64> {
    vcfg.validate()?;
    let pf = helmholtz::project(f, vcfg.gamma, cfg)?;
    let residuals: Vec<Result<f64>> = v_samples
        .par_iter()
        .map(|v| {
            let b = bilinear(BilinearKind::BTotal, u, v, alpha, cfg, vcfg)?;
            let vt = test_function(v, alpha, vcfg);
            let rhs1 = ip_vec(&pf, &vt, -2.0 * alpha);
            let rhs2 = pairing_g(g, v, alpha)?;
            Ok((b - rhs1 - rhs2).abs())
        })
        .collect();
    let mut max = 0.0f64;
    for r in residuals {
        max = max.max(r?);
    }
    Ok(max)
}

/// The fixed test-field basis for audits: ∇⊥(radial bump × sin(kπφ/θ)),
/// k = 1..5, Gaussian radial bumps centered at s = ∓0.6 — ten
/// divergence-free tangent fields with exactly sampled components.
pub fn default_test_fields(grid: &Grid) -> Vec<VectorField> {
    let mut fields = Vec::with_capacity(10);
    for &center in &[-0.6, 0.6] {
        for k in 1..=5 {
            let psi = SeparableScalar::single(
                RadialProfile::gaussian(1.0, center, 0.7),
                TrigPoly::sin_mode(grid.theta, k, 1.0),
            );
            fields.push(SeparableVector::from_stream(&psi).sample(grid));
        }
    }
    fields
}

/// Random divergence-free tangent fields (stream functions with seeded
/// random sine content) for the coercivity/boundedness audits.
pub fn random_stream_fields(grid: &Grid, count: usize, seed: u64) -> Vec<VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut psi = SeparableScalar::single(
                RadialProfile::gaussian(
                    rng.gen_range(0.5..1.5),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.5..1.0),
                ),
                TrigPoly::sin_mode(grid.theta, 1, rng.gen_range(-1.0..1.0)),
            );
            for k in 2..=4 {
                psi = psi.add(&SeparableScalar::single(
                    RadialProfile::gaussian(
                        rng.gen_range(0.3..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.5..1.0),
                    ),
                    TrigPoly::sin_mode(grid.theta, k, rng.gen_range(-0.6..0.6)),
                ));
            }
            SeparableVector::from_stream(&psi).sample(grid)
        })
        .collect()
}

/// One diagonal sample of the coercivity audit.
#[derive(Clone, Debug, Serialize)]
pub struct CoercivitySample {
    pub b_total: f64,
    pub x_norm_sq: f64,
    pub ratio: f64,
    pub terms: TermBreakdown,
}

/// Coercivity audit: B(u,u)/‖u‖²_𝔛 over the supplied fields.
#[derive(Clone, Debug, Serialize)]
pub struct CoercivityReport {
    pub alpha: f64,
    pub theta: f64,
    pub c3: f64,
    pub samples: Vec<CoercivitySample>,
    pub min_ratio: f64,
}

pub fn coercivity_audit(
    fields: &[VectorField],
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<CoercivityReport> {
    if fields.is_empty() {
        return Err(Error::InvalidArgument("coercivity audit needs fields".into()));
    }
    let samples: Vec<Result<CoercivitySample>> = fields
        .par_iter()
        .map(|u| {
            let terms = bilinear_breakdown(u, u, alpha, cfg, vcfg)?;
            let b_total = terms.total();
            let x_norm_sq = norms::frak_x_sq(u, alpha)?;
            if x_norm_sq <= 0.0 {
                return Err(Error::InvalidArgument(
                    "coercivity sample has vanishing X-norm".into(),
                ));
            }
            Ok(CoercivitySample {
                b_total,
                x_norm_sq,
                ratio: b_total / x_norm_sq,
                terms,
            })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let min_ratio = samples.iter().fold(f64::INFINITY, |a, s| a.min(s.ratio));
    Ok(CoercivityReport {
        alpha,
        theta: cfg.theta,
        c3: vcfg.c3,
        samples,
        min_ratio,
    })
}

/// Boundedness audit: max |B(u,v)|/(‖u‖_𝔛‖v‖_𝔛) over the field pairs.
pub fn boundedness_audit(
    pairs: &[(VectorField, VectorField)],
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<f64> {
    let ratios: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|(u, v)| {
            let b = bilinear(BilinearKind::BTotal, u, v, alpha, cfg, vcfg)?;
            let nu = norms::frak_x_sq(u, alpha)?.sqrt();
            let nv = norms::frak_x_sq(v, alpha)?.sqrt();
            Ok(b.abs() / (nu * nv))
        })
        .collect();
    let mut max = 0.0f64;
    for r in ratios {
        max = max.max(r?);
    }
    Ok(max)
}

/// One row of the c₃ sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepEntry {
    pub c3: f64,
    pub min_coercivity_ratio: f64,
}

/// Audit report: per-term values, observed constants, and the c₃ sweep.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    pub c3: f64,
    pub coercivity: CoercivityReport,
    pub max_boundedness_ratio: f64,
    pub sweep: Vec<SweepEntry>,
}

/// Run the full audit on seeded random stream fields: coercivity on the
/// diagonal, boundedness on consecutive pairs, and a c₃ sweep that reuses
/// the evaluated term breakdowns.
pub fn run_audit(
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
    c3_values: &[f64],
    n_fields: usize,
    seed: u64,
) -> Result<AuditReport> {
    vcfg.validate()?;
    let grid = Grid::new(cfg.grid.clone(), cfg.theta)?;
    let fields = random_stream_fields(&grid, n_fields, seed);
    let coercivity = coercivity_audit(&fields, alpha, cfg, vcfg)?;
    let pairs: Vec<(VectorField, VectorField)> = fields
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    let max_boundedness_ratio = boundedness_audit(&pairs, alpha, cfg, vcfg)?;
    let sweep = c3_values
        .iter()
        .map(|&c3| {
            let min = coercivity
                .samples
                .iter()
                .map(|s| s.terms.total_at(c3) / s.x_norm_sq)
                .fold(f64::INFINITY, f64::min);
            SweepEntry {
                c3,
                min_coercivity_ratio: min,
            }
        })
        .collect();
    Ok(AuditReport {
        alpha,
        theta: cfg.theta,
        gamma: vcfg.gamma,
        c3: vcfg.c3,
        coercivity,
        max_boundedness_ratio,
        sweep,
    })
}

/// Recover the pressure of the projected system from
/// ∇p = (I − ℙ)(Δu + f): project, then integrate the gradient field along
/// the lower edge and up each angular column from the reference node
/// (s_min, 0), where p is anchored at zero. The curl of the recovered
/// gradient must vanish within `curl_tol` (path independence); a larger
/// curl signals that u is not a solution for this f.
pub fn pressure_recover(
    u: &VectorField,
    f: &VectorField,
    gamma: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<ScalarField> {
    u.grid.assert_same(&f.grid)?;
    let h = ops::laplacian_vector(u).axpy(1.0, f)?;
    let ph = helmholtz::project(&h, gamma, cfg)?;
    let grad = h.axpy(-1.0, &ph)?;
    let grid = &u.grid;
    let scale = grad.max_abs();
    if scale <= 1e-13 * (1.0 + h.max_abs()) {
        // ℙ(Δu + f) = Δu + f: the pressure is constant.
        return Ok(ScalarField::zeros(grid));
    }
    // Path-independence: r·curl(∇p) = (∂_s + 1)(∇p)_φ − ∂_φ(∇p)_r ≈ 0.
    let r_curl = ops::mul_r_pow(&ops::curl(&grad), 1.0);
    let rel_curl = r_curl.max_abs() / scale;
    if rel_curl > vcfg.curl_tol {
        return Err(Error::Convergence(format!(
            "pressure gradient is not curl-free (relative curl {rel_curl:.3e}); \
             u does not solve the projected system for this f"
        )));
    }
    let (nr, na) = (grid.n_radial(), grid.n_angular());
    let mut p = ScalarField::zeros(grid);
    // ∂_s p = r (∇p)_r along the lower edge.
    let ds = grid.ds();
    let mut acc = 0.0;
    let mut prev = grid.r(0) * grad.r[grid.idx(0, 0)];
    p.values[grid.idx(0, 0)] = 0.0;
    for i in 1..nr {
        let cur = grid.r(i) * grad.r[grid.idx(i, 0)];
        acc += 0.5 * ds * (prev + cur);
        p.values[grid.idx(i, 0)] = acc;
        prev = cur;
    }
    // ∂_φ p = r (∇p)_φ up each angular column.
    let dphi = grid.dphi();
    for i in 0..nr {
        let r = grid.r(i);
        let mut acc = p.values[grid.idx(i, 0)];
        let mut prev = r * grad.phi[grid.idx(i, 0)];
        for j in 1..na {
            let cur = r * grad.phi[grid.idx(i, j)];
            acc += 0.5 * dphi * (prev + cur);
            p.values[grid.idx(i, j)] = acc;
            prev = cur;
        }
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// The test-function problem.
// ---------------------------------------------------------------------------

/// Coefficients a₁, a₂, a₃ of the fourth-order mode equation
/// a₁∂_φ⁴v̂_φ + a₂∂_φ²v̂_φ + a₃v̂_φ = (λ+1)[∂_φŵ_r − (λ−2α+1)ŵ_φ](λ−2α)
/// obtained by eliminating v̂_r and p̂ from the Mellin form of the
/// test-function problem.
pub fn mode_coefficients(
    lambda: Complex64,
    alpha: f64,
    theta: f64,
    c3: f64,
) -> (Complex64, Complex64, Complex64) {
    let s = alpha.abs() * theta.powi(3);
    let a1 = Complex64::new(c3 * s, 0.0);
    let l2 = lambda * lambda;
    let a2 = c3
        * s
        * ((lambda + 1.0) * (lambda + 1.0) + (lambda - 1.0) * (lambda - 2.0 * alpha + 1.0))
        + s * l2
        - 1.0;
    let a3 = (lambda - 2.0 * alpha + 1.0) * (lambda + 1.0) * (c3 * s * (l2 - 1.0) + s * l2 - 1.0);
    (a1, a2, a3)
}

/// Complex first derivative along a uniform line (stencils of
/// [`ops::d_s`]: fourth order interior, second order near the ends).
fn diff1_line_c(f: &[Complex64], h: f64, out: &mut [Complex64]) {
    let n = f.len();
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[1] = (f[2] - f[0]) / (2.0 * h);
    for i in 2..n - 2 {
        out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    }
    out[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
}

/// Complex second derivative along a uniform line.
fn diff2_line_c(f: &[Complex64], h: f64, out: &mut [Complex64]) {
    let n = f.len();
    let h2 = h * h;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[1] = (f[0] - 2.0 * f[1] + f[2]) / h2;
    for i in 2..n - 2 {
        out[i] =
            (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h2);
    }
    out[n - 2] = (f[n - 3] - 2.0 * f[n - 2] + f[n - 1]) / h2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
}

/// Cubic Lagrange refinement of a row by integer factor `r` (4-point
/// local interpolation; clamped windows at the ends).
fn cubic_refine(row: &[Complex64], r: usize) -> Vec<Complex64> {
    let n = row.len();
    let nf = r * (n - 1) + 1;
    let mut out = vec![Complex64::ZERO; nf];
    for jf in 0..nf {
        if jf % r == 0 {
            out[jf] = row[jf / r];
            continue;
        }
        let x = jf as f64 / r as f64;
        let base = (x.floor() as usize).clamp(1, n - 3) - 1;
        let mut v = Complex64::ZERO;
        for (k, &fk) in row[base..base + 4].iter().enumerate() {
            let xk = (base + k) as f64;
            let mut l = 1.0;
            for m in 0..4 {
                if m != k {
                    let xm = (base + m) as f64;
                    l *= (x - xm) / (xk - xm);
                }
            }
            v += l * fk;
        }
        out[jf] = v;
    }
    out
}

/// Banded complex solve (lower/upper bandwidth 2, no pivoting; the
/// principal part a₁∂_φ⁴ keeps elimination stable for the clamped rows).
/// `band[i][d]` holds column i + d − 2.
fn solve_banded(band: &mut [[Complex64; 5]], rhs: &mut [Complex64]) -> Result<()> {
    let n = rhs.len();
    let scale = band
        .iter()
        .flatten()
        .fold(0.0f64, |a, z| a.max(z.norm()));
    for k in 0..n {
        let piv = band[k][2];
        if piv.norm() < 1e-13 * scale {
            return Err(Error::Convergence(
                "test-function collocation matrix near-singular; |αθ| too large for \
                 the coercive regime"
                    .into(),
            ));
        }
        for i in k + 1..(k + 3).min(n) {
            let d = 2 + k - i; // k − i ∈ {−1, −2}
            let m = band[i][d] / piv;
            if m == Complex64::ZERO {
                continue;
            }
            band[i][d] = Complex64::ZERO;
            for c in k + 1..(k + 3).min(n) {
                let t = m * band[k][2 + c - k];
                band[i][2 + c - i] -= t;
            }
            let t = m * rhs[k];
            rhs[i] -= t;
        }
    }
    for i in (0..n).rev() {
        let mut v = rhs[i];
        for c in i + 1..(i + 3).min(n) {
            v -= band[i][2 + c - i] * rhs[c];
        }
        rhs[i] = v / band[i][2];
    }
    Ok(())
}

/// Solve the test-function problem
///
///   r^{−2α}(v − |α|θ³(r∂_r)²v − c₃|α|θ³r²Δv) + ∇p = w,  div v = 0,
///   v = 0 on ∂Ω,
///
/// for divergence-free tangent w: per Mellin mode λ = α + it the clamped
/// fourth-order equation for v̂_φ is solved by banded collocation on a
/// 4×-refined angular grid, v̂_r follows from the divergence relation,
/// p̂ from the radial momentum row; fields are assembled by inverse
/// Mellin (v on the line Re λ = α, p on Re λ = 1 − α).
pub fn solve_test_function_problem(
    w: &VectorField,
    alpha: f64,
    cfg: &WedgeConfig,
    vcfg: &VariationalConfig,
) -> Result<(VectorField, ScalarField)> {
    vcfg.validate()?;
    let grid = &w.grid;
    let theta = grid.theta;
    if alpha == 0.0 {
        return Err(Error::InvalidArgument(
            "test-function problem degenerates at alpha = 0".into(),
        ));
    }
    if (alpha * theta).abs() > cfg.alpha_theta_cap {
        return Err(Error::Admissibility(format!(
            "|alpha*theta| = {:.3e} exceeds the coercive-regime cap {:.3e}",
            (alpha * theta).abs(),
            cfg.alpha_theta_cap
        )));
    }
    check_tangent(w, "test-function data w", vcfg.tangency_tol)?;
    let scale_w = w.max_abs();
    if scale_w == 0.0 {
        return Ok((VectorField::zeros(grid), ScalarField::zeros(grid)));
    }
    let s_weight = vcfg.scale(alpha, theta);
    let c3 = vcfg.c3;

    let line_v = MellinLine::for_grid(grid, alpha);
    let line_w = MellinLine::for_grid(grid, -alpha);
    let line_p = MellinLine::for_grid(grid, 1.0 - alpha);
    let wr = w.component_r();
    let mwr = mellin::forward_scalar(&wr, &line_w)?;
    let mwp = mellin::forward_scalar(&w.component_phi(), &line_w)?;
    let mdwr = mellin::forward_scalar(&ops::d_phi(&wr), &line_w)?;

    let na = grid.n_angular();
    const REFINE: usize = 4;
    let naf = REFINE * (na - 1) + 1;
    let dphif = theta / (naf - 1) as f64;

    let mut mvr = MellinScalar::zeros(line_v.clone(), theta, na);
    let mut mvp = MellinScalar::zeros(line_v.clone(), theta, na);
    let mut mp = MellinScalar::zeros(line_p, theta, na);

    struct ModeRows {
        vr: Vec<Complex64>,
        vp: Vec<Complex64>,
        p: Vec<Complex64>,
    }

    let rows: Vec<Result<ModeRows>> = (0..line_v.n_modes)
        .into_par_iter()
        .map(|m| {
            let lambda = line_v.lambda(m);
            let (a1, a2, a3) = mode_coefficients(lambda, alpha, theta, c3);
            let lp1 = lambda + 1.0;
            let shift = lambda - 2.0 * alpha + 1.0;
            // Right-hand side (λ+1)[∂_φŵ_r − (λ−2α+1)ŵ_φ] on the fine grid.
            let rhs_coarse: Vec<Complex64> = (0..na)
                .map(|j| lp1 * (mdwr.at(m, j) - shift * mwp.at(m, j)))
                .collect();
            let rhs_fine = cubic_refine(&rhs_coarse, REFINE);
            // Clamped collocation: rows 0 and naf−1 impose v = 0, rows 1
            // and naf−2 impose the one-sided third-order ∂_φv = 0, the
            // rest the ODE with central D4/D2 stencils.
            let h2 = dphif * dphif;
            let h4 = h2 * h2;
            let mut band = vec![[Complex64::ZERO; 5]; naf];
            let mut rhs = vec![Complex64::ZERO; naf];
            band[0][2] = Complex64::ONE;
            band[naf - 1][2] = Complex64::ONE;
            // (−11f₀ + 18f₁ − 9f₂ + 2f₃)/(6h) = 0 at the lower edge; the
            // mirrored stencil at the upper edge. Row 1 stores columns
            // 0..=3 (offsets −1..=2), row naf−2 columns naf−4..=naf−1.
            band[1][1] = Complex64::new(-11.0, 0.0);
            band[1][2] = Complex64::new(18.0, 0.0);
            band[1][3] = Complex64::new(-9.0, 0.0);
            band[1][4] = Complex64::new(2.0, 0.0);
            band[naf - 2][3] = Complex64::new(11.0, 0.0);
            band[naf - 2][2] = Complex64::new(-18.0, 0.0);
            band[naf - 2][1] = Complex64::new(9.0, 0.0);
            band[naf - 2][0] = Complex64::new(-2.0, 0.0);
            for j in 2..naf - 2 {
                band[j][0] = a1 / h4;
                band[j][1] = -4.0 * a1 / h4 + a2 / h2;
                band[j][2] = 6.0 * a1 / h4 - 2.0 * a2 / h2 + a3;
                band[j][3] = band[j][1];
                band[j][4] = band[j][0];
                rhs[j] = rhs_fine[j];
            }
            solve_banded(&mut band, &mut rhs)?;
            let vp_fine = rhs;
            let mut dvp = vec![Complex64::ZERO; naf];
            diff1_line_c(&vp_fine, dphif, &mut dvp);
            // div-free: v̂_r = −∂_φv̂_φ/(λ+1).
            let vr_fine: Vec<Complex64> = dvp.iter().map(|&d| -d / lp1).collect();
            let mut ddvr = vec![Complex64::ZERO; naf];
            diff2_line_c(&vr_fine, dphif, &mut ddvr);
            // Radial momentum row solved for p̂(λ−2α+1); ∂_φv̂_φ = −(λ+1)v̂_r.
            let wr_fine = cubic_refine(
                &(0..na).map(|j| mwr.at(m, j)).collect::<Vec<_>>(),
                REFINE,
            );
            let l2 = lambda * lambda;
            let p_fine: Vec<Complex64> = (0..naf)
                .map(|j| {
                    let vr = vr_fine[j];
                    (wr_fine[j]
                        + c3 * s_weight * ((l2 - 1.0) * vr + ddvr[j] + 2.0 * lp1 * vr)
                        + s_weight * l2 * vr
                        - vr)
                        / shift
                })
                .collect();
            let restrict = |v: &[Complex64]| (0..na).map(|j| v[j * REFINE]).collect::<Vec<_>>();
            Ok(ModeRows {
                vr: restrict(&vr_fine),
                vp: restrict(&vp_fine),
                p: restrict(&p_fine),
            })
        })
        .collect();

    for (m, row) in rows.into_iter().enumerate() {
        let row = row?;
        mvr.row_mut(m).copy_from_slice(&row.vr);
        mvp.row_mut(m).copy_from_slice(&row.vp);
        mp.row_mut(m).copy_from_slice(&row.p);
    }
    let v = VectorField::from_components(
        mellin::inverse_scalar(&mvr, grid)?,
        mellin::inverse_scalar(&mvp, grid)?,
    )?;
    let p = mellin::inverse_scalar(&mp, grid)?;
    v.check_finite()?;
    p.check_finite()?;
    Ok((v, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{sep_laplacian_vector, sep_slip_data, sep_stokes_source};
    use crate::cutoff::Cutoff;
    use crate::grid::GridSpec;

    fn test_grid(theta: f64) -> Grid {
        Grid::new(
            GridSpec {
                s_min: -9.0,
                s_max: 9.0,
                n_radial: 257,
                n_angular: 33,
                t_max: 16.0,
                n_modes: 161,
            },
            theta,
        )
        .unwrap()
    }

    fn test_cfg(theta: f64, alpha: f64) -> WedgeConfig {
        WedgeConfig {
            theta,
            alpha,
            epsilon: 0.1,
            alpha_theta_cap: 0.05,
            sin_tolerance: 1e-8,
            grid: test_grid(theta).spec.clone(),
        }
    }

    fn stream_u(theta: f64) -> SeparableVector {
        let psi = SeparableScalar::single(
            RadialProfile::gaussian(1.0, 0.2, 0.7),
            TrigPoly::sin_mode(theta, 1, 1.0).add(&TrigPoly::sin_mode(theta, 2, -0.4)),
        );
        SeparableVector::from_stream(&psi)
    }

    #[test]
    fn probe_everything() {
        let theta = 0.8;
        let alpha = 0.05;
        let grid = test_grid(theta);
        let cfg = test_cfg(theta, alpha);
        let vcfg = VariationalConfig::default();
        // identity residual
        let su = stream_u(theta);
        let u = su.sample(&grid);
        let f = sep_laplacian_vector(&su).scale(-1.0).sample(&grid);
        let g = sep_slip_data(&su, &grid);
        let basis = default_test_fields(&grid);
        let res = variational_residual(&u, &f, &g, &basis, alpha, &cfg, &vcfg).unwrap();
        let bd = bilinear_breakdown(&u, &basis[0], alpha, &cfg, &vcfg).unwrap();
        eprintln!("identity residual = {res:.3e}, term scale = {:.3e}", bd.max_term_abs());
        eprintln!("breakdown b1={:?} b2={:?} b3={:?}", bd.b1, bd.b2, bd.b3);
        // coercivity
        let fields = random_stream_fields(&grid, 3, 7);
        let rep = coercivity_audit(&fields, alpha, &cfg, &vcfg).unwrap();
        eprintln!("coercivity ratios = {:?}", rep.samples.iter().map(|s| s.ratio).collect::<Vec<_>>());
        // boundedness
        let pairs: Vec<_> = fields.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let bound = boundedness_audit(&pairs, alpha, &cfg, &vcfg).unwrap();
        eprintln!("boundedness = {bound:.3e}");
        // test-function plug-back
        let w = stream_u(theta).sample(&grid);
        let (v, p) = solve_test_function_problem(&w, alpha, &cfg, &vcfg).unwrap();
        let s = vcfg.scale(alpha, theta);
        let v2 = rdr_vec(&rdr_vec(&v));
        let r2lap = ops::mul_r_pow_vec(&ops::laplacian_vector(&v), 2.0);
        let inner = v
            .axpy(-s, &v2)
            .and_then(|x| x.axpy(-vcfg.c3 * s, &r2lap))
            .unwrap();
        let lhs = ops::mul_r_pow_vec(&inner, -2.0 * alpha)
            .axpy(1.0, &ops::gradient(&p))
            .unwrap();
        let defect = lhs.axpy(-1.0, &w).unwrap().max_abs() / w.max_abs();
        eprintln!("plugback defect = {defect:.3e}, v scale {:.3e}, p scale {:.3e}", v.max_abs(), p.max_abs());
        let div = ops::divergence(&v).max_abs();
        eprintln!("div v = {:.3e}", div);
        let na = grid.n_angular();
        let mut edge = 0.0f64;
        for i in 0..grid.n_radial() {
            edge = edge.max(v.r[grid.idx(i,0)].abs()).max(v.r[grid.idx(i,na-1)].abs())
                .max(v.phi[grid.idx(i,0)].abs()).max(v.phi[grid.idx(i,na-1)].abs());
        }
        eprintln!("edge dirichlet = {:.3e}", edge);
        // pressure recovery MMS
        let pstar = SeparableScalar::single(
            RadialProfile::gaussian(0.7, -0.2, 0.8),
            TrigPoly::cos_mode(theta, 1, 1.0).add(&TrigPoly::constant(theta, 0.3)),
        );
        let fm = sep_stokes_source(&su, &pstar).sample(&grid);
        let prec = pressure_recover(&u, &fm, vcfg.gamma, &cfg, &vcfg).unwrap();
        let pex = pstar.sample(&grid);
        let diff = prec.axpy(-1.0, &pex).unwrap();
        let c0 = diff.values[grid.idx(0,0)];
        let dev = diff.map(|x| x - c0).max_abs() / pex.max_abs();
        eprintln!("pressure MMS deviation = {dev:.3e}");
        // pairing oracle vs 1-D quadrature
        let theta_p = 1.0;
        let alpha_p = -0.5;
        let gridp = test_grid(theta_p);
        let z = Cutoff;
        let prof = |r: f64| z.zeta(r) - z.zeta(2.0 * r);
        let gdat = BoundaryData::from_fns(&gridp, |s| prof(s.exp()), |s| prof(s.exp()));
        let vfield = VectorField::from_fns(&gridp, |s, _| prof(s.exp()), |_, _| 0.0);
        let pr = pairing_g(&gdat, &vfield, alpha_p).unwrap();
        // oracle: fine Simpson in s of 2*e^{(1-2a)s}g^2 + S*2*e^{(1-2a)s}((r d_r +1-2a)g)^2
        let sscale = alpha_p.abs() * theta_p.powi(3);
        let n = 40001;
        let (s0, s1) = (-9.0, 9.0);
        let h = (s1 - s0) / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let s = s0 + i as f64 * h;
            let r = s.exp();
            let gv = prof(r);
            let rdr = r * (z.zeta_d(r) - 2.0 * z.zeta_d(2.0 * r));
            let integ = (2.0f64 * (1.0 - 2.0 * alpha_p) * s).exp().powf(0.5); // placeholder not used
            let _ = integ;
            let wgt = ((1.0 - 2.0 * alpha_p) * s).exp();
            let term = 2.0 * wgt * gv * gv + sscale * 2.0 * wgt * (rdr + (1.0 - 2.0 * alpha_p) * gv) * (rdr);
            let simp = if i == 0 || i == n - 1 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += simp * term;
        }
        let oracle = acc * h / 3.0;
        eprintln!("pairing = {pr:.8e}, oracle = {oracle:.8e}, rel = {:.3e}", (pr - oracle).abs() / oracle.abs());
    }
}
