//! Numerical Mellin transform on the log-radial grid.
//!
//! Convention: Mf(λ) = (1/√(2π)) ∫₀^∞ r^{−λ} f(r) dr/r, evaluated on a
//! vertical line Re λ = const. In s = log r this is a Fourier transform of
//! e^{−Re λ·s}f(s), so trapezoid quadrature over a window where the
//! weighted field has decayed is spectrally accurate. The transform turns
//! r∂_r into multiplication by λ, which is what makes the wedge mode
//! solvers algebraic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField, VectorField};

/// Relative decay demanded of the weighted field at the ends of the radial
/// window before a transform line is accepted.
pub const DECAY_FLOOR: f64 = 1e-9;

const SQRT_2PI: f64 = 2.506_628_274_631_000_6;

/// A vertical line Re λ = `re_lambda` with Im λ truncated to `[−t_max, t_max]`
/// and sampled at `n_modes` uniform nodes (odd count, so t = 0 is a node).
#[derive(Clone, Debug, PartialEq)]
pub struct MellinLine {
    pub re_lambda: f64,
    pub t_max: f64,
    pub n_modes: usize,
}

impl MellinLine {
    pub fn new(re_lambda: f64, t_max: f64, n_modes: usize) -> Result<Self> {
        if !(t_max > 0.0) || n_modes < 3 || n_modes % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "bad Mellin line: t_max = {t_max}, n_modes = {n_modes}"
            )));
        }
        Ok(MellinLine {
            re_lambda,
            t_max,
            n_modes,
        })
    }

    /// Line matching a grid's transform parameters.
    pub fn for_grid(grid: &Grid, re_lambda: f64) -> Self {
        MellinLine {
            re_lambda,
            t_max: grid.spec.t_max,
            n_modes: grid.spec.n_modes,
        }
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        2.0 * self.t_max / (self.n_modes - 1) as f64
    }

    #[inline]
    pub fn t(&self, m: usize) -> f64 {
        -self.t_max + m as f64 * self.dt()
    }

    #[inline]
    pub fn lambda(&self, m: usize) -> Complex64 {
        Complex64::new(self.re_lambda, self.t(m))
    }

    /// A parallel line shifted by `delta` in the real direction.
    pub fn shifted(&self, delta: f64) -> MellinLine {
        MellinLine {
            re_lambda: self.re_lambda + delta,
            ..self.clone()
        }
    }

    pub fn assert_same(&self, other: &MellinLine) -> Result<()> {
        if (self.re_lambda - other.re_lambda).abs() < 1e-12
            && self.t_max == other.t_max
            && self.n_modes == other.n_modes
        {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "Mellin lines differ: {self:?} vs {other:?}"
            )))
        }
    }
}

/// Transform of a purely radial profile: one complex value per line node.
#[derive(Clone, Debug)]
pub struct MellinRadial {
    pub line: MellinLine,
    pub values: Vec<Complex64>,
}

/// Transform of a scalar field: rows indexed by the line node m, columns by
/// the angular node j (`values[m * n_angular + j]`).
#[derive(Clone, Debug)]
pub struct MellinScalar {
    pub line: MellinLine,
    pub theta: f64,
    pub n_angular: usize,
    pub values: Vec<Complex64>,
}

impl MellinScalar {
    pub fn zeros(line: MellinLine, theta: f64, n_angular: usize) -> Self {
        let n = line.n_modes * n_angular;
        MellinScalar {
            line,
            theta,
            n_angular,
            values: vec![Complex64::ZERO; n],
        }
    }

    #[inline]
    pub fn at(&self, m: usize, j: usize) -> Complex64 {
        self.values[m * self.n_angular + j]
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.values[m * self.n_angular..(m + 1) * self.n_angular]
    }

    pub fn row_mut(&mut self, m: usize) -> &mut [Complex64] {
        &mut self.values[m * self.n_angular..(m + 1) * self.n_angular]
    }

    pub fn dphi(&self) -> f64 {
        self.theta / (self.n_angular - 1) as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn assert_compatible(&self, other: &MellinScalar) -> Result<()> {
        self.line.assert_same(&other.line)?;
        if self.n_angular != other.n_angular || (self.theta - other.theta).abs() > 1e-14 {
            return Err(Error::GridMismatch(
                "Mellin fields have different angular grids".into(),
            ));
        }
        Ok(())
    }
}

/// Transform of a polar vector field, component-wise.
#[derive(Clone, Debug)]
pub struct MellinVector {
    pub r: MellinScalar,
    pub phi: MellinScalar,
}

/// Check that the weighted profile e^{−Re λ·s}f(s) has decayed at the window
/// ends; otherwise the transform line lies outside the convergence strip.
fn check_decay(weighted: &[f64], what: &str) -> Result<()> {
    let n = weighted.len();
    let max = weighted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(());
    }
    let edge = weighted[0].abs().max(weighted[n - 1].abs());
    if edge > DECAY_FLOOR * max {
        return Err(Error::Decay(format!(
            "{what}: weighted field at window ends is {edge:.3e} vs interior max {max:.3e} \
             (floor {DECAY_FLOOR:.1e})"
        )));
    }
    Ok(())
}

/// Forward transform of a radial profile sampled on the grid's s nodes.
pub fn forward_radial(samples: &[f64], grid: &Grid, line: &MellinLine) -> Result<MellinRadial> {
    if samples.len() != grid.n_radial() {
        return Err(Error::GridMismatch(format!(
            "radial profile length {} vs n_radial {}",
            samples.len(),
            grid.n_radial()
        )));
    }
    let ds = grid.ds();
    let weighted: Vec<f64> = samples
        .iter()
        .enumerate()
        .map(|(i, &v)| (-line.re_lambda * grid.s(i)).exp() * v)
        .collect();
    check_decay(&weighted, "forward_radial")?;
    let nr = grid.n_radial();
    let values = (0..line.n_modes)
        .map(|m| {
            let t = line.t(m);
            let mut acc = Complex64::ZERO;
            for (i, &w) in weighted.iter().enumerate() {
                let tw = if i == 0 || i == nr - 1 { 0.5 } else { 1.0 };
                let phase = -t * grid.s(i);
                acc += tw * w * Complex64::new(phase.cos(), phase.sin());
            }
            acc * ds / SQRT_2PI
        })
        .collect();
    Ok(MellinRadial {
        line: line.clone(),
        values,
    })
}

/// Forward transform of a radial profile at a single, possibly complex, λ
/// off the standard lines (used e.g. for contour quadrature around poles).
pub fn forward_radial_at(samples: &[f64], grid: &Grid, lambda: Complex64) -> Result<Complex64> {
    if samples.len() != grid.n_radial() {
        return Err(Error::GridMismatch(format!(
            "radial profile length {} vs n_radial {}",
            samples.len(),
            grid.n_radial()
        )));
    }
    let nr = grid.n_radial();
    let mut acc = Complex64::ZERO;
    for (i, &v) in samples.iter().enumerate() {
        let tw = if i == 0 || i == nr - 1 { 0.5 } else { 1.0 };
        acc += tw * v * (-lambda * grid.s(i)).exp();
    }
    Ok(acc * grid.ds() / SQRT_2PI)
}

/// Forward transform of a scalar field at a single λ, returning the angular
/// profile f̂(λ, ·) on the grid's φ nodes.
pub fn forward_scalar_at(f: &ScalarField, lambda: Complex64) -> Result<Vec<Complex64>> {
    let grid = &f.grid;
    let mut col = vec![0.0; grid.n_radial()];
    let mut out = Vec::with_capacity(grid.n_angular());
    for j in 0..grid.n_angular() {
        for i in 0..grid.n_radial() {
            col[i] = f.values[grid.idx(i, j)];
        }
        out.push(forward_radial_at(&col, grid, lambda)?);
    }
    Ok(out)
}

/// Inverse transform of a radial line onto the grid's s nodes. The result of
/// transforming a real profile is Hermitian across t = 0; the inverse of any
/// line data returns the real part (the imaginary part is reported back for
/// diagnostics via `inverse_radial_full`).
pub fn inverse_radial(mr: &MellinRadial, grid: &Grid) -> Vec<f64> {
    inverse_radial_full(mr, grid).0
}

/// Inverse transform returning (real part, max |imaginary part|).
pub fn inverse_radial_full(mr: &MellinRadial, grid: &Grid) -> (Vec<f64>, f64) {
    let line = &mr.line;
    let dt = line.dt();
    let n = line.n_modes;
    let mut max_im = 0.0f64;
    let out = (0..grid.n_radial())
        .map(|i| {
            let s = grid.s(i);
            let mut acc = Complex64::ZERO;
            for (m, &v) in mr.values.iter().enumerate() {
                let tw = if m == 0 || m == n - 1 { 0.5 } else { 1.0 };
                let phase = line.t(m) * s;
                acc += tw * v * Complex64::new(phase.cos(), phase.sin());
            }
            acc *= (line.re_lambda * s).exp() * dt / SQRT_2PI;
            max_im = max_im.max(acc.im.abs());
            acc.re
        })
        .collect();
    (out, max_im)
}

/// Forward transform of a scalar field, per angular node.
pub fn forward_scalar(f: &ScalarField, line: &MellinLine) -> Result<MellinScalar> {
    let grid = &f.grid;
    let na = grid.n_angular();
    let mut out = MellinScalar::zeros(line.clone(), grid.theta, na);
    let mut col = vec![0.0; grid.n_radial()];
    for j in 0..na {
        for i in 0..grid.n_radial() {
            col[i] = f.values[grid.idx(i, j)];
        }
        let mr = forward_radial(&col, grid, line)
            .map_err(|e| match e {
                Error::Decay(msg) => Error::Decay(format!("angular node {j}: {msg}")),
                other => other,
            })?;
        for m in 0..line.n_modes {
            out.values[m * na + j] = mr.values[m];
        }
    }
    Ok(out)
}

/// Inverse transform of a scalar line field onto a grid.
pub fn inverse_scalar(mf: &MellinScalar, grid: &Grid) -> Result<ScalarField> {
    if mf.n_angular != grid.n_angular() || (mf.theta - grid.theta).abs() > 1e-14 {
        return Err(Error::GridMismatch(
            "Mellin field angular grid does not match target grid".into(),
        ));
    }
    let mut out = ScalarField::zeros(grid);
    let line = &mf.line;
    let dt = line.dt();
    let nm = line.n_modes;
    for i in 0..grid.n_radial() {
        let s = grid.s(i);
        let w = (line.re_lambda * s).exp() * dt / SQRT_2PI;
        for j in 0..grid.n_angular() {
            let mut acc = Complex64::ZERO;
            for m in 0..nm {
                let tw = if m == 0 || m == nm - 1 { 0.5 } else { 1.0 };
                let phase = line.t(m) * s;
                acc += tw * mf.at(m, j) * Complex64::new(phase.cos(), phase.sin());
            }
            out.values[grid.idx(i, j)] = (acc * w).re;
        }
    }
    out.check_finite()?;
    Ok(out)
}

/// Forward transform of a vector field.
pub fn forward_vector(u: &VectorField, line: &MellinLine) -> Result<MellinVector> {
    Ok(MellinVector {
        r: forward_scalar(&u.component_r(), line)?,
        phi: forward_scalar(&u.component_phi(), line)?,
    })
}

/// Inverse transform of a vector line field.
pub fn inverse_vector(mv: &MellinVector, grid: &Grid) -> Result<VectorField> {
    VectorField::from_components(inverse_scalar(&mv.r, grid)?, inverse_scalar(&mv.phi, grid)?)
}

/// Transform-side Parseval sum ∫∫ |f̂|² dIm λ dφ; equals
/// ∫∫ r^{−2α}|f|² dr/r dφ (s-side: ∫∫ e^{−2αs}|f|² ds dφ) for α = Re λ.
pub fn parseval_sq(mf: &MellinScalar) -> f64 {
    let dt = mf.line.dt();
    let nm = mf.line.n_modes;
    let na = mf.n_angular;
    let mut sum = 0.0;
    for m in 0..nm {
        let tw = if m == 0 || m == nm - 1 { 0.5 } else { 1.0 };
        let mut row = 0.0;
        for j in 0..na {
            let aw = if j == 0 || j == na - 1 { 0.5 } else { 1.0 };
            row += aw * mf.at(m, j).norm_sqr();
        }
        sum += tw * row;
    }
    sum * dt * mf.dphi()
}

/// Physical-side counterpart of [`parseval_sq`]: ∫∫ e^{−2αs}|f|² ds dφ.
pub fn physical_sq(f: &ScalarField, alpha: f64) -> f64 {
    let grid = &f.grid;
    let (nr, na) = (grid.n_radial(), grid.n_angular());
    let mut sum = 0.0;
    for i in 0..nr {
        let tw = if i == 0 || i == nr - 1 { 0.5 } else { 1.0 };
        let w = tw * (-2.0 * alpha * grid.s(i)).exp();
        let mut row = 0.0;
        for j in 0..na {
            let aw = if j == 0 || j == na - 1 { 0.5 } else { 1.0 };
            let v = f.values[grid.idx(i, j)];
            row += aw * v * v;
        }
        sum += w * row;
    }
    sum * grid.ds() * grid.dphi()
}

/// Transform-side weighted pairing ∫_{Re λ=α} conj(f̂)ĝ dIm λ per angular
/// node, summed with angular trapezoid weights; equals the physical pairing
/// ∫∫ r^{−2α} f g dr/r dφ for real fields.
pub fn pairing(mf: &MellinScalar, mg: &MellinScalar) -> Result<Complex64> {
    mf.assert_compatible(mg)?;
    let dt = mf.line.dt();
    let nm = mf.line.n_modes;
    let na = mf.n_angular;
    let mut sum = Complex64::ZERO;
    for m in 0..nm {
        let tw = if m == 0 || m == nm - 1 { 0.5 } else { 1.0 };
        let mut row = Complex64::ZERO;
        for j in 0..na {
            let aw = if j == 0 || j == na - 1 { 0.5 } else { 1.0 };
            row += aw * mf.at(m, j).conj() * mg.at(m, j);
        }
        sum += tw * row;
    }
    Ok(sum * dt * mf.dphi())
}

/// Transform-side Sobolev norm of Ĥ^k_α on the line Re λ = α + k − 1:
/// Σ_{j+ℓ=k} ∫∫ |λ|^{2j} |∂_φ^ℓ û|² dIm λ dφ (squared value returned).
pub fn sobolev_sq(mf: &MellinScalar, k: u32, alpha: f64) -> Result<f64> {
    let expected = alpha + k as f64 - 1.0;
    if (mf.line.re_lambda - expected).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "sobolev norm of order {k} at weight {alpha} lives on Re λ = {expected}, \
             field is on {}",
            mf.line.re_lambda
        )));
    }
    let na = mf.n_angular;
    let dphi = mf.dphi();
    let dt = mf.line.dt();
    let nm = mf.line.n_modes;
    let mut total = 0.0;
    let mut dre = vec![0.0; na];
    let mut dim = vec![0.0; na];
    for m in 0..nm {
        let tw = if m == 0 || m == nm - 1 { 0.5 } else { 1.0 };
        let lam_sq = mf.line.lambda(m).norm_sqr();
        // successively differentiate the row in φ
        let mut row_re: Vec<f64> = mf.row(m).iter().map(|v| v.re).collect();
        let mut row_im: Vec<f64> = mf.row(m).iter().map(|v| v.im).collect();
        for l in 0..=k {
            let j = k - l; // |λ|^{2j} ∂_φ^l
            if l > 0 {
                crate::ops::diff1_line(&row_re, dphi, &mut dre);
                crate::ops::diff1_line(&row_im, dphi, &mut dim);
                std::mem::swap(&mut row_re, &mut dre);
                std::mem::swap(&mut row_im, &mut dim);
            }
            let mut quad = 0.0;
            for jj in 0..na {
                let aw = if jj == 0 || jj == na - 1 { 0.5 } else { 1.0 };
                quad += aw * (row_re[jj] * row_re[jj] + row_im[jj] * row_im[jj]);
            }
            total += tw * lam_sq.powi(j as i32) * quad * dphi * dt;
        }
    }
    Ok(total)
}

/// Γ(z) by quadrature: the recursion Γ(z) = Γ(z+m)/(z)_m lifts Re z above 5,
/// then adaptive Simpson integrates ∫₀^60 x^{z−1}e^{−x} dx. Independent of
/// the transform machinery, so it can serve as its oracle.
pub fn gamma_via_quadrature(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 && (z.im.abs() < 1e-12 && (z.re - z.re.round()).abs() < 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "gamma pole at z = {z}"
        )));
    }
    let mut shift = 0u32;
    let mut zs = z;
    while zs.re < 5.0 {
        zs += 1.0;
        shift += 1;
    }
    let f = |x: f64| -> Complex64 {
        // x^{z−1} e^{−x} = e^{(z−1)ln x − x}
        ((zs - 1.0) * x.ln() - x).exp()
    };
    let val = adaptive_simpson(&f, 1e-14, 60.0, 1e-13, 40)?;
    let mut out = val;
    let mut w = z;
    for _ in 0..shift {
        out /= w;
        w += 1.0;
    }
    Ok(out)
}

fn adaptive_simpson(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<Complex64> {
    fn simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
        let m = 0.5 * (a + b);
        (f(a) + 4.0 * f(m) + f(b)) * ((b - a) / 6.0)
    }
    fn recurse(
        f: &dyn Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        let delta = left + right - whole;
        if delta.norm() <= 15.0 * tol || depth == 0 {
            if depth == 0 && delta.norm() > 15.0 * tol {
                return Err(Error::Convergence(format!(
                    "adaptive Simpson: depth exhausted on [{a}, {b}], err {:.3e}",
                    delta.norm()
                )));
            }
            Ok(left + right + delta / 15.0)
        } else {
            Ok(recurse(f, a, m, left, tol / 2.0, depth - 1)?
                + recurse(f, m, b, right, tol / 2.0, depth - 1)?)
        }
    }
    let whole = simpson(f, a, b);
    recurse(f, a, b, whole, tol, depth)
}

/// Constructive boundary-trace extension: given per-edge Mellin traces
/// (û_ℓ)_{ℓ=0..k−1} on a common line, build
/// Û(λ,φ) = Σ_ℓ (φ^ℓ/ℓ!)·û_ℓ(λ,0)·h(φ(1+|λ|)/θ)
///        + (−φ̃^ℓ/ℓ!)(−1)^{ℓ+1}·û_ℓ(λ,θ)·h(φ̃(1+|λ|)/θ), φ̃ = θ−φ,
/// with the repo bump h, and invert. The ∂_φ^ℓ edge traces of the result
/// reproduce the inputs.
pub struct EdgeTraces {
    /// traces at φ = 0, outer index ℓ
    pub lower: Vec<MellinRadial>,
    /// traces at φ = θ, outer index ℓ
    pub upper: Vec<MellinRadial>,
}

pub fn extend_trace(traces: &EdgeTraces, grid: &Grid) -> Result<ScalarField> {
    let k = traces.lower.len();
    if k == 0 || traces.upper.len() != k {
        return Err(Error::InvalidArgument(format!(
            "extend_trace: need matching nonempty trace families, got {}/{}",
            k,
            traces.upper.len()
        )));
    }
    let line = traces.lower[0].line.clone();
    for t in traces.lower.iter().chain(&traces.upper) {
        t.line.assert_same(&line)?;
        if t.values.len() != line.n_modes {
            return Err(Error::GridMismatch(
                "extend_trace: trace length != n_modes".into(),
            ));
        }
    }
    let theta = grid.theta;
    let na = grid.n_angular();
    let bump = crate::cutoff::Cutoff;
    let mut mf = MellinScalar::zeros(line.clone(), theta, na);
    for m in 0..line.n_modes {
        let lam = line.lambda(m);
        let scale = 1.0 + lam.norm();
        for j in 0..na {
            let phi = grid.phi(j);
            let phit = theta - phi;
            let mut acc = Complex64::ZERO;
            let mut fact = 1.0;
            for l in 0..k {
                if l > 0 {
                    fact *= l as f64;
                }
                let pl = phi.powi(l as i32) / fact;
                let ql = (-phit).powi(l as i32) * (-1.0f64).powi(l as i32 + 2) / fact;
                // ql = (θ−φ)^ℓ(−1)^ℓ/ℓ! so that ∂_φ^ℓ at φ=θ matches
                acc += pl * traces.lower[l].values[m] * bump.h(phi * scale / theta)
                    + ql * traces.upper[l].values[m] * bump.h(phit * scale / theta);
            }
            mf.values[m * na + j] = acc;
        }
    }
    inverse_scalar(&mf, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{RadialProfile, SeparableScalar};
    use crate::grid::GridSpec;
    use crate::trig::TrigPoly;

    fn grid(theta: f64) -> Grid {
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

    #[test]
    fn round_trip_and_parseval() {
        let theta = 1.0;
        let g = grid(theta);
        let f = SeparableScalar::single(
            RadialProfile::gaussian(1.0, 0.3, 0.6),
            TrigPoly::cos_mode(theta, 2, 1.0).add(&TrigPoly::constant(theta, 0.4)),
        )
        .sample(&g);
        let line = MellinLine::for_grid(&g, 0.7);
        let mf = forward_scalar(&f, &line).unwrap();
        let back = inverse_scalar(&mf, &g).unwrap();
        let num = physical_sq(&back.axpy(-1.0, &f).unwrap(), 0.0).sqrt();
        let den = physical_sq(&f, 0.0).sqrt();
        assert!(num / den < 1e-10, "round trip error {}", num / den);
        let p_phys = physical_sq(&f, line.re_lambda);
        let p_spec = parseval_sq(&mf);
        assert!(
            (p_phys - p_spec).abs() / p_phys < 1e-10,
            "parseval {p_phys} vs {p_spec}"
        );
    }

    #[test]
    fn decay_violation_is_rejected() {
        let theta = 1.0;
        let g = grid(theta);
        // A unit Gaussian is decayed on a central line, but the weight
        // e^{5s} of a far-off line revives it at the window edge.
        let f = ScalarField::from_fn(&g, |s, _| (-0.5 * s * s).exp());
        let low = MellinLine::for_grid(&g, -5.0);
        assert!(matches!(forward_scalar(&f, &low), Err(Error::Decay(_))));
        let ok = MellinLine::for_grid(&g, 0.0);
        assert!(forward_scalar(&f, &ok).is_ok());
    }

    #[test]
    fn calculus_rules_hold() {
        // (r∂_r f)^(λ) = λ f̂(λ) and (r^{−β}f)^(λ) = f̂(λ + β)... the weight
        // rule shifts the line, so transform the product on the shifted line
        // and compare nodewise.
        let theta = 0.9;
        let g = grid(theta);
        let prof = RadialProfile::gaussian(1.2, -0.2, 0.7);
        let sep = SeparableScalar::single(prof.clone(), TrigPoly::constant(theta, 1.0));
        let f = sep.sample(&g);
        let line = MellinLine::for_grid(&g, 0.4);
        let mf = forward_scalar(&f, &line).unwrap();

        // scaling operator
        let rdr = sep.d_s().sample(&g);
        let m_rdr = forward_scalar(&rdr, &line).unwrap();
        let mut worst = 0.0f64;
        for m in 0..line.n_modes {
            let lam = line.lambda(m);
            for j in 0..g.n_angular() {
                worst = worst.max((m_rdr.at(m, j) - lam * mf.at(m, j)).norm());
            }
        }
        assert!(worst < 1e-10 * mf.max_abs(), "r∂_r rule error {worst}");

        // weight rule: transform of r^{−β}f on line γ equals f̂ on line γ+β
        let beta = 0.6;
        let weighted = sep.mul_r_pow(-beta).sample(&g);
        let m_w = forward_scalar(&weighted, &line).unwrap();
        let shifted = MellinLine::for_grid(&g, line.re_lambda + beta);
        let m_shift = forward_scalar(&f, &shifted).unwrap();
        let mut worst = 0.0f64;
        for m in 0..line.n_modes {
            for j in 0..g.n_angular() {
                worst = worst.max((m_w.at(m, j) - m_shift.at(m, j)).norm());
            }
        }
        assert!(worst < 1e-10 * m_shift.max_abs(), "weight rule error {worst}");
    }

    #[test]
    fn gamma_check_on_exponential() {
        // M(e^{−r})(λ) = Γ(−λ)/√(2π) on Re λ = −1.
        let theta = 1.0;
        let g = Grid::new(
            GridSpec {
                s_min: -30.0,
                s_max: 5.0,
                n_radial: 1401,
                n_angular: 9,
                t_max: 10.0,
                n_modes: 101,
            },
            theta,
        )
        .unwrap();
        let samples: Vec<f64> = (0..g.n_radial()).map(|i| (-g.r(i)).exp()).collect();
        let line = MellinLine::for_grid(&g, -1.0);
        let mr = forward_radial(&samples, &g, &line).unwrap();
        for m in (0..line.n_modes).step_by(10) {
            let lam = line.lambda(m);
            let want = gamma_via_quadrature(-lam).unwrap() / SQRT_2PI;
            let got = mr.values[m];
            assert!(
                (got - want).norm() < 1e-9 * want.norm().max(1.0),
                "λ = {lam}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn gamma_quadrature_matches_known_values() {
        // Γ(1/2) = √π, Γ(5) = 24
        let g_half = gamma_via_quadrature(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g_half.re - std::f64::consts::PI.sqrt()).abs() < 1e-10);
        let g5 = gamma_via_quadrature(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-8);
        // reflection sanity at a complex point: Γ(z)Γ(1−z) = π/sin(πz)
        let z = Complex64::new(0.3, 0.4);
        let lhs = gamma_via_quadrature(z).unwrap() * gamma_via_quadrature(1.0 - z).unwrap();
        let rhs = std::f64::consts::PI / (std::f64::consts::PI * z).sin();
        assert!((lhs - rhs).norm() < 1e-9 * rhs.norm());
    }

    #[test]
    fn trace_extension_reproduces_edge_data() {
        let theta = 1.1;
        let g = grid(theta);
        let prof = RadialProfile::gaussian(1.0, 0.0, 0.8);
        let samples: Vec<f64> = (0..g.n_radial()).map(|i| prof.eval(g.s(i))).collect();
        let line = MellinLine::for_grid(&g, 0.3);
        let tr = forward_radial(&samples, &g, &line).unwrap();
        let zero = MellinRadial {
            line: line.clone(),
            values: vec![Complex64::ZERO; line.n_modes],
        };
        // k = 1, only the lower edge carries data
        let ext = extend_trace(
            &EdgeTraces {
                lower: vec![tr],
                upper: vec![zero],
            },
            &g,
        )
        .unwrap();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..g.n_radial() {
            worst = worst.max((ext.at(i, 0) - samples[i]).abs());
            worst = worst.max(ext.at(i, g.n_angular() - 1).abs());
            scale = scale.max(samples[i].abs());
        }
        assert!(worst < 1e-9 * scale, "edge mismatch {worst}");
    }
}
