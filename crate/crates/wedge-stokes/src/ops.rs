//! Finite-difference polar differential operators on the log-radial grid.
//!
//! Everything is expressed through ∂_s (with r∂_r = ∂_s) and ∂_φ: fourth
//! order centered stencils in the interior, second order near the ends.
//! These operators serve residual checks and the finite-difference oracle;
//! the solvers themselves work spectrally and never difference the grid.

use crate::error::Result;
use crate::grid::{ScalarField, VectorField};

/// First derivative of one line of samples, spacing `h`.
pub(crate) fn diff1_line(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 5);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    out[1] = (f[2] - f[0]) / (2.0 * h);
    for i in 2..n - 2 {
        out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    }
    out[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
}

/// Second derivative of one line of samples, spacing `h`.
pub(crate) fn diff2_line(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 5);
    let h2 = h * h;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[1] = (f[0] - 2.0 * f[1] + f[2]) / h2;
    for i in 2..n - 2 {
        out[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2])
            / (12.0 * h2);
    }
    out[n - 2] = (f[n - 3] - 2.0 * f[n - 2] + f[n - 1]) / h2;
    out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
}

fn apply_along_s(f: &ScalarField, op: impl Fn(&[f64], f64, &mut [f64])) -> ScalarField {
    let grid = &f.grid;
    let (nr, na) = (grid.n_radial(), grid.n_angular());
    let mut out = ScalarField::zeros(grid);
    let mut col = vec![0.0; nr];
    let mut dcol = vec![0.0; nr];
    for j in 0..na {
        for i in 0..nr {
            col[i] = f.values[grid.idx(i, j)];
        }
        op(&col, grid.ds(), &mut dcol);
        for i in 0..nr {
            out.values[grid.idx(i, j)] = dcol[i];
        }
    }
    out
}

fn apply_along_phi(f: &ScalarField, op: impl Fn(&[f64], f64, &mut [f64])) -> ScalarField {
    let grid = &f.grid;
    let (nr, na) = (grid.n_radial(), grid.n_angular());
    let mut out = ScalarField::zeros(grid);
    let mut drow = vec![0.0; na];
    for i in 0..nr {
        let row = &f.values[grid.idx(i, 0)..grid.idx(i, 0) + na];
        op(row, grid.dphi(), &mut drow);
        out.values[grid.idx(i, 0)..grid.idx(i, 0) + na].copy_from_slice(&drow);
    }
    out
}

/// ∂_s f = (r∂_r)f on the grid.
pub fn d_s(f: &ScalarField) -> ScalarField {
    apply_along_s(f, diff1_line)
}

/// ∂_s² f.
pub fn d_ss(f: &ScalarField) -> ScalarField {
    apply_along_s(f, diff2_line)
}

/// ∂_φ f.
pub fn d_phi(f: &ScalarField) -> ScalarField {
    apply_along_phi(f, diff1_line)
}

/// ∂_φ² f.
pub fn d_phiphi(f: &ScalarField) -> ScalarField {
    apply_along_phi(f, diff2_line)
}

/// Mixed derivative (r∂_r)^j ∂_φ^ℓ, pairing up second-derivative stencils
/// where possible to limit error accumulation.
pub fn mixed_deriv(f: &ScalarField, j: u32, l: u32) -> ScalarField {
    let mut g = f.clone();
    let mut js = j;
    while js >= 2 {
        g = d_ss(&g);
        js -= 2;
    }
    if js == 1 {
        g = d_s(&g);
    }
    let mut ls = l;
    while ls >= 2 {
        g = d_phiphi(&g);
        ls -= 2;
    }
    if ls == 1 {
        g = d_phi(&g);
    }
    g
}

/// Pointwise multiplication by r^γ = e^{γs}.
pub fn mul_r_pow(f: &ScalarField, gamma: f64) -> ScalarField {
    let grid = f.grid.clone();
    let mut out = f.clone();
    for i in 0..grid.n_radial() {
        let w = (gamma * grid.s(i)).exp();
        for j in 0..grid.n_angular() {
            out.values[grid.idx(i, j)] *= w;
        }
    }
    out
}

/// Vector counterpart of [`mul_r_pow`].
pub fn mul_r_pow_vec(u: &VectorField, gamma: f64) -> VectorField {
    VectorField {
        grid: u.grid.clone(),
        r: mul_r_pow(&u.component_r(), gamma).values,
        phi: mul_r_pow(&u.component_phi(), gamma).values,
    }
}

/// ∇p = r^{−1}(∂_s p, ∂_φ p).
pub fn gradient(p: &ScalarField) -> VectorField {
    VectorField {
        grid: p.grid.clone(),
        r: mul_r_pow(&d_s(p), -1.0).values,
        phi: mul_r_pow(&d_phi(p), -1.0).values,
    }
}

/// ∇⊥ψ = (−r^{−1}∂_φψ, r^{−1}∂_sψ).
pub fn rotated_gradient(psi: &ScalarField) -> VectorField {
    VectorField {
        grid: psi.grid.clone(),
        r: mul_r_pow(&d_phi(psi).map(|v| -v), -1.0).values,
        phi: mul_r_pow(&d_s(psi), -1.0).values,
    }
}

/// div u = r^{−1}[(∂_s + 1)u_r + ∂_φ u_φ].
pub fn divergence(u: &VectorField) -> ScalarField {
    let ur = u.component_r();
    let uphi = u.component_phi();
    let inner = d_s(&ur)
        .axpy(1.0, &ur)
        .and_then(|f| f.axpy(1.0, &d_phi(&uphi)))
        .expect("same grid");
    mul_r_pow(&inner, -1.0)
}

/// Scalar vorticity curl u = r^{−1}[(∂_s + 1)u_φ − ∂_φ u_r].
pub fn curl(u: &VectorField) -> ScalarField {
    let ur = u.component_r();
    let uphi = u.component_phi();
    let inner = d_s(&uphi)
        .axpy(1.0, &uphi)
        .and_then(|f| f.axpy(-1.0, &d_phi(&ur)))
        .expect("same grid");
    mul_r_pow(&inner, -1.0)
}

/// Δp = r^{−2}(∂_s² + ∂_φ²)p.
pub fn laplacian_scalar(p: &ScalarField) -> ScalarField {
    let inner = d_ss(p).axpy(1.0, &d_phiphi(p)).expect("same grid");
    mul_r_pow(&inner, -2.0)
}

/// Vector Laplacian in polar components:
/// (Δu)_r = r^{−2}[(∂_s² + ∂_φ²)u_r − 2∂_φu_φ − u_r],
/// (Δu)_φ = r^{−2}[(∂_s² + ∂_φ²)u_φ + 2∂_φu_r − u_φ].
pub fn laplacian_vector(u: &VectorField) -> VectorField {
    let ur = u.component_r();
    let uphi = u.component_phi();
    let lr = d_ss(&ur)
        .axpy(1.0, &d_phiphi(&ur))
        .and_then(|f| f.axpy(-2.0, &d_phi(&uphi)))
        .and_then(|f| f.axpy(-1.0, &ur))
        .expect("same grid");
    let lphi = d_ss(&uphi)
        .axpy(1.0, &d_phiphi(&uphi))
        .and_then(|f| f.axpy(2.0, &d_phi(&ur)))
        .and_then(|f| f.axpy(-1.0, &uphi))
        .expect("same grid");
    VectorField {
        grid: u.grid.clone(),
        r: mul_r_pow(&lr, -2.0).values,
        phi: mul_r_pow(&lphi, -2.0).values,
    }
}

/// Full velocity gradient as four scalar fields
/// (∂_r u_r, r^{−1}(∂_φu_r − u_φ), ∂_r u_φ, r^{−1}(∂_φu_φ + u_r)).
pub struct VectorGradient {
    pub rr: ScalarField,
    pub rphi: ScalarField,
    pub phir: ScalarField,
    pub phiphi: ScalarField,
}

/// ∇u in polar components (the Frobenius pairing of two of these is the
/// ∫∇v:∇u integrand).
pub fn vector_gradient(u: &VectorField) -> VectorGradient {
    let ur = u.component_r();
    let uphi = u.component_phi();
    VectorGradient {
        rr: mul_r_pow(&d_s(&ur), -1.0),
        rphi: mul_r_pow(
            &d_phi(&ur).axpy(-1.0, &uphi).expect("same grid"),
            -1.0,
        ),
        phir: mul_r_pow(&d_s(&uphi), -1.0),
        phiphi: mul_r_pow(
            &d_phi(&uphi).axpy(1.0, &ur).expect("same grid"),
            -1.0,
        ),
    }
}

/// Momentum residual −Δu + ∇p − f of the Stokes system.
pub fn stokes_momentum_residual(
    u: &VectorField,
    p: &ScalarField,
    f: &VectorField,
) -> Result<VectorField> {
    u.grid.assert_same(&p.grid)?;
    u.grid.assert_same(&f.grid)?;
    let lap = laplacian_vector(u);
    let grad = gradient(p);
    lap.axpy(-1.0, &grad)?
        .axpy(1.0, f)
        .map(|v| VectorField {
            grid: v.grid.clone(),
            r: v.r.iter().map(|x| -x).collect(),
            phi: v.phi.iter().map(|x| -x).collect(),
        })
}

/// Navier-slip boundary residuals: max |u_φ| on the edges and
/// max |u_r ± r^{−1}∂_φu_r − g| (− at φ = 0, + at φ = θ).
pub fn slip_residual(
    u: &VectorField,
    g_lower: &[f64],
    g_upper: &[f64],
) -> Result<(f64, f64)> {
    let grid = &u.grid;
    let n = grid.n_radial();
    if g_lower.len() != n || g_upper.len() != n {
        return Err(crate::error::Error::GridMismatch(format!(
            "slip data length {}/{} vs n_radial {n}",
            g_lower.len(),
            g_upper.len()
        )));
    }
    let ur = u.component_r();
    let dphi_ur = mul_r_pow(&d_phi(&ur), -1.0);
    let na = grid.n_angular();
    let mut tangency = 0.0f64;
    let mut slip = 0.0f64;
    for i in 0..n {
        tangency = tangency
            .max(u.phi[grid.idx(i, 0)].abs())
            .max(u.phi[grid.idx(i, na - 1)].abs());
        let low = ur.at(i, 0) - dphi_ur.at(i, 0) - g_lower[i];
        let up = ur.at(i, na - 1) + dphi_ur.at(i, na - 1) - g_upper[i];
        slip = slip.max(low.abs()).max(up.abs());
    }
    Ok((tangency, slip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{
        sep_divergence, sep_gradient, sep_laplacian_vector, RadialProfile, SeparableScalar,
        SeparableVector,
    };
    use crate::grid::{Grid, GridSpec};
    use crate::trig::TrigPoly;

    fn grid() -> Grid {
        Grid::new(
            GridSpec {
                s_min: -5.0,
                s_max: 5.0,
                n_radial: 257,
                n_angular: 97,
                t_max: 20.0,
                n_modes: 65,
            },
            1.1,
        )
        .unwrap()
    }

    fn analytic_pair() -> (SeparableVector, SeparableScalar) {
        let theta = 1.1;
        let psi = SeparableScalar::single(
            RadialProfile::gaussian(1.0, 0.0, 1.2),
            TrigPoly::sin_mode(theta, 1, 1.0).add(&TrigPoly::sin_mode(theta, 2, -0.4)),
        );
        let p = SeparableScalar::single(
            RadialProfile::gaussian(0.7, 0.3, 1.0),
            TrigPoly::cos_mode(theta, 1, 1.0),
        );
        (SeparableVector::from_stream(&psi), p)
    }

    /// Max-abs over the central region |s| ≤ 2.5, skipping the angular
    /// margin. The r^{−2} weights amplify finite-difference error without
    /// bound toward s → −∞, so FD-vs-analytic comparisons are only
    /// meaningful where the fields carry their mass.
    fn interior_max(f: &ScalarField, margin: usize) -> f64 {
        let g = &f.grid;
        let mut m = 0.0f64;
        for i in 0..g.n_radial() {
            if g.s(i).abs() > 2.5 {
                continue;
            }
            for j in margin..g.n_angular() - margin {
                m = m.max(f.at(i, j).abs());
            }
        }
        m
    }

    #[test]
    fn gradient_divergence_laplacian_match_analytic() {
        let g = grid();
        let (u, p) = analytic_pair();
        let uf = u.sample(&g);
        let pf = p.sample(&g);

        let grad_num = gradient(&pf);
        let grad_exact = sep_gradient(&p).sample(&g);
        let err_g = grad_num.axpy(-1.0, &grad_exact).unwrap();
        let gscale = interior_max(&grad_exact.component_r(), 3)
            .max(interior_max(&grad_exact.component_phi(), 3));
        assert!(interior_max(&err_g.component_r(), 3) < 1e-6 * gscale);
        assert!(interior_max(&err_g.component_phi(), 3) < 1e-6 * gscale);

        // Divergence of a stream-function field is identically zero, so
        // compare against the magnitude of the individual flux terms that
        // cancel in it.
        let div_num = divergence(&uf);
        let div_exact = sep_divergence(&u).sample(&g);
        let err_d = div_num.axpy(-1.0, &div_exact).unwrap();
        let dscale = interior_max(&mul_r_pow(&d_phi(&uf.component_phi()), -1.0), 3);
        assert!(interior_max(&err_d, 3) < 1e-6 * dscale);

        let lap_num = laplacian_vector(&uf);
        let lap_exact = sep_laplacian_vector(&u).sample(&g);
        let err_l = lap_num.axpy(-1.0, &lap_exact).unwrap();
        // The r^{-2} weight makes the Laplacian large near the tip; compare
        // relative to the field scale on the checked region.
        let scale = interior_max(&lap_exact.component_r(), 3)
            .max(interior_max(&lap_exact.component_phi(), 3));
        assert!(interior_max(&err_l.component_r(), 3) < 1e-6 * scale);
        assert!(interior_max(&err_l.component_phi(), 3) < 1e-6 * scale);
    }

    #[test]
    fn momentum_residual_vanishes_on_manufactured_data() {
        let g = grid();
        let (u, p) = analytic_pair();
        let f = crate::analytic::sep_stokes_source(&u, &p);
        let fs = f.sample(&g);
        let res = stokes_momentum_residual(&u.sample(&g), &p.sample(&g), &fs).unwrap();
        let scale = interior_max(&fs.component_r(), 3).max(interior_max(&fs.component_phi(), 3));
        assert!(interior_max(&res.component_r(), 3) < 1e-6 * scale);
        assert!(interior_max(&res.component_phi(), 3) < 1e-6 * scale);
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let g = grid();
        let p = SeparableScalar::single(
            RadialProfile::gaussian(1.0, 0.0, 1.0),
            TrigPoly::cos_mode(1.1, 2, 1.0),
        );
        let w = curl(&sep_gradient(&p).sample(&g));
        assert!(interior_max(&w, 3) < 5e-4);
    }
}
