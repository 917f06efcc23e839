//! Closed-form manufactured fields: (polynomial × Gaussian) radial profiles
//! in s = log r, tensorized with trig polynomials in φ.
//!
//! The term class A·(s−c)^p·e^{−(s−c)²/(2σ²)} is closed under d/ds and under
//! multiplication by e^{γs} (the log-radius avatar of r^γ), and [`TrigPoly`]
//! is closed under d/dφ. So every polar differential operator in the crate
//! maps a [`SeparableVector`] to another one exactly, which is what makes
//! manufactured solutions with machine-accurate sources possible: the source
//! f = −Δu + ∇p is computed symbolically, never by finite differences.

use crate::grid::{BoundaryData, Grid, ScalarField, VectorField};
use crate::trig::TrigPoly;

/// One radial term A·(s−c)^p·e^{−(s−c)²/(2σ²)}.
#[derive(Clone, Copy, Debug)]
pub struct RadialTerm {
    pub amp: f64,
    pub center: f64,
    pub sigma: f64,
    pub pow: u32,
}

impl RadialTerm {
    #[inline]
    fn eval(&self, s: f64) -> f64 {
        let z = s - self.center;
        self.amp * z.powi(self.pow as i32) * (-z * z / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// Sum of [`RadialTerm`]s — the radial factor of a separable field.
#[derive(Clone, Debug, Default)]
pub struct RadialProfile {
    pub terms: Vec<RadialTerm>,
}

impl RadialProfile {
    pub fn gaussian(amp: f64, center: f64, sigma: f64) -> Self {
        RadialProfile {
            terms: vec![RadialTerm {
                amp,
                center,
                sigma,
                pow: 0,
            }],
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(s)).sum()
    }

    /// Exact d/ds: (z^p G)' = p z^{p−1} G − z^{p+1} G / σ².
    pub fn deriv(&self) -> RadialProfile {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.pow > 0 {
                terms.push(RadialTerm {
                    amp: t.amp * t.pow as f64,
                    pow: t.pow - 1,
                    ..*t
                });
            }
            terms.push(RadialTerm {
                amp: -t.amp / (t.sigma * t.sigma),
                pow: t.pow + 1,
                ..*t
            });
        }
        RadialProfile { terms }
    }

    pub fn deriv_n(&self, n: u32) -> RadialProfile {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.deriv();
        }
        p
    }

    /// Exact multiplication by e^{γs}. Completing the square shifts the
    /// center to c + γσ² and re-expands the polynomial about the new center.
    pub fn mul_exp(&self, gamma: f64) -> RadialProfile {
        let mut terms = Vec::new();
        for t in &self.terms {
            let c2 = t.center + gamma * t.sigma * t.sigma;
            let shift = gamma * t.sigma * t.sigma; // (s − c) = (s − c2) + shift
            let scale = t.amp * (gamma * t.center + 0.5 * gamma * gamma * t.sigma * t.sigma).exp();
            // binomial expansion of ((s − c2) + shift)^p
            let p = t.pow;
            let mut binom = 1.0f64;
            for q in 0..=p {
                // binom = C(p, q); term (s−c2)^q · shift^{p−q}
                let amp = scale * binom * shift.powi((p - q) as i32);
                if amp != 0.0 {
                    terms.push(RadialTerm {
                        amp,
                        center: c2,
                        sigma: t.sigma,
                        pow: q,
                    });
                }
                binom *= (p - q) as f64 / (q + 1) as f64;
            }
        }
        RadialProfile { terms }
    }

    pub fn scale(&self, c: f64) -> RadialProfile {
        RadialProfile {
            terms: self
                .terms
                .iter()
                .map(|t| RadialTerm {
                    amp: t.amp * c,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &RadialProfile) -> RadialProfile {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        RadialProfile { terms }
    }
}

/// Separable scalar field Σ_m R_m(s)·Θ_m(φ).
#[derive(Clone, Debug, Default)]
pub struct SeparableScalar {
    pub terms: Vec<(RadialProfile, TrigPoly)>,
}

impl SeparableScalar {
    pub fn single(radial: RadialProfile, angular: TrigPoly) -> Self {
        SeparableScalar {
            terms: vec![(radial, angular)],
        }
    }

    pub fn eval(&self, s: f64, phi: f64) -> f64 {
        self.terms
            .iter()
            .map(|(r, a)| r.eval(s) * a.eval(phi))
            .sum()
    }

    /// Exact ∂_s (equivalently r∂_r in physical variables).
    pub fn d_s(&self) -> SeparableScalar {
        SeparableScalar {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| (r.deriv(), a.clone()))
                .collect(),
        }
    }

    /// Exact ∂_φ.
    pub fn d_phi(&self) -> SeparableScalar {
        SeparableScalar {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| (r.clone(), a.deriv()))
                .collect(),
        }
    }

    /// Exact multiplication by r^γ = e^{γs}.
    pub fn mul_r_pow(&self, gamma: f64) -> SeparableScalar {
        SeparableScalar {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| (r.mul_exp(gamma), a.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> SeparableScalar {
        SeparableScalar {
            terms: self
                .terms
                .iter()
                .map(|(r, a)| (r.scale(c), a.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &SeparableScalar) -> SeparableScalar {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        SeparableScalar { terms }
    }

    /// Mixed derivative (r∂_r)^j ∂_φ^ℓ, exact.
    pub fn deriv_mixed(&self, j: u32, l: u32) -> SeparableScalar {
        let mut f = self.clone();
        for _ in 0..j {
            f = f.d_s();
        }
        for _ in 0..l {
            f = f.d_phi();
        }
        f
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(grid, |s, phi| self.eval(s, phi))
    }

    /// Edge values as boundary data over the radial grid.
    pub fn edge_traces(&self, grid: &Grid) -> BoundaryData {
        BoundaryData::from_fns(
            grid,
            |s| self.eval(s, 0.0),
            |s| self.eval(s, grid.theta),
        )
    }
}

/// Separable polar vector field (u_r, u_φ).
#[derive(Clone, Debug)]
pub struct SeparableVector {
    pub r: SeparableScalar,
    pub phi: SeparableScalar,
}

impl SeparableVector {
    /// u = ∇⊥ψ = (−r^{−1}∂_φψ, ∂_rψ): exactly divergence-free, with
    /// u_φ = r^{−1}∂_sψ in log-radius.
    pub fn from_stream(psi: &SeparableScalar) -> SeparableVector {
        SeparableVector {
            r: psi.d_phi().mul_r_pow(-1.0).scale(-1.0),
            phi: psi.d_s().mul_r_pow(-1.0),
        }
    }

    pub fn sample(&self, grid: &Grid) -> VectorField {
        VectorField::from_fns(
            grid,
            |s, phi| self.r.eval(s, phi),
            |s, phi| self.phi.eval(s, phi),
        )
    }

    pub fn scale(&self, c: f64) -> SeparableVector {
        SeparableVector {
            r: self.r.scale(c),
            phi: self.phi.scale(c),
        }
    }

    pub fn add(&self, other: &SeparableVector) -> SeparableVector {
        SeparableVector {
            r: self.r.add(&other.r),
            phi: self.phi.add(&other.phi),
        }
    }
}

/// Exact vector Laplacian in polar coordinates:
/// (Δu)_r = r^{−2}[((r∂_r)² + ∂_φ²)u_r − 2∂_φ u_φ − u_r], and symmetrically
/// for the angular component with the sign of the coupling term flipped.
pub fn sep_laplacian_vector(u: &SeparableVector) -> SeparableVector {
    let lr = u
        .r
        .d_s()
        .d_s()
        .add(&u.r.d_phi().d_phi())
        .add(&u.phi.d_phi().scale(-2.0))
        .add(&u.r.scale(-1.0));
    let lphi = u
        .phi
        .d_s()
        .d_s()
        .add(&u.phi.d_phi().d_phi())
        .add(&u.r.d_phi().scale(2.0))
        .add(&u.phi.scale(-1.0));
    SeparableVector {
        r: lr.mul_r_pow(-2.0),
        phi: lphi.mul_r_pow(-2.0),
    }
}

/// Exact scalar Laplacian Δp = r^{−2}[(r∂_r)² + ∂_φ²]p.
pub fn sep_laplacian_scalar(p: &SeparableScalar) -> SeparableScalar {
    p.d_s().d_s().add(&p.d_phi().d_phi()).mul_r_pow(-2.0)
}

/// Exact gradient ∇p = (∂_r p, r^{−1}∂_φ p) = r^{−1}(∂_s p, ∂_φ p).
pub fn sep_gradient(p: &SeparableScalar) -> SeparableVector {
    SeparableVector {
        r: p.d_s().mul_r_pow(-1.0),
        phi: p.d_phi().mul_r_pow(-1.0),
    }
}

/// Exact divergence r^{−1}[(r∂_r + 1)u_r + ∂_φ u_φ].
pub fn sep_divergence(u: &SeparableVector) -> SeparableScalar {
    u.r.d_s()
        .add(&u.r)
        .add(&u.phi.d_phi())
        .mul_r_pow(-1.0)
}

/// Manufactured Stokes data: given separable (u, p), return f = −Δu + ∇p.
pub fn sep_stokes_source(u: &SeparableVector, p: &SeparableScalar) -> SeparableVector {
    sep_laplacian_vector(u).scale(-1.0).add(&sep_gradient(p))
}

/// Navier-slip boundary remainder g = u_r ± r^{−1}∂_φ u_r on the two edges
/// (− at φ = 0, + at φ = θ), as boundary data over the radial grid.
pub fn sep_slip_data(u: &SeparableVector, grid: &Grid) -> BoundaryData {
    let dphi_ur = u.r.d_phi().mul_r_pow(-1.0);
    BoundaryData::from_fns(
        grid,
        |s| u.r.eval(s, 0.0) - dphi_ur.eval(s, 0.0),
        |s| u.r.eval(s, grid.theta) + dphi_ur.eval(s, grid.theta),
    )
}
