//! Angular trigonometric polynomials on (0, θ) and their complex-frequency
//! generalization.
//!
//! The natural angular bases on the wedge are cos(kπφ/θ) and sin(kπφ/θ).
//! Band-limited data in these bases is what the mode solvers manipulate
//! exactly: differentiation, products, and uniform-grid trapezoid projection
//! are all closed-form. [`CFreqPoly`] extends this to terms
//! trig(ω·φ) / trig(ω·(θ−φ)) with complex ω — the building blocks of the
//! closed-form Green's kernels.

use num_complex::Complex64;

/// Real trig polynomial Σ_k a_k cos(kπφ/θ) + Σ_k b_k sin(kπφ/θ).
///
/// `cos[k]` is the coefficient of cos(kπφ/θ) (k starts at 0);
/// `sin[k]` is the coefficient of sin((k+1)πφ/θ).
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub theta: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn zero(theta: f64) -> Self {
        TrigPoly {
            theta,
            cos: vec![],
            sin: vec![],
        }
    }

    pub fn constant(theta: f64, c: f64) -> Self {
        TrigPoly {
            theta,
            cos: vec![c],
            sin: vec![],
        }
    }

    /// Single cosine mode a·cos(kπφ/θ).
    pub fn cos_mode(theta: f64, k: usize, a: f64) -> Self {
        let mut cos = vec![0.0; k + 1];
        cos[k] = a;
        TrigPoly {
            theta,
            cos,
            sin: vec![],
        }
    }

    /// Single sine mode b·sin(kπφ/θ), k ≥ 1.
    pub fn sin_mode(theta: f64, k: usize, b: f64) -> Self {
        assert!(k >= 1);
        let mut sin = vec![0.0; k];
        sin[k - 1] = b;
        TrigPoly {
            theta,
            cos: vec![],
            sin,
        }
    }

    #[inline]
    fn mu(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.theta
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let mut v = 0.0;
        for (k, &a) in self.cos.iter().enumerate() {
            v += a * (self.mu(k) * phi).cos();
        }
        for (i, &b) in self.sin.iter().enumerate() {
            v += b * (self.mu(i + 1) * phi).sin();
        }
        v
    }

    /// Exact d/dφ.
    pub fn deriv(&self) -> TrigPoly {
        // cos(kx)' = −k sin(kx); sin(kx)' = k cos(kx)
        let mut sin = vec![0.0; self.cos.len().saturating_sub(1)];
        for (k, &a) in self.cos.iter().enumerate().skip(1) {
            sin[k - 1] -= a * self.mu(k);
        }
        let mut cos = vec![0.0; self.sin.len() + 1];
        for (i, &b) in self.sin.iter().enumerate() {
            cos[i + 1] += b * self.mu(i + 1);
        }
        TrigPoly {
            theta: self.theta,
            cos,
            sin,
        }
    }

    pub fn scale(&self, c: f64) -> TrigPoly {
        TrigPoly {
            theta: self.theta,
            cos: self.cos.iter().map(|a| a * c).collect(),
            sin: self.sin.iter().map(|b| b * c).collect(),
        }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        assert_eq!(self.theta, other.theta);
        let nc = self.cos.len().max(other.cos.len());
        let ns = self.sin.len().max(other.sin.len());
        let mut cos = vec![0.0; nc];
        let mut sin = vec![0.0; ns];
        for (k, &a) in self.cos.iter().enumerate() {
            cos[k] += a;
        }
        for (k, &a) in other.cos.iter().enumerate() {
            cos[k] += a;
        }
        for (k, &b) in self.sin.iter().enumerate() {
            sin[k] += b;
        }
        for (k, &b) in other.sin.iter().enumerate() {
            sin[k] += b;
        }
        TrigPoly {
            theta: self.theta,
            cos,
            sin,
        }
    }

    /// Exact product (product-to-sum rules; the band adds).
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        assert_eq!(self.theta, other.theta);
        let band = self.band() + other.band();
        let mut cos = vec![0.0; band + 1];
        let mut sin = vec![0.0; band + 1];
        let mut addc = |k: i64, v: f64| {
            // cos is even in the index
            cos[k.unsigned_abs() as usize] += v;
        };
        // cos·cos → cos
        for (m, &a) in self.cos.iter().enumerate() {
            for (k, &a2) in other.cos.iter().enumerate() {
                let p = 0.5 * a * a2;
                addc((m as i64) - (k as i64), p);
                addc((m + k) as i64, p);
            }
        }
        // sin·sin → cos
        for (mi, &b) in self.sin.iter().enumerate() {
            for (ki, &b2) in other.sin.iter().enumerate() {
                let (m, k) = (mi as i64 + 1, ki as i64 + 1);
                let p = 0.5 * b * b2;
                addc(m - k, p);
                addc(m + k, -p);
            }
        }
        let mut adds = |k: i64, v: f64| {
            // sin is odd in the index; sin(0·x) = 0
            use std::cmp::Ordering::*;
            match k.cmp(&0) {
                Greater => sin[k as usize - 1] += v,
                Less => sin[(-k) as usize - 1] -= v,
                Equal => {}
            }
        };
        // sin·cos → sin
        for (mi, &b) in self.sin.iter().enumerate() {
            for (k, &a) in other.cos.iter().enumerate() {
                let m = mi as i64 + 1;
                let p = 0.5 * b * a;
                adds(m + k as i64, p);
                adds(m - k as i64, p);
            }
        }
        // cos·sin → sin
        for (m, &a) in self.cos.iter().enumerate() {
            for (ki, &b) in other.sin.iter().enumerate() {
                let k = ki as i64 + 1;
                let p = 0.5 * a * b;
                adds(k + m as i64, p);
                adds(k - m as i64, p);
            }
        }
        // trim
        let mut out = TrigPoly {
            theta: self.theta,
            cos,
            sin,
        };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.cos.last().is_some_and(|v| *v == 0.0) {
            self.cos.pop();
        }
        while self.sin.last().is_some_and(|v| *v == 0.0) {
            self.sin.pop();
        }
    }

    /// Largest mode index present.
    pub fn band(&self) -> usize {
        (self.cos.len().saturating_sub(1)).max(self.sin.len())
    }

    /// ∫₀^θ of the polynomial (closed form).
    pub fn integral(&self) -> f64 {
        let mut v = self.cos.first().copied().unwrap_or(0.0) * self.theta;
        for (i, &b) in self.sin.iter().enumerate() {
            let k = i + 1;
            // ∫ sin(kπφ/θ) dφ = θ(1 − (−1)^k)/(kπ)
            if k % 2 == 1 {
                v += b * 2.0 * self.theta / (k as f64 * std::f64::consts::PI);
            }
        }
        // ∫ cos(kπφ/θ) dφ = 0 for k ≥ 1
        v
    }

    /// Primitive F(φ) = ∫₀^φ with F(0) = 0 (closed form; constant cos term
    /// would leave the trig class, so it is rejected unless zero).
    pub fn primitive(&self) -> TrigPoly {
        assert!(
            self.cos.first().copied().unwrap_or(0.0).abs() < 1e-300,
            "primitive of a nonzero-mean cosine part is not a trig polynomial"
        );
        let mut sin = vec![0.0; self.cos.len().saturating_sub(1)];
        for (k, &a) in self.cos.iter().enumerate().skip(1) {
            sin[k - 1] += a / self.mu(k);
        }
        let mut cos = vec![0.0; self.sin.len() + 1];
        let mut c0 = 0.0;
        for (i, &b) in self.sin.iter().enumerate() {
            let k = i + 1;
            cos[k] -= b / self.mu(k);
            c0 += b / self.mu(k); // so that F(0) = 0
        }
        cos[0] += c0;
        TrigPoly {
            theta: self.theta,
            cos,
            sin,
        }
    }

    pub fn eval_nodes(&self, phis: &[f64]) -> Vec<f64> {
        phis.iter().map(|&p| self.eval(p)).collect()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.cos
            .iter()
            .chain(&self.sin)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Trapezoid projection of uniform-grid samples (endpoints included) onto the
/// plain cosine basis: returns a_k, k = 0..=kmax, where
/// a_0 = (1/θ)∫f, a_k = (2/θ)∫f cos(kπφ/θ). Exact for cosine-band-limited
/// input with band + kmax < 2(n−1); sine content of the samples aliases at
/// O(h²) (same-parity data only — callers stay within one family).
pub fn cos_project(values: &[f64], theta: f64, kmax: usize) -> Vec<f64> {
    let n = values.len();
    let h = theta / (n - 1) as f64;
    (0..=kmax)
        .map(|k| {
            let mu = k as f64 * std::f64::consts::PI / theta;
            let mut sum = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                sum += w * v * (mu * (j as f64 * h)).cos();
            }
            sum * h * if k == 0 { 1.0 / theta } else { 2.0 / theta }
        })
        .collect()
}

/// Sine-basis counterpart: b_k = (2/θ)∫f sin(kπφ/θ), k = 1..=kmax
/// (index k−1 in the output).
pub fn sin_project(values: &[f64], theta: f64, kmax: usize) -> Vec<f64> {
    let n = values.len();
    let h = theta / (n - 1) as f64;
    (1..=kmax)
        .map(|k| {
            let mu = k as f64 * std::f64::consts::PI / theta;
            let mut sum = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                sum += w * v * (mu * (j as f64 * h)).sin();
            }
            sum * h * 2.0 / theta
        })
        .collect()
}

/// Complex versions for transform-side rows.
pub fn cos_project_c(values: &[Complex64], theta: f64, kmax: usize) -> Vec<Complex64> {
    let re = cos_project(&values.iter().map(|v| v.re).collect::<Vec<_>>(), theta, kmax);
    let im = cos_project(&values.iter().map(|v| v.im).collect::<Vec<_>>(), theta, kmax);
    re.into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect()
}

pub fn sin_project_c(values: &[Complex64], theta: f64, kmax: usize) -> Vec<Complex64> {
    let re = sin_project(&values.iter().map(|v| v.re).collect::<Vec<_>>(), theta, kmax);
    let im = sin_project(&values.iter().map(|v| v.im).collect::<Vec<_>>(), theta, kmax);
    re.into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect()
}

/// Which trig function a [`CFreqPoly`] term uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// Argument form of a term: ω·φ or ω·(θ−φ).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKind {
    Phi,
    ThetaMinusPhi,
}

/// One term c·trig(ω·arg(φ)).
#[derive(Clone, Copy, Debug)]
pub struct CFreqTerm {
    pub coeff: Complex64,
    pub freq: Complex64,
    pub kind: TrigKind,
    pub arg: ArgKind,
}

/// Finite sum of complex-frequency trig terms — closed under d/dφ, so
/// per-mode solutions (sine series + boundary-kernel parts) and all their
/// angular derivatives are exact.
#[derive(Clone, Debug)]
pub struct CFreqPoly {
    pub theta: f64,
    pub terms: Vec<CFreqTerm>,
}

impl CFreqPoly {
    pub fn zero(theta: f64) -> Self {
        CFreqPoly {
            theta,
            terms: vec![],
        }
    }

    pub fn push(&mut self, coeff: Complex64, freq: Complex64, kind: TrigKind, arg: ArgKind) {
        if coeff != Complex64::ZERO {
            self.terms.push(CFreqTerm {
                coeff,
                freq,
                kind,
                arg,
            });
        }
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        let mut v = Complex64::ZERO;
        for t in &self.terms {
            let x = match t.arg {
                ArgKind::Phi => phi,
                ArgKind::ThetaMinusPhi => self.theta - phi,
            };
            let z = t.freq * x;
            v += t.coeff
                * match t.kind {
                    TrigKind::Sin => z.sin(),
                    TrigKind::Cos => z.cos(),
                };
        }
        v
    }

    /// Exact d/dφ.
    pub fn deriv(&self) -> CFreqPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let orientation = match t.arg {
                    ArgKind::Phi => 1.0,
                    ArgKind::ThetaMinusPhi => -1.0,
                };
                match t.kind {
                    TrigKind::Sin => CFreqTerm {
                        coeff: t.coeff * t.freq * orientation,
                        freq: t.freq,
                        kind: TrigKind::Cos,
                        arg: t.arg,
                    },
                    TrigKind::Cos => CFreqTerm {
                        coeff: -t.coeff * t.freq * orientation,
                        freq: t.freq,
                        kind: TrigKind::Sin,
                        arg: t.arg,
                    },
                }
            })
            .collect();
        CFreqPoly {
            theta: self.theta,
            terms,
        }
    }

    pub fn scale(&self, c: Complex64) -> CFreqPoly {
        CFreqPoly {
            theta: self.theta,
            terms: self
                .terms
                .iter()
                .map(|t| CFreqTerm {
                    coeff: t.coeff * c,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &CFreqPoly) -> CFreqPoly {
        assert_eq!(self.theta, other.theta);
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        CFreqPoly {
            theta: self.theta,
            terms,
        }
    }

    pub fn eval_nodes(&self, phis: &[f64]) -> Vec<Complex64> {
        phis.iter().map(|&p| self.eval(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deriv_and_mul_consistent_with_pointwise() {
        let theta = 0.9;
        let mut p = TrigPoly::cos_mode(theta, 2, 0.7);
        p = p.add(&TrigPoly::sin_mode(theta, 3, -0.4));
        p = p.add(&TrigPoly::constant(theta, 0.2));
        let q = TrigPoly::sin_mode(theta, 1, 1.3).add(&TrigPoly::cos_mode(theta, 1, 0.5));
        let prod = p.mul(&q);
        let d = p.deriv();
        let h = 1e-6;
        for i in 0..13 {
            let phi = theta * i as f64 / 12.0;
            let exp = p.eval(phi) * q.eval(phi);
            assert!((prod.eval(phi) - exp).abs() < 1e-12);
            if i > 0 && i < 12 {
                let fd = (p.eval(phi + h) - p.eval(phi - h)) / (2.0 * h);
                assert!((d.eval(phi) - fd).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn projections_recover_band_limited_coefficients() {
        let theta = 1.2;
        let n = 33;
        let phis: Vec<f64> = (0..n).map(|j| theta * j as f64 / (n - 1) as f64).collect();
        // Projections are exact within one family; keep cos and sin data
        // separate (cross-family trapezoid sums only vanish at O(h²)).
        let pc = TrigPoly::cos_mode(theta, 3, 0.8).add(&TrigPoly::constant(theta, -0.3));
        let ps = TrigPoly::sin_mode(theta, 5, 0.6);
        let a = cos_project(&pc.eval_nodes(&phis), theta, 8);
        let b = sin_project(&ps.eval_nodes(&phis), theta, 8);
        assert!((a[0] - -0.3).abs() < 1e-13);
        assert!((a[3] - 0.8).abs() < 1e-13);
        assert!((b[4] - 0.6).abs() < 1e-13);
        for (k, &v) in a.iter().enumerate() {
            if k != 0 && k != 3 {
                assert!(v.abs() < 1e-13, "spurious cos coeff {k}: {v}");
            }
        }
        for (i, &v) in b.iter().enumerate() {
            if i != 4 {
                assert!(v.abs() < 1e-13, "spurious sin coeff {}: {v}", i + 1);
            }
        }
    }

    #[test]
    fn primitive_inverts_derivative() {
        let theta = 0.7;
        let p = TrigPoly::sin_mode(theta, 2, 1.1).add(&TrigPoly::cos_mode(theta, 4, -0.5));
        let back = p.deriv().primitive();
        for i in 0..=20 {
            let phi = theta * i as f64 / 20.0;
            assert!((back.eval(phi) - (p.eval(phi) - p.eval(0.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn cfreq_deriv_matches_fd() {
        let theta = 1.1;
        let mut p = CFreqPoly::zero(theta);
        p.push(
            Complex64::new(1.0, 0.5),
            Complex64::new(2.0, -0.7),
            TrigKind::Sin,
            ArgKind::Phi,
        );
        p.push(
            Complex64::new(-0.3, 0.2),
            Complex64::new(1.5, 0.4),
            TrigKind::Cos,
            ArgKind::ThetaMinusPhi,
        );
        let d = p.deriv();
        let h = 1e-6;
        for i in 1..10 {
            let phi = theta * i as f64 / 10.0 - 1e-3;
            let fd = (p.eval(phi + h) - p.eval(phi - h)) / (2.0 * h);
            assert!((d.eval(phi) - fd).norm() < 1e-5);
        }
    }
}
