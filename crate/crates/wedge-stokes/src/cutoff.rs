//! The repo-wide smooth cutoff ζ and its dilations.
//!
//! ζ is the standard exponential-bump partition: ζ = 1 on [0,1], ζ = 0 on
//! [2,∞), strictly monotone in between, C^∞ everywhere. The same profile,
//! reparametrized, provides the bump `h` used by the trace-extension
//! operator. The first three derivatives are closed-form so localized
//! quantities are reproducible bit-for-bit.

/// Fixed smooth cutoff with 1_[0,1] ≤ ζ ≤ 1_[0,2].
#[derive(Clone, Copy, Debug, Default)]
pub struct Cutoff;

/// e^{−1/x} for x > 0, else 0 — the C^∞ glue.
#[inline]
fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl Cutoff {
    /// ζ(r).
    pub fn zeta(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let a = r - 1.0; // distance into the transition
            let b = 2.0 - r;
            let u = bump(a);
            let v = bump(b);
            v / (u + v)
        }
    }

    /// dζ/dr, closed form.
    pub fn zeta_d(&self, r: f64) -> f64 {
        if r <= 1.0 || r >= 2.0 {
            0.0
        } else {
            let a = r - 1.0;
            let b = 2.0 - r;
            let u = bump(a);
            let v = bump(b);
            let d = u + v;
            // ζ' = −uv(1/a² + 1/b²)/(u+v)²
            -u * v * (1.0 / (a * a) + 1.0 / (b * b)) / (d * d)
        }
    }

    /// d²ζ/dr², closed form.
    pub fn zeta_dd(&self, r: f64) -> f64 {
        if r <= 1.0 || r >= 2.0 {
            0.0
        } else {
            let a = r - 1.0;
            let b = 2.0 - r;
            let u = bump(a);
            let v = bump(b);
            let ia2 = 1.0 / (a * a);
            let ib2 = 1.0 / (b * b);
            let d = u + v;
            // w = uv(1/a²+1/b²); ζ' = −w/d²; ζ'' = −(w'd² − w·2d·d')/d⁴.
            let w = u * v * (ia2 + ib2);
            // u' = u/a², v' = −v/b²  (chain rule through a' = 1, b' = −1)
            let up = u * ia2;
            let vp = -v * ib2;
            let w_p = up * v * (ia2 + ib2)
                + u * vp * (ia2 + ib2)
                + u * v * (-2.0 / (a * a * a) + 2.0 / (b * b * b));
            let d_p = up + vp;
            -(w_p * d - 2.0 * w * d_p) / (d * d * d)
        }
    }

    /// d³ζ/dr³, closed form. ζ = v/d with d = u + v; with the derivative
    /// chains of the bumps (u⁽ᵏ⁾, v⁽ᵏ⁾ below), Leibniz on v = ζ·d gives the
    /// stable recurrence ζ⁽ᵏ⁾ = (v⁽ᵏ⁾ − Σ_{m<k} C(k,m) ζ⁽ᵐ⁾d⁽ᵏ⁻ᵐ⁾)/d.
    pub fn zeta_ddd(&self, r: f64) -> f64 {
        if r <= 1.0 || r >= 2.0 {
            0.0
        } else {
            let a = r - 1.0;
            let b = 2.0 - r;
            let u = bump(a);
            let v = bump(b);
            // u = e^{−1/a}, a′ = 1: u′ = u/a², u″ = u(1/a⁴ − 2/a³),
            // u‴ = u(1/a⁶ − 6/a⁵ + 6/a⁴); v mirrors with b′ = −1.
            let u1 = u / (a * a);
            let u2 = u * (1.0 / a.powi(4) - 2.0 / a.powi(3));
            let u3 = u * (1.0 / a.powi(6) - 6.0 / a.powi(5) + 6.0 / a.powi(4));
            let v1 = -v / (b * b);
            let v2 = v * (1.0 / b.powi(4) - 2.0 / b.powi(3));
            let v3 = v * (-1.0 / b.powi(6) + 6.0 / b.powi(5) - 6.0 / b.powi(4));
            let d = u + v;
            let d1 = u1 + v1;
            let d2 = u2 + v2;
            let d3 = u3 + v3;
            let z0 = v / d;
            let z1 = (v1 - z0 * d1) / d;
            let z2 = (v2 - 2.0 * z1 * d1 - z0 * d2) / d;
            (v3 - 3.0 * z2 * d1 - 3.0 * z1 * d2 - z0 * d3) / d
        }
    }

    /// r·dζ/dr as a function of s = log r (what `r∂_r` produces).
    pub fn zeta_rdr_of_s(&self, s: f64) -> f64 {
        let r = s.exp();
        r * self.zeta_d(r)
    }

    /// The dilated family η_n(r) = η(log(r)/n) where η(s) = ζ(e^s)... the
    /// paper's η is ζ seen in log-radius; η_n widens the plateau by n.
    pub fn eta_n(&self, r: f64, n: u32) -> f64 {
        let s = r.ln() / n as f64;
        self.zeta(s.exp())
    }

    /// Bump h: [0,∞) → [0,1] with h(0) = 1 and h = 0 for x ≥ 1 — ζ
    /// reparametrized onto [0,1), used by the trace extension.
    pub fn h(&self, x: f64) -> f64 {
        self.zeta(1.0 + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sandwich_and_monotone() {
        let z = Cutoff;
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let r = i as f64 * 0.01;
            let v = z.zeta(r);
            assert!((0.0..=1.0).contains(&v));
            if r <= 1.0 {
                assert_eq!(v, 1.0);
            }
            if r >= 2.0 {
                assert_eq!(v, 0.0);
            }
            if r >= 1.0 {
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let z = Cutoff;
        let h = 1e-5;
        for &r in &[1.1, 1.3, 1.5, 1.7, 1.9] {
            let fd1 = (z.zeta(r + h) - z.zeta(r - h)) / (2.0 * h);
            assert!(
                (fd1 - z.zeta_d(r)).abs() < 1e-7,
                "zeta' mismatch at r={r}: {fd1} vs {}",
                z.zeta_d(r)
            );
            let fd2 = (z.zeta_d(r + h) - z.zeta_d(r - h)) / (2.0 * h);
            assert!(
                (fd2 - z.zeta_dd(r)).abs() < 1e-6,
                "zeta'' mismatch at r={r}: {fd2} vs {}",
                z.zeta_dd(r)
            );
            let fd3 = (z.zeta_dd(r + h) - z.zeta_dd(r - h)) / (2.0 * h);
            assert!(
                (fd3 - z.zeta_ddd(r)).abs() < 1e-4 * (1.0 + z.zeta_ddd(r).abs()),
                "zeta''' mismatch at r={r}: {fd3} vs {}",
                z.zeta_ddd(r)
            );
        }
        // Smooth across the junctions.
        assert!(z.zeta_d(1.0 + 1e-9).abs() < 1e-6);
        assert!(z.zeta_d(2.0 - 1e-9).abs() < 1e-6);
    }

    #[test]
    fn bump_h_endpoints() {
        let z = Cutoff;
        assert_eq!(z.h(0.0), 1.0);
        assert_eq!(z.h(1.0), 0.0);
        assert!(z.h(0.5) > 0.0 && z.h(0.5) < 1.0);
    }
}
