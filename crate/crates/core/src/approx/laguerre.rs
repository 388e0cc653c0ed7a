//! Associated Laguerre polynomials and displaced Fock-state overlaps.

use crate::hilbert::SystemParams;

const RESCALE: f64 = 1e150;

/// `L_n^α(x)` as `(sign, ln |L|)`, by upward recurrence with rescaling so
/// that large `n` and `x` do not overflow.
pub fn laguerre_log(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    let mut prev = 1.0f64;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut cur = 1.0 + alpha - x;
    let mut ln_scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    if cur == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    (cur.signum(), cur.abs().ln() + ln_scale)
}

/// `L_n^α(x)`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let (s, l) = laguerre_log(n, alpha, x);
    s * l.exp()
}

/// `ln(hi! / lo!)` for `lo ≤ hi`.
fn ln_factorial_ratio(lo: usize, hi: usize) -> f64 {
    ((lo + 1)..=hi).map(|j| (j as f64).ln()).sum()
}

/// `⟨n|D(d)|m⟩` with `D(d) = exp(d (a† − a))`, which is the overlap between
/// the n-th oscillator state of the σz = +1 branch and the m-th state of the
/// σz = −1 branch when `d = 2λ/ħω0`.
pub fn displaced_number_overlap(n: usize, m: usize, d: f64) -> f64 {
    if d == 0.0 {
        return if n == m { 1.0 } else { 0.0 };
    }
    let (lo, hi) = if n <= m { (n, m) } else { (m, n) };
    let k = hi - lo;
    let (ls, ll) = laguerre_log(lo, k as f64, d * d);
    if ls == 0.0 {
        return 0.0;
    }
    let mut sign = ls;
    if k % 2 == 1 {
        if d < 0.0 {
            sign = -sign;
        }
        if n <= m {
            sign = -sign;
        }
    }
    let ln_mag = -0.5 * d * d + k as f64 * d.abs().ln() - 0.5 * ln_factorial_ratio(lo, hi) + ll;
    sign * ln_mag.exp()
}

/// Renormalized gap `Δ̃ = Δ exp(−2 (λ/ħω0)²) L_n[(2λ/ħω0)²]`; the sign is kept.
pub fn renormalized_gap(p: &SystemParams, n: usize) -> f64 {
    let d = 2.0 * p.lambda / p.omega0;
    p.delta * displaced_number_overlap(n, n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, CMat, C64, ZERO};

    /// `exp(d (a† − a))` on a truncated space by diagonalizing `i d (a† − a)`.
    fn displacement_matrix(n_max: usize, d: f64) -> CMat {
        let a = crate::hilbert::ladder(n_max);
        let k = (a.adjoint().to_owned() - &a) * faer::Scale(C64::new(0.0, d));
        let (vals, u) = linalg::hermitian_eigen(&k).unwrap();
        let dim = n_max + 1;
        let mut out = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = ZERO;
                for l in 0..dim {
                    acc += u[(i, l)] * C64::from_polar(1.0, -vals[l]) * u[(j, l)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn low_order_closed_forms() {
        for x in [0.0, 0.3, 1.7, 5.0] {
            assert!((laguerre(1, 0.0, x) - (1.0 - x)).abs() < 1e-14);
            let l2 = 0.5 * (x * x - 4.0 * x + 2.0);
            assert!((laguerre(2, 0.0, x) - l2).abs() < 1e-13);
            let l1a = 3.0 - x;
            assert!((laguerre(1, 2.0, x) - l1a).abs() < 1e-14);
        }
    }

    #[test]
    fn large_order_stays_finite() {
        for n in [128, 256, 512] {
            let v = laguerre_log(n, 512.0, 300.0);
            assert!(v.1.is_finite());
            let o = displaced_number_overlap(n, 512, 4.0);
            assert!(o.is_finite() && o.abs() <= 1.0);
        }
    }

    #[test]
    fn vacuum_overlap() {
        // λ/ħω0 = 0.5, d = 1
        assert!((displaced_number_overlap(0, 0, 1.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((displaced_number_overlap(0, 0, 1.0) - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn zero_displacement_is_identity() {
        for n in 0..6 {
            for m in 0..6 {
                assert_eq!(displaced_number_overlap(n, m, 0.0), if n == m { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn matches_brute_force_displacement() {
        let d = 1.0;
        let dm = displacement_matrix(128, d);
        assert!(dm[(1, 1)].norm() < 1e-12);
        assert!(displaced_number_overlap(1, 1, d).abs() < 1e-15);
        for n in 0..8 {
            for m in 0..8 {
                let exact = dm[(n, m)];
                assert!(exact.im.abs() < 1e-10);
                assert!((exact.re - displaced_number_overlap(n, m, d)).abs() < 1e-10, "({n},{m})");
            }
        }
        let dm = displacement_matrix(128, -1.3);
        for (n, m) in [(0, 3), (3, 0), (2, 5), (5, 2)] {
            assert!((dm[(n, m)].re - displaced_number_overlap(n, m, -1.3)).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_vanishes_at_first_laguerre_zero() {
        let p = SystemParams::new(0.1, 0.0, 0.5);
        assert!(renormalized_gap(&p, 1).abs() < 1e-15);
        let p0 = p.with_lambda(0.0);
        assert_eq!(renormalized_gap(&p0, 3), p0.delta);
        let p1 = p.with_lambda(1.0);
        assert!((renormalized_gap(&p1, 0) - 0.1 * (-2.0f64).exp()).abs() < 1e-16);
    }
}
