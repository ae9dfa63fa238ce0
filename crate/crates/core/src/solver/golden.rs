use crate::scalar::Scalar;

/// Golden-section search for a maximiser of `f` on `[a, b]`, stopping once the
/// bracket is narrower than `tol`. Returns `(x, f(x))` for the best point seen.
pub(crate) fn maximize<S: Scalar>(f: impl Fn(S) -> S, mut a: S, mut b: S, tol: S) -> (S, S) {
    let inv_phi = S::lit(0.618_033_988_749_894_8);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // the bracket shrinks geometrically; 200 steps is far past f64 resolution
    for _ in 0..200 {
        if !(b - a > tol) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f2 > f1 {
        (x2, f2)
    } else {
        (x1, f1)
    }
}

/// Root of `g` in `[lo, hi]` given `g(lo) > 0 >= g(hi)`, by bisection to
/// floating-point resolution.
pub(crate) fn bisect_sign_change<S: Scalar>(g: impl Fn(S) -> S, mut lo: S, mut hi: S) -> S {
    for _ in 0..200 {
        let mid = (lo + hi) * S::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * S::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, v) = maximize(|x: f64| -(x - 0.3).powi(2) + 2.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn peak_at_endpoint() {
        let (x, _) = maximize(|x: f64| x, 0.0, 1.0, 1e-10);
        assert!(x > 1.0 - 1e-9);
    }

    #[test]
    fn bisection_root() {
        let r = bisect_sign_change(|x: f64| 0.4 - x, 0.0, 1.0);
        assert!((r - 0.4).abs() < 1e-15);
    }
}
