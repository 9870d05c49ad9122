//! Bracketed root finding: plain bisection and safeguarded Newton.

use crate::error::{Error, Result};
use crate::real::Real;

/// Bisection on a bracket with a sign change. `f(lo)` and `f(hi)` must have
/// opposite signs (zero at an endpoint returns that endpoint).
pub fn bisect<R: Real, F>(f: F, lo: R, hi: R, tol: R, max_iter: usize) -> Result<R>
where
    F: Fn(R) -> Result<R>,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == R::zero() {
        return Ok(a);
    }
    if fb == R::zero() {
        return Ok(b);
    }
    if (fa > R::zero()) == (fb > R::zero()) {
        return Err(Error::NoSignChange(format!(
            "no sign change on [{a}, {b}]: f(lo)={fa:e}, f(hi)={fb:e}"
        )));
    }
    for _ in 0..max_iter {
        let mid = (a + b) * R::lit(0.5);
        if mid <= a || mid >= b || (b - a).abs() <= tol {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == R::zero() {
            return Ok(mid);
        }
        if (fm > R::zero()) == (fa > R::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok((a + b) * R::lit(0.5))
}

/// Newton iteration confined to a bracket, falling back to bisection whenever
/// the Newton step leaves the bracket or fails to shrink it.
///
/// `f_df` returns `(f(x), f'(x))`. The bracket `[lo, hi]` must carry a sign
/// change. Converges when the step or the bracket width drops below `tol`
/// (absolute).
pub fn newton_safeguarded<R: Real, F>(
    f_df: F,
    lo: R,
    hi: R,
    x0: R,
    tol: R,
    max_iter: usize,
) -> Result<R>
where
    F: Fn(R) -> Result<(R, R)>,
{
    let mut a = lo;
    let mut b = hi;
    let (fa, _) = f_df(a)?;
    let (fb, _) = f_df(b)?;
    if fa == R::zero() {
        return Ok(a);
    }
    if fb == R::zero() {
        return Ok(b);
    }
    if (fa > R::zero()) == (fb > R::zero()) {
        return Err(Error::NoSignChange(format!(
            "no sign change on [{a}, {b}]: f(lo)={fa:e}, f(hi)={fb:e}"
        )));
    }
    let positive_at_a = fa > R::zero();

    let mut x = if x0 > a && x0 < b {
        x0
    } else {
        (a + b) * R::lit(0.5)
    };
    for _ in 0..max_iter {
        let (fx, dfx) = f_df(x)?;
        if fx == R::zero() {
            return Ok(x);
        }
        if (fx > R::zero()) == positive_at_a {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() <= tol {
            return Ok((a + b) * R::lit(0.5));
        }
        let newton = x - fx / dfx;
        let step_ok = dfx != R::zero() && newton.is_finite() && newton > a && newton < b;
        let next = if step_ok {
            newton
        } else {
            (a + b) * R::lit(0.5)
        };
        if (next - x).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NonConvergence(format!(
        "safeguarded Newton did not converge in {max_iter} iterations (bracket [{a}, {b}])"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-13, 200).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bisect_rejects_same_sign_bracket() {
        let res = bisect(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 100);
        assert!(matches!(res, Err(Error::NoSignChange(_))));
    }

    #[test]
    fn newton_converges_quadratically_inside_bracket() {
        let r = newton_safeguarded(
            |x: f64| Ok((x * x - 2.0, 2.0 * x)),
            0.0,
            2.0,
            1.0,
            1e-14,
            100,
        )
        .unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn newton_survives_flat_derivative() {
        // derivative vanishes at the start point; must fall back to bisection
        let r = newton_safeguarded(
            |x: f64| Ok((x * x * x - 2.0, 3.0 * x * x)),
            -1.0,
            2.0,
            0.0,
            1e-13,
            200,
        )
        .unwrap();
        assert!((r - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn newton_step_outside_bracket_is_rejected() {
        // tan-like blowup pushes raw Newton far away
        let f = |x: f64| Ok((x.atan() - 1.0, 1.0 / (1.0 + x * x)));
        let r = newton_safeguarded(f, 0.0, 10.0, 9.0, 1e-13, 200).unwrap();
        assert!((r - 1.0f64.tan()).abs() < 1e-11);
    }
}
