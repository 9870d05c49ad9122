//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar the whole crate is generic over.
///
/// Implemented for [f32] and [f64]. The documented tolerances (quadrature at
/// 1e-10, roots at 1e-12) are only meaningful at f64; f32 works but callers
/// must loosen every tolerance accordingly.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an f64 literal. Lossy for f32; exact for f64.
    fn lit(v: f64) -> Self;

    /// Converts a small count (grid sizes, color numbers).
    fn of_usize(n: usize) -> Self;
}

impl Real for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }
    #[inline]
    fn of_usize(n: usize) -> Self {
        n as f64
    }
}

impl Real for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn of_usize(n: usize) -> Self {
        n as f32
    }
}

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp<R: Real>(a: R, b: R) -> R {
    if a == R::neg_infinity() {
        return b;
    }
    if b == R::neg_infinity() {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Compensated (Kahan) accumulator.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<R: Real> {
    sum: R,
    carry: R,
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self {
            sum: R::zero(),
            carry: R::zero(),
        }
    }
}

impl<R: Real> KahanSum<R> {
    pub fn add(&mut self, x: R) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    /// Multiplies the accumulated total by `c`, folding the compensation in first.
    pub fn scale(&mut self, c: R) {
        self.sum = self.value() * c;
        self.carry = R::zero();
    }

    pub fn value(&self) -> R {
        self.sum - self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_exp_matches_naive_in_range() {
        let v = log_add_exp(1.0f64, 2.0);
        assert!((v - (1f64.exp() + 2f64.exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn log_add_exp_survives_large_arguments() {
        let v = log_add_exp(1234.0f64, 1232.0);
        assert!((v - (1234.0 + (-2f64).exp().ln_1p())).abs() < 1e-12);
    }

    #[test]
    fn kahan_beats_naive_on_adversarial_sum() {
        let mut k = KahanSum::<f64>::default();
        let mut naive = 0.0f64;
        for _ in 0..10_000_000 {
            k.add(0.1);
            naive += 0.1;
        }
        let exact = 1_000_000.0;
        assert!((k.value() - exact).abs() < 1e-7);
        assert!((k.value() - exact).abs() <= (naive - exact).abs());
    }
}
