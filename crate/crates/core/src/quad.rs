//! Adaptive quadrature on a Gauss(7)/Kronrod(15) embedded pair.
//!
//! The 15-point Kronrod extension supplies the value, the gap to the embedded
//! 7-point Gauss rule the local error estimate. Panels live in a max-heap on
//! the estimate and the worst one is bisected until the global estimate meets
//! the tolerance or the subdivision budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::{KahanSum, Real};

/// Kronrod abscissae (positive half, ending at the center node).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Gauss weights for the odd Kronrod abscissae.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod weights matching `XGK`.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Controls for [`integrate`] / [`integrate_try`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<R: Real> {
    /// Stop when the error estimate is below `rel_tol * (abs_floor + |I|)`.
    pub rel_tol: R,
    /// Additive floor protecting integrals whose true value is near zero.
    pub abs_floor: R,
    /// Panel-split budget before giving up with `NonConvergence`.
    pub max_splits: usize,
}

impl<R: Real> QuadOptions<R> {
    pub fn with_rel_tol(rel_tol: R) -> Self {
        Self {
            rel_tol,
            abs_floor: R::one(),
            max_splits: 4000,
        }
    }
}

impl<R: Real> Default for QuadOptions<R> {
    fn default() -> Self {
        Self::with_rel_tol(R::lit(1e-10))
    }
}

struct Panel<R: Real> {
    a: R,
    b: R,
    value: R,
    err: R,
}

impl<R: Real> PartialEq for Panel<R> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<R: Real> Eq for Panel<R> {}
impl<R: Real> PartialOrd for Panel<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R: Real> Ord for Panel<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

fn gk15_panel<R: Real, F>(f: &F, a: R, b: R) -> Result<(R, R)>
where
    F: Fn(R) -> Result<R>,
{
    let half = (b - a) * R::lit(0.5);
    let center = (a + b) * R::lit(0.5);

    let fc = f(center)?;
    let mut kronrod = fc * R::lit(WGK[7]);
    let mut gauss = fc * R::lit(WG[3]);
    for j in 0..7 {
        let dx = half * R::lit(XGK[j]);
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        let pair = f1 + f2;
        kronrod += pair * R::lit(WGK[j]);
        if j % 2 == 1 {
            gauss += pair * R::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Ok((value, err))
}

/// Integrates a fallible integrand over `[a, b]`.
pub fn integrate_try<R: Real, F>(f: F, a: R, b: R, opts: &QuadOptions<R>) -> Result<R>
where
    F: Fn(R) -> Result<R>,
{
    let ordered = a <= b;
    if !ordered {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(R::zero());
    }

    let (v, e) = gk15_panel(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total = v;
    let mut total_err = e;

    for _ in 0..opts.max_splits {
        if total_err <= opts.rel_tol * (opts.abs_floor + total.abs()) {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = (worst.a + worst.b) * R::lit(0.5);
        if mid <= worst.a || mid >= worst.b {
            // panel is at floating-point resolution; keep its estimate
            total_err -= worst.err;
            total_err += worst.err * R::lit(1e-3);
            continue;
        }
        let (vl, el) = gk15_panel(&f, worst.a, mid)?;
        let (vr, er) = gk15_panel(&f, mid, worst.b)?;
        total = total - worst.value + vl + vr;
        total_err = total_err - worst.err + el + er;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: vl,
            err: el,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: vr,
            err: er,
        });
    }

    if total_err > opts.rel_tol * (opts.abs_floor + total.abs()) {
        return Err(Error::NonConvergence(format!(
            "quadrature error estimate {total_err:e} above tolerance after {} splits",
            opts.max_splits
        )));
    }

    // re-sum panels once for a compensated final value
    let mut sum = KahanSum::default();
    for p in heap.iter() {
        sum.add(p.value);
    }
    Ok(sum.value())
}

/// Integrates an infallible integrand over `[a, b]`.
pub fn integrate<R: Real, F>(f: F, a: R, b: R, opts: &QuadOptions<R>) -> Result<R>
where
    F: Fn(R) -> R,
{
    integrate_try(|x| Ok(f(x)), a, b, opts)
}

/// Fixed composite Kronrod rule: `panels` equal panels, no adaptivity, no
/// error control. Used where a deterministic flat-cost rule is wanted.
pub fn fixed_kronrod<R: Real, F>(f: F, a: R, b: R, panels: usize) -> R
where
    F: Fn(R) -> R,
{
    let n = panels.max(1);
    let width = (b - a) / R::of_usize(n);
    let mut sum = KahanSum::default();
    for i in 0..n {
        let pa = a + width * R::of_usize(i);
        let pb = if i + 1 == n { b } else { pa + width };
        let half = (pb - pa) * R::lit(0.5);
        let center = (pa + pb) * R::lit(0.5);
        let mut kronrod = f(center) * R::lit(WGK[7]);
        for j in 0..7 {
            let dx = half * R::lit(XGK[j]);
            kronrod += (f(center - dx) + f(center + dx)) * R::lit(WGK[j]);
        }
        sum.add(kronrod * half);
    }
    sum.value()
}

/// Nodes and weights of the same fixed composite rule, for callers that
/// reuse one rule against many integrands.
pub fn fixed_kronrod_nodes<R: Real>(a: R, b: R, panels: usize) -> Vec<(R, R)> {
    let n = panels.max(1);
    let width = (b - a) / R::of_usize(n);
    let mut out = Vec::with_capacity(15 * n);
    for i in 0..n {
        let pa = a + width * R::of_usize(i);
        let pb = if i + 1 == n { b } else { pa + width };
        let half = (pb - pa) * R::lit(0.5);
        let center = (pa + pb) * R::lit(0.5);
        out.push((center, half * R::lit(WGK[7])));
        for j in 0..7 {
            let dx = half * R::lit(XGK[j]);
            let w = half * R::lit(WGK[j]);
            out.push((center - dx, w));
            out.push((center + dx, w));
        }
    }
    out
}
