//! The one-dimensional landscape driving the phase structure.
//!
//! For inverse temperature `beta` write `b' = e^beta - 1`. The stationary
//! points of the reduced pressure `p(s)` are exactly the intersections of
//!
//! ```text
//!     F_B(t) = E[ (W/E[W]) (e^(tW+B) - 1) / (e^(tW+B) + q - 1) ]
//! ```
//!
//! with the line `t/b'`, under `t = s b'`. Everything here (derivatives,
//! inflection scan, tangent lines through the origin, stationary solutions,
//! the criticality function `K`, the equal-area functional `R`) is a
//! statement about that curve.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::real::Real;
use crate::roots;
use crate::weights::WeightDistribution;

/// `b' = e^beta - 1`.
#[inline]
pub fn beta_prime<R: Real>(beta: R) -> R {
    beta.exp_m1()
}

/// `beta = log(1 + b')`.
#[inline]
pub fn beta_from_prime<R: Real>(bp: R) -> R {
    bp.ln_1p()
}

/// `(e^x - 1)/(e^x + q - 1)`, stable for `x >= 0`.
#[inline]
fn ratio_kernel<R: Real>(x: R, qf: R) -> R {
    let e = (-x).exp();
    (R::one() - e) / (R::one() + (qf - R::one()) * e)
}

/// `q e^x / (e^x + q - 1)^2`, stable for `x >= 0`.
#[inline]
fn slope_kernel<R: Real>(x: R, qf: R) -> R {
    let e = (-x).exp();
    let den = R::one() + (qf - R::one()) * e;
    qf * e / (den * den)
}

/// `a(x) = ((q-1) e^x - e^2x) / (e^x + q - 1)^3`, stable for `x >= 0`.
///
/// Positive below `x = log(q-1)`, negative above; the sign kernel of the
/// landscape's second derivative.
#[inline]
pub fn crossing_kernel<R: Real>(x: R, qf: R) -> R {
    let e = (-x).exp();
    let den = R::one() + (qf - R::one()) * e;
    ((qf - R::one()) * e * e - e) / (den * den * den)
}

/// `log((e^x + q - 1)/q)`, stable for `x >= 0`.
#[inline]
fn log_kernel<R: Real>(x: R, qf: R) -> R {
    x + ((qf - R::one()) * (-x).exp()).ln_1p() - qf.ln()
}

/// `F(s) = s^3 a(s)`: the integrand of `t^3 F_B''(t) = E[F(Wt)]` at `B = 0`.
pub fn cubic_crossing_kernel<R: Real>(q: u32, s: R) -> R {
    let qf = R::of_usize(q as usize);
    s * s * s * crossing_kernel(s, qf)
}

/// Sign-change scan of the landscape's second derivative.
#[derive(Clone, Debug)]
pub struct ZeroCrossingReport<R: Real> {
    /// Locations where `F_B''` changes sign, ascending, each refined by
    /// bisection to 1e-10 in `t`.
    pub sign_changes: Vec<R>,
    /// True iff there is exactly one change and it runs positive to negative.
    pub unique: bool,
    /// The unique inflection point, when `unique`.
    pub t_star: Option<R>,
    /// `F_B'(t*) > F_B(t*)/t*`, when `unique`.
    pub steep: Option<bool>,
    /// Right end of the scanned window.
    pub scan_ceiling: R,
    /// True when the ceiling came from the 1%-quantile heuristic (laws whose
    /// support reaches down to 0) rather than the hard `(log(q-1)-B)/w_min`
    /// bound.
    pub ceiling_is_heuristic: bool,
}

/// The two tangent lines to the landscape through the origin.
#[derive(Clone, Copy, Debug)]
pub struct TangentPoints<R: Real> {
    /// Tangency below the inflection point; exactly 0 at `B = 0`.
    pub t_a: R,
    /// Tangency above the inflection point.
    pub t_b: R,
}

/// Model parameters: color count `q >= 3`, external field `B >= 0` on color
/// 1, and the weight law.
///
/// Construction accepts any `B >= 0` but `B >= log(q-1)` puts the landscape
/// in the concave regime, where the transition machinery refuses to run
/// (`is_concave_regime` flags it). All operations are pure; the config is
/// safe to share across threads. Scan results are cached internally.
#[derive(Debug)]
pub struct PottsConfig<R: Real> {
    q: u32,
    qf: R,
    field: R,
    dist: WeightDistribution<R>,
    mean_w: R,
    rel_tol: R,
    root_tol: R,
    crossing: OnceLock<Result<ZeroCrossingReport<R>>>,
    tangents: OnceLock<Result<TangentPoints<R>>>,
}

impl<R: Real> Clone for PottsConfig<R> {
    fn clone(&self) -> Self {
        Self {
            q: self.q,
            qf: self.qf,
            field: self.field,
            dist: self.dist,
            mean_w: self.mean_w,
            rel_tol: self.rel_tol,
            root_tol: self.root_tol,
            crossing: self.crossing.clone(),
            tangents: self.tangents.clone(),
        }
    }
}

impl<R: Real> PottsConfig<R> {
    pub fn new(q: u32, field: R, dist: WeightDistribution<R>) -> Result<Self> {
        if q < 3 {
            return Err(Error::InvalidParameter(format!(
                "q must be at least 3 (the q=2 Ising case is out of scope), got {q}"
            )));
        }
        if !(field.is_finite() && field >= R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "field B must be a finite nonnegative real, got {field}"
            )));
        }
        let mean_w = dist.mean();
        if !(mean_w.is_finite() && mean_w > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "weight law must have a finite positive mean, got {mean_w}"
            )));
        }
        Ok(Self {
            q,
            qf: R::of_usize(q as usize),
            field,
            dist,
            mean_w,
            rel_tol: R::lit(1e-10),
            root_tol: R::lit(1e-12),
            crossing: OnceLock::new(),
            tangents: OnceLock::new(),
        })
    }

    /// Overrides the quadrature tolerance (default 1e-10).
    pub fn with_rel_tol(mut self, rel_tol: R) -> Self {
        self.rel_tol = rel_tol;
        self.crossing = OnceLock::new();
        self.tangents = OnceLock::new();
        self
    }

    /// Overrides the root tolerance (default 1e-12, absolute in `t`).
    pub fn with_root_tol(mut self, root_tol: R) -> Self {
        self.root_tol = root_tol;
        self.crossing = OnceLock::new();
        self.tangents = OnceLock::new();
        self
    }

    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn qf(&self) -> R {
        self.qf
    }
    pub fn field(&self) -> R {
        self.field
    }
    pub fn dist(&self) -> &WeightDistribution<R> {
        &self.dist
    }
    pub fn mean_weight(&self) -> R {
        self.mean_w
    }
    pub fn rel_tol(&self) -> R {
        self.rel_tol
    }
    pub fn root_tol(&self) -> R {
        self.root_tol
    }

    /// `B >= log(q-1)`: concave landscape, unique stationary solution, no
    /// transition.
    pub fn is_concave_regime(&self) -> bool {
        self.field >= (self.qf - R::one()).ln()
    }

    fn expect<G: Fn(R) -> R>(&self, g: G) -> Result<R> {
        self.dist.expect(g, self.rel_tol)
    }

    fn check_t(&self, t: R) -> Result<()> {
        if !(t.is_finite() && t >= R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "t must be a finite nonnegative real, got {t}"
            )));
        }
        Ok(())
    }

    /// The landscape `F_B(t)`; strictly increasing, `F_B(0) >= 0`, limit 1.
    pub fn scr_f(&self, t: R) -> Result<R> {
        self.check_t(t)?;
        let (qf, b, ew) = (self.qf, self.field, self.mean_w);
        self.expect(move |w| w / ew * ratio_kernel(t * w + b, qf))
    }

    /// `F_B'(t) = E[(W^2/E[W]) q e^(tW+B) / (e^(tW+B)+q-1)^2] > 0`.
    pub fn scr_f_d1(&self, t: R) -> Result<R> {
        self.check_t(t)?;
        let (qf, b, ew) = (self.qf, self.field, self.mean_w);
        self.expect(move |w| w * w / ew * slope_kernel(t * w + b, qf))
    }

    /// `F_B''(t) = q E[(W^3/E[W]) a(tW+B)]`.
    ///
    /// At `t = 0` this needs `E[W^3] < inf`; for `t > 0` the exponential
    /// decay of `a` makes the integral converge even when the third moment
    /// diverges (Pareto with `tau <= 4`).
    pub fn scr_f_d2(&self, t: R) -> Result<R> {
        self.check_t(t)?;
        if t == R::zero() && self.dist.moment(3).is_infinite() {
            return Err(Error::MomentRequired(format!(
                "second landscape derivative at t=0 requires E[W^3] < inf, but it diverges for {}",
                self.dist
            )));
        }
        let (qf, b, ew) = (self.qf, self.field, self.mean_w);
        let v = self.expect(move |w| w * w * w / ew * crossing_kernel(t * w + b, qf))?;
        Ok(self.qf * v)
    }

    /// Scans `F_B''` for sign changes on a geometric grid over
    /// `(ceiling * 1e-6, ceiling]` (2048 points, one extra probe just past
    /// the ceiling so a crossing sitting exactly on it is still bracketed),
    /// refining each change by bisection.
    ///
    /// Flips between samples that both sit inside the quadrature noise band
    /// are discarded. The window itself is a scan, not a proof: a law whose
    /// third moment dwarfs its bulk (log-normal with large sigma, say) can
    /// invert below the window's left edge, in which case no positive region
    /// is seen and `unique` stays false.
    pub fn zero_crossing(&self) -> Result<ZeroCrossingReport<R>> {
        self.crossing
            .get_or_init(|| self.zero_crossing_uncached())
            .clone()
    }

    fn zero_crossing_uncached(&self) -> Result<ZeroCrossingReport<R>> {
        let log_qm1 = (self.qf - R::one()).ln();
        if self.field >= log_qm1 {
            return Err(Error::ConcaveRegime(format!(
                "B = {} >= log(q-1) = {log_qm1}: the landscape is concave and has a unique stationary solution",
                self.field
            )));
        }
        let w_min = self.dist.min_support();
        let (t_hi, heuristic) = if w_min > R::zero() {
            ((log_qm1 - self.field) / w_min, false)
        } else {
            let w01 = self.dist.quantile01()?;
            (R::lit(10.0) * (log_qm1 - self.field) / w01, true)
        };

        const GRID: usize = 2048;
        let t_lo = t_hi * R::lit(1e-6);
        let ratio = (t_hi / t_lo).powf((R::of_usize(GRID - 1)).recip());
        let mut ts = Vec::with_capacity(GRID + 1);
        let mut t = t_lo;
        for i in 0..GRID {
            ts.push(if i + 1 == GRID { t_hi } else { t });
            t *= ratio;
        }
        ts.push(t_hi * (R::one() + R::lit(1e-6)));

        let mut vals = Vec::with_capacity(ts.len());
        for &ti in &ts {
            vals.push(self.scr_f_d2(ti)?);
        }
        // the expectation engine guarantees |err| <= rel_tol (1 + |value|),
        // so samples inside this band have an unresolvable sign
        let noise = R::lit(100.0) * self.rel_tol;
        let positive_at_ceiling = *vals.last().unwrap() > noise;
        if heuristic && positive_at_ceiling {
            return Err(Error::NonConvergence(format!(
                "scan ceiling heuristic failed: F_B'' still positive at t = {t_hi}"
            )));
        }

        let mut sign_changes = Vec::new();
        let mut directions = Vec::new();
        for i in 0..ts.len() - 1 {
            let (v0, v1) = (vals[i], vals[i + 1]);
            if v0 == R::zero() || (v0.abs() <= noise && v1.abs() <= noise) {
                continue;
            }
            if v1 == R::zero() || (v0 > R::zero()) != (v1 > R::zero()) {
                let root = roots::bisect(
                    |x| self.scr_f_d2(x),
                    ts[i],
                    ts[i + 1],
                    R::lit(1e-10),
                    200,
                )
                .unwrap_or_else(|_| (ts[i] + ts[i + 1]) * R::lit(0.5));
                sign_changes.push(root);
                directions.push(v0 > R::zero());
            }
        }

        let unique = sign_changes.len() == 1 && directions[0] && vals[0] > noise;
        let t_star = if unique { Some(sign_changes[0]) } else { None };
        let steep = match t_star {
            Some(ts_pt) => {
                Some(self.scr_f_d1(ts_pt)? > self.scr_f(ts_pt)? / ts_pt)
            }
            None => None,
        };
        Ok(ZeroCrossingReport {
            sign_changes,
            unique,
            t_star,
            steep,
            scan_ceiling: t_hi,
            ceiling_is_heuristic: heuristic,
        })
    }

    /// Requires the steep unique zero-crossing condition (at `B = 0`,
    /// steepness follows from uniqueness and is only asserted).
    fn require_steep(&self) -> Result<ZeroCrossingReport<R>> {
        let zc = self.zero_crossing()?;
        if !zc.unique {
            return Err(Error::NoSteepness(format!(
                "unique zero-crossing fails: found {} sign change(s) of F_B''",
                zc.sign_changes.len()
            )));
        }
        if self.field > R::zero() && zc.steep != Some(true) {
            return Err(Error::NoSteepness(format!(
                "steepness fails at the inflection point t* = {}",
                zc.t_star.unwrap()
            )));
        }
        Ok(zc)
    }

    /// Solves `F_B(t) = t F_B'(t)`: the two tangency points of origin lines.
    pub fn tangent_points(&self) -> Result<TangentPoints<R>> {
        self.tangents
            .get_or_init(|| self.tangent_points_uncached())
            .clone()
    }

    fn tangent_points_uncached(&self) -> Result<TangentPoints<R>> {
        let zc = self.require_steep()?;
        let t_star = zc.t_star.unwrap();
        let intercept = |t: R| -> Result<(R, R)> {
            let f = self.scr_f(t)? - t * self.scr_f_d1(t)?;
            let df = -t * self.scr_f_d2(t)?;
            Ok((f, df))
        };

        let t_a = if self.field == R::zero() {
            R::zero()
        } else {
            roots::newton_safeguarded(
                intercept,
                R::zero(),
                t_star,
                t_star * R::lit(0.5),
                self.root_tol,
                200,
            )?
        };

        let mut hi = t_star * R::lit(2.0);
        let mut expansions = 0;
        while intercept(hi)?.0 <= R::zero() {
            hi *= R::lit(2.0);
            expansions += 1;
            if expansions > 200 {
                return Err(Error::NonConvergence(
                    "tangent intercept never turned positive above the inflection point".into(),
                ));
            }
        }
        let t_b = roots::newton_safeguarded(
            intercept,
            t_star,
            hi,
            (t_star + hi) * R::lit(0.5),
            self.root_tol,
            200,
        )?;
        Ok(TangentPoints { t_a, t_b })
    }

    /// All solutions of `F_B(t) = t/b'` in ascending order.
    ///
    /// The count follows the position of `b'` relative to the reciprocal
    /// tangent slopes: below both, one solution (the origin at `B = 0`);
    /// between them, three; above both, two at `B = 0` and one at `B > 0`.
    pub fn stationary_solutions(&self, beta: R) -> Result<Vec<R>> {
        if !(beta.is_finite() && beta > R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be a finite positive real, got {beta}"
            )));
        }
        let tp = self.tangent_points()?;
        let bp = beta_prime(beta);
        let bp_lo = self.scr_f_d1(tp.t_b)?.recip();
        let bp_hi = self.scr_f_d1(tp.t_a)?.recip();
        let delta = |t: R| -> Result<(R, R)> {
            Ok((self.scr_f(t)? - t / bp, self.scr_f_d1(t)? - bp.recip()))
        };

        let mut sols: Vec<R> = Vec::with_capacity(3);

        if self.field == R::zero() {
            sols.push(R::zero());
        } else if bp < bp_hi {
            sols.push(roots::newton_safeguarded(
                delta,
                R::zero(),
                tp.t_a,
                tp.t_a * R::lit(0.5),
                self.root_tol,
                200,
            )?);
        }

        if bp > bp_lo && bp < bp_hi {
            // middle solution: need a strictly negative point left of t_b
            let neg_point = if self.field > R::zero() {
                Some(tp.t_a)
            } else {
                let mut t = tp.t_b * R::lit(0.5);
                let mut found = None;
                for _ in 0..200 {
                    if delta(t)?.0 < R::zero() {
                        found = Some(t);
                        break;
                    }
                    t *= R::lit(0.5);
                }
                found
            };
            if let Some(lo) = neg_point {
                sols.push(roots::newton_safeguarded(
                    delta,
                    lo,
                    tp.t_b,
                    (lo + tp.t_b) * R::lit(0.5),
                    self.root_tol,
                    200,
                )?);
            }
        }

        if bp > bp_lo {
            let hi = bp.max(tp.t_b * (R::one() + R::lit(1e-6)));
            sols.push(roots::newton_safeguarded(
                delta,
                tp.t_b,
                hi,
                (tp.t_b + hi) * R::lit(0.5),
                self.root_tol,
                200,
            )?);
        }

        sols.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sols.dedup_by(|a, b| (*a - *b).abs() <= R::lit(10.0) * self.root_tol);
        Ok(sols)
    }

    /// Reduced pressure
    /// `p(s) = E[log(e^(b'Ws+B)+q-1)] - (b' E[W]/2q)((q-1)s^2 + 2s - 1)`.
    pub fn pressure_reduced(&self, beta: R, s: R) -> Result<R> {
        self.check_s(s)?;
        let bp = beta_prime(beta);
        let (qf, b, ew) = (self.qf, self.field, self.mean_w);
        let log_term = self.expect(move |w| log_kernel(bp * w * s + b, qf))? + qf.ln();
        let penalty = bp * ew / (R::lit(2.0) * qf)
            * ((qf - R::one()) * s * s + R::lit(2.0) * s - R::one());
        Ok(log_term - penalty)
    }

    /// `dp/ds = ((q-1)/q) b' E[W] (F_B(s b') - s)`, evaluated through the
    /// landscape rather than by differencing.
    pub fn pressure_d1(&self, beta: R, s: R) -> Result<R> {
        self.check_s(s)?;
        let bp = beta_prime(beta);
        let f = self.scr_f(s * bp)?;
        Ok((self.qf - R::one()) / self.qf * bp * self.mean_w * (f - s))
    }

    fn check_s(&self, s: R) -> Result<()> {
        if !(s.is_finite() && s >= R::zero() && s <= R::one()) {
            return Err(Error::InvalidParameter(format!(
                "s must lie in [0, 1], got {s}"
            )));
        }
        Ok(())
    }

    /// Criticality function at zero field:
    /// `K(t) = (1/E[W]) E[log((e^(tW)+q-1)/q)] - ((q-1)/2q) t F_0(t) - t/q`.
    pub fn kappa(&self, t: R) -> Result<R> {
        self.check_t(t)?;
        self.require_zero_field("kappa")?;
        let (qf, ew) = (self.qf, self.mean_w);
        let log_term = self.expect(move |w| log_kernel(t * w, qf))? / ew;
        Ok(log_term - (qf - R::one()) / (R::lit(2.0) * qf) * t * self.scr_f(t)? - t / qf)
    }

    /// `K'(t) = ((q-1)/2q) (F_0(t) - t F_0'(t))`.
    pub fn kappa_prime(&self, t: R) -> Result<R> {
        self.check_t(t)?;
        self.require_zero_field("kappa_prime")?;
        let v = self.scr_f(t)? - t * self.scr_f_d1(t)?;
        Ok((self.qf - R::one()) / (R::lit(2.0) * self.qf) * v)
    }

    fn require_zero_field(&self, what: &str) -> Result<()> {
        if self.field != R::zero() {
            return Err(Error::InvalidParameter(format!(
                "{what} is defined at zero field only, got B = {}",
                self.field
            )));
        }
        Ok(())
    }

    /// Equal-area functional `R(b') = integral of (F_B(t) - t/b') dt` between
    /// the smallest and largest stationary solutions. Wants the
    /// three-solution regime (the tangency boundaries, where two solutions
    /// remain, are accepted).
    pub fn equal_area_r(&self, beta: R) -> Result<R> {
        let sols = self.stationary_solutions(beta)?;
        if sols.len() < 2 {
            return Err(Error::WrongRegime(format!(
                "equal-area needs the multi-solution regime, found {} stationary solution(s)",
                sols.len()
            )));
        }
        let (t1, t3) = (sols[0], *sols.last().unwrap());
        let bp = beta_prime(beta);
        let opts = QuadOptions {
            rel_tol: R::lit(1e-10),
            abs_floor: R::one(),
            max_splits: 4000,
        };
        quad::integrate_try(|t| Ok(self.scr_f(t)? - t / bp), t1, t3, &opts)
    }
}

/// Calibrates the two-atom law whose `F_0''` vanishes at `t = 1`: returns
/// `(c1, c2)` with `c1 F(x1) + c2 F(x2) = 0` where `F(s) = s^3 a(s)`.
/// Requires `F(x1) > 0 > F(x2)`.
pub fn calibrate_counterexample<R: Real>(q: u32, x1: R, x2: R) -> Result<(R, R)> {
    if q < 3 {
        return Err(Error::InvalidParameter(format!("q must be at least 3, got {q}")));
    }
    if !(x1 > R::zero() && x2 > x1) {
        return Err(Error::InvalidParameter(format!(
            "atoms must satisfy 0 < x1 < x2, got x1={x1}, x2={x2}"
        )));
    }
    let f1 = cubic_crossing_kernel(q, x1);
    let f2 = cubic_crossing_kernel(q, x2);
    if !(f1 > R::zero() && f2 < R::zero()) {
        return Err(Error::NoSignChange(format!(
            "need F(x1) > 0 > F(x2), got F({x1}) = {f1:e}, F({x2}) = {f2:e}"
        )));
    }
    let c1 = f2 / (f2 - f1);
    Ok((c1, R::one() - c1))
}
