//! Critical temperatures and transition classification.
//!
//! At zero field the critical `t_c` is the unique positive root of the
//! criticality function `K`; Newton started from the closed-form upper bound
//! `2q log q / ((q-1) E[W])` descends to it monotonically. In a field the
//! critical `b'` is the root of the equal-area functional between the
//! reciprocal tangent slopes. The Pareto boundary exponent `tau(q) = 3 - r(q)`
//! comes from the sign change of `L_q(r) = int x^r a(x) dx`.

use crate::error::{Error, Result};
use crate::landscape::{self, beta_from_prime, beta_prime, PottsConfig};
use crate::quad::{self, QuadOptions};
use crate::real::Real;
use crate::roots;
use crate::variational;
use crate::weights::WeightDistribution;

/// Order of the phase transition at a critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransitionOrder {
    First,
    Second,
    None,
}

impl TransitionOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionOrder::First => "first",
            TransitionOrder::Second => "second",
            TransitionOrder::None => "none",
        }
    }
}

/// A critical temperature with the order parameter on both branches.
///
/// At zero field and first order: `s_low = 0`, `s_high = F_0(t_c)`,
/// `beta_prime_c = t_c / F_0(t_c)`. At a second-order point the order
/// parameter is continuous, so `s_low = s_high = 0` and `t_c = 0`.
#[derive(Clone, Copy, Debug)]
pub struct CriticalPoint<R: Real> {
    pub t_c: R,
    pub beta_prime_c: R,
    pub beta_c: R,
    pub s_low: R,
    pub s_high: R,
    pub order: TransitionOrder,
}

/// A solved critical point plus the iteration trace that produced it.
#[derive(Clone, Debug)]
pub struct CriticalSolve<R: Real> {
    pub point: CriticalPoint<R>,
    pub iterations: usize,
    /// Newton iterates: in `t` at zero field, in `b'` otherwise.
    pub iterates: Vec<R>,
}

/// Newton iteration for `t_c` at zero field.
///
/// Starts at the upper bound `t0 = 2q log q / ((q-1) E[W])`, above which `K`
/// is provably positive, and iterates `t <- t - K(t)/K'(t)`; by convexity of
/// `K` past its minimum the iterates decrease monotonically to `t_c`.
pub fn newton_tc<R: Real>(cfg: &PottsConfig<R>) -> Result<CriticalSolve<R>> {
    if cfg.field() != R::zero() {
        return Err(Error::InvalidParameter(format!(
            "newton_tc runs at zero field only, got B = {}",
            cfg.field()
        )));
    }
    if cfg.dist().moment(2).is_infinite() {
        return Err(Error::DivergentSecondMoment(format!(
            "E[W^2] diverges for {}; the system is ordered at every temperature",
            cfg.dist()
        )));
    }
    let zc = cfg.zero_crossing()?;
    if !zc.unique {
        return Err(Error::NotZeroCrossing(format!(
            "found {} sign change(s) of F_0''; Newton for t_c needs exactly one",
            zc.sign_changes.len()
        )));
    }

    let tight = cfg.clone().with_rel_tol(cfg.rel_tol().min(R::lit(1e-12)));
    let qf = cfg.qf();
    let t0 = R::lit(2.0) * qf * qf.ln() / ((qf - R::one()) * cfg.mean_weight());

    let mut iterates = vec![t0];
    let mut t = t0;
    let mut prev_step = R::infinity();
    for _ in 0..200 {
        let k = tight.kappa(t)?;
        let kp = tight.kappa_prime(t)?;
        let on_convex_branch = kp > R::zero();
        if !on_convex_branch {
            return Err(Error::NonConvergence(format!(
                "K'({t}) = {kp:e} is not positive; iterate left the convex branch"
            )));
        }
        let next = t - k / kp;
        let step = (t - next).abs();
        iterates.push(next);
        t = next;
        if step < R::lit(1e-12) || step >= prev_step {
            break;
        }
        prev_step = step;
    }

    let f_c = tight.scr_f(t)?;
    let bp_c = t / f_c;
    Ok(CriticalSolve {
        point: CriticalPoint {
            t_c: t,
            beta_prime_c: bp_c,
            beta_c: beta_from_prime(bp_c),
            s_low: R::zero(),
            s_high: f_c,
            order: TransitionOrder::First,
        },
        iterations: iterates.len() - 1,
        iterates,
    })
}

/// Critical point at any admissible field.
///
/// Zero field delegates to [`newton_tc`]. In a field, the root of the
/// equal-area functional `R(b')` is found by safeguarded Newton on the
/// bracket of reciprocal tangent slopes, with the exact derivative
/// `dR/db' = (t3^2 - t1^2) / (2 b'^2)`.
pub fn critical_point<R: Real>(cfg: &PottsConfig<R>) -> Result<CriticalSolve<R>> {
    if cfg.field() == R::zero() {
        return newton_tc(cfg);
    }
    let tp = cfg.tangent_points()?;
    let bp_lo = cfg.scr_f_d1(tp.t_b)?.recip();
    let bp_hi = cfg.scr_f_d1(tp.t_a)?.recip();

    let margin = R::lit(1e-9);
    let mut lo = bp_lo * (R::one() + margin);
    let mut hi = bp_hi * (R::one() - margin);
    let eval = |bp: R| -> Result<(R, R, R, R)> {
        let beta = beta_from_prime(bp);
        let sols = cfg.stationary_solutions(beta)?;
        let (t1, t3) = (sols[0], *sols.last().unwrap());
        let r = cfg.equal_area_r(beta)?;
        let dr = (t3 * t3 - t1 * t1) / (R::lit(2.0) * bp * bp);
        Ok((r, dr, t1, t3))
    };

    let mut bp = (lo * hi).sqrt();
    let mut iterates = vec![bp];
    let mut result = None;
    for _ in 0..200 {
        let (r, dr, t1, t3) = eval(bp)?;
        if r < R::zero() {
            lo = bp;
        } else {
            hi = bp;
        }
        let newton = bp - r / dr;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) * R::lit(0.5)
        };
        let step = (next - bp).abs();
        if step <= cfg.root_tol() || (hi - lo).abs() <= cfg.root_tol() {
            result = Some((bp, t1, t3));
            break;
        }
        iterates.push(next);
        bp = next;
    }
    let (bp_c, t1, t3) = result.ok_or_else(|| {
        Error::NonConvergence("equal-area Newton did not converge in 200 iterations".into())
    })?;

    Ok(CriticalSolve {
        point: CriticalPoint {
            t_c: t3,
            beta_prime_c: bp_c,
            beta_c: beta_from_prime(bp_c),
            s_low: t1 / bp_c,
            s_high: t3 / bp_c,
            order: TransitionOrder::First,
        },
        iterations: iterates.len(),
        iterates,
    })
}

/// `L_q(r) = int_0^inf x^r a(x) dx` for `r` in `(-1, 0]`.
///
/// Split at `x = 1`: on `(0, 1)` the substitution `x = u^(1/(1+r))` removes
/// the `x^r` singularity exactly (`x^r dx = du/(1+r)`); on `(1, inf)` the
/// integrand is cut where the `e^-x` envelope is negligible.
pub fn l_q<R: Real>(q: u32, r: R) -> Result<R> {
    if q < 3 {
        return Err(Error::InvalidParameter(format!("q must be at least 3, got {q}")));
    }
    if !(r > -R::one() && r <= R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "r must lie in (-1, 0], got {r}"
        )));
    }
    let qf = R::of_usize(q as usize);
    let x0 = (qf - R::one()).ln();
    let opts = QuadOptions {
        rel_tol: R::lit(1e-9),
        abs_floor: qf.recip(),
        max_splits: 4000,
    };
    let inv = (R::one() + r).recip();
    let near = quad::integrate(
        |u: R| landscape::crossing_kernel(u.powf(inv), qf) * inv,
        R::zero(),
        R::one(),
        &opts,
    )?;
    let far = quad::integrate(
        |x: R| x.powf(r) * landscape::crossing_kernel(x, qf),
        R::one(),
        x0 + R::lit(40.0),
        &opts,
    )?;
    Ok(near + far)
}

/// The Pareto smoothing exponent.
#[derive(Clone, Copy, Debug)]
pub struct TauQ<R: Real> {
    /// Boundary tail exponent: second order for `tau` in `(3, tau_q]`.
    pub tau_q: R,
    /// `r(q) = 3 - tau(q)`, the root of `L_q`.
    pub r_q: R,
    /// `L_q(r_q)` at the returned root.
    pub residual: R,
}

/// Solves `L_q(r) = 0` by bisection on `(lower_bound(q), 0)` to 1e-10 in `r`.
pub fn tau_q<R: Real>(q: u32) -> Result<TauQ<R>> {
    if q < 3 {
        return Err(Error::InvalidParameter(format!("q must be at least 3, got {q}")));
    }
    let lo = r_q_lower_bound::<R>(q) + R::lit(1e-9);
    let hi = -R::lit(1e-9);
    let r = roots::bisect(|r| l_q(q, r), lo, hi, R::lit(1e-10), 200)?;
    Ok(TauQ {
        tau_q: R::lit(3.0) - r,
        r_q: r,
        residual: l_q(q, r)?,
    })
}

/// Large-q form `r(q) ~ -x0 / (q - 1 - (q-1)^-1 - 2 x0)`, `x0 = log(q-1)`.
pub fn r_q_asymptotic<R: Real>(q: u32) -> R {
    let qf = R::of_usize(q as usize);
    let x0 = (qf - R::one()).ln();
    -x0 / (qf - R::one() - (qf - R::one()).recip() - R::lit(2.0) * x0)
}

/// Closed-form lower bound `l(q) < r(q)`, increasing from -1 toward 0.
pub fn r_q_lower_bound<R: Real>(q: u32) -> R {
    let qf = R::of_usize(q as usize);
    let x0 = (qf - R::one()).ln();
    let s = R::lit(1.5) + (qf - R::lit(2.0)) / qf * x0;
    (s * s - R::lit(2.0)).sqrt() - s
}

/// Phase regime of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `E[W^2] = inf`: spontaneously ordered at every positive beta.
    AlwaysOrdered,
    FirstOrder,
    SecondOrder,
    /// `B >= log(q-1)`: unique stationary solution, no transition.
    ConcaveNoTransition,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::AlwaysOrdered => "always_ordered",
            Regime::FirstOrder => "first_order",
            Regime::SecondOrder => "second_order",
            Regime::ConcaveNoTransition => "concave_no_transition",
        }
    }
}

/// Outcome of [`classify`].
#[derive(Clone, Debug)]
pub struct PhaseReport<R: Real> {
    pub regime: Regime,
    pub critical: Option<CriticalPoint<R>>,
    /// Half-width on `beta_c` when it came from sweep-based jump detection.
    pub beta_c_uncertainty: Option<R>,
    /// All jump locations seen by the fallback sweep (normally one; the
    /// theory does not exclude several).
    pub jumps: Vec<R>,
    pub detail: String,
}

/// Decides the regime of a model.
///
/// Order of resolution: infinite variance; the Pareto dichotomy at `tau(q)`
/// (zero field, `tau <= 4`); the concave field regime; the steep unique
/// zero-crossing route through [`critical_point`]; and finally sweep-based
/// jump detection for laws where the crossing structure fails, which reports
/// a bracketed first-order point with an explicit uncertainty.
pub fn classify<R: Real>(cfg: &PottsConfig<R>) -> Result<PhaseReport<R>> {
    if cfg.dist().moment(2).is_infinite() {
        return Ok(PhaseReport {
            regime: Regime::AlwaysOrdered,
            critical: None,
            beta_c_uncertainty: None,
            jumps: Vec::new(),
            detail: format!(
                "E[W^2] diverges for {}: the order parameter is positive at every beta > 0",
                cfg.dist()
            ),
        });
    }

    if let WeightDistribution::Pareto { tau, .. } = *cfg.dist() {
        if cfg.field() == R::zero() && tau <= R::lit(4.0) {
            let boundary = tau_q::<R>(cfg.q())?;
            if tau <= boundary.tau_q {
                let nu = cfg.dist().moment(2) / cfg.dist().moment(1);
                let bp_c = cfg.qf() / nu;
                return Ok(PhaseReport {
                    regime: Regime::SecondOrder,
                    critical: Some(CriticalPoint {
                        t_c: R::zero(),
                        beta_prime_c: bp_c,
                        beta_c: beta_from_prime(bp_c),
                        s_low: R::zero(),
                        s_high: R::zero(),
                        order: TransitionOrder::Second,
                    }),
                    beta_c_uncertainty: None,
                    jumps: Vec::new(),
                    detail: format!(
                        "Pareto tail exponent {tau} <= tau(q) = {}: continuous transition at beta_c = log(1 + q E[W]/E[W^2])",
                        boundary.tau_q
                    ),
                });
            }
        }
    }

    if cfg.is_concave_regime() {
        return Ok(PhaseReport {
            regime: Regime::ConcaveNoTransition,
            critical: None,
            beta_c_uncertainty: None,
            jumps: Vec::new(),
            detail: format!(
                "B = {} >= log(q-1): concave landscape, unique stationary solution at every beta",
                cfg.field()
            ),
        });
    }

    let zc = cfg.zero_crossing()?;
    let steep_ok = zc.unique && (cfg.field() == R::zero() || zc.steep == Some(true));
    if steep_ok {
        let solve = critical_point(cfg)?;
        return Ok(PhaseReport {
            regime: Regime::FirstOrder,
            critical: Some(solve.point),
            beta_c_uncertainty: None,
            jumps: Vec::new(),
            detail: format!(
                "steep unique zero-crossing holds; critical point solved in {} iteration(s)",
                solve.iterations
            ),
        });
    }

    let reason = if zc.unique {
        "the steepness condition fails at the inflection point".to_string()
    } else {
        format!(
            "the unique zero-crossing condition fails ({} sign changes)",
            zc.sign_changes.len()
        )
    };
    fallback_jump_detection(cfg, &reason)
}

/// Locates first-order jumps of the optimal order parameter by sweeping,
/// then sharpens the largest one by golden-section shrinking of the
/// subinterval holding the biggest change.
fn fallback_jump_detection<R: Real>(cfg: &PottsConfig<R>, reason: &str) -> Result<PhaseReport<R>> {
    let bp_max = cfg.scr_f_d1(R::zero())?.recip();
    let beta_lo = beta_from_prime(bp_max * R::lit(0.02));
    let beta_hi = beta_from_prime(bp_max * R::lit(1.05));
    let steps = 64;
    let sweep = variational::sweep(cfg, beta_lo, beta_hi, steps)?;
    let step_width = (beta_hi - beta_lo) / R::of_usize(steps - 1);

    let jumps: Vec<R> = sweep
        .jump_indices
        .iter()
        .map(|&i| (sweep.rows[i - 1].beta + sweep.rows[i].beta) * R::lit(0.5))
        .collect();
    let n_jumps = jumps.len();

    if jumps.is_empty() {
        return Ok(PhaseReport {
            regime: Regime::FirstOrder,
            critical: None,
            beta_c_uncertainty: None,
            jumps,
            detail: format!(
                "{reason}, and no jump was flagged in [{beta_lo}, {beta_hi}]; at zero field a first-order jump exists whenever E[W^3] < inf, in a field this sweep is only a heuristic"
            ),
        });
    }

    // largest flagged jump
    let mut best = sweep.jump_indices[0];
    let mut best_gap = R::zero();
    for &i in &sweep.jump_indices {
        let gap = (sweep.rows[i].s_star - sweep.rows[i - 1].s_star).abs();
        if gap > best_gap {
            best_gap = gap;
            best = i;
        }
    }
    let mut a = sweep.rows[best - 1].beta;
    let mut b = sweep.rows[best].beta;
    let mut s_a = sweep.rows[best - 1].s_star;
    let mut s_b = sweep.rows[best].s_star;

    let phi = R::lit(0.381966011250105);
    for _ in 0..80 {
        if (b - a).abs() <= R::lit(1e-9) * (R::one() + b.abs()) {
            break;
        }
        let x1 = a + (b - a) * phi;
        let x2 = b - (b - a) * phi;
        let s1 = variational::solve(cfg, x1)?.s_star;
        let s2 = variational::solve(cfg, x2)?.s_star;
        let gaps = [(s1 - s_a).abs(), (s2 - s1).abs(), (s_b - s2).abs()];
        if gaps[0] >= gaps[1] && gaps[0] >= gaps[2] {
            b = x1;
            s_b = s1;
        } else if gaps[1] >= gaps[2] {
            a = x1;
            s_a = s1;
            b = x2;
            s_b = s2;
        } else {
            a = x2;
            s_a = s2;
        }
    }

    let beta_c = (a + b) * R::lit(0.5);
    let bp_c = beta_prime(beta_c);
    Ok(PhaseReport {
        regime: Regime::FirstOrder,
        critical: Some(CriticalPoint {
            t_c: bp_c * s_b,
            beta_prime_c: bp_c,
            beta_c,
            s_low: s_a,
            s_high: s_b,
            order: TransitionOrder::First,
        }),
        beta_c_uncertainty: Some(step_width),
        jumps,
        detail: format!(
            "{reason}; largest of {n_jumps} flagged jump(s) refined by golden section, beta_c good to one sweep step; uniqueness of the jump is not guaranteed on this path, all flagged locations are listed"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::calibrate_counterexample;
    use crate::weights::WeightDistribution as WD;

    type D = WD<f64>;

    fn cfg(q: u32, b: f64, d: D) -> PottsConfig<f64> {
        PottsConfig::new(q, b, d).unwrap()
    }

    #[test]
    fn single_atom_critical_point_is_closed_form() {
        for q in 3..=10u32 {
            for lambda in [1.0, 2.5] {
                let c = cfg(q, 0.0, D::dirac(lambda).unwrap());
                let solve = newton_tc(&c).unwrap();
                let p = solve.point;
                let log_qm1 = ((q - 1) as f64).ln();
                let t_exact = 2.0 / lambda * log_qm1;
                let bp_exact = 2.0 / lambda * (q - 1) as f64 / (q - 2) as f64 * log_qm1;
                let s_exact = (q - 2) as f64 / (q - 1) as f64;
                assert!((p.t_c - t_exact).abs() < 1e-9, "q={q} l={lambda}: {}", p.t_c);
                assert!((p.beta_prime_c - bp_exact).abs() < 1e-9);
                assert!((p.s_high - s_exact).abs() < 1e-9);
                assert_eq!(p.s_low, 0.0);
                assert!((p.beta_c - bp_exact.ln_1p()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn newton_q7_replicates_reference_run() {
        let c = cfg(7, 0.0, D::dirac(1.0).unwrap());
        let solve = newton_tc(&c).unwrap();
        let t0 = 7.0 / 3.0 * 7f64.ln();
        assert!((solve.iterates[0] - t0).abs() < 1e-14);
        assert!(solve.iterations <= 6, "took {}", solve.iterations);
        assert!((solve.point.t_c - 3.583518938).abs() < 0.5e-9);
        for w in solve.iterates.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "not monotone: {:?}", solve.iterates);
        }
        // nine-decimal agreement no later than the fifth iterate
        let fifth = solve.iterates[5.min(solve.iterates.len() - 1)];
        assert!((fifth - 2.0 * 6f64.ln()).abs() < 0.5e-9);
    }

    #[test]
    fn pareto_critical_point_replicates_reference_values() {
        let c = cfg(7, 0.0, D::pareto(5.0, 1.0).unwrap());
        let solve = newton_tc(&c).unwrap();
        // frozen 30-digit references
        assert!((solve.point.t_c - 2.20111841089257).abs() < 1e-6, "{}", solve.point.t_c);
        assert!((solve.point.t_c - 2.20111).abs() < 5e-5);
        assert!((solve.point.beta_prime_c - 3.07591771024852).abs() < 1e-6);
        assert!((solve.point.s_high - 0.715597300785634).abs() < 1e-7);
        assert!((solve.point.beta_c - 1.40509592630696).abs() < 1e-7);
        for w in solve.iterates.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }

    #[test]
    fn infinite_variance_is_rejected() {
        let c = cfg(3, 0.0, D::pareto(2.5, 1.0).unwrap());
        assert!(matches!(newton_tc(&c), Err(Error::DivergentSecondMoment(_))));
    }

    #[test]
    fn failed_crossing_is_rejected() {
        let (c1, _) = calibrate_counterexample::<f64>(7, 1.0, 5.0).unwrap();
        let c = cfg(7, 0.0, D::two_atom(1.0, 5.0, c1).unwrap());
        assert!(matches!(newton_tc(&c), Err(Error::NotZeroCrossing(_))));
    }

    #[test]
    fn ordering_chain_below_the_critical_point() {
        for d in [D::dirac(1.0).unwrap(), D::pareto(5.0, 1.0).unwrap()] {
            let c = cfg(7, 0.0, d);
            let tp = c.tangent_points().unwrap();
            let t_star = c.zero_crossing().unwrap().t_star.unwrap();
            let t_c = newton_tc(&c).unwrap().point.t_c;
            assert_eq!(tp.t_a, 0.0);
            assert!(0.0 < t_star && t_star < tp.t_b && tp.t_b < t_c);
        }
    }

    #[test]
    fn critical_slope_sits_between_the_reciprocal_tangent_slopes() {
        for d in [
            D::dirac(1.0).unwrap(),
            D::pareto(5.0, 1.0).unwrap(),
            D::gamma(2.0, 1.0).unwrap(),
        ] {
            let c = cfg(7, 0.0, d);
            let bp_c = newton_tc(&c).unwrap().point.beta_prime_c;
            let tp = c.tangent_points().unwrap();
            let lo = 1.0 / c.scr_f_d1(tp.t_b).unwrap();
            let hi = 1.0 / c.scr_f_d1(tp.t_a).unwrap();
            assert!(lo < bp_c && bp_c < hi, "{d}: {lo} < {bp_c} < {hi}");
        }
    }

    #[test]
    fn field_critical_point_matches_independent_bisection() {
        let c = cfg(7, 0.1, D::dirac(1.0).unwrap());
        let solve = critical_point(&c).unwrap();
        let bp_c = solve.point.beta_prime_c;
        // frozen 30-digit reference
        assert!((bp_c - 4.06022272614733).abs() < 1e-8, "{bp_c}");
        assert!((solve.point.s_low - 0.0436378618586778).abs() < 1e-8);
        assert!((solve.point.s_high - 0.789695471474656).abs() < 1e-8);
        // the single-atom landscape in a field is the zero-field one shifted
        // by B, which collapses the critical slope to a closed form
        let closed = 2.0 * 6.0 / 5.0 * (6f64.ln() - 0.1);
        assert!((bp_c - closed).abs() < 1e-9, "{bp_c} vs closed form {closed}");

        // equal-area residual and pressure tie at the solved point
        let beta = solve.point.beta_c;
        assert!(c.equal_area_r(beta).unwrap().abs() < 1e-8);
        let p_lo = c.pressure_reduced(beta, solve.point.s_low).unwrap();
        let p_hi = c.pressure_reduced(beta, solve.point.s_high).unwrap();
        assert!((p_lo - p_hi).abs() < 1e-8, "{p_lo} vs {p_hi}");

        // bracket of reciprocal tangent slopes
        let tp = c.tangent_points().unwrap();
        let lo = 1.0 / c.scr_f_d1(tp.t_b).unwrap();
        let hi = 1.0 / c.scr_f_d1(tp.t_a).unwrap();
        assert!(lo < bp_c && bp_c < hi);

        // live oracle: plain bisection on R
        let mut a = lo * 1.000001;
        let mut b = hi * 0.999999;
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if c.equal_area_r(beta_from_prime(mid)).unwrap() < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let oracle = 0.5 * (a + b);
        assert!((bp_c - oracle).abs() < 1e-8, "{bp_c} vs oracle {oracle}");
    }

    #[test]
    fn critical_value_is_continuous_in_the_field() {
        let b0 = newton_tc(&cfg(7, 0.0, D::dirac(1.0).unwrap()))
            .unwrap()
            .point
            .beta_c;
        assert!((b0 - 1.66774884347648).abs() < 1e-10);
        let b_eps = critical_point(&cfg(7, 1e-4, D::dirac(1.0).unwrap()))
            .unwrap()
            .point
            .beta_c;
        assert!((b_eps - b0).abs() < 1e-3, "{b_eps} vs {b0}");
    }

    #[test]
    fn lower_bound_reference_value_and_monotonicity() {
        let l3 = r_q_lower_bound::<f64>(3);
        assert!((l3 + 0.7327).abs() < 1e-4, "{l3}");
        let mut prev = l3;
        for q in [4, 6, 10, 30, 100, 1000, 100000] {
            let l = r_q_lower_bound::<f64>(q);
            assert!(l > prev, "l({q}) = {l} not above {prev}");
            assert!(l < 0.0);
            prev = l;
        }
    }

    #[test]
    fn asymptotic_form_has_the_right_limit() {
        let q = 1_000_000u32;
        let a = r_q_asymptotic::<f64>(q);
        let simple = -(q as f64).ln() / q as f64;
        assert!((a - simple).abs() / simple.abs() < 1e-2, "{a} vs {simple}");
    }

    #[test]
    fn smoothing_exponent_q3_within_paper_bracket() {
        let t = tau_q::<f64>(3).unwrap();
        assert!(t.r_q > -0.7327 && t.r_q < 0.0, "{}", t.r_q);
        assert!(t.residual.abs() <= 1e-9);
        assert!(t.tau_q > 3.0 && t.tau_q <= 4.0);
    }

    #[test]
    fn smoothing_exponent_q7_against_romberg_oracle() {
        let t = tau_q::<f64>(7).unwrap();
        // frozen 30-digit reference
        assert!((t.r_q + 0.31609756183379883).abs() < 1e-7, "{}", t.r_q);

        // sign dichotomy around the root
        assert!(l_q(7, t.r_q - 0.05).unwrap() > 0.0);
        assert!(l_q(7, t.r_q + 0.05).unwrap() < 0.0);

        // independent oracle: composite trapezoid + Richardson on both pieces
        let a = |x: f64| (6.0 * x.exp() - (2.0 * x).exp()) / (x.exp() + 6.0).powi(3);
        let trap = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize| -> f64 {
            let h = (hi - lo) / n as f64;
            let mut s = 0.5 * (f(lo) + f(hi));
            for i in 1..n {
                s += f(lo + i as f64 * h);
            }
            s * h
        };
        let l_oracle = |r: f64| -> f64 {
            let inv = 1.0 / (1.0 + r);
            let near = |u: f64| a(u.powf(inv)) * inv;
            let far = |x: f64| x.powf(r) * a(x);
            let richardson = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> f64 {
                let c = trap(f, lo, hi, 16384);
                let fine = trap(f, lo, hi, 32768);
                (4.0 * fine - c) / 3.0
            };
            richardson(&near, 0.0, 1.0) + richardson(&far, 1.0, 45.0)
        };
        let (mut lo, mut hi) = (-0.6, -0.1);
        assert!(l_oracle(lo) > 0.0 && l_oracle(hi) < 0.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if l_oracle(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r_oracle = 0.5 * (lo + hi);
        assert!((t.r_q - r_oracle).abs() < 1e-6, "{} vs {r_oracle}", t.r_q);
    }

    #[test]
    fn smoothing_exponent_tracks_its_asymptote() {
        // (tau(q) - 3) q / log q -> 1 with monotonically improving error
        let mut prev_err = f64::INFINITY;
        for q in [50u32, 200, 1000] {
            let t = tau_q::<f64>(q).unwrap();
            let val = (t.tau_q - 3.0) * q as f64 / (q as f64).ln();
            let err = (val - 1.0).abs();
            assert!(err < prev_err, "q={q}: err {err} vs prev {prev_err}");
            prev_err = err;
        }
    }

    #[test]
    fn tau_q_rejects_small_q() {
        assert!(matches!(tau_q::<f64>(2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn classify_infinite_variance() {
        let report = classify(&cfg(3, 0.0, D::pareto(2.5, 1.0).unwrap())).unwrap();
        assert_eq!(report.regime, Regime::AlwaysOrdered);
        assert!(report.critical.is_none());
    }

    #[test]
    fn classify_pareto_second_order_with_closed_form_moments() {
        let report = classify(&cfg(7, 0.0, D::pareto(3.05, 1.0).unwrap())).unwrap();
        assert_eq!(report.regime, Regime::SecondOrder);
        let p = report.critical.unwrap();
        // E[W] = 2.05/1.05, E[W^2] = 2.05/0.05
        let expected = (1.0f64 + 7.0 * (2.05 / 1.05) / (2.05 / 0.05)).ln();
        assert!((p.beta_c - expected).abs() < 1e-10, "{} vs {expected}", p.beta_c);
        assert_eq!(p.order, TransitionOrder::Second);
    }

    #[test]
    fn classify_pareto_first_order() {
        let report = classify(&cfg(7, 0.0, D::pareto(5.0, 1.0).unwrap())).unwrap();
        assert_eq!(report.regime, Regime::FirstOrder);
        let p = report.critical.unwrap();
        assert!((p.t_c - 2.20111841089257).abs() < 1e-5);
    }

    #[test]
    fn classify_gamma_is_first_order() {
        let report = classify(&cfg(7, 0.0, D::gamma(2.0, 1.0).unwrap())).unwrap();
        assert_eq!(report.regime, Regime::FirstOrder);
        let p = report.critical.unwrap();
        assert!(p.t_c > 0.0 && p.s_high > p.s_low);
        assert!(report.beta_c_uncertainty.is_none());
    }

    #[test]
    fn classify_concave_field() {
        let report = classify(&cfg(7, 2.0, D::dirac(1.0).unwrap())).unwrap();
        assert_eq!(report.regime, Regime::ConcaveNoTransition);
    }

    #[test]
    fn classify_falls_back_to_sweep_for_the_two_atom_counterexample() {
        let (c1, _) = calibrate_counterexample::<f64>(7, 1.0, 5.0).unwrap();
        let c = cfg(7, 0.0, D::two_atom(1.0, 5.0, c1).unwrap());
        let report = classify(&c).unwrap();
        assert_eq!(report.regime, Regime::FirstOrder);
        assert!(!report.jumps.is_empty());
        let p = report.critical.unwrap();
        assert!(report.beta_c_uncertainty.is_some());
        assert!(p.s_high > p.s_low);
        // the jump must sit where the pressures of the competing branches tie
        let p_lo = c.pressure_reduced(p.beta_c, 0.0).unwrap();
        let p_hi = c
            .pressure_reduced(p.beta_c, p.s_high.clamp(0.0, 1.0))
            .unwrap();
        assert!((p_lo - p_hi).abs() < 1e-4, "{p_lo} vs {p_hi}");
    }
}
