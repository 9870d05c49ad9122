//! The variational problem for the pressure and its order parameter.
//!
//! The reduced route maximizes the one-dimensional pressure `p(s)` over the
//! stationary set delivered by the landscape; the full route brute-forces the
//! q-dimensional objective on a barycentric simplex grid and exists purely as
//! an independent check of the reduced one: grid search shares no machinery,
//! and therefore no failure mode, with the root-finders.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::{beta_prime, PottsConfig};
use crate::real::Real;
use crate::roots;

/// The solved order parameter at one temperature.
#[derive(Clone, Debug)]
pub struct OrderParameterSolution<R: Real> {
    /// Maximizer of the reduced pressure over `[0, 1]`.
    pub s_star: R,
    /// `t = s_star * b'`.
    pub t_star_scaled: R,
    /// The q-vector behind `s_star`: first coordinate
    /// `(E[W]/q)(1 + (q-1)s)`, the rest `(E[W]/q)(1 - s)`.
    pub y_vector: Vec<R>,
    /// Limiting fraction of color-1 spins (the `B -> 0` branch at `B = 0`).
    pub x1: R,
    /// The pressure at the maximizer.
    pub pressure: R,
    /// Two branches tie at this beta (the critical temperature); the
    /// larger-s branch is reported.
    pub degenerate: bool,
}

fn check_beta<R: Real>(beta: R) -> Result<R> {
    if !(beta.is_finite() && beta > R::zero()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be a finite positive real, got {beta}"
        )));
    }
    Ok(beta_prime(beta))
}

/// Maximizes the reduced pressure at inverse temperature `beta`.
///
/// Under the steep unique zero-crossing condition the stationary set comes
/// from the landscape's bracketed root-finders; otherwise the derivative
/// `p'(s)` is scanned densely on `[0, 1]` and each sign change refined. The
/// endpoints 0 and 1 always compete.
pub fn solve<R: Real>(cfg: &PottsConfig<R>, beta: R) -> Result<OrderParameterSolution<R>> {
    let bp = check_beta(beta)?;

    let mut candidates: Vec<R> = vec![R::zero(), R::one()];
    match cfg.stationary_solutions(beta) {
        Ok(sols) => {
            for t in sols {
                candidates.push((t / bp).min(R::one()));
            }
        }
        Err(Error::NoSteepness(_)) | Err(Error::ConcaveRegime(_)) => {
            candidates.extend(scan_stationary(cfg, bp)?);
        }
        Err(e) => return Err(e),
    }

    let mut evaluated: Vec<(R, R)> = Vec::with_capacity(candidates.len());
    for &s in &candidates {
        evaluated.push((s, cfg.pressure_reduced(beta, s)?));
    }
    let best = evaluated
        .iter()
        .map(|&(_, p)| p)
        .fold(R::neg_infinity(), R::max);
    let tie_tol = R::lit(1e-11) * (R::one() + best.abs());
    let mut s_star = R::zero();
    let mut s_min_tied = R::infinity();
    for &(s, p) in &evaluated {
        if p >= best - tie_tol {
            s_star = s_star.max(s);
            s_min_tied = s_min_tied.min(s);
        }
    }
    let degenerate = (s_star - s_min_tied) > R::lit(1e-6);

    let (qf, b, ew) = (cfg.qf(), cfg.field(), cfg.mean_weight());
    let x1 = cfg.dist().expect(
        move |w| {
            let e = (-(bp * w * s_star + b)).exp();
            (R::one() + (qf - R::one()) * e).recip()
        },
        cfg.rel_tol(),
    )?;

    let mut y_vector = vec![ew / qf * (R::one() - s_star); cfg.q() as usize];
    y_vector[0] = ew / qf * (R::one() + (qf - R::one()) * s_star);

    Ok(OrderParameterSolution {
        s_star,
        t_star_scaled: bp * s_star,
        y_vector,
        x1,
        pressure: best,
        degenerate,
    })
}

/// Dense scan of `p'(s)` over `[0, 1]` with sign-change refinement; the
/// stationary-set fallback when the crossing structure is unavailable.
fn scan_stationary<R: Real>(cfg: &PottsConfig<R>, bp: R) -> Result<Vec<R>> {
    const GRID: usize = 1024;
    let h = |s: R| -> Result<R> { Ok(cfg.scr_f(s * bp)? - s) };
    let dh = |s: R| -> Result<(R, R)> {
        Ok((
            cfg.scr_f(s * bp)? - s,
            bp * cfg.scr_f_d1(s * bp)? - R::one(),
        ))
    };
    let mut out = Vec::new();
    let step = R::of_usize(GRID).recip();
    let mut prev_s = R::zero();
    let mut prev_v = h(prev_s)?;
    for i in 1..=GRID {
        let s = if i == GRID {
            R::one()
        } else {
            R::of_usize(i) * step
        };
        let v = h(s)?;
        if prev_v == R::zero() {
            out.push(prev_s);
        } else if v == R::zero() || (v > R::zero()) != (prev_v > R::zero()) {
            out.push(roots::newton_safeguarded(
                dh,
                prev_s,
                s,
                (prev_s + s) * R::lit(0.5),
                cfg.root_tol(),
                200,
            )?);
        }
        prev_s = s;
        prev_v = v;
    }
    Ok(out)
}

/// Full q-dimensional objective `F(y) - (b'/2E[W]) sum y_k^2` with the field
/// on coordinate 1.
pub fn full_objective<R: Real>(cfg: &PottsConfig<R>, beta: R, y: &[R]) -> Result<R> {
    let bp = check_beta(beta)?;
    if y.len() != cfg.q() as usize {
        return Err(Error::InvalidParameter(format!(
            "y must have q = {} coordinates, got {}",
            cfg.q(),
            y.len()
        )));
    }
    let ew = cfg.mean_weight();
    let coef: Vec<R> = y.iter().map(|&yk| bp / ew * yk).collect();
    let field = cfg.field();
    let log_term = cfg.dist().expect(
        |w| {
            let mut zmax = R::neg_infinity();
            for (k, &c) in coef.iter().enumerate() {
                let z = c * w + if k == 0 { field } else { R::zero() };
                zmax = zmax.max(z);
            }
            let mut acc = R::zero();
            for (k, &c) in coef.iter().enumerate() {
                let z = c * w + if k == 0 { field } else { R::zero() };
                acc += (z - zmax).exp();
            }
            zmax + acc.ln()
        },
        cfg.rel_tol(),
    )?;
    let sum_sq = y.iter().fold(R::zero(), |acc, &yk| acc + yk * yk);
    Ok(log_term - bp / (R::lit(2.0) * ew) * sum_sq)
}

/// Result of the brute-force simplex search.
#[derive(Clone, Debug)]
pub struct GridOracleResult<R: Real> {
    pub y_best: Vec<R>,
    pub value: R,
}

fn for_each_composition<F: FnMut(&[usize])>(q: usize, total: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(counts: &mut [usize], remaining: usize, slot: usize, f: &mut F) {
        if slot + 1 == counts.len() {
            counts[slot] = remaining;
            f(counts);
            return;
        }
        for v in 0..=remaining {
            counts[slot] = v;
            rec(counts, remaining - v, slot + 1, f);
        }
    }
    let mut counts = vec![0usize; q];
    rec(&mut counts, total, 0, f);
}

/// Brute-force maximization of [`full_objective`] over the simplex
/// `{y_k >= 0, sum y_k = E[W]}` on a uniform barycentric grid.
///
/// An independent check of [`solve`], not a production path: restricted to
/// `q <= 4`, and the expectation runs on a fixed composite rule rather than
/// the adaptive engine.
pub fn grid_oracle<R: Real>(
    cfg: &PottsConfig<R>,
    beta: R,
    resolution: usize,
) -> Result<GridOracleResult<R>> {
    let bp = check_beta(beta)?;
    if cfg.q() > 4 {
        return Err(Error::TooLargeQ(format!(
            "grid oracle enumerates the simplex and is limited to q <= 4, got q = {}",
            cfg.q()
        )));
    }
    if resolution < 20 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be at least 20, got {resolution}"
        )));
    }
    let q = cfg.q() as usize;
    let ew = cfg.mean_weight();
    let nodes = cfg.dist().fixed_nodes(8);
    // per-node exponent increment for one composition unit
    let coefs: Vec<(R, R)> = nodes
        .iter()
        .map(|&(w, omega)| (bp * w / R::of_usize(resolution), omega))
        .collect();
    let field = cfg.field();
    let penalty_unit = bp * ew / (R::lit(2.0) * R::of_usize(resolution * resolution));

    let mut best_value = R::neg_infinity();
    let mut best_counts = vec![0usize; q];
    for_each_composition(q, resolution, &mut |counts| {
        let mut log_term = R::zero();
        for &(c, omega) in &coefs {
            let mut zmax = R::neg_infinity();
            for (k, &n) in counts.iter().enumerate() {
                let z = c * R::of_usize(n) + if k == 0 { field } else { R::zero() };
                if z > zmax {
                    zmax = z;
                }
            }
            let mut acc = R::zero();
            for (k, &n) in counts.iter().enumerate() {
                let z = c * R::of_usize(n) + if k == 0 { field } else { R::zero() };
                acc += (z - zmax).exp();
            }
            log_term += omega * (zmax + acc.ln());
        }
        let sum_sq = counts.iter().fold(R::zero(), |acc, &n| {
            acc + R::of_usize(n * n)
        });
        let value = log_term - penalty_unit * sum_sq;
        if value > best_value {
            best_value = value;
            best_counts.copy_from_slice(counts);
        }
    });

    let y_best = best_counts
        .iter()
        .map(|&n| ew * R::of_usize(n) / R::of_usize(resolution))
        .collect();
    Ok(GridOracleResult {
        y_best,
        value: best_value,
    })
}

/// One temperature in a sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow<R: Real> {
    pub beta: R,
    pub s_star: R,
    pub x1: R,
    pub pressure: R,
}

/// Sweep output: rows in increasing beta, plus the indices `i` such that a
/// jump was flagged between rows `i-1` and `i`.
#[derive(Clone, Debug)]
pub struct SweepResult<R: Real> {
    pub rows: Vec<SweepRow<R>>,
    pub jump_indices: Vec<usize>,
}

/// Solves every temperature on a uniform beta grid (rows are independent and
/// evaluated in parallel) and flags jumps of the order parameter.
///
/// A step is a jump when it exceeds ten times the median step change and
/// also dominates its neighboring steps fivefold; the second clause keeps
/// the smooth saturation tail after a genuine jump from being flagged row by
/// row. When more than half the steps are exactly zero (the symmetric phase
/// at zero field) the mean step stands in for the median.
pub fn sweep<R: Real>(
    cfg: &PottsConfig<R>,
    beta_min: R,
    beta_max: R,
    steps: usize,
) -> Result<SweepResult<R>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    if !(beta_min > R::zero() && beta_max > beta_min) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < beta_min < beta_max, got [{beta_min}, {beta_max}]"
        )));
    }
    let width = (beta_max - beta_min) / R::of_usize(steps - 1);
    let betas: Vec<R> = (0..steps)
        .map(|i| {
            if i + 1 == steps {
                beta_max
            } else {
                beta_min + width * R::of_usize(i)
            }
        })
        .collect();
    let rows: Vec<SweepRow<R>> = betas
        .par_iter()
        .map(|&beta| {
            let sol = solve(cfg, beta)?;
            Ok(SweepRow {
                beta,
                s_star: sol.s_star,
                x1: sol.x1,
                pressure: sol.pressure,
            })
        })
        .collect::<Result<_>>()?;

    let deltas: Vec<R> = rows
        .windows(2)
        .map(|w| (w[1].s_star - w[0].s_star).abs())
        .collect();
    let mut sorted = deltas.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) * R::lit(0.5)
    };
    let scale = if median > R::zero() {
        median
    } else {
        let sum = deltas.iter().fold(R::zero(), |a, &d| a + d);
        sum / R::of_usize(deltas.len())
    };
    let mut jump_indices = Vec::new();
    if scale > R::zero() {
        for (i, &d) in deltas.iter().enumerate() {
            let left = if i > 0 { deltas[i - 1] } else { R::zero() };
            let right = if i + 1 < deltas.len() {
                deltas[i + 1]
            } else {
                R::zero()
            };
            if d > R::lit(10.0) * scale && d > R::lit(5.0) * left.max(right) {
                jump_indices.push(i + 1);
            }
        }
    }
    Ok(SweepResult { rows, jump_indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical;
    use crate::landscape::beta_from_prime;
    use crate::weights::WeightDistribution as WD;

    type D = WD<f64>;

    fn cfg(q: u32, b: f64, d: D) -> PottsConfig<f64> {
        PottsConfig::new(q, b, d).unwrap()
    }

    fn dirac_q7() -> PottsConfig<f64> {
        cfg(7, 0.0, D::dirac(1.0).unwrap())
    }

    #[test]
    fn symmetric_phase_below_the_critical_point() {
        let c = dirac_q7();
        let sol = solve(&c, 0.8).unwrap();
        assert_eq!(sol.s_star, 0.0);
        assert!((sol.x1 - 1.0 / 7.0).abs() < 1e-14);
        assert!(!sol.degenerate);
        for y in &sol.y_vector {
            assert!((y - 1.0 / 7.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ordered_phase_just_above_the_critical_point() {
        let c = dirac_q7();
        let beta_c = (1.0f64 + 2.4 * 6f64.ln()).ln();
        let sol = solve(&c, beta_c * 1.001).unwrap();
        assert!(sol.s_star >= 5.0 / 6.0 - 1e-2, "{}", sol.s_star);
        assert!(sol.x1 > 1.0 / 7.0);
        assert!(sol.y_vector[0] > sol.y_vector[1]);
        let sum: f64 = sol.y_vector.iter().sum();
        assert!((sum - c.mean_weight()).abs() < 1e-12);
    }

    #[test]
    fn both_branches_tie_at_the_critical_temperature() {
        let c = dirac_q7();
        let beta_c = (1.0f64 + 2.4 * 6f64.ln()).ln();
        let sol = solve(&c, beta_c).unwrap();
        assert!(sol.degenerate);
        assert!((sol.s_star - 5.0 / 6.0).abs() < 1e-6, "{}", sol.s_star);
    }

    #[test]
    fn pareto_order_parameter_against_reference_values() {
        let c = cfg(7, 0.0, D::pareto(5.0, 1.0).unwrap());
        let sol = solve(&c, beta_from_prime(3.3)).unwrap();
        // frozen from a 30-digit fixed-point computation at b' = 3.3
        assert!((sol.s_star - 0.8217829551).abs() < 1e-6, "{}", sol.s_star);
        assert!((sol.x1 - 0.8248771516).abs() < 1e-6, "{}", sol.x1);
        assert!(sol.x1 > 1.0 / 7.0);
    }

    #[test]
    fn reduced_pressure_equals_full_objective_on_the_solution_form() {
        for (q, d, bp) in [
            (7u32, D::dirac(1.0).unwrap(), 3.0),
            (3u32, D::pareto(5.0, 1.0).unwrap(), 2.2),
        ] {
            let c = cfg(q, 0.0, d);
            let beta = beta_from_prime(bp);
            let sol = solve(&c, beta).unwrap();
            let full = full_objective(&c, beta, &sol.y_vector).unwrap();
            assert!(
                (full - sol.pressure).abs() < 1e-9 * (1.0 + full.abs()),
                "full {full} vs reduced {}",
                sol.pressure
            );
        }
    }

    #[test]
    fn stationarity_residual_of_the_solution() {
        for bp in [2.0, 4.2, 6.0] {
            let c = dirac_q7();
            let beta = beta_from_prime(bp);
            let sol = solve(&c, beta).unwrap();
            let d = c.pressure_d1(beta, sol.s_star).unwrap();
            if sol.s_star == 0.0 {
                assert!(d <= 1e-12, "endpoint 0 with positive derivative: {d}");
            } else {
                assert!(d.abs() <= 1e-8, "p'({}) = {d}", sol.s_star);
            }
        }
    }

    #[test]
    fn grid_oracle_symmetric_at_high_temperature() {
        let c = cfg(3, 0.0, D::dirac(1.0).unwrap());
        let g = grid_oracle(&c, 0.3, 60).unwrap();
        let spacing = c.mean_weight() / 60.0;
        for y in &g.y_best {
            assert!((y - c.mean_weight() / 3.0).abs() <= spacing + 1e-12);
        }
    }

    #[test]
    fn grid_oracle_agrees_with_solve_both_ways() {
        let c = cfg(3, 0.0, D::dirac(1.0).unwrap());
        let beta_c = critical::newton_tc(&c).unwrap().point.beta_c;
        for beta in [0.8 * beta_c, 1.2 * beta_c] {
            let sol = solve(&c, beta).unwrap();
            let g = grid_oracle(&c, beta, 400).unwrap();
            assert!(
                (g.value - sol.pressure).abs() <= 1e-4,
                "grid {} vs reduced {}",
                g.value,
                sol.pressure
            );
            assert!(g.value <= sol.pressure + 1e-8, "grid beat the supremum");
        }
    }

    #[test]
    fn grid_oracle_argmax_is_a_permutation_of_the_solution_form() {
        let c = cfg(3, 0.0, D::dirac(1.0).unwrap());
        let beta_c = critical::newton_tc(&c).unwrap().point.beta_c;
        let beta = 1.2 * beta_c;
        let sol = solve(&c, beta).unwrap();
        let g = grid_oracle(&c, beta, 400).unwrap();
        let spacing = c.mean_weight() / 400.0;
        let mut sorted_grid = g.y_best.clone();
        let mut sorted_sol = sol.y_vector.clone();
        sorted_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted_sol.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in sorted_grid.iter().zip(&sorted_sol) {
            assert!((a - b).abs() <= 1.5 * spacing, "{sorted_grid:?} vs {sorted_sol:?}");
        }
    }

    #[test]
    fn grid_optimum_within_curvature_bound_at_random_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let dists = [
            D::dirac(1.0).unwrap(),
            D::uniform(1.0, 1.2).unwrap(),
            D::pareto(5.0, 1.0).unwrap(),
        ];
        let res = 150usize;
        for trial in 0..5 {
            let d = dists[trial % dists.len()];
            let c = cfg(3, 0.0, d);
            let beta_c = critical::newton_tc(&c).unwrap().point.beta_c;
            let beta = rng.random_range(0.7..1.4) * beta_c;
            let sol = solve(&c, beta).unwrap();
            let g = grid_oracle(&c, beta, res).unwrap();
            // grid spacing in s and a generous curvature ceiling for p''
            let bp = beta_prime(beta);
            let ds = 1.5 / res as f64;
            let d1 = c.scr_f_d1(sol.t_star_scaled).unwrap();
            let curvature = bp * c.mean_weight() * (1.0 + bp * d1.max(c.scr_f_d1(0.0).unwrap()));
            let bound = 2.0 * ds * ds * curvature + 1e-7;
            assert!(
                (sol.pressure - g.value).abs() <= bound,
                "trial {trial} ({d}, beta {beta}): |{} - {}| > {bound}",
                sol.pressure,
                g.value
            );
            assert!(g.value <= sol.pressure + 1e-7);
        }
    }

    #[test]
    fn grid_maximum_is_shared_by_all_q_permutations() {
        let c = cfg(3, 0.0, D::dirac(1.0).unwrap());
        let beta = 1.2 * critical::newton_tc(&c).unwrap().point.beta_c;
        let g = grid_oracle(&c, beta, 60).unwrap();
        let y = &g.y_best;
        let perms = [
            vec![y[0], y[1], y[2]],
            vec![y[1], y[2], y[0]],
            vec![y[2], y[0], y[1]],
        ];
        let base = full_objective(&c, beta, &perms[0]).unwrap();
        for p in &perms[1..] {
            let v = full_objective(&c, beta, p).unwrap();
            assert!((v - base).abs() < 1e-12, "{v} vs {base}");
        }
        // and those permutations genuinely attain the grid maximum
        assert!((base - g.value).abs() < 1e-6);
    }

    #[test]
    fn objective_is_permutation_invariant_without_field() {
        let c = cfg(3, 0.0, D::pareto(5.0, 1.0).unwrap());
        let beta = 1.4;
        let y = [0.9, 0.25, 0.1833333333333333];
        let base = full_objective(&c, beta, &y).unwrap();
        let perms: [[f64; 3]; 2] = [[0.25, 0.1833333333333333, 0.9], [0.1833333333333333, 0.9, 0.25]];
        for p in perms {
            let v = full_objective(&c, beta, &p).unwrap();
            assert!((v - base).abs() < 1e-10, "{v} vs {base}");
        }
    }

    #[test]
    fn oracle_refuses_large_q_and_coarse_grids() {
        let c5 = cfg(5, 0.0, D::dirac(1.0).unwrap());
        assert!(matches!(
            grid_oracle(&c5, 1.0, 100),
            Err(Error::TooLargeQ(_))
        ));
        let c3 = cfg(3, 0.0, D::dirac(1.0).unwrap());
        assert!(matches!(
            grid_oracle(&c3, 1.0, 10),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn sweep_flags_exactly_one_jump_at_the_single_atom_transition() {
        let c = dirac_q7();
        let beta_c = (1.0f64 + 2.4 * 6f64.ln()).ln();
        let res = sweep(&c, 0.6 * beta_c, 1.6 * beta_c, 40).unwrap();
        assert_eq!(res.jump_indices.len(), 1, "{:?}", res.jump_indices);
        let i = res.jump_indices[0];
        assert!(res.rows[i - 1].beta < beta_c && beta_c < res.rows[i].beta);
        // order parameter is nondecreasing across the sweep
        for w in res.rows.windows(2) {
            assert!(w[1].s_star >= w[0].s_star - 1e-9);
        }
    }

    #[test]
    fn sweep_jump_brackets_the_solved_critical_point() {
        let c = cfg(7, 0.0, D::pareto(5.0, 1.0).unwrap());
        let beta_c = critical::newton_tc(&c).unwrap().point.beta_c;
        let res = sweep(&c, 0.9 * beta_c, 1.1 * beta_c, 20).unwrap();
        assert_eq!(res.jump_indices.len(), 1, "{:?}", res.jump_indices);
        let i = res.jump_indices[0];
        assert!(
            res.rows[i - 1].beta < beta_c && beta_c < res.rows[i].beta,
            "jump ({}, {}) does not bracket {beta_c}",
            res.rows[i - 1].beta,
            res.rows[i].beta
        );
    }

    #[test]
    fn sweep_sees_no_jump_in_the_second_order_regime() {
        let c = cfg(7, 0.0, D::pareto(3.05, 1.0).unwrap());
        let beta_c = (1.0f64 + 1.0 / 3.0).ln();
        let res = sweep(&c, 0.5 * beta_c, 3.0 * beta_c, 21).unwrap();
        assert!(res.jump_indices.is_empty(), "{:?}", res.jump_indices);
    }

    #[test]
    fn sweep_is_ordered_everywhere_for_infinite_variance() {
        let c = cfg(3, 0.0, D::pareto(2.5, 1.0).unwrap());
        let res = sweep(&c, 0.2, 1.2, 11).unwrap();
        for row in &res.rows {
            assert!(row.s_star > 0.0, "s = 0 at beta = {}", row.beta);
            assert!(row.x1 > 1.0 / 3.0);
        }
    }

    #[test]
    fn field_branches_switch_at_the_field_critical_point() {
        // dirac(1), q=7, B=0.1: beta_c(B) = 1.62141...
        let c = cfg(7, 0.1, D::dirac(1.0).unwrap());
        let below = solve(&c, 1.55).unwrap();
        assert!(below.s_star > 0.0 && below.s_star < 0.1, "{}", below.s_star);
        let above = solve(&c, 1.7).unwrap();
        assert!(above.s_star > 0.7, "{}", above.s_star);
        assert!(above.x1 > below.x1);
        assert!(!below.degenerate && !above.degenerate);
    }

    #[test]
    fn concave_regime_solves_by_dense_scan() {
        // B >= log(q-1): no transition machinery, but the pressure still has
        // a unique maximizer that the scan path must find
        let c = cfg(7, 2.0, D::dirac(1.0).unwrap());
        assert!(c.is_concave_regime());
        let mut prev = 0.0;
        for bp in [0.5, 1.5, 3.0, 6.0] {
            let sol = solve(&c, beta_from_prime(bp)).unwrap();
            assert!(sol.s_star > 0.0 && sol.s_star < 1.0, "s = {}", sol.s_star);
            assert!(sol.s_star >= prev, "not monotone in beta");
            let d = c.pressure_d1(beta_from_prime(bp), sol.s_star).unwrap();
            assert!(d.abs() < 1e-8, "p'(s*) = {d}");
            prev = sol.s_star;
        }
        let res = sweep(&c, 0.3, 2.0, 17).unwrap();
        assert!(res.jump_indices.is_empty(), "{:?}", res.jump_indices);
    }

    #[test]
    fn x1_stays_in_its_bounds() {
        let c = dirac_q7();
        for bp in [0.5, 3.0, 4.2, 5.5, 9.0] {
            let sol = solve(&c, beta_from_prime(bp)).unwrap();
            assert!(sol.x1 >= 1.0 / 7.0 - 1e-12);
            assert!(sol.x1 < 1.0);
        }
    }
}
