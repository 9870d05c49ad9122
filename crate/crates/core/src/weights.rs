//! Vertex-weight laws: moments and expectations.
//!
//! Every integral in the crate reduces to `E[g(W)]` for one of the families
//! below. Atomic laws are evaluated as exact weighted sums. Continuous laws
//! go through adaptive quadrature on a transformed domain chosen so the
//! integrand is proper: Pareto maps `[wmin, inf)` onto `[0, 1)` via
//! `w = wmin/(1-u)`; the exponential-class families (gamma, log-normal,
//! Rayleigh) are truncated where an analytic envelope bound for integrands
//! growing at most like `w^3` falls below a twentieth of the requested
//! tolerance, and are normalized by the kernel mass over the same window so
//! the truncation cancels to first order.

use std::fmt;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::real::Real;
use crate::roots;

/// Standard normal 1% quantile.
const Z01: f64 = -2.3263478740408408;

/// The law of the vertex weight `W`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightDistribution<R: Real> {
    /// Point mass at `lambda` (the Erdos-Renyi case).
    Dirac { lambda: R },
    /// Density `(tau-1) wmin^(tau-1) w^(-tau)` on `[wmin, inf)`, `tau > 2`.
    Pareto { tau: R, wmin: R },
    /// Uniform on `[a, b]`.
    Uniform { a: R, b: R },
    /// Mass `c1` at `x1` and `1 - c1` at `x2`, `0 < x1 < x2`.
    TwoAtom { x1: R, x2: R, c1: R },
    /// Shape/scale gamma.
    Gamma { shape: R, scale: R },
    /// `exp(mu + sigma Z)` for standard normal `Z`.
    LogNormal { mu: R, sigma: R },
    /// Density `(w/sigma^2) exp(-w^2/(2 sigma^2))` on `[0, inf)`.
    Rayleigh { sigma: R },
}

use WeightDistribution::*;

fn require(cond: bool, msg: impl Fn() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

impl<R: Real> WeightDistribution<R> {
    pub fn dirac(lambda: R) -> Result<Self> {
        require(lambda.is_finite() && lambda > R::zero(), || {
            format!("dirac: key 'lambda' must be a positive real, got {lambda}")
        })?;
        Ok(Dirac { lambda })
    }

    pub fn pareto(tau: R, wmin: R) -> Result<Self> {
        require(tau.is_finite() && tau > R::lit(2.0), || {
            format!("pareto: key 'tau' must exceed 2, got {tau}")
        })?;
        require(wmin.is_finite() && wmin > R::zero(), || {
            format!("pareto: key 'wmin' must be a positive real, got {wmin}")
        })?;
        Ok(Pareto { tau, wmin })
    }

    pub fn uniform(a: R, b: R) -> Result<Self> {
        require(a.is_finite() && a >= R::zero(), || {
            format!("uniform: key 'a' must be >= 0, got {a}")
        })?;
        require(b.is_finite() && b > a, || {
            format!("uniform: key 'b' must exceed a, got a={a}, b={b}")
        })?;
        Ok(Uniform { a, b })
    }

    pub fn two_atom(x1: R, x2: R, c1: R) -> Result<Self> {
        require(x1.is_finite() && x1 > R::zero(), || {
            format!("twoatom: key 'x1' must be a positive real, got {x1}")
        })?;
        require(x2.is_finite() && x2 > x1, || {
            format!("twoatom: key 'x2' must exceed x1, got x1={x1}, x2={x2}")
        })?;
        require(c1 > R::zero() && c1 < R::one(), || {
            format!("twoatom: key 'c1' must lie in (0,1), got {c1}")
        })?;
        Ok(TwoAtom { x1, x2, c1 })
    }

    pub fn gamma(shape: R, scale: R) -> Result<Self> {
        require(shape.is_finite() && shape > R::zero(), || {
            format!("gamma: key 'k' must be a positive real, got {shape}")
        })?;
        require(scale.is_finite() && scale > R::zero(), || {
            format!("gamma: key 'theta' must be a positive real, got {scale}")
        })?;
        Ok(Gamma { shape, scale })
    }

    pub fn log_normal(mu: R, sigma: R) -> Result<Self> {
        require(mu.is_finite(), || {
            format!("lognormal: key 'mu' must be finite, got {mu}")
        })?;
        require(sigma.is_finite() && sigma > R::zero(), || {
            format!("lognormal: key 'sigma' must be a positive real, got {sigma}")
        })?;
        Ok(LogNormal { mu, sigma })
    }

    pub fn rayleigh(sigma: R) -> Result<Self> {
        require(sigma.is_finite() && sigma > R::zero(), || {
            format!("rayleigh: key 'sigma' must be a positive real, got {sigma}")
        })?;
        Ok(Rayleigh { sigma })
    }

    /// `E[W^k]` for `k` in 1..=3, by closed form; `+inf` when divergent.
    pub fn moment(&self, k: u32) -> R {
        assert!((1..=3).contains(&k), "moment order must be 1, 2, or 3");
        let kf = R::of_usize(k as usize);
        match *self {
            Dirac { lambda } => lambda.powi(k as i32),
            Pareto { tau, wmin } => {
                if kf >= tau - R::one() {
                    R::infinity()
                } else {
                    wmin.powi(k as i32) * (tau - R::one()) / (tau - R::one() - kf)
                }
            }
            Uniform { a, b } => {
                let kp1 = kf + R::one();
                (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (kp1 * (b - a))
            }
            TwoAtom { x1, x2, c1 } => {
                c1 * x1.powi(k as i32) + (R::one() - c1) * x2.powi(k as i32)
            }
            Gamma { shape, scale } => {
                let mut m = R::one();
                for j in 0..k {
                    m *= shape + R::of_usize(j as usize);
                }
                m * scale.powi(k as i32)
            }
            LogNormal { mu, sigma } => (kf * mu + kf * kf * sigma * sigma * R::lit(0.5)).exp(),
            Rayleigh { sigma } => {
                let half_pi_sqrt = (R::FRAC_PI_2()).sqrt();
                match k {
                    1 => sigma * half_pi_sqrt,
                    2 => R::lit(2.0) * sigma * sigma,
                    _ => R::lit(3.0) * sigma * sigma * sigma * half_pi_sqrt,
                }
            }
        }
    }

    /// `E[W]`.
    pub fn mean(&self) -> R {
        self.moment(1)
    }

    /// Essential infimum of the support.
    pub fn min_support(&self) -> R {
        match *self {
            Dirac { lambda } => lambda,
            Pareto { wmin, .. } => wmin,
            Uniform { a, .. } => a,
            TwoAtom { x1, .. } => x1,
            Gamma { .. } | LogNormal { .. } | Rayleigh { .. } => R::zero(),
        }
    }

    /// The law of `c*W`, by exact parameter rescaling.
    pub fn scale_by(&self, c: R) -> Result<Self> {
        require(c.is_finite() && c > R::zero(), || {
            format!("scale factor must be a positive real, got {c}")
        })?;
        Ok(match *self {
            Dirac { lambda } => Dirac { lambda: lambda * c },
            Pareto { tau, wmin } => Pareto {
                tau,
                wmin: wmin * c,
            },
            Uniform { a, b } => Uniform { a: a * c, b: b * c },
            TwoAtom { x1, x2, c1 } => TwoAtom {
                x1: x1 * c,
                x2: x2 * c,
                c1,
            },
            Gamma { shape, scale } => Gamma {
                shape,
                scale: scale * c,
            },
            LogNormal { mu, sigma } => LogNormal {
                mu: mu + c.ln(),
                sigma,
            },
            Rayleigh { sigma } => Rayleigh { sigma: sigma * c },
        })
    }

    /// `E[g(W)]` to relative tolerance `rel_tol` (against `1 + |E[g(W)]|`).
    ///
    /// `g` may grow at most like `w^3` times a bounded factor; that envelope
    /// is what the truncation bounds assume.
    pub fn expect<F>(&self, g: F, rel_tol: R) -> Result<R>
    where
        F: Fn(R) -> R,
    {
        let rel = rel_tol.max(R::lit(32.0) * R::epsilon());
        match *self {
            Dirac { lambda } => Ok(g(lambda)),
            TwoAtom { x1, x2, c1 } => Ok(c1 * g(x1) + (R::one() - c1) * g(x2)),
            Uniform { a, b } => {
                let opts = QuadOptions {
                    rel_tol: rel,
                    abs_floor: b - a,
                    max_splits: 4000,
                };
                Ok(quad::integrate(&g, a, b, &opts)? / (b - a))
            }
            Pareto { tau, wmin } => {
                let opts = QuadOptions {
                    rel_tol: rel,
                    abs_floor: R::one(),
                    max_splits: 4000,
                };
                quad::integrate(
                    |u: R| {
                        let one_minus = R::one() - u;
                        // deep subdivision can round a node onto the endpoint
                        if one_minus <= R::zero() {
                            return R::zero();
                        }
                        (tau - R::one()) * one_minus.powf(tau - R::lit(2.0)) * g(wmin / one_minus)
                    },
                    R::zero(),
                    R::one(),
                    &opts,
                )
            }
            Gamma { .. } | LogNormal { .. } | Rayleigh { .. } => self.expect_truncated(&g, rel),
        }
    }

    /// Truncated, self-normalized route for the exponential-class families.
    fn expect_truncated<F>(&self, g: &F, rel: R) -> Result<R>
    where
        F: Fn(R) -> R,
    {
        let eps_tail = R::lit(0.05) * rel;
        let quarter = rel * R::lit(0.25);
        let (num, den) = match *self {
            Gamma { shape, scale } => {
                let m = gamma_like_cutoff(shape + R::lit(2.0), eps_tail);
                let hi = scale * m;
                if shape >= R::one() {
                    let kernel = move |w: R| w.powf(shape - R::one()) * (-w / scale).exp();
                    self.num_den(g, kernel, R::zero(), hi, quarter)?
                } else {
                    // w = v^(1/shape) removes the w^(shape-1) endpoint singularity
                    let kernel = move |v: R| {
                        let w = v.powf(shape.recip());
                        (-w / scale).exp() / shape
                    };
                    let map = move |v: R| v.powf(shape.recip());
                    self.num_den_mapped(g, kernel, map, R::zero(), hi.powf(shape), quarter)?
                }
            }
            LogNormal { mu, sigma } => {
                let z_max = R::lit(3.0) * sigma
                    + (R::lit(2.0) * eps_tail.recip().ln() + R::lit(9.0) * sigma * sigma).sqrt()
                    + R::one();
                let kernel = move |z: R| (-z * z * R::lit(0.5)).exp();
                let map = move |z: R| (mu + sigma * z).exp();
                self.num_den_mapped(g, kernel, map, -z_max, z_max, quarter)?
            }
            Rayleigh { sigma } => {
                let mut x = R::lit(4.0);
                while R::lit(3.0) * x.ln() - x * x * R::lit(0.5) > (eps_tail * R::lit(0.5)).ln() {
                    x *= R::lit(1.15);
                }
                let hi = sigma * x;
                let kernel = move |w: R| w * (-w * w / (R::lit(2.0) * sigma * sigma)).exp();
                self.num_den(g, kernel, R::zero(), hi, quarter)?
            }
            _ => unreachable!("atomic and compact families handled by expect"),
        };
        Ok(num / den)
    }

    fn num_den<F, K>(&self, g: &F, kernel: K, lo: R, hi: R, rel: R) -> Result<(R, R)>
    where
        F: Fn(R) -> R,
        K: Fn(R) -> R + Copy,
    {
        self.num_den_mapped(g, kernel, |w| w, lo, hi, rel)
    }

    fn num_den_mapped<F, K, M>(&self, g: &F, kernel: K, map: M, lo: R, hi: R, rel: R) -> Result<(R, R)>
    where
        F: Fn(R) -> R,
        K: Fn(R) -> R + Copy,
        M: Fn(R) -> R + Copy,
    {
        let den_opts = QuadOptions {
            rel_tol: rel,
            abs_floor: R::zero(),
            max_splits: 4000,
        };
        let den = quad::integrate(kernel, lo, hi, &den_opts)?;
        let num_opts = QuadOptions {
            rel_tol: rel,
            abs_floor: den,
            max_splits: 4000,
        };
        let num = quad::integrate(move |x| kernel(x) * g(map(x)), lo, hi, &num_opts)?;
        Ok((num, den))
    }

    /// 1% quantile, used to set scan ceilings for laws supported down to 0.
    pub fn quantile01(&self) -> Result<R> {
        let p = R::lit(0.01);
        Ok(match *self {
            Dirac { lambda } => lambda,
            TwoAtom { x1, x2, c1 } => {
                if c1 >= p {
                    x1
                } else {
                    x2
                }
            }
            Uniform { a, b } => a + p * (b - a),
            Pareto { tau, wmin } => wmin * R::lit(0.99).powf(-(tau - R::one()).recip()),
            Gamma { shape, scale } => {
                let m = gamma_like_cutoff(shape + R::lit(2.0), R::lit(1e-12));
                let hi = scale * m;
                let total = gamma_kernel_mass(shape, scale, hi)?;
                roots::bisect(
                    |x| Ok(gamma_kernel_mass(shape, scale, x)? / total - p),
                    hi * R::lit(1e-12),
                    hi,
                    scale * R::lit(1e-8),
                    200,
                )?
            }
            LogNormal { mu, sigma } => (mu + sigma * R::lit(Z01)).exp(),
            Rayleigh { sigma } => {
                sigma * (-R::lit(2.0) * R::lit(0.99).ln()).sqrt()
            }
        })
    }

    /// Fixed, non-adaptive node/weight pairs with weights summing to one.
    ///
    /// This is a deliberately separate integration route from [`Self::expect`],
    /// kept for oracles that must not share a failure mode with the adaptive
    /// engine. `panels` composite Kronrod panels are laid over the same
    /// transformed domains used above.
    pub fn fixed_nodes(&self, panels: usize) -> Vec<(R, R)> {
        let raw: Vec<(R, R)> = match *self {
            Dirac { lambda } => vec![(lambda, R::one())],
            TwoAtom { x1, x2, c1 } => vec![(x1, c1), (x2, R::one() - c1)],
            Uniform { a, b } => quad::fixed_kronrod_nodes(a, b, panels),
            Pareto { tau, wmin } => quad::fixed_kronrod_nodes(R::zero(), R::one(), panels)
                .into_iter()
                .map(|(u, w)| {
                    let one_minus = R::one() - u;
                    (
                        wmin / one_minus,
                        w * (tau - R::one()) * one_minus.powf(tau - R::lit(2.0)),
                    )
                })
                .collect(),
            Gamma { shape, scale } => {
                let m = gamma_like_cutoff(shape + R::lit(2.0), R::lit(5e-12));
                if shape >= R::one() {
                    quad::fixed_kronrod_nodes(R::zero(), scale * m, panels)
                        .into_iter()
                        .map(|(w, wt)| (w, wt * w.powf(shape - R::one()) * (-w / scale).exp()))
                        .collect()
                } else {
                    quad::fixed_kronrod_nodes(R::zero(), (scale * m).powf(shape), panels)
                        .into_iter()
                        .map(|(v, wt)| {
                            let w = v.powf(shape.recip());
                            (w, wt * (-w / scale).exp() / shape)
                        })
                        .collect()
                }
            }
            LogNormal { mu, sigma } => {
                let z_max = R::lit(3.0) * sigma + (R::lit(52.0) + R::lit(9.0) * sigma * sigma).sqrt();
                quad::fixed_kronrod_nodes(-z_max, z_max, panels)
                    .into_iter()
                    .map(|(z, wt)| ((mu + sigma * z).exp(), wt * (-z * z * R::lit(0.5)).exp()))
                    .collect()
            }
            Rayleigh { sigma } => {
                let hi = sigma * R::lit(11.0);
                quad::fixed_kronrod_nodes(R::zero(), hi, panels)
                    .into_iter()
                    .map(|(w, wt)| {
                        (w, wt * w * (-w * w / (R::lit(2.0) * sigma * sigma)).exp())
                    })
                    .collect()
            }
        };
        let total = raw.iter().fold(R::zero(), |acc, &(_, w)| acc + w);
        raw.into_iter().map(|(x, w)| (x, w / total)).collect()
    }

    /// Parses the distribution mini-grammar, e.g. `pareto:tau=5` or
    /// `twoatom:x1=1,x2=5,c1=0.98158584`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (family, rest) = match spec.split_once(':') {
            Some((f, r)) => (f.trim(), r),
            None => (spec.trim(), ""),
        };
        let mut pairs = Vec::new();
        if !rest.trim().is_empty() {
            for item in rest.split(',') {
                let (k, v) = item.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("{family}: expected key=value, got '{item}'"))
                })?;
                let key = k.trim().to_string();
                let val: R = R::lit(v.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("{family}: key '{key}': invalid number '{}'", v.trim()))
                })?);
                if pairs.iter().any(|(pk, _)| *pk == key) {
                    return Err(Error::Parse(format!("{family}: duplicate key '{key}'")));
                }
                pairs.push((key, val));
            }
        }
        let mut take = |key: &str| -> Option<R> {
            let idx = pairs.iter().position(|(k, _)| k == key)?;
            Some(pairs.remove(idx).1)
        };
        let need = |family: &str, key: &str, v: Option<R>| -> Result<R> {
            v.ok_or_else(|| Error::Parse(format!("{family}: missing key '{key}'")))
        };
        let dist = match family {
            "dirac" => Self::dirac(need(family, "lambda", take("lambda"))?)?,
            "pareto" => {
                let tau = need(family, "tau", take("tau"))?;
                let wmin = take("wmin").unwrap_or_else(R::one);
                Self::pareto(tau, wmin)?
            }
            "uniform" => Self::uniform(
                need(family, "a", take("a"))?,
                need(family, "b", take("b"))?,
            )?,
            "twoatom" => Self::two_atom(
                need(family, "x1", take("x1"))?,
                need(family, "x2", take("x2"))?,
                need(family, "c1", take("c1"))?,
            )?,
            "gamma" => Self::gamma(
                need(family, "k", take("k"))?,
                need(family, "theta", take("theta"))?,
            )?,
            "lognormal" => Self::log_normal(
                need(family, "mu", take("mu"))?,
                need(family, "sigma", take("sigma"))?,
            )?,
            "rayleigh" => Self::rayleigh(need(family, "sigma", take("sigma"))?)?,
            other => {
                return Err(Error::Parse(format!(
                    "unknown distribution family '{other}' (expected dirac, pareto, uniform, twoatom, gamma, lognormal, or rayleigh)"
                )))
            }
        };
        if let Some((key, _)) = pairs.first() {
            return Err(Error::Parse(format!("{family}: unexpected key '{key}'")));
        }
        Ok(dist)
    }
}

/// Unnormalized gamma-kernel mass on `[0, x]`, through the same singularity
/// removal as the expectation path.
fn gamma_kernel_mass<R: Real>(shape: R, scale: R, x: R) -> Result<R> {
    let opts = QuadOptions {
        rel_tol: R::lit(1e-9),
        abs_floor: R::zero(),
        max_splits: 4000,
    };
    if shape >= R::one() {
        quad::integrate(
            move |w: R| w.powf(shape - R::one()) * (-w / scale).exp(),
            R::zero(),
            x,
            &opts,
        )
    } else {
        quad::integrate(
            move |v: R| (-(v.powf(shape.recip())) / scale).exp() / shape,
            R::zero(),
            x.powf(shape),
            &opts,
        )
    }
}

/// Smallest `m >= 2(p+1)+4` with `2 m^p e^-m / 0.885 <= eps`; the envelope
/// cutoff for kernels bounded by `m^p e^-m` past the mode.
fn gamma_like_cutoff<R: Real>(p: R, eps: R) -> R {
    let target = (R::lit(0.4425) * eps).ln();
    let mut m = R::lit(2.0) * (p + R::one()) + R::lit(4.0);
    while p * m.ln() - m > target {
        m *= R::lit(1.25);
    }
    m
}

impl<R: Real> fmt::Display for WeightDistribution<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Dirac { lambda } => write!(f, "dirac:lambda={lambda}"),
            Pareto { tau, wmin } => write!(f, "pareto:tau={tau},wmin={wmin}"),
            Uniform { a, b } => write!(f, "uniform:a={a},b={b}"),
            TwoAtom { x1, x2, c1 } => write!(f, "twoatom:x1={x1},x2={x2},c1={c1}"),
            Gamma { shape, scale } => write!(f, "gamma:k={shape},theta={scale}"),
            LogNormal { mu, sigma } => write!(f, "lognormal:mu={mu},sigma={sigma}"),
            Rayleigh { sigma } => write!(f, "rayleigh:sigma={sigma}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type D = WeightDistribution<f64>;

    fn all_finite_moment_laws() -> Vec<D> {
        vec![
            D::dirac(5.0).unwrap(),
            D::pareto(5.0, 1.0).unwrap(),
            D::pareto(6.5, 2.0).unwrap(),
            D::uniform(1.0, 2.0).unwrap(),
            D::uniform(0.0, 3.0).unwrap(),
            D::two_atom(1.0, 5.0, 0.7).unwrap(),
            D::gamma(2.0, 1.0).unwrap(),
            D::gamma(0.5, 2.0).unwrap(),
            D::log_normal(0.0, 1.0).unwrap(),
            D::log_normal(0.3, 0.5).unwrap(),
            D::rayleigh(1.0).unwrap(),
            D::rayleigh(0.25).unwrap(),
        ]
    }

    #[test]
    fn pareto_first_moment_closed_form() {
        let d = D::pareto(5.0, 1.0).unwrap();
        assert!((d.moment(1) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dirac_second_moment_is_square() {
        let d = D::dirac(5.0).unwrap();
        assert_eq!(d.moment(2), 25.0);
    }

    #[test]
    fn pareto_heavy_tail_second_moment_diverges() {
        let d = D::pareto(2.5, 1.0).unwrap();
        assert!(d.moment(2).is_infinite());
        assert!(d.moment(1).is_finite());
    }

    #[test]
    fn pareto_tau5_second_moment() {
        let d = D::pareto(5.0, 1.0).unwrap();
        assert!((d.moment(2) - 2.0).abs() < 1e-15);
        let by_quad = d.expect(|w| w * w, 1e-12).unwrap();
        assert!((by_quad - 2.0).abs() < 1e-10, "got {by_quad}");
    }

    #[test]
    fn moments_match_quadrature_for_every_family() {
        for d in all_finite_moment_laws() {
            for k in 1..=3u32 {
                let exact = d.moment(k);
                let numeric = d.expect(|w| w.powi(k as i32), 1e-10).unwrap();
                let rel = (numeric - exact).abs() / (1.0 + exact.abs());
                assert!(rel < 1e-8, "{d}: k={k}: exact {exact} vs quad {numeric}");
            }
        }
    }

    #[test]
    fn two_atom_counterexample_balance() {
        // calibrated so that E[W^3 a(W)] = 0 at t = 1 for q = 7
        let d = D::two_atom(1.0, 5.0, 0.98158584).unwrap();
        let a = |x: f64| (6.0 * x.exp() - (2.0 * x).exp()) / (x.exp() + 6.0).powi(3);
        let v = d.expect(|w| w.powi(3) * a(w), 1e-12).unwrap();
        assert!(v.abs() < 1e-8, "got {v}");
    }

    #[test]
    fn dirac_expect_is_evaluation() {
        let d = D::dirac(2.5).unwrap();
        assert_eq!(d.expect(|w| w.sin(), 1e-10).unwrap(), 2.5f64.sin());
    }

    #[test]
    fn pareto_identity_expectation() {
        let d = D::pareto(5.0, 1.0).unwrap();
        let v = d.expect(|w| w, 1e-10).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn quantile01_matches_closed_forms() {
        let u = D::uniform(1.0, 3.0).unwrap();
        assert!((u.quantile01().unwrap() - 1.02).abs() < 1e-14);
        let p = D::pareto(3.0, 1.0).unwrap();
        assert!((p.quantile01().unwrap() - 0.99f64.powf(-0.5)).abs() < 1e-14);
        // gamma(1, theta) is exponential: quantile = -theta ln(0.99)
        let g = D::gamma(1.0, 2.0).unwrap();
        let exact = -2.0 * 0.99f64.ln();
        let got = g.quantile01().unwrap();
        assert!((got - exact).abs() < 1e-4, "got {got}, exact {exact}");
    }

    #[test]
    fn fixed_nodes_reproduce_moments() {
        for d in all_finite_moment_laws() {
            let nodes = d.fixed_nodes(24);
            for k in 1..=3u32 {
                let exact = d.moment(k);
                let s: f64 = nodes.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
                let rel = (s - exact).abs() / (1.0 + exact.abs());
                assert!(rel < 1e-7, "{d}: k={k}: nodes {s} vs exact {exact}");
            }
        }
    }

    #[test]
    fn parse_round_trips_the_spec_grammar() {
        assert_eq!(D::parse("dirac:lambda=5").unwrap(), D::dirac(5.0).unwrap());
        assert_eq!(D::parse("pareto:tau=5").unwrap(), D::pareto(5.0, 1.0).unwrap());
        assert_eq!(
            D::parse("uniform:a=1,b=2").unwrap(),
            D::uniform(1.0, 2.0).unwrap()
        );
        assert_eq!(
            D::parse("twoatom:x1=1,x2=5,c1=0.98158584").unwrap(),
            D::two_atom(1.0, 5.0, 0.98158584).unwrap()
        );
        assert_eq!(
            D::parse("gamma:k=2,theta=1").unwrap(),
            D::gamma(2.0, 1.0).unwrap()
        );
        assert_eq!(
            D::parse("lognormal:mu=0,sigma=1").unwrap(),
            D::log_normal(0.0, 1.0).unwrap()
        );
        assert_eq!(
            D::parse("rayleigh:sigma=1").unwrap(),
            D::rayleigh(1.0).unwrap()
        );
    }

    #[test]
    fn parse_errors_name_the_offending_key() {
        let err = D::parse("pareto:tau=abc").unwrap_err();
        assert!(err.to_string().contains("'tau'"), "{err}");
        let err = D::parse("uniform:a=1").unwrap_err();
        assert!(err.to_string().contains("'b'"), "{err}");
        let err = D::parse("dirac:lambda=5,extra=1").unwrap_err();
        assert!(err.to_string().contains("'extra'"), "{err}");
        let err = D::parse("gauss:mu=0").unwrap_err();
        assert!(err.to_string().contains("gauss"), "{err}");
        let err = D::parse("pareto:tau=1.5").unwrap_err();
        assert!(err.to_string().contains("'tau'"), "{err}");
        let err = D::parse("dirac:lambda=5,lambda=6").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // expect is linear: E[g1 + c g2] = E[g1] + c E[g2]
        #[test]
        fn expectation_is_linear(
            c in -3.0f64..3.0,
            a0 in -1.0f64..1.0,
            a1 in -1.0f64..1.0,
            a2 in -1.0f64..1.0,
            b0 in -1.0f64..1.0,
            b1 in -1.0f64..1.0,
        ) {
            for d in [D::pareto(6.0, 1.0).unwrap(), D::gamma(2.0, 0.5).unwrap(), D::uniform(0.5, 2.0).unwrap()] {
                let g1 = move |w: f64| a0 + a1 * w + a2 * w * w;
                let g2 = move |w: f64| b0 + b1 * w;
                let lhs = d.expect(move |w| g1(w) + c * g2(w), 1e-11).unwrap();
                let rhs = d.expect(g1, 1e-11).unwrap() + c * d.expect(g2, 1e-11).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()), "{d}: {lhs} vs {rhs}");
            }
        }

        // E_{cW}[g(w)] = E_W[g(c w)]
        #[test]
        fn scaling_the_law_matches_scaling_the_argument(c in 0.3f64..3.0) {
            for d in [
                D::pareto(5.0, 1.0).unwrap(),
                D::uniform(1.0, 2.0).unwrap(),
                D::gamma(1.5, 1.0).unwrap(),
                D::log_normal(0.1, 0.6).unwrap(),
                D::rayleigh(0.8).unwrap(),
                D::two_atom(1.0, 2.0, 0.4).unwrap(),
            ] {
                let scaled = d.scale_by(c).unwrap();
                let g = |w: f64| w / (1.0 + w * w);
                let lhs = scaled.expect(g, 1e-11).unwrap();
                let rhs = d.expect(move |w| g(c * w), 1e-11).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()), "{d} at c={c}: {lhs} vs {rhs}");
            }
        }
    }
}
