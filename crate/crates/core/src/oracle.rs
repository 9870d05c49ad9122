//! Exact finite-n annealed partition functions by full enumeration.
//!
//! For an explicit weight vector the annealed partition function is a sum of
//! `q^n` terms, each a product over vertex pairs. Writing
//! `beta_ij = log(1 + (e^beta - 1) p_ij)` with edge probability
//! `p_ij = w_i w_j / (l_n + w_i w_j)` turns each product into the exponential
//! of a sum, so a mixed-radix walk over configurations can carry the pair
//! energy incrementally: one spin change costs `O(n)` instead of re-scoring
//! all pairs. Accumulation is a streaming log-sum-exp with a running maximum
//! and compensated sums.
//!
//! The direct per-pair product form survives as [`OracleInstance::log_partition_direct`];
//! it is algebraically identical and exists to cross-check the fast path.
//! The self-loop factor from the complete-graph rewriting is deliberately
//! not part of either form.

use crate::error::{Error, Result};
use crate::real::{KahanSum, Real};

/// Ceiling on `q^n` before an enumeration is refused.
pub const DEFAULT_CONFIG_BUDGET: u128 = 50_000_000;

/// An explicit finite instance: weights, colors, temperature, and a field on
/// color 1.
#[derive(Clone, Debug)]
pub struct OracleInstance<R: Real> {
    weights: Vec<R>,
    q: u32,
    beta: R,
    field: R,
    budget: u128,
}

impl<R: Real> OracleInstance<R> {
    /// `beta >= 0` (zero makes every spin independent) and `B >= 0`; the
    /// oracle accepts `q = 2` since it is exact.
    pub fn new(weights: Vec<R>, q: u32, beta: R, field: R) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter(
                "weight vector must be nonempty".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > R::zero())) {
            return Err(Error::InvalidParameter(format!(
                "weights must be finite positive reals, got {w}"
            )));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "q must be at least 2, got {q}"
            )));
        }
        if !(beta.is_finite() && beta >= R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be a finite nonnegative real, got {beta}"
            )));
        }
        if !(field.is_finite() && field >= R::zero()) {
            return Err(Error::InvalidParameter(format!(
                "field B must be a finite nonnegative real, got {field}"
            )));
        }
        let inst = Self {
            weights,
            q,
            beta,
            field,
            budget: DEFAULT_CONFIG_BUDGET,
        };
        inst.check_budget()?;
        Ok(inst)
    }

    /// Overrides the configuration budget.
    pub fn with_budget(mut self, budget: u128) -> Result<Self> {
        self.budget = budget;
        self.check_budget()?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `q^n`, the number of configurations an enumeration visits.
    pub fn configs(&self) -> Option<u128> {
        (self.q as u128).checked_pow(self.weights.len() as u32)
    }

    fn check_budget(&self) -> Result<()> {
        match self.configs() {
            Some(c) if c <= self.budget => Ok(()),
            got => Err(Error::BudgetExceeded(format!(
                "q^n = {} exceeds the enumeration budget {}",
                got.map_or_else(|| "overflow".to_string(), |c| c.to_string()),
                self.budget
            ))),
        }
    }

    /// `beta_ij` coupling matrix (zero diagonal).
    fn couplings(&self) -> Vec<Vec<R>> {
        let n = self.n();
        let bp = self.beta.exp_m1();
        let total: R = self
            .weights
            .iter()
            .fold(R::zero(), |acc, &w| acc + w);
        let mut m = vec![vec![R::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                if i != j {
                    let prod = self.weights[i] * self.weights[j];
                    *entry = (bp * prod / (total + prod)).ln_1p();
                }
            }
        }
        m
    }

    /// `log E[Z_n]` by the incremental `beta_ij` walk.
    pub fn log_partition(&self) -> Result<R> {
        Ok(self.enumerate()?.0)
    }

    /// `phi_n = log E[Z_n] / n`.
    pub fn finite_pressure(&self) -> Result<R> {
        Ok(self.enumerate()?.0 / R::of_usize(self.n()))
    }

    /// Annealed expectation of the color-1 fraction `X_1`.
    pub fn annealed_mean_x1(&self) -> Result<R> {
        Ok(self.enumerate()?.1)
    }

    fn enumerate(&self) -> Result<(R, R)> {
        self.check_budget()?;
        let n = self.n();
        let q = self.q as usize;
        let beta_ij = self.couplings();

        let mut sigma = vec![0usize; n];
        // aligned[i][k] = sum over j != i of beta_ij * 1{sigma_j = k}
        let mut aligned = vec![vec![R::zero(); q]; n];
        let mut pair_energy = R::zero();
        for (i, row) in beta_ij.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if i != j {
                    aligned[i][0] += b;
                    if i < j {
                        pair_energy += b;
                    }
                }
            }
        }
        let mut color1 = n;

        let mut lse = StreamingLse::<R>::new();
        let inv_n = R::of_usize(n).recip();
        loop {
            let energy = pair_energy + self.field * R::of_usize(color1);
            lse.add(energy, R::of_usize(color1) * inv_n);

            // mixed-radix increment; each spin change updates energies in O(n)
            let mut pos = 0;
            while pos < n && sigma[pos] == q - 1 {
                Self::flip(
                    &beta_ij,
                    &mut aligned,
                    &mut sigma,
                    &mut pair_energy,
                    &mut color1,
                    pos,
                    0,
                );
                pos += 1;
            }
            if pos == n {
                break;
            }
            let next = sigma[pos] + 1;
            Self::flip(
                &beta_ij,
                &mut aligned,
                &mut sigma,
                &mut pair_energy,
                &mut color1,
                pos,
                next,
            );
        }
        Ok(lse.finish())
    }

    #[allow(clippy::too_many_arguments)]
    fn flip(
        beta_ij: &[Vec<R>],
        aligned: &mut [Vec<R>],
        sigma: &mut [usize],
        pair_energy: &mut R,
        color1: &mut usize,
        i: usize,
        to: usize,
    ) {
        let from = sigma[i];
        sigma[i] = to;
        *pair_energy += aligned[i][to] - aligned[i][from];
        for j in 0..sigma.len() {
            if j != i {
                let b = beta_ij[i][j];
                aligned[j][from] -= b;
                aligned[j][to] += b;
            }
        }
        if from == 0 {
            *color1 -= 1;
        }
        if to == 0 {
            *color1 += 1;
        }
    }

    /// `log E[Z_n]` by the direct per-pair product form
    /// `prod (e^(beta 1{si=sj}) p_ij + 1 - p_ij)`, re-scored from scratch for
    /// every configuration. Slow; kept as the cross-check of the fast path.
    pub fn log_partition_direct(&self) -> Result<R> {
        self.check_budget()?;
        let n = self.n();
        let q = self.q as usize;
        let bp = self.beta.exp_m1();
        let total: R = self
            .weights
            .iter()
            .fold(R::zero(), |acc, &w| acc + w);

        let mut sigma = vec![0usize; n];
        let mut lse = StreamingLse::<R>::new();
        let inv_n = R::of_usize(n).recip();
        loop {
            let mut energy = R::zero();
            let mut color1 = 0usize;
            for i in 0..n {
                if sigma[i] == 0 {
                    color1 += 1;
                }
                for j in (i + 1)..n {
                    let prod = self.weights[i] * self.weights[j];
                    let p = prod / (total + prod);
                    if sigma[i] == sigma[j] {
                        energy += (bp * p).ln_1p();
                    }
                }
            }
            energy += self.field * R::of_usize(color1);
            lse.add(energy, R::of_usize(color1) * inv_n);

            let mut pos = 0;
            while pos < n && sigma[pos] == q - 1 {
                sigma[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
            sigma[pos] += 1;
        }
        Ok(lse.finish().0)
    }
}

/// Log-sum-exp over a stream, with a weighted companion sum (here: `X_1`).
struct StreamingLse<R: Real> {
    max: R,
    acc: KahanSum<R>,
    acc_weighted: KahanSum<R>,
}

impl<R: Real> StreamingLse<R> {
    fn new() -> Self {
        Self {
            max: R::neg_infinity(),
            acc: KahanSum::default(),
            acc_weighted: KahanSum::default(),
        }
    }

    fn add(&mut self, energy: R, weight: R) {
        if energy > self.max {
            let scale = if self.max == R::neg_infinity() {
                R::zero()
            } else {
                (self.max - energy).exp()
            };
            self.acc.scale(scale);
            self.acc_weighted.scale(scale);
            self.max = energy;
        }
        let e = (energy - self.max).exp();
        self.acc.add(e);
        self.acc_weighted.add(weight * e);
    }

    /// `(log sum, weighted mean)`.
    fn finish(self) -> (R, R) {
        let total = self.acc.value();
        (self.max + total.ln(), self.acc_weighted.value() / total)
    }
}
