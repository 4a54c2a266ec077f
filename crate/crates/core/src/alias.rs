//! Constant-time weighted sampling with the alias method, plus a
//! cumulative-sum sampler with logarithmic draws kept as a reference.

use rand::Rng;

use crate::error::{Error, Result};

/// `n` equal-size binary cells over `n` weighted items. Cell `i` yields item
/// `i` with probability `prob[i]` and item `alias[i]` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTable {
    /// Builds a table over strictly positive, finite weights.
    pub fn new(weights: &[f64]) -> Result<Self> {
        check_weights(weights, false)?;
        Ok(Self::build_unchecked(weights))
    }

    /// Like [`AliasTable::new`], but zero weights are allowed and such items
    /// are never drawn. At least one weight must be positive.
    pub fn from_nonnegative(weights: &[f64]) -> Result<Self> {
        check_weights(weights, true)?;
        Ok(Self::build_unchecked(weights))
    }

    fn build_unchecked(weights: &[f64]) -> Self {
        let mut prob = vec![0.0; weights.len()];
        let mut alias = vec![0; weights.len()];
        build_into(weights, &mut prob, &mut alias);
        AliasTable { prob, alias }
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.prob
    }

    pub fn aliases(&self) -> &[u32] {
        &self.alias
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        pick(&self.prob, &self.alias, rng.random::<f64>())
    }

    /// Maps one uniform variate in `[0, 1)` to an item.
    #[inline]
    pub fn pick(&self, u: f64) -> usize {
        pick(&self.prob, &self.alias, u)
    }

    /// Per-item probability implied by the cells.
    pub fn reconstructed_probabilities(&self) -> Vec<f64> {
        reconstruct(&self.prob, &self.alias)
    }
}

pub(crate) fn check_weights(weights: &[f64], allow_zero: bool) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no weights".into()));
    }
    if weights.len() > u32::MAX as usize {
        return Err(Error::InvalidWeights("too many items".into()));
    }
    for (i, &w) in weights.iter().enumerate() {
        let ok = w.is_finite() && (w > 0.0 || (allow_zero && w == 0.0));
        if !ok {
            return Err(Error::InvalidWeights(format!("weight {i} is {w}")));
        }
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(Error::InvalidWeights("all weights are zero".into()));
    }
    Ok(())
}

/// Vose's two-worklist construction. Items whose scaled weight is at most
/// the mean go to the small list; both lists are consumed in ascending index
/// order. Weights must be non-negative with a positive sum.
pub(crate) fn build_into(weights: &[f64], prob: &mut [f64], alias: &mut [u32]) {
    let n = weights.len();
    debug_assert_eq!(prob.len(), n);
    debug_assert_eq!(alias.len(), n);
    let total: f64 = weights.iter().sum();
    let scale = n as f64 / total;

    let mut scaled: Vec<f64> = weights.iter().map(|&w| w * scale).collect();
    let mut small: Vec<u32> = Vec::with_capacity(n);
    let mut large: Vec<u32> = Vec::with_capacity(n);
    for (i, &s) in scaled.iter().enumerate() {
        if s <= 1.0 {
            small.push(i as u32);
        } else {
            large.push(i as u32);
        }
    }

    let (mut si, mut li) = (0, 0);
    while si < small.len() && li < large.len() {
        let lo = small[si] as usize;
        let hi = large[li];
        si += 1;
        prob[lo] = scaled[lo];
        alias[lo] = hi;
        let rest = (scaled[hi as usize] + scaled[lo]) - 1.0;
        scaled[hi as usize] = rest;
        if rest <= 1.0 {
            small.push(hi);
            li += 1;
        }
    }

    // Leftovers are 1 up to rounding. Zero-weight items must stay undrawable.
    let fallback = weights.iter().position(|&w| w > 0.0).unwrap_or(0) as u32;
    for &i in large[li..].iter().chain(&small[si..]) {
        let i = i as usize;
        if weights[i] > 0.0 {
            prob[i] = 1.0;
            alias[i] = i as u32;
        } else {
            prob[i] = 0.0;
            alias[i] = fallback;
        }
    }
}

#[inline]
pub(crate) fn pick(prob: &[f64], alias: &[u32], u: f64) -> usize {
    let n = prob.len();
    let x = u * n as f64;
    let cell = (x as usize).min(n - 1);
    let coin = x - cell as f64;
    if coin < prob[cell] {
        cell
    } else {
        alias[cell] as usize
    }
}

pub(crate) fn reconstruct(prob: &[f64], alias: &[u32]) -> Vec<f64> {
    let n = prob.len();
    let mut mass = prob.to_vec();
    for (p, &a) in prob.iter().zip(alias) {
        mass[a as usize] += 1.0 - p;
    }
    mass.iter_mut().for_each(|m| *m /= n as f64);
    mass
}

/// Inverse-CDF sampler: binary search over cumulative weights.
#[derive(Debug, Clone)]
pub struct CdfSampler {
    cumulative: Vec<f64>,
}

impl CdfSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        check_weights(weights, false)?;
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(CdfSampler { cumulative })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Item whose cumulative range contains `x`, for `x` in `[0, total]`.
    /// Item `i` owns `(cum[i-1], cum[i]]`, item 0 owns `[0, cum[0]]`.
    pub fn lookup(&self, x: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c < x)
            .min(self.cumulative.len() - 1)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.lookup(rng.random::<f64>() * self.total())
    }
}
