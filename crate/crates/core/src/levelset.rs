//! Threshold decomposition of labels and features into nested Boolean
//! indicators, and the per-level Boolean energies `u(l, b)`.
//!
//! A label `μ ∈ M` is written as `m(0) + Σ_l a_l x(l)` with
//! `x(l) = 1[μ >= m(l)]`, a non-increasing Boolean sequence. Applying the
//! same split to `|f_i - m_i|` turns `U1` into a weighted sum of independent
//! Boolean problems, one per level, plus a term that depends only on `f`.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::model::{scaled_to_rational, Instance, LabelSet, Labeling, Rational};

/// A 0/1 value per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BooleanField(Vec<bool>);

impl BooleanField {
    pub fn new(bits: Vec<bool>) -> Self {
        BooleanField(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BooleanField(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BooleanField(vec![true; n])
    }

    /// Decodes the low `n` bits of `mask`, pixel `i` from bit `i`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        BooleanField((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Coordinatewise minimum.
    pub fn meet(&self, other: &BooleanField) -> BooleanField {
        BooleanField(self.0.iter().zip(&other.0).map(|(&a, &b)| a && b).collect())
    }

    /// Coordinatewise maximum.
    pub fn join(&self, other: &BooleanField) -> BooleanField {
        BooleanField(self.0.iter().zip(&other.0).map(|(&a, &b)| a || b).collect())
    }

    /// `self >= other` in every coordinate.
    pub fn dominates(&self, other: &BooleanField) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a >= b)
    }
}

impl Index<usize> for BooleanField {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.0[i]
    }
}

/// The level vector `z(l)`: `z_i(l) = numerators[i] / gap`, where the
/// numerator counts the thresholds `τ ∈ (m(l-1), m(l)]` that `f_i` reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelVector {
    level: usize,
    numerators: Vec<i64>,
    gap: i64,
}

impl LevelVector {
    /// Level index in `1..=k`.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Denominator `a_l`.
    pub fn gap(&self) -> i64 {
        self.gap
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn value(&self, i: usize) -> Rational {
        Rational::new(self.numerators[i], self.gap)
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }
}

/// `(f(1), ..., f(L))` with `f(τ) = 1` iff `value >= τ`.
pub fn threshold_decompose(value: i64, max: i64) -> Result<Vec<bool>> {
    if value < 0 || value > max {
        return Err(Error::ValueOutOfRange { value, max });
    }
    Ok((1..=max).map(|tau| value >= tau).collect())
}

/// Level indicators `x(l) = 1[μ >= m(l)]` for `l = 1..=k`.
pub fn level_indicators(labels: &LabelSet, mu: i64) -> Vec<bool> {
    labels.levels()[1..].iter().map(|&m| mu >= m).collect()
}

/// `m(0) + Σ_l a_l x(l)` for a non-increasing Boolean sequence `x`.
pub fn compose_label(labels: &LabelSet, x: &[bool]) -> Result<i64> {
    if x.len() != labels.k() {
        return Err(Error::LengthMismatch { what: "level indicators", got: x.len(), expected: labels.k() });
    }
    if let Some(pos) = x.windows(2).position(|w| !w[0] && w[1]) {
        return Err(Error::NonMonotone { level: pos + 2 });
    }
    Ok(labels.first() + (1..=labels.k()).filter(|&l| x[l - 1]).map(|l| labels.gap(l)).sum::<i64>())
}

/// Composes a labeling from per-level Boolean fields.
pub fn compose_labeling(labels: &LabelSet, levels: &[BooleanField], n: usize) -> Result<Labeling> {
    let mut values = Vec::with_capacity(n);
    let mut column = vec![false; levels.len()];
    for i in 0..n {
        for (slot, field) in column.iter_mut().zip(levels) {
            *slot = field[i];
        }
        values.push(compose_label(labels, &column)?);
    }
    Ok(Labeling::new(values))
}

/// Splits a labeling into its `k` level fields `x(l)`.
pub fn decompose_labeling(labels: &LabelSet, labeling: &Labeling) -> Vec<BooleanField> {
    (1..=labels.k())
        .map(|l| {
            let m = labels.label(l);
            BooleanField::new(labeling.values().iter().map(|&v| v >= m).collect())
        })
        .collect()
}

/// The `k` level vectors `z(1) >= ... >= z(k)`.
pub fn z_vectors(features: &[i64], labels: &LabelSet) -> Vec<LevelVector> {
    (1..=labels.k())
        .map(|l| {
            let lower = labels.label(l - 1);
            let gap = labels.gap(l);
            LevelVector {
                level: l,
                numerators: features.iter().map(|&f| (f - lower).clamp(0, gap)).collect(),
                gap,
            }
        })
        .collect()
}

/// Both sides of the decomposition
/// `|ν - f| = |m(0) - Σ_{τ<=m(0)} f(τ)| + Σ_l |a_l 1[ν>=m(l)] - Σ_{τ∈(m(l-1),m(l)]} f(τ)| + Σ_{τ>m(k)} f(τ)`,
/// evaluated literally from the threshold bits of `f`.
pub fn abs_identity_check(nu: i64, f: i64, labels: &LabelSet) -> Result<(i64, i64)> {
    if !labels.contains(nu) {
        return Err(Error::NotALabel { pixel: 0, value: nu });
    }
    let bits = threshold_decompose(f, labels.max_feature())?;
    // bits[τ - 1] = f(τ)
    let sum_range = |lo: i64, hi: i64| -> i64 { (lo..=hi).filter(|&t| bits[(t - 1) as usize]).count() as i64 };
    let mut rhs = (labels.first() - sum_range(1, labels.first())).abs();
    for (l, x) in level_indicators(labels, nu).into_iter().enumerate() {
        let l = l + 1;
        let block = sum_range(labels.label(l - 1) + 1, labels.label(l));
        rhs += (labels.gap(l) * x as i64 - block).abs();
    }
    rhs += sum_range(labels.last() + 1, labels.max_feature());
    Ok(((nu - f).abs(), rhs))
}

/// The `f`-only part of `U1` that the level energies leave out:
/// `Σ_i λ_i (|m(0) - min(f_i, m(0))| + max(f_i - m(k), 0))`.
pub fn boundary_offset(inst: &Instance) -> Result<Rational> {
    let labels = inst.labels();
    let w = inst.scaled();
    let total: i128 = inst
        .field()
        .features()
        .iter()
        .zip(&w.lambda)
        .map(|(&f, &lam)| {
            let below = labels.first() - f.min(labels.first());
            let above = (f - labels.last()).max(0);
            lam as i128 * (below + above) as i128
        })
        .sum();
    scaled_to_rational(total, w.scale)
}

/// `u(l, b) = Σ_i λ_i |z_i(l) - b_i| + Σ_{(i,j)} β_{i,j} |b_i - b_j|`.
pub fn u_level(inst: &Instance, z: &LevelVector, b: &BooleanField) -> Result<Rational> {
    if b.len() != inst.len() || z.len() != inst.len() {
        return Err(Error::LengthMismatch { what: "level field", got: b.len(), expected: inst.len() });
    }
    let w = inst.scaled();
    let gap = z.gap() as i128;
    // everything multiplied by a_l * D
    let mut total: i128 = 0;
    for (i, &num) in z.numerators().iter().enumerate() {
        let target = if b[i] { gap } else { 0 };
        total += w.lambda[i] as i128 * (num as i128 - target).abs();
    }
    for &(i, j, beta) in &w.pairs {
        if b[i] != b[j] {
            total += beta as i128 * gap;
        }
    }
    let denom = (z.gap())
        .checked_mul(w.scale)
        .ok_or(Error::Overflow("scaling a level energy"))?;
    scaled_to_rational(total, denom)
}

/// `Σ_l a_l u(l, x(l))` for the level fields of `labeling`.
pub fn level_energy_sum(inst: &Instance, labeling: &Labeling) -> Result<Rational> {
    let labels = inst.labels();
    let zs = z_vectors(inst.field().features(), labels);
    let mut sum = Rational::from(0);
    for (z, x) in zs.iter().zip(decompose_labeling(labels, labeling)) {
        sum += u_level(inst, z, &x)? * z.gap();
    }
    Ok(sum)
}
