//! Model data: admissible labels, per-pixel features and data weights,
//! pairwise couplings, and exact evaluation of the two Gibbs energies.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact weight and energy type.
pub type Rational = Ratio<i64>;

/// Ordered admissible labels `m(0) < m(1) < ... < m(k)` inside the feature
/// range `[0, L]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    levels: Vec<i64>,
    max_feature: i64,
}

impl LabelSet {
    pub fn new(levels: Vec<i64>, max_feature: i64) -> Result<Self> {
        let set = LabelSet { levels, max_feature };
        set.check()?;
        Ok(set)
    }

    /// `k + 1` labels spread evenly over `[0, L]`, `m(j) = round(j * L / k)`.
    pub fn uniform(k: usize, max_feature: i64) -> Result<Self> {
        if k == 0 {
            return LabelSet::new(vec![0], max_feature);
        }
        if (k as i64) > max_feature {
            return Err(Error::InvalidArgument(format!(
                "cannot place {} distinct labels in [0, {max_feature}]",
                k + 1
            )));
        }
        let k = k as i64;
        let levels = (0..=k)
            .map(|j| (2 * j * max_feature + k) / (2 * k))
            .collect();
        LabelSet::new(levels, max_feature)
    }

    fn check(&self) -> Result<()> {
        let first = *self.levels.first().ok_or(Error::EmptyLabels)?;
        for (index, w) in self.levels.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::LabelsNotIncreasing { index: index + 1, prev: w[0], next: w[1] });
            }
        }
        let last = *self.levels.last().unwrap();
        for label in [first, last] {
            if label < 0 || label > self.max_feature {
                return Err(Error::LabelOutOfRange { label, max: self.max_feature });
            }
        }
        Ok(())
    }

    /// Number of thresholds; there are `k + 1` clusters.
    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// The feature-range maximum `L`.
    pub fn max_feature(&self) -> i64 {
        self.max_feature
    }

    pub fn label(&self, j: usize) -> i64 {
        self.levels[j]
    }

    pub fn first(&self) -> i64 {
        self.levels[0]
    }

    pub fn last(&self) -> i64 {
        self.levels[self.levels.len() - 1]
    }

    /// Gap `a_l = m(l) - m(l-1)` for `l` in `1..=k`.
    pub fn gap(&self, l: usize) -> i64 {
        self.levels[l] - self.levels[l - 1]
    }

    /// `m(k) - m(0)`.
    pub fn span(&self) -> i64 {
        self.last() - self.first()
    }

    pub fn contains(&self, value: i64) -> bool {
        self.levels.binary_search(&value).is_ok()
    }
}

/// Per-pixel integer features `f_i` in `[0, L]` and data weights `λ_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureField {
    features: Vec<i64>,
    lambda: Vec<Rational>,
}

impl FeatureField {
    pub fn new(features: Vec<i64>, lambda: Vec<Rational>) -> Result<Self> {
        let field = FeatureField { features, lambda };
        field.check_shape()?;
        Ok(field)
    }

    pub fn with_integer_weights(features: Vec<i64>, lambda: &[i64]) -> Result<Self> {
        FeatureField::new(features, lambda.iter().map(|&w| Rational::from(w)).collect())
    }

    /// Every pixel gets the same data weight.
    pub fn uniform(features: Vec<i64>, lambda: Rational) -> Result<Self> {
        let n = features.len();
        FeatureField::new(features, vec![lambda; n])
    }

    fn check_shape(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::EmptyField);
        }
        if self.lambda.len() != self.features.len() {
            return Err(Error::LengthMismatch {
                what: "lambda",
                got: self.lambda.len(),
                expected: self.features.len(),
            });
        }
        if let Some(index) = self.lambda.iter().position(|w| w.is_negative()) {
            return Err(Error::NegativeWeight { what: "data", index });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[i64] {
        &self.features
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }
}

/// Directed couplings `β_{i,j}`. Parallel arcs are merged by summing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet {
    arcs: BTreeMap<(usize, usize), Rational>,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    pub fn from_arcs<I>(arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut set = EdgeSet::new();
        for (i, j, beta) in arcs {
            set.add(i, j, beta);
        }
        set
    }

    pub fn from_integer_arcs<I>(arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        EdgeSet::from_arcs(arcs.into_iter().map(|(i, j, b)| (i, j, Rational::from(b))))
    }

    pub fn add(&mut self, from: usize, to: usize, beta: Rational) {
        *self.arcs.entry((from, to)).or_insert_with(Rational::zero) += beta;
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn get(&self, from: usize, to: usize) -> Rational {
        self.arcs.get(&(from, to)).copied().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        self.arcs.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    /// Symmetrized couplings `β_{i,j} + β_{j,i}` keyed by `i < j`; zero
    /// pairs are dropped.
    pub fn undirected(&self) -> BTreeMap<(usize, usize), Rational> {
        let mut pairs: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (&(i, j), &b) in &self.arcs {
            let key = if i < j { (i, j) } else { (j, i) };
            *pairs.entry(key).or_insert_with(Rational::zero) += b;
        }
        pairs.retain(|_, w| !w.is_zero());
        pairs
    }
}

/// A label per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling(Vec<i64>);

impl Labeling {
    pub fn new(values: Vec<i64>) -> Self {
        Labeling(values)
    }

    pub fn constant(value: i64, n: usize) -> Self {
        Labeling(vec![value; n])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for Labeling {
    fn from(values: Vec<i64>) -> Self {
        Labeling(values)
    }
}

/// Checks every joint invariant of a model instance.
pub fn validate_instance(field: &FeatureField, labels: &LabelSet, edges: &EdgeSet) -> Result<()> {
    labels.check()?;
    field.check_shape()?;
    let max = labels.max_feature();
    for (pixel, &value) in field.features().iter().enumerate() {
        if value < 0 || value > max {
            return Err(Error::FeatureOutOfRange { pixel, value, max });
        }
    }
    let n = field.len();
    for (index, (i, j, beta)) in edges.iter().enumerate() {
        if i >= n || j >= n {
            return Err(Error::ArcOutOfRange { from: i, to: j, n });
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        if beta.is_negative() {
            return Err(Error::NegativeWeight { what: "coupling", index });
        }
    }
    Ok(())
}

/// Multiplies every data weight and coupling by the least common
/// denominator `D` so all weights become integers. Returns `D` as the scale.
pub fn rescale_to_integers(field: &FeatureField, edges: &EdgeSet) -> Result<(FeatureField, EdgeSet, i64)> {
    let mut scale: i64 = 1;
    for w in field.lambda().iter().chain(edges.arcs.values()) {
        scale = checked_lcm(scale, *w.denom())?;
    }
    let lift = |w: &Rational| -> Result<Rational> {
        let factor = scale / w.denom();
        w.numer()
            .checked_mul(factor)
            .map(Rational::from)
            .ok_or(Error::Overflow("rescaling weights"))
    };
    let lambda = field.lambda().iter().map(lift).collect::<Result<Vec<_>>>()?;
    let mut arcs = BTreeMap::new();
    for (&key, w) in &edges.arcs {
        arcs.insert(key, lift(w)?);
    }
    Ok((
        FeatureField { features: field.features.clone(), lambda },
        EdgeSet { arcs },
        scale,
    ))
}

fn checked_lcm(a: i64, b: i64) -> Result<i64> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or(Error::Overflow("computing a common denominator"))
}

/// Integer-scaled weights shared by the network builders and the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledWeights {
    /// `λ_i * D`.
    pub lambda: Vec<i64>,
    /// `(β_{i,j} + β_{j,i}) * D` for `i < j`, nonzero only.
    pub pairs: Vec<(usize, usize, i64)>,
    /// Common denominator `D`.
    pub scale: i64,
}

/// A validated model instance together with its integer-scaled weights.
#[derive(Debug, Clone)]
pub struct Instance {
    field: FeatureField,
    labels: LabelSet,
    edges: EdgeSet,
    scaled: ScaledWeights,
}

impl Instance {
    pub fn new(field: FeatureField, labels: LabelSet, edges: EdgeSet) -> Result<Self> {
        validate_instance(&field, &labels, &edges)?;
        let (int_field, int_edges, scale) = rescale_to_integers(&field, &edges)?;
        let lambda = int_field.lambda().iter().map(|w| w.to_integer()).collect();
        let pairs = int_edges
            .undirected()
            .into_iter()
            .map(|((i, j), w)| (i, j, w.to_integer()))
            .collect();
        Ok(Instance { field, labels, edges, scaled: ScaledWeights { lambda, pairs, scale } })
    }

    pub fn field(&self) -> &FeatureField {
        &self.field
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn scaled(&self) -> &ScaledWeights {
        &self.scaled
    }

    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    /// Same features, labels and graph with all weights multiplied by `factor`.
    pub fn with_weights_scaled(&self, factor: Rational) -> Result<Instance> {
        let lambda = self.field.lambda().iter().map(|w| *w * factor).collect();
        let field = FeatureField::new(self.field.features().to_vec(), lambda)?;
        let edges = EdgeSet::from_arcs(self.edges.iter().map(|(i, j, b)| (i, j, b * factor)));
        Instance::new(field, self.labels.clone(), edges)
    }

    fn check_labeling(&self, labeling: &Labeling) -> Result<()> {
        if labeling.len() != self.len() {
            return Err(Error::LengthMismatch { what: "labeling", got: labeling.len(), expected: self.len() });
        }
        for (pixel, &value) in labeling.values().iter().enumerate() {
            if !self.labels.contains(value) {
                return Err(Error::NotALabel { pixel, value });
            }
        }
        Ok(())
    }
}

pub(crate) fn scaled_to_rational(total: i128, scale: i64) -> Result<Rational> {
    let g = total.gcd(&(scale as i128));
    let num = i64::try_from(total / g).map_err(|_| Error::Overflow("reducing an energy"))?;
    Ok(Rational::new(num, scale / g as i64))
}

fn energy_with(inst: &Instance, labeling: &Labeling, cost: impl Fn(i64) -> i128) -> Result<Rational> {
    inst.check_labeling(labeling)?;
    let w = inst.scaled();
    let m = labeling.values();
    let mut total: i128 = 0;
    for (i, &f) in inst.field().features().iter().enumerate() {
        total += w.lambda[i] as i128 * cost(f - m[i]);
    }
    for &(i, j, b) in &w.pairs {
        total += b as i128 * cost(m[i] - m[j]);
    }
    scaled_to_rational(total, w.scale)
}

/// `U1(m) = Σ_i λ_i |f_i - m_i| + Σ_{(i,j)} β_{i,j} |m_i - m_j|`.
pub fn energy_u1(inst: &Instance, labeling: &Labeling) -> Result<Rational> {
    energy_with(inst, labeling, |d| (d as i128).abs())
}

/// `U2(m) = Σ_i λ_i (f_i - m_i)^2 + Σ_{(i,j)} β_{i,j} (m_i - m_j)^2`.
pub fn energy_u2(inst: &Instance, labeling: &Labeling) -> Result<Rational> {
    energy_with(inst, labeling, |d| (d as i128) * (d as i128))
}
