//! Brute-force ground truth for small instances.
//!
//! Nothing here goes through a network or a cut: every energy is evaluated
//! from its definition over the full state space. Enumeration refuses to run
//! past a configured state cap rather than truncate.

use rand::Rng;

use crate::error::{Error, Result};
use crate::imageio::{grid_edges, Connectivity, GridDims};
use crate::levelset::{u_level, BooleanField, LevelVector};
use crate::model::{scaled_to_rational, FeatureField, Instance, LabelSet, Labeling, Rational};
use crate::netbuild::{gauss_constant, p_polynomial, q_polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_states: u128,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_states: 1 << 20 }
    }
}

impl OracleConfig {
    fn admit(&self, base: u128, exponent: usize) -> Result<()> {
        let states = (0..exponent).try_fold(1u128, |acc, _| acc.checked_mul(base)).unwrap_or(u128::MAX);
        if states > self.max_states {
            return Err(Error::StateSpaceTooLarge { states, cap: self.max_states });
        }
        Ok(())
    }
}

/// Exact minimum and the complete set of minimizers.
#[derive(Debug, Clone)]
pub struct BruteMinimum {
    pub energy: Rational,
    pub minimizers: Vec<Labeling>,
}

impl BruteMinimum {
    /// Coordinatewise minimum of all minimizers.
    pub fn lowest(&self) -> Labeling {
        let n = self.minimizers[0].len();
        Labeling::new(
            (0..n)
                .map(|i| self.minimizers.iter().map(|m| m.values()[i]).min().unwrap())
                .collect(),
        )
    }
}

fn brute_min(inst: &Instance, cfg: &OracleConfig, cost: fn(i64) -> i128) -> Result<BruteMinimum> {
    let labels = inst.labels().levels();
    let n = inst.len();
    cfg.admit(labels.len() as u128, n)?;
    let w = inst.scaled();
    let f = inst.field().features();
    let unary: Vec<Vec<i128>> = (0..n)
        .map(|i| labels.iter().map(|&m| w.lambda[i] as i128 * cost(f[i] - m)).collect())
        .collect();
    let mut neighbors: Vec<Vec<(usize, i128)>> = vec![Vec::new(); n];
    for &(i, j, b) in &w.pairs {
        neighbors[i].push((j, b as i128));
        neighbors[j].push((i, b as i128));
    }

    let mut idx = vec![0usize; n];
    let value = |idx: &[usize], i: usize| labels[idx[i]];
    let mut current: i128 = (0..n).map(|i| unary[i][0]).sum();
    let mut best = current;
    let mut argmin = vec![idx.clone()];
    loop {
        // odometer step: advance the lowest pixel that can move
        let mut p = 0;
        while p < n && idx[p] + 1 == labels.len() {
            p += 1;
        }
        if p == n {
            break;
        }
        for q in 0..=p {
            let old = idx[q];
            let new = if q == p { old + 1 } else { 0 };
            if old == new {
                continue;
            }
            let mut delta = unary[q][new] - unary[q][old];
            for &(r, b) in &neighbors[q] {
                let mr = value(&idx, r);
                delta += b * (cost(labels[new] - mr) - cost(labels[old] - mr));
            }
            idx[q] = new;
            current += delta;
        }
        if current < best {
            best = current;
            argmin.clear();
            argmin.push(idx.clone());
        } else if current == best {
            argmin.push(idx.clone());
        }
    }
    Ok(BruteMinimum {
        energy: scaled_to_rational(best, w.scale)?,
        minimizers: argmin
            .into_iter()
            .map(|ix| Labeling::new(ix.into_iter().map(|j| labels[j]).collect()))
            .collect(),
    })
}

/// Exhaustive minimum of `U1` over `M^V`.
pub fn brute_min_u1(inst: &Instance, cfg: &OracleConfig) -> Result<BruteMinimum> {
    brute_min(inst, cfg, |d| (d as i128).abs())
}

/// Exhaustive minimum of `U2` over `M^V`.
pub fn brute_min_u2(inst: &Instance, cfg: &OracleConfig) -> Result<BruteMinimum> {
    brute_min(inst, cfg, |d| (d as i128) * (d as i128))
}

#[derive(Debug, Clone)]
pub struct LevelMinimum {
    pub energy: Rational,
    pub minimizers: Vec<BooleanField>,
    pub minimal: BooleanField,
    pub maximal: BooleanField,
}

/// All Boolean minimizers of `u(l, ·)` with their lattice-extreme elements.
pub fn brute_min_level(inst: &Instance, z: &LevelVector, cfg: &OracleConfig) -> Result<LevelMinimum> {
    let n = inst.len();
    cfg.admit(2, n)?;
    let mut best: Option<Rational> = None;
    let mut minimizers = Vec::new();
    for mask in 0..1u64 << n {
        let b = BooleanField::from_mask(mask, n);
        let e = u_level(inst, z, &b)?;
        match best {
            Some(cur) if e > cur => {}
            Some(cur) if e == cur => minimizers.push(b),
            _ => {
                best = Some(e);
                minimizers.clear();
                minimizers.push(b);
            }
        }
    }
    let minimal = minimizers.iter().skip(1).fold(minimizers[0].clone(), |acc, b| acc.meet(b));
    let maximal = minimizers.iter().skip(1).fold(minimizers[0].clone(), |acc, b| acc.join(b));
    for (name, extreme) in [("minimum", &minimal), ("maximum", &maximal)] {
        if !minimizers.contains(extreme) {
            return Err(Error::Invariant(format!("level {} minimizer set has no {name} element", z.level())));
        }
    }
    Ok(LevelMinimum { energy: best.unwrap(), minimizers, minimal, maximal })
}

/// For minimizer sets at levels `l' < l''`: every minimizer at `l'`
/// dominates some minimizer at `l''`, and every minimizer at `l''` is
/// dominated by some minimizer at `l'`.
pub fn cross_order_check(upper: &[BooleanField], lower: &[BooleanField]) -> bool {
    upper.iter().all(|x| lower.iter().any(|y| x.dominates(y)))
        && lower.iter().all(|y| upper.iter().any(|x| x.dominates(y)))
}

/// Whether one minimizer per level can be picked so the picks are
/// non-increasing across levels.
pub fn monotone_selection_exists(per_level: &[Vec<BooleanField>]) -> bool {
    let Some(first) = per_level.first() else {
        return true;
    };
    let mut reachable: Vec<&BooleanField> = first.iter().collect();
    for next in &per_level[1..] {
        reachable = next.iter().filter(|y| reachable.iter().any(|x| x.dominates(y))).collect();
        if reachable.is_empty() {
            return false;
        }
    }
    true
}

/// Outcome of enumerating every Boolean tuple `(x(1), ..., x(k))`.
#[derive(Debug, Clone)]
pub struct SurrogateCheck {
    /// `min Q + Σ λ g^2` over all tuples.
    pub min_q: Rational,
    /// `min P + Σ λ g^2` over non-increasing tuples.
    pub min_p_monotone: Rational,
    /// Coordinatewise minimum of all `Q`-minimizers.
    pub lowest_q_minimizer: Vec<BooleanField>,
    pub lowest_is_monotone: bool,
    pub all_q_minimizers_monotone: bool,
}

fn is_monotone(x: &[BooleanField]) -> bool {
    x.windows(2).all(|w| w[0].dominates(&w[1]))
}

pub fn surrogate_check(inst: &Instance, cfg: &OracleConfig) -> Result<SurrogateCheck> {
    let (n, k) = (inst.len(), inst.labels().k());
    cfg.admit(2, n * k)?;
    let constant = gauss_constant(inst)?;
    let mut min_q: Option<Rational> = None;
    let mut q_minimizers: Vec<Vec<BooleanField>> = Vec::new();
    let mut min_p: Option<Rational> = None;
    for mask in 0..1u64 << (n * k) {
        let x: Vec<BooleanField> = (0..k).map(|l| BooleanField::from_mask(mask >> (l * n), n)).collect();
        let q = q_polynomial(inst, &x)? + constant;
        match min_q {
            Some(cur) if q > cur => {}
            Some(cur) if q == cur => q_minimizers.push(x.clone()),
            _ => {
                min_q = Some(q);
                q_minimizers = vec![x.clone()];
            }
        }
        if is_monotone(&x) {
            let p = p_polynomial(inst, &x)? + constant;
            if min_p.is_none_or(|cur| p < cur) {
                min_p = Some(p);
            }
        }
    }
    let lowest: Vec<BooleanField> = (0..k)
        .map(|l| q_minimizers.iter().skip(1).fold(q_minimizers[0][l].clone(), |acc, x| acc.meet(&x[l])))
        .collect();
    Ok(SurrogateCheck {
        min_q: min_q.unwrap(),
        min_p_monotone: min_p.unwrap(),
        lowest_is_monotone: is_monotone(&lowest),
        lowest_q_minimizer: lowest,
        all_q_minimizers_monotone: q_minimizers.iter().all(|x| is_monotone(x)),
    })
}

/// Shape of random test instances on a small grid.
#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub width: usize,
    pub height: usize,
    pub max_feature: i64,
    pub max_k: usize,
    pub max_lambda: i64,
    pub max_beta: i64,
    pub connectivity: Connectivity,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            width: 3,
            height: 3,
            max_feature: 5,
            max_k: 3,
            max_lambda: 3,
            max_beta: 2,
            connectivity: Connectivity::Four,
        }
    }
}

/// Draws `k` uniformly from `1..=max_k`, then `L` from `k..=max_feature`,
/// `k + 1` distinct labels, features, integer weights and per-arc couplings.
pub fn random_instance<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Result<Instance> {
    let k = rng.random_range(1..=spec.max_k.min(spec.max_feature as usize));
    let max = rng.random_range(k as i64..=spec.max_feature);
    let mut levels: Vec<i64> = (0..=max).collect();
    while levels.len() > k + 1 {
        levels.remove(rng.random_range(0..levels.len()));
    }
    let labels = LabelSet::new(levels, max)?;
    let n = spec.width * spec.height;
    let features = (0..n).map(|_| rng.random_range(0..=max)).collect();
    let lambda: Vec<i64> = (0..n).map(|_| rng.random_range(0..=spec.max_lambda)).collect();
    let field = FeatureField::with_integer_weights(features, &lambda)?;
    let dims = GridDims::planar(spec.width, spec.height);
    let grid = grid_edges(dims, spec.connectivity, Rational::from(1))?;
    let edges = crate::model::EdgeSet::from_integer_arcs(
        grid.iter().map(|(i, j, _)| (i, j, rng.random_range(0..=spec.max_beta))).collect::<Vec<_>>(),
    );
    Instance::new(field, labels, edges)
}
