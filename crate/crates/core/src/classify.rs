//! The two exact Gibbs classifiers.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levelset::{boundary_offset, compose_labeling, z_vectors, BooleanField};
use crate::maxflow::{solve, CutSide};
use crate::model::{energy_u1, energy_u2, Instance, Labeling, Rational};
use crate::netbuild::{build_gauss_network, build_level_network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Absolute-difference data term and prior, energy `U1`.
    Exp,
    /// Squared-difference data term and prior, energy `U2`.
    Gauss,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Exp => "exp",
            Model::Gauss => "gauss",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(Model::Exp),
            "gauss" => Ok(Model::Gauss),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Max-flow value of each solved network (one per level for `exp`).
    pub cut_values: Vec<i64>,
    pub nodes: usize,
    pub arcs: usize,
    /// Summed over networks.
    pub build_time: Duration,
    pub solve_time: Duration,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct ClassifierResult {
    pub model: Model,
    pub labeling: Labeling,
    /// Full `U1` or `U2` of `labeling`.
    pub energy: Rational,
    /// Level fields `x(1) >= ... >= x(k)` composing `labeling`.
    pub per_level: Vec<BooleanField>,
    pub diagnostics: Diagnostics,
}

struct LevelSolve {
    field: BooleanField,
    cut: i64,
    energy: Rational,
    nodes: usize,
    arcs: usize,
    build: Duration,
    solve: Duration,
}

fn ensure_monotone(levels: &[BooleanField]) -> Result<()> {
    if order_solutions(levels) != levels {
        let level = levels.windows(2).position(|w| !w[0].dominates(&w[1])).map_or(0, |p| p + 2);
        return Err(Error::Invariant(format!("level solutions not nested at level {level}")));
    }
    Ok(())
}

fn constant_result(inst: &Instance, model: Model, started: Instant) -> Result<ClassifierResult> {
    let labeling = Labeling::constant(inst.labels().first(), inst.len());
    let energy = match model {
        Model::Exp => energy_u1(inst, &labeling)?,
        Model::Gauss => energy_u2(inst, &labeling)?,
    };
    Ok(ClassifierResult {
        model,
        labeling,
        energy,
        per_level: Vec::new(),
        diagnostics: Diagnostics { wall_time: started.elapsed(), ..Diagnostics::default() },
    })
}

/// Minimizes `U1` by solving each level problem on its own network and
/// composing the minimal cuts.
pub fn classify_exp(inst: &Instance) -> Result<ClassifierResult> {
    let started = Instant::now();
    if inst.labels().k() == 0 {
        return constant_result(inst, Model::Exp, started);
    }
    let zs = z_vectors(inst.field().features(), inst.labels());
    let solved: Vec<LevelSolve> = zs
        .par_iter()
        .map(|z| {
            let t0 = Instant::now();
            let map = build_level_network(inst, z)?;
            let t1 = Instant::now();
            let sol = solve(&map.network)?;
            let field = map.decode(&sol.cut(CutSide::Minimal));
            Ok(LevelSolve {
                field,
                cut: sol.flow_value(),
                energy: map.energy_of_cut(sol.flow_value() as i128)? * z.gap(),
                nodes: map.network.node_count(),
                arcs: map.network.arcs().len(),
                build: t1 - t0,
                solve: t1.elapsed(),
            })
        })
        .collect::<Result<_>>()?;

    let per_level: Vec<BooleanField> = solved.iter().map(|s| s.field.clone()).collect();
    ensure_monotone(&per_level)?;
    let labeling = compose_labeling(inst.labels(), &per_level, inst.len())?;
    let energy = energy_u1(inst, &labeling)?;
    let from_cuts = solved.iter().map(|s| s.energy).sum::<Rational>() + boundary_offset(inst)?;
    if from_cuts != energy {
        return Err(Error::Invariant(format!("cut energy {from_cuts} differs from U1 {energy}")));
    }
    let diagnostics = Diagnostics {
        cut_values: solved.iter().map(|s| s.cut).collect(),
        nodes: solved.iter().map(|s| s.nodes).sum(),
        arcs: solved.iter().map(|s| s.arcs).sum(),
        build_time: solved.iter().map(|s| s.build).sum(),
        solve_time: solved.iter().map(|s| s.solve).sum(),
        wall_time: started.elapsed(),
    };
    Ok(ClassifierResult { model: Model::Exp, labeling, energy, per_level, diagnostics })
}

/// Minimizes `U2` with one cut on the level-expanded network.
pub fn classify_gauss(inst: &Instance) -> Result<ClassifierResult> {
    let started = Instant::now();
    if inst.labels().k() == 0 {
        return constant_result(inst, Model::Gauss, started);
    }
    let map = build_gauss_network(inst)?;
    let built = Instant::now();
    let sol = solve(&map.network)?;
    let solve_time = built.elapsed();
    let per_level = map.decode(&sol.cut(CutSide::Minimal));
    ensure_monotone(&per_level)?;
    let labeling = compose_labeling(inst.labels(), &per_level, inst.len())?;
    let energy = energy_u2(inst, &labeling)?;
    let from_cut = map.energy_of_cut(sol.flow_value() as i128)?;
    if from_cut != energy {
        return Err(Error::Invariant(format!("cut energy {from_cut} differs from U2 {energy}")));
    }
    let diagnostics = Diagnostics {
        cut_values: vec![sol.flow_value()],
        nodes: map.network.node_count(),
        arcs: map.network.arcs().len(),
        build_time: built - started,
        solve_time,
        wall_time: started.elapsed(),
    };
    Ok(ClassifierResult { model: Model::Gauss, labeling, energy, per_level, diagnostics })
}

pub fn classify(inst: &Instance, model: Model) -> Result<ClassifierResult> {
    match model {
        Model::Exp => classify_exp(inst),
        Model::Gauss => classify_gauss(inst),
    }
}

/// Two-class case `L = 1`, `M = {0, 1}`: one cut, where `U1` and `U2`
/// coincide.
pub fn classify_boolean(inst: &Instance) -> Result<ClassifierResult> {
    let labels = inst.labels();
    if labels.max_feature() != 1 || labels.levels() != [0, 1] {
        return Err(Error::InvalidArgument("Boolean classifier needs L = 1 and labels {0, 1}".into()));
    }
    let started = Instant::now();
    let z = &z_vectors(inst.field().features(), labels)[0];
    let map = build_level_network(inst, z)?;
    let built = Instant::now();
    let sol = solve(&map.network)?;
    let field = map.decode(&sol.cut(CutSide::Minimal));
    let labeling = Labeling::new(field.bits().iter().map(|&b| b as i64).collect());
    let energy = energy_u1(inst, &labeling)?;
    let diagnostics = Diagnostics {
        cut_values: vec![sol.flow_value()],
        nodes: map.network.node_count(),
        arcs: map.network.arcs().len(),
        build_time: built - started,
        solve_time: built.elapsed(),
        wall_time: started.elapsed(),
    };
    Ok(ClassifierResult { model: Model::Exp, labeling, energy, per_level: vec![field], diagnostics })
}

/// Per-pixel descending sort across levels: output level `l` has pixel `i`
/// set iff at least `l` inputs set it.
pub fn order_solutions(solutions: &[BooleanField]) -> Vec<BooleanField> {
    let Some(first) = solutions.first() else {
        return Vec::new();
    };
    let counts: Vec<usize> = (0..first.len())
        .map(|i| solutions.iter().filter(|s| s[i]).count())
        .collect();
    (1..=solutions.len())
        .map(|l| BooleanField::new(counts.iter().map(|&c| c >= l).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EdgeSet, FeatureField, LabelSet};

    fn inst(f: Vec<i64>, lam: &[i64], levels: &[i64], max: i64, arcs: &[(usize, usize, i64)]) -> Instance {
        Instance::new(
            FeatureField::with_integer_weights(f, lam).unwrap(),
            LabelSet::new(levels.to_vec(), max).unwrap(),
            EdgeSet::from_integer_arcs(arcs.iter().copied()),
        )
        .unwrap()
    }

    fn chain(n: usize, beta: i64) -> Vec<(usize, usize, i64)> {
        (0..n - 1).flat_map(|i| [(i, i + 1, beta), (i + 1, i, beta)]).collect()
    }

    #[test]
    fn exp_two_pixel() {
        let p = inst(vec![0, 3], &[2, 1], &[0, 3], 3, &chain(2, 1));
        let r = classify_exp(&p).unwrap();
        assert_eq!(r.labeling.values(), &[0, 0]);
        assert_eq!(r.energy, Rational::from(3));
    }

    #[test]
    fn exp_smoothing_flips_outlier() {
        let p = inst(vec![0, 3, 3], &[1, 1, 1], &[0, 3], 3, &chain(3, 2));
        let r = classify_exp(&p).unwrap();
        assert_eq!(r.labeling.values(), &[3, 3, 3]);
        assert_eq!(r.energy, Rational::from(3));
    }

    #[test]
    fn constant_feature_on_label_is_free() {
        for model in [Model::Exp, Model::Gauss] {
            let p = inst(vec![2; 5], &[1, 2, 1, 3, 1], &[0, 2, 4], 4, &chain(5, 7));
            let r = classify(&p, model).unwrap();
            assert_eq!(r.labeling, Labeling::constant(2, 5));
            assert_eq!(r.energy, Rational::from(0));
        }
    }

    #[test]
    fn gauss_two_pixel() {
        let p = inst(vec![0, 3], &[2, 1], &[0, 3], 3, &chain(2, 1));
        let r = classify_gauss(&p).unwrap();
        assert_eq!(r.labeling.values(), &[0, 0]);
        assert_eq!(r.energy, Rational::from(9));
    }

    #[test]
    fn gauss_separable_picks_nearest_label() {
        // M = {0, 2, 5}: f = 1 ties 0/2 and resolves to 0 on the minimal cut
        let f = vec![0, 1, 2, 3, 4, 5];
        let p = inst(f, &[1; 6], &[0, 2, 5], 5, &[]);
        let r = classify_gauss(&p).unwrap();
        assert_eq!(r.labeling.values(), &[0, 0, 2, 2, 5, 5]);
    }

    #[test]
    fn single_cluster_is_constant() {
        let p = inst(vec![0, 3, 1], &[1, 1, 1], &[2], 3, &chain(3, 1));
        for model in [Model::Exp, Model::Gauss] {
            let r = classify(&p, model).unwrap();
            assert_eq!(r.labeling, Labeling::constant(2, 3));
            assert!(r.per_level.is_empty());
        }
    }

    #[test]
    fn boolean_matches_general_classifiers() {
        let p = inst(vec![1, 0, 1], &[1, 1, 1], &[0, 1], 1, &chain(3, 1));
        let b = classify_boolean(&p).unwrap();
        let e = classify_exp(&p).unwrap();
        let g = classify_gauss(&p).unwrap();
        assert_eq!(b.labeling, e.labeling);
        assert_eq!(b.labeling, g.labeling);
        assert_eq!(b.energy, e.energy);
        assert_eq!(b.energy, g.energy);
        let single = inst(vec![1], &[1], &[0, 1], 1, &[]);
        let r = classify_boolean(&single).unwrap();
        assert_eq!((r.labeling.values(), r.energy), (&[1][..], Rational::from(0)));
        assert!(classify_boolean(&inst(vec![1], &[1], &[0, 2], 2, &[])).is_err());
    }

    #[test]
    fn order_examples() {
        let a = BooleanField::new(vec![true, false]);
        let b = BooleanField::new(vec![false, true]);
        assert_eq!(
            order_solutions(&[a, b]),
            vec![BooleanField::new(vec![true, true]), BooleanField::new(vec![false, false])]
        );
        let ordered = vec![BooleanField::new(vec![true, true, false]), BooleanField::new(vec![true, false, false])];
        assert_eq!(order_solutions(&ordered), ordered);
        assert!(order_solutions(&[]).is_empty());
    }

    #[test]
    fn monotonicity_violation_reported() {
        let bad = vec![BooleanField::new(vec![false]), BooleanField::new(vec![true])];
        assert!(matches!(ensure_monotone(&bad), Err(Error::Invariant(_))));
    }

    #[test]
    fn model_parsing() {
        assert_eq!("exp".parse::<Model>().unwrap(), Model::Exp);
        assert_eq!(Model::Gauss.to_string(), "gauss");
        assert!("ising".parse::<Model>().is_err());
    }
}
