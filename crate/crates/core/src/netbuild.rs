//! Cut networks for the two models.
//!
//! Conventions shared by both builders: a node on the source side of a cut
//! decodes to `1`, on the sink side to `0`. A unary cost `c` for value `1`
//! is an arc `node -> sink`; a cost for value `0` is an arc
//! `source -> node`. A pairwise cost `w (x_u - x_v)^2` with `w >= 0` is a
//! pair of opposed arcs of capacity `w`.

use crate::error::{Error, Result};
use crate::levelset::{BooleanField, LevelVector};
use crate::maxflow::FlowNetwork;
use crate::model::{scaled_to_rational, Instance, Rational};

/// A network whose minimum cuts are the minimizers of `u(l, ·)`.
#[derive(Debug, Clone)]
pub struct LevelNetworkMap {
    pub level: usize,
    pub network: FlowNetwork,
    /// Non-terminal node of each pixel.
    pub pixel_to_node: Vec<usize>,
    /// `u(l, b) = cut / scale + constant_offset`.
    pub scale: i64,
    pub constant_offset: Rational,
}

impl LevelNetworkMap {
    pub fn decode(&self, source_side: &[bool]) -> BooleanField {
        BooleanField::new(self.pixel_to_node.iter().map(|&v| source_side[v]).collect())
    }

    /// Source side realizing a given Boolean field.
    pub fn encode(&self, b: &BooleanField) -> Vec<bool> {
        let mut side = vec![false; self.network.node_count()];
        side[self.network.source()] = true;
        for (i, &v) in self.pixel_to_node.iter().enumerate() {
            side[v] = b[i];
        }
        side
    }

    pub fn energy_of_cut(&self, capacity: i128) -> Result<Rational> {
        Ok(scaled_to_rational(capacity, self.scale)? + self.constant_offset)
    }
}

fn to_capacity(value: i128) -> Result<i64> {
    i64::try_from(value).map_err(|_| Error::Overflow("computing a capacity"))
}

/// Network for level `l`: unary costs `λ_i z_i(l)` (for `b_i = 0`) and
/// `λ_i (1 - z_i(l))` (for `b_i = 1`), couplings `β_{i,j} + β_{j,i}` between
/// pixel pairs, all multiplied by `a_l * D`.
pub fn build_level_network(inst: &Instance, z: &LevelVector) -> Result<LevelNetworkMap> {
    let n = inst.len();
    let w = inst.scaled();
    let gap = z.gap() as i128;
    let scale = z.gap().checked_mul(w.scale).ok_or(Error::Overflow("scaling a level network"))?;
    let (source, sink) = (n, n + 1);
    let mut network = FlowNetwork::new(n + 2, source, sink)?;
    for (i, &num) in z.numerators().iter().enumerate() {
        let lam = w.lambda[i] as i128;
        let to_zero = to_capacity(lam * num as i128)?;
        let to_one = to_capacity(lam * (gap - num as i128))?;
        if to_zero > 0 {
            network.add_arc(source, i, to_zero)?;
        }
        if to_one > 0 {
            network.add_arc(i, sink, to_one)?;
        }
    }
    for &(i, j, beta) in &w.pairs {
        let cap = to_capacity(beta as i128 * gap)?;
        network.add_arc(i, j, cap)?;
        network.add_arc(j, i, cap)?;
    }
    network.check_capacity_bound()?;
    Ok(LevelNetworkMap {
        level: z.level(),
        network,
        pixel_to_node: (0..n).collect(),
        scale,
        constant_offset: Rational::from(0),
    })
}

/// The single network over variables `x_i(l)` whose minimum cut minimizes
/// the surrogate polynomial `Q`.
#[derive(Debug, Clone)]
pub struct GaussNetworkMap {
    pub network: FlowNetwork,
    pub pixels: usize,
    pub levels: usize,
    /// `Σ λ g^2 + Q(x) = cut / scale + constant_offset`.
    pub scale: i64,
    pub constant_offset: Rational,
}

impl GaussNetworkMap {
    /// Node of variable `x_i(l)`, `l` in `1..=k`.
    pub fn node(&self, pixel: usize, level: usize) -> usize {
        pixel * self.levels + level - 1
    }

    pub fn decode(&self, source_side: &[bool]) -> Vec<BooleanField> {
        (1..=self.levels)
            .map(|l| BooleanField::new((0..self.pixels).map(|i| source_side[self.node(i, l)]).collect()))
            .collect()
    }

    pub fn encode(&self, x: &[BooleanField]) -> Vec<bool> {
        let mut side = vec![false; self.network.node_count()];
        side[self.network.source()] = true;
        for (l, field) in x.iter().enumerate() {
            for i in 0..self.pixels {
                side[self.node(i, l + 1)] = field[i];
            }
        }
        side
    }

    pub fn energy_of_cut(&self, capacity: i128) -> Result<Rational> {
        Ok(scaled_to_rational(capacity, self.scale)? + self.constant_offset)
    }
}

/// Per-pixel coupling mass `Σ_j (β_{i,j} + β_{j,i})`, scaled.
fn coupling_mass(inst: &Instance) -> Vec<i128> {
    let mut mass = vec![0i128; inst.len()];
    for &(i, j, b) in &inst.scaled().pairs {
        mass[i] += b as i128;
        mass[j] += b as i128;
    }
    mass
}

/// Scaled unary coefficient of `x_i(l)` in `Q`:
/// `λ a_l^2 - 2 λ g a_l - a_l (m(k) - m(0) - a_l) B + 2 (λ + B) a_l (m(l-1) - m(0))`.
fn q_unary(inst: &Instance, mass: &[i128], i: usize, l: usize) -> i128 {
    let labels = inst.labels();
    let lam = inst.scaled().lambda[i] as i128;
    let g = (inst.field().features()[i] - labels.first()) as i128;
    let a = labels.gap(l) as i128;
    let span = labels.span() as i128;
    let below = (labels.label(l - 1) - labels.first()) as i128;
    lam * a * a - 2 * lam * g * a - a * (span - a) * mass[i] + 2 * (lam + mass[i]) * a * below
}

pub fn build_gauss_network(inst: &Instance) -> Result<GaussNetworkMap> {
    let labels = inst.labels();
    let k = labels.k();
    if k == 0 {
        return Err(Error::InvalidArgument("Gaussian network needs at least two labels".into()));
    }
    let n = inst.len();
    let w = inst.scaled();
    let (source, sink) = (n * k, n * k + 1);
    let mut map = GaussNetworkMap {
        network: FlowNetwork::new(n * k + 2, source, sink)?,
        pixels: n,
        levels: k,
        scale: w.scale,
        constant_offset: Rational::from(0),
    };
    let mass = coupling_mass(inst);
    let mut offset: i128 = 0;
    for i in 0..n {
        let g = (inst.field().features()[i] - labels.first()) as i128;
        offset += w.lambda[i] as i128 * g * g;
        for l in 1..=k {
            let c = q_unary(inst, &mass, i, l);
            let v = map.node(i, l);
            if c > 0 {
                map.network.add_arc(v, sink, to_capacity(c)?)?;
            } else if c < 0 {
                // c x = c + |c| (1 - x)
                map.network.add_arc(source, v, to_capacity(-c)?)?;
                offset += c;
            }
        }
    }
    let gap = |l: usize| labels.gap(l) as i128;
    for &(i, j, beta) in &w.pairs {
        let beta = beta as i128;
        for l in 1..=k {
            add_square_term(&mut map, (i, l), (j, l), beta * gap(l) * gap(l))?;
            for tau in 1..l {
                let weight = beta * gap(l) * gap(tau);
                add_square_term(&mut map, (i, l), (j, tau), weight)?;
                add_square_term(&mut map, (j, l), (i, tau), weight)?;
            }
        }
    }
    map.network.check_capacity_bound()?;
    map.constant_offset = scaled_to_rational(offset, w.scale)?;
    Ok(map)
}

fn add_square_term(map: &mut GaussNetworkMap, u: (usize, usize), v: (usize, usize), weight: i128) -> Result<()> {
    if weight < 0 {
        return Err(Error::Invariant(format!("non-submodular term between {u:?} and {v:?}")));
    }
    if weight == 0 {
        return Ok(());
    }
    let cap = to_capacity(weight)?;
    let (a, b) = (map.node(u.0, u.1), map.node(v.0, v.1));
    map.network.add_arc(a, b, cap)?;
    map.network.add_arc(b, a, cap)
}

fn check_levels(inst: &Instance, x: &[BooleanField]) -> Result<()> {
    if x.len() != inst.labels().k() || x.iter().any(|f| f.len() != inst.len()) {
        return Err(Error::LengthMismatch { what: "level fields", got: x.len(), expected: inst.labels().k() });
    }
    Ok(())
}

/// The part of `P` and `Q` that they share: linear terms and the pairwise
/// squares over the directed arcs. Scaled by `D`.
fn shared_terms(inst: &Instance, x: &[BooleanField]) -> i128 {
    let labels = inst.labels();
    let k = labels.k();
    let mass = coupling_mass(inst);
    let a = |l: usize| labels.gap(l) as i128;
    let bit = |i: usize, l: usize| x[l - 1][i] as i128;
    let mut total: i128 = 0;
    for (i, &m) in mass.iter().enumerate() {
        let lam = inst.scaled().lambda[i] as i128;
        let g = (inst.field().features()[i] - labels.first()) as i128;
        for l in 1..=k {
            let coef = lam * a(l) * a(l) - 2 * lam * g * a(l) - a(l) * (labels.span() as i128 - a(l)) * m;
            total += coef * bit(i, l);
        }
    }
    for (i, j, beta) in inst.edges().iter() {
        // β_{i,j} * D is an integer after rescaling
        let beta = (beta * Rational::from(inst.scaled().scale)).to_integer() as i128;
        let mut term = 0i128;
        for l in 1..=k {
            term += a(l) * a(l) * (bit(i, l) - bit(j, l)).pow(2);
            for tau in 1..l {
                term += a(l) * a(tau) * ((bit(i, l) - bit(j, tau)).pow(2) + (bit(j, l) - bit(i, tau)).pow(2));
            }
        }
        total += beta * term;
    }
    total
}

fn diagonal_weight(inst: &Instance, mass: i128, i: usize) -> i128 {
    2 * (inst.scaled().lambda[i] as i128 + mass)
}

/// The exact Boolean expansion `P(x(1), ..., x(k))` of `U2 - Σ λ_i g_i^2`.
pub fn p_polynomial(inst: &Instance, x: &[BooleanField]) -> Result<Rational> {
    check_levels(inst, x)?;
    let labels = inst.labels();
    let mass = coupling_mass(inst);
    let mut total = shared_terms(inst, x);
    for (i, &m) in mass.iter().enumerate() {
        let d = diagonal_weight(inst, m, i);
        for l in 1..=labels.k() {
            for tau in 1..l {
                let prod = (x[tau - 1][i] && x[l - 1][i]) as i128;
                total += d * labels.gap(l) as i128 * labels.gap(tau) as i128 * prod;
            }
        }
    }
    scaled_to_rational(total, inst.scaled().scale)
}

/// The surrogate `Q >= P`, with each product `x_i(τ) x_i(l)` (`τ < l`)
/// replaced by `x_i(l)`.
pub fn q_polynomial(inst: &Instance, x: &[BooleanField]) -> Result<Rational> {
    check_levels(inst, x)?;
    let labels = inst.labels();
    let mass = coupling_mass(inst);
    let mut total = shared_terms(inst, x);
    for (i, &m) in mass.iter().enumerate() {
        let d = diagonal_weight(inst, m, i);
        for l in 1..=labels.k() {
            for tau in 1..l {
                total += d * labels.gap(l) as i128 * labels.gap(tau) as i128 * x[l - 1][i] as i128;
            }
        }
    }
    scaled_to_rational(total, inst.scaled().scale)
}

/// `Σ_i λ_i g_i^2`, the constant separating `U2` from `P`.
pub fn gauss_constant(inst: &Instance) -> Result<Rational> {
    let first = inst.labels().first();
    let total: i128 = inst
        .field()
        .features()
        .iter()
        .zip(&inst.scaled().lambda)
        .map(|(&f, &lam)| lam as i128 * ((f - first) as i128).pow(2))
        .sum();
    scaled_to_rational(total, inst.scaled().scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::{u_level, z_vectors};
    use crate::maxflow::{max_flow, CutSide};
    use crate::model::{EdgeSet, FeatureField, LabelSet};

    fn inst(f: Vec<i64>, lam: &[i64], levels: &[i64], max: i64, arcs: &[(usize, usize, i64)]) -> Instance {
        Instance::new(
            FeatureField::with_integer_weights(f, lam).unwrap(),
            LabelSet::new(levels.to_vec(), max).unwrap(),
            EdgeSet::from_integer_arcs(arcs.iter().copied()),
        )
        .unwrap()
    }

    fn all_fields(n: usize) -> impl Iterator<Item = BooleanField> {
        (0..1u64 << n).map(move |m| BooleanField::from_mask(m, n))
    }

    #[test]
    fn single_pixel_level_network() {
        let p = inst(vec![1], &[3], &[0, 3], 3, &[]);
        let z = &z_vectors(p.field().features(), p.labels())[0];
        let map = build_level_network(&p, z).unwrap();
        assert_eq!(map.scale, 3);
        let zero = map.network.cut_capacity(&map.encode(&BooleanField::zeros(1)));
        let one = map.network.cut_capacity(&map.encode(&BooleanField::ones(1)));
        assert_eq!((zero, one), (3, 6));
        let cut = max_flow(&map.network).unwrap();
        assert_eq!(map.decode(&cut.source_side), BooleanField::zeros(1));
        assert_eq!(map.energy_of_cut(cut.flow_value as i128).unwrap(), Rational::from(1));
    }

    #[test]
    fn two_pixel_level_network() {
        let p = inst(vec![0, 3], &[2, 1], &[0, 3], 3, &[(0, 1, 1), (1, 0, 1)]);
        let z = &z_vectors(p.field().features(), p.labels())[0];
        let map = build_level_network(&p, z).unwrap();
        let cut = max_flow(&map.network).unwrap();
        let b = map.decode(&cut.source_side);
        assert_eq!(b, BooleanField::zeros(2));
        assert_eq!(u_level(&p, z, &b).unwrap(), Rational::from(1));
    }

    #[test]
    fn separable_level_thresholds_at_half() {
        let p = inst(vec![0, 1, 2, 3, 4], &[1, 1, 1, 1, 1], &[0, 4], 4, &[]);
        let z = &z_vectors(p.field().features(), p.labels())[0];
        let map = build_level_network(&p, z).unwrap();
        let side = crate::maxflow::min_cut_extreme(&map.network, CutSide::Minimal).unwrap();
        // z = 0, 1/4, 1/2, 3/4, 1; the tie at 1/2 resolves to 0 on the minimal cut
        assert_eq!(map.decode(&side).bits(), &[false, false, false, true, true]);
    }

    #[test]
    fn every_level_cut_matches_u() {
        let p = inst(vec![0, 4, 2], &[2, 1, 3], &[0, 1, 4, 5], 5, &[(0, 1, 1), (2, 1, 2), (2, 0, 1)]);
        for z in z_vectors(p.field().features(), p.labels()) {
            let map = build_level_network(&p, &z).unwrap();
            for b in all_fields(3) {
                let cap = map.network.cut_capacity(&map.encode(&b));
                assert_eq!(map.energy_of_cut(cap).unwrap(), u_level(&p, &z, &b).unwrap());
            }
        }
    }

    #[test]
    fn every_gauss_cut_matches_q() {
        let p = inst(vec![0, 5, 2], &[2, 0, 3], &[0, 1, 3, 5], 5, &[(0, 1, 1), (1, 0, 2), (2, 1, 1)]);
        let map = build_gauss_network(&p).unwrap();
        let constant = gauss_constant(&p).unwrap();
        for mask in 0..1u64 << 9 {
            let x: Vec<BooleanField> =
                (0..3).map(|l| BooleanField::new((0..3).map(|i| mask >> (i * 3 + l) & 1 == 1).collect())).collect();
            let cap = map.network.cut_capacity(&map.encode(&x));
            assert_eq!(map.energy_of_cut(cap).unwrap(), q_polynomial(&p, &x).unwrap() + constant);
            assert!(q_polynomial(&p, &x).unwrap() >= p_polynomial(&p, &x).unwrap());
        }
    }

    #[test]
    fn single_pixel_gauss() {
        let p = inst(vec![2], &[1], &[0, 1, 2], 2, &[]);
        let map = build_gauss_network(&p).unwrap();
        let cut = max_flow(&map.network).unwrap();
        let x = map.decode(&cut.source_side);
        assert_eq!(x, vec![BooleanField::ones(1), BooleanField::ones(1)]);
        assert_eq!(map.energy_of_cut(cut.flow_value as i128).unwrap(), Rational::from(0));
    }

    #[test]
    fn boolean_model_networks_coincide() {
        let p = inst(vec![1, 0, 1, 1], &[1, 2, 1, 3], &[0, 1], 1, &[(0, 1, 1), (1, 2, 2), (3, 2, 1)]);
        let z = &z_vectors(p.field().features(), p.labels())[0];
        let level = build_level_network(&p, z).unwrap().network.merge_parallel().unwrap();
        let gauss = build_gauss_network(&p).unwrap().network.merge_parallel().unwrap();
        assert_eq!(level.arcs(), gauss.arcs());
    }

    #[test]
    fn gauss_needs_two_labels() {
        let p = inst(vec![1], &[1], &[1], 3, &[]);
        assert!(build_gauss_network(&p).is_err());
    }
}
