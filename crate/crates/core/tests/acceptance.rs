//! Acceptance suite. Each test checks one criterion and prints a single
//! `[PASS]`/`[FAIL]` line; run with `-- --nocapture` to see them.

use std::process::Command;
use std::time::{Duration, Instant};

use levelcut::classify::{classify_exp, classify_gauss};
use levelcut::imageio::{read_pgm, read_raw_volume, write_pgm, write_pgm_ascii, write_raw_volume, RasterImage};
use levelcut::levelset::{abs_identity_check, z_vectors, BooleanField};
use levelcut::maxflow::{solve, CutSide, FlowNetwork};
use levelcut::model::{FeatureField, Instance, LabelSet};
use levelcut::oracle::{
    brute_min_level, brute_min_u1, brute_min_u2, cross_order_check, monotone_selection_exists, random_instance,
    OracleConfig, RandomSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("[{}] criterion {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn is_nested(levels: &[BooleanField]) -> bool {
    levels.windows(2).all(|w| w[0].dominates(&w[1]))
}

/// 200 instances on a 3x3 grid: L <= 5, k in {1,2,3}, λ <= 3, β <= 2, 4-connectivity.
fn criterion_instances(seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..200).map(|_| random_instance(&mut rng, &RandomSpec::default()).unwrap()).collect()
}

#[test]
fn c1_exactness_exponential() {
    let started = Instant::now();
    let cfg = OracleConfig::default();
    let mut exact = 0;
    let mut nested = 0;
    let instances = criterion_instances(1);
    for inst in &instances {
        let r = classify_exp(inst).unwrap();
        let truth = brute_min_u1(inst, &cfg).unwrap();
        exact += (r.energy == truth.energy) as usize;
        nested += is_nested(&r.per_level) as usize;
    }
    let elapsed = started.elapsed();
    let pass = exact == 200 && nested == 200 && elapsed < Duration::from_secs(60);
    report(1, "exactness-exp", pass, &format!("{exact}/200 exact, {nested}/200 nested, {:.2}s", elapsed.as_secs_f64()));
}

#[test]
fn c2_exactness_gaussian() {
    let started = Instant::now();
    let cfg = OracleConfig::default();
    let mut exact = 0;
    let mut nested = 0;
    for inst in &criterion_instances(2) {
        let r = classify_gauss(inst).unwrap();
        let truth = brute_min_u2(inst, &cfg).unwrap();
        exact += (r.energy == truth.energy) as usize;
        nested += is_nested(&r.per_level) as usize;
    }
    let elapsed = started.elapsed();
    let pass = exact == 200 && nested == 200 && elapsed < Duration::from_secs(60);
    report(2, "exactness-gauss", pass, &format!("{exact}/200 exact, {nested}/200 nested, {:.2}s", elapsed.as_secs_f64()));
}

#[test]
fn c3_monotonicity() {
    let cfg = OracleConfig::default();
    let mut violations = 0;
    // classifier outputs from the criterion 1 and 2 instance sets
    for inst in criterion_instances(1).iter().chain(&criterion_instances(2)) {
        violations += !is_nested(&classify_exp(inst).unwrap().per_level) as usize;
        violations += !is_nested(&classify_gauss(inst).unwrap().per_level) as usize;
    }
    // lattice structure of the per-level minimizer sets
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let inst = random_instance(&mut rng, &RandomSpec::default()).unwrap();
        let levels: Vec<_> = z_vectors(inst.field().features(), inst.labels())
            .iter()
            .map(|z| brute_min_level(&inst, z, &cfg))
            .collect::<Result<_, _>>()
            .unwrap();
        let minimal: Vec<_> = levels.iter().map(|l| l.minimal.clone()).collect();
        let maximal: Vec<_> = levels.iter().map(|l| l.maximal.clone()).collect();
        violations += !is_nested(&minimal) as usize + !is_nested(&maximal) as usize;
        let sets: Vec<_> = levels.iter().map(|l| l.minimizers.clone()).collect();
        violations += !monotone_selection_exists(&sets) as usize;
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                violations += !cross_order_check(&sets[a], &sets[b]) as usize;
            }
        }
    }
    report(3, "monotonicity", violations == 0, &format!("{violations} violations over 400 classifier runs and 500 enumerated instances"));
}

#[test]
fn c4_boolean_coincidence() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut same = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=16);
        let features = (0..n).map(|_| rng.random_range(0..=1)).collect();
        let lambda: Vec<i64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random_bool(0.3) {
                    arcs.push((i, j, rng.random_range(0..=3)));
                }
            }
        }
        let inst = Instance::new(
            FeatureField::with_integer_weights(features, &lambda).unwrap(),
            LabelSet::new(vec![0, 1], 1).unwrap(),
            levelcut::model::EdgeSet::from_integer_arcs(arcs),
        )
        .unwrap();
        let e = classify_exp(&inst).unwrap();
        let g = classify_gauss(&inst).unwrap();
        same += (e.labeling == g.labeling && e.energy == g.energy) as usize;
    }
    report(4, "boolean-coincidence", same == 100, &format!("{same}/100 identical"));
}

#[test]
fn c5_abs_decomposition_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut failed = 0;
    for _ in 0..50 {
        let max = rng.random_range(1..=12);
        let count = rng.random_range(1..=(max + 1) as usize);
        let mut levels: Vec<i64> = (0..=max).collect();
        while levels.len() > count {
            levels.remove(rng.random_range(0..levels.len()));
        }
        let labels = LabelSet::new(levels, max).unwrap();
        for &nu in labels.levels() {
            for f in 0..=max {
                let (lhs, rhs) = abs_identity_check(nu, f, &labels).unwrap();
                checked += 1;
                failed += (lhs != rhs) as usize;
            }
        }
    }
    report(5, "abs-identity", failed == 0, &format!("{checked} (ν, f) pairs, {failed} unequal"));
}

/// All s-t cuts of a network by enumeration; returns (min capacity, all minimum source sides).
fn enumerate_cuts(net: &FlowNetwork) -> (i128, Vec<Vec<bool>>) {
    let inner: Vec<usize> = (0..net.node_count()).filter(|&v| v != net.source() && v != net.sink()).collect();
    let mut best = i128::MAX;
    let mut sides = Vec::new();
    for mask in 0..1u32 << inner.len() {
        let mut side = vec![false; net.node_count()];
        side[net.source()] = true;
        for (b, &v) in inner.iter().enumerate() {
            side[v] = mask >> b & 1 == 1;
        }
        let cap = net.cut_capacity(&side);
        if cap < best {
            best = cap;
            sides.clear();
        }
        if cap == best {
            sides.push(side);
        }
    }
    (best, sides)
}

#[test]
fn c6_maxflow_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut good = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let mut net = FlowNetwork::new(n, 0, n - 1).unwrap();
        let arcs = rng.random_range(0..=n * 3);
        for _ in 0..arcs {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            net.add_arc(a, b, rng.random_range(0..=6)).unwrap();
        }
        let sol = solve(&net).unwrap();
        let (min_cap, sides) = enumerate_cuts(&net);
        let lo = sol.cut(CutSide::Minimal);
        let hi = sol.cut(CutSide::Maximal);
        let within = |inner: &[bool], outer: &[bool]| inner.iter().zip(outer).all(|(&a, &b)| !a || b);
        let ok = sol.flow_value() as i128 == min_cap
            && net.cut_capacity(&lo) == min_cap
            && net.cut_capacity(&hi) == min_cap
            && sides.iter().all(|s| within(&lo, s) && within(s, &hi));
        good += ok as usize;
    }
    report(6, "maxflow", good == 100, &format!("{good}/100 networks match enumeration with minimal ⊆ maximal"));
}

#[test]
fn c7_desk_scale_performance() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("noisy.pgm");
    let output = dir.path().join("labels.pgm");
    let image = levelcut::cli::synthetic_image(256, 4, 25.0, 7).unwrap();
    std::fs::write(&input, write_pgm(&image).unwrap()).unwrap();

    let bin = env!("CARGO_BIN_EXE_levelcut");
    let started = Instant::now();
    let seg = Command::new(bin)
        .args(["segment", "--model", "exp", "--k", "4", "--connectivity", "4"])
        .arg("--input")
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    let labels = read_pgm(&std::fs::read(&output).unwrap()).unwrap();

    let bench = Command::new(bin)
        .args(["bench", "--sizes", "16,32", "--levels", "1,2", "--model", "both"])
        .output()
        .unwrap();
    let table = String::from_utf8_lossy(&bench.stdout);
    let rows = table.lines().skip(1).count();

    let pass = seg.status.success()
        && elapsed < Duration::from_secs(30)
        && labels.samples.len() == 256 * 256
        && bench.status.success()
        && rows == 8;
    report(
        7,
        "performance",
        pass,
        &format!("256x256 k=4 exp segment in {:.2}s (limit 30s); bench emitted {rows} rows", elapsed.as_secs_f64()),
    );
    print!("{table}");
}

#[test]
fn c8_format_fidelity() {
    let mut corpus: Vec<Vec<u8>> = vec![
        b"P5\n2 2\n255\n\x00\x80\xff\x07".to_vec(),
        b"P5 1 1 1 \x01".to_vec(),
        b"P5\n# comment before width\n3 # trailing\n1\n# before max\n255\n\x01\x02\x03".to_vec(),
        b"P5\t2\r\n1\r\n65535\n\x12\x34\xff\xff".to_vec(),
        b"P2\n3 2\n# grey\n7\n0 1 2\n3 4 7\n".to_vec(),
        b"P2 1 3 65535 65535 0 300".to_vec(),
        b"P2\n2 1\n255\n# comment inside raster\n10\n# another\n20\n".to_vec(),
    ];
    // 8-bit image with a newline byte right after the header separator
    corpus.push(b"P5\n4 1\n255\n\n\n\r ".to_vec());
    let mut exact = 0;
    for bytes in &corpus {
        let img = read_pgm(bytes).unwrap();
        let binary = read_pgm(&write_pgm(&img).unwrap()).unwrap();
        let ascii = read_pgm(&write_pgm_ascii(&img).unwrap()).unwrap();
        let canonical = write_pgm(&img).unwrap();
        let again = write_pgm(&read_pgm(&canonical).unwrap()).unwrap();
        exact += (binary == img && ascii == img && again == canonical) as usize;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let raw: Vec<u8> = (0..3 * 4 * 5).map(|_| rng.random()).collect();
    let vol = read_raw_volume(&raw, 3, 4, 5).unwrap();
    let raw_ok = write_raw_volume(&vol).unwrap() == raw;
    let zeros_ok = read_raw_volume(&[0; 8], 2, 2, 2).unwrap() == RasterImage::new(2, 2, 2, 255, vec![0; 8]).unwrap();
    let pass = exact == corpus.len() && raw_ok && zeros_ok;
    report(8, "format-fidelity", pass, &format!("{exact}/{} graymaps bit-exact, raw volume roundtrip {raw_ok}", corpus.len()));
}
