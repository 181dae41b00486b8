//! Random small grids, classifier vs exhaustive search.
//!
//!     cargo run --release --example oracle_differential -- [trials] [seed]

use levelcut::classify::{classify_exp, classify_gauss};
use levelcut::oracle::{brute_min_u1, brute_min_u2, random_instance, OracleConfig, RandomSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> levelcut::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().expect("integer argument"));
    let trials = args.next().unwrap_or(300);
    let seed = args.next().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomSpec { width: 3, height: 3, max_feature: 6, max_k: 3, ..RandomSpec::default() };
    let cfg = OracleConfig::default();

    let (mut exp_ok, mut gauss_ok, mut ties) = (0, 0, 0);
    for _ in 0..trials {
        let inst = random_instance(&mut rng, &spec)?;
        let (e, g) = (classify_exp(&inst)?, classify_gauss(&inst)?);
        let (te, tg) = (brute_min_u1(&inst, &cfg)?, brute_min_u2(&inst, &cfg)?);
        exp_ok += (e.energy == te.energy && e.labeling == te.lowest()) as u64;
        gauss_ok += (g.energy == tg.energy && g.labeling == tg.lowest()) as u64;
        ties += (te.minimizers.len() > 1) as u64;
    }
    println!("exp   {exp_ok}/{trials} optimal");
    println!("gauss {gauss_ok}/{trials} optimal");
    println!("{ties} instances had several exp minimizers; the lowest one was returned each time");
    Ok(())
}
