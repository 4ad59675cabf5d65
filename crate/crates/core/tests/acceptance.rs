//! End-to-end acceptance checks, one line per criterion.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use water_transport::engine::{
    apply_hypermove, dual_profile, expand_hypermoves, final_levels, round_sequence, sad_profile,
    target_outcome, Hypermove, MoveSequence,
};
use water_transport::exact::{kappa_path_end, kappa_path_general, kappa_universal_target};
use water_transport::fixtures::{
    interior_path, interior_path_strategy, no_finite_optimum_path, star_pooling_strategy,
};
use water_transport::graph::Graph;
use water_transport::heuristics::{gla_value, GlaMode, HeuristicCaps};
use water_transport::instance::{
    build_complete, build_path, build_star_center, build_star_example, Instance, WaterProfile,
};
use water_transport::oracle::{kappa_oracle, mu_grid_probe, OracleConfig, SearchMode};
use water_transport::rational::{format_rational, half, int, ratio, to_decimal};
use water_transport::reduction::{
    brute_sat, build_reduction, reservoir_level, to_exact_3sat, witness_strategy, CnfFormula,
};
use water_transport::sampling::{random_connected_graph, random_level, random_mu, random_sequence};
use water_transport::Rational;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn levels(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| random_level(rng, 4, 7)).collect()
}

fn path_graph(n: usize) -> Graph {
    Graph::with_default_names(n, (1..n).map(|i| (i - 1, i))).expect("path")
}

fn oracle(inst: &Instance, depth: usize, mode: SearchMode) -> Result<Rational, String> {
    let config = OracleConfig {
        max_vertices: 16,
        max_depth: 8,
        ..OracleConfig::default()
    };
    Ok(kappa_oracle(inst, depth, mode, &config).map_err(err)?.value)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut cases = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let lv = levels(&mut rng, n);
        for t in 0..n {
            let inst = build_path(lv.clone(), t).map_err(err)?;
            let solved = kappa_path_general(&inst).map_err(err)?.kappa;
            let searched = oracle(&inst, 2, SearchMode::Hypermove)?;
            ensure(solved == searched, || {
                format!("{:?} target {t}: solver {solved} vs oracle {searched}", lv)
            })?;
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{cases} path instances agree, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut cases = 0;
    for (n, count) in [(3, 100), (4, 30)] {
        for _ in 0..count {
            let lv = levels(&mut rng, n);
            for t in 0..n {
                let inst = build_complete(lv.clone(), t).map_err(err)?;
                let solved = kappa_universal_target(&inst).map_err(err)?.kappa;
                let searched = oracle(&inst, n - 1, SearchMode::Hypermove)?;
                ensure(solved == searched, || {
                    format!(
                        "K{n} {:?} target {t}: formula {solved} vs oracle {searched}",
                        lv
                    )
                })?;
                cases += 1;
            }
        }
    }
    let k3 = build_complete(vec![int(2), int(1), int(0)], 2).map_err(err)?;
    let v = kappa_universal_target(&k3).map_err(err)?.kappa;
    ensure(v == ratio(5, 4), || format!("K3 (2,1,0) gave {v}"))?;
    let star = build_star_center(int(0), vec![int(3), int(2), int(1)]).map_err(err)?;
    let v = kappa_universal_target(&star).map_err(err)?.kappa;
    ensure(v == ratio(17, 8), || format!("star centre gave {v}"))?;
    Ok(format!(
        "{cases} complete-graph instances agree; K3 -> 5/4, star -> 17/8"
    ))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..100 {
        let n = rng.gen_range(1..=10);
        let lv = levels(&mut rng, n);
        let t = if rng.gen_bool(0.5) { 0 } else { n - 1 };
        let inst = build_path(lv.clone(), t).map_err(err)?;
        let exact = kappa_path_end(&inst).map_err(err)?.kappa;
        let gla = gla_value(&inst, GlaMode::Exhaustive, &HeuristicCaps::default())
            .map_err(err)?
            .value;
        ensure(exact == gla, || {
            format!("{:?} target {t}: {exact} vs GLA {gla}", lv)
        })?;
    }
    Ok("100 end-target paths: kappa equals the best animal".into())
}

fn criterion_4() -> Check {
    let inst = no_finite_optimum_path();
    let mut values = Vec::new();
    for depth in 1..=6 {
        values.push(oracle(&inst, depth, SearchMode::SingleEdge)?);
    }
    for (i, w) in values.windows(2).enumerate() {
        ensure(w[0] < w[1], || {
            format!("depth {} -> {}: {} !< {}", i + 1, i + 2, w[0], w[1])
        })?;
    }
    ensure(values.iter().all(|v| *v < half()), || {
        "a single-edge value reached 1/2".into()
    })?;
    let hyper = oracle(&inst, 1, SearchMode::Hypermove)?;
    ensure(hyper == half(), || {
        format!("hypermove depth 1 gave {hyper}")
    })?;
    let shown: Vec<String> = values.iter().map(format_rational).collect();
    Ok(format!(
        "single-edge depths 1..6: {}; hypermove depth 1: 1/2",
        shown.join(" < ")
    ))
}

fn criterion_5() -> Check {
    let inst = interior_path();
    let target = ratio(3, 5);
    let solved = kappa_path_general(&inst).map_err(err)?.kappa;
    let searched = oracle(&inst, 2, SearchMode::Hypermove)?;
    let seq = interior_path_strategy();
    let simulated = target_outcome(&inst, &seq).map_err(err)?;
    ensure(
        solved == target && searched == target && simulated == target,
        || format!("solver {solved}, oracle {searched}, simulation {simulated}"),
    )?;
    let dual = dual_profile(&inst.graph, inst.target, &seq).map_err(err)?;
    let expected = vec![ratio(1, 6), ratio(1, 6), ratio(1, 6), half()];
    ensure(dual.weights == expected, || {
        format!("dual profile {:?}", dual.weights)
    })?;
    Ok("3/5 from solver, oracle and simulation; dual (1/6,1/6,1/6,1/2)".into())
}

fn is_unimodal(xs: &[Rational]) -> bool {
    let mut i = 1;
    while i < xs.len() && xs[i - 1] <= xs[i] {
        i += 1;
    }
    while i < xs.len() && xs[i - 1] >= xs[i] {
        i += 1;
    }
    i >= xs.len()
}

/// Keeps single-edge moves and completes every wider move; only such
/// sequences are limits of single-edge play.
fn achievable(seq: &MoveSequence) -> MoveSequence {
    seq.iter()
        .map(|m| {
            if m.is_single_edge() {
                m.clone()
            } else {
                m.with_mu(half()).expect("valid")
            }
        })
        .collect()
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut path_profiles = 0;
    for case in 0..500 {
        let n = rng.gen_range(1..=8);
        let on_path = case % 4 == 0;
        let graph = if on_path {
            path_graph(n)
        } else {
            random_connected_graph(&mut rng, n, 0.3)
        };
        let lv = levels(&mut rng, n);
        let mut seq = random_sequence(&mut rng, &graph, 10, false);
        if on_path {
            seq = achievable(&seq);
        }
        let inst = Instance::new(
            graph.clone(),
            WaterProfile::from_levels(lv.clone()).map_err(err)?,
            0,
        )
        .map_err(err)?;
        let finals = final_levels(&inst, &seq).map_err(err)?;
        for (v, level) in finals.iter().enumerate() {
            let dual = dual_profile(&graph, v, &seq).map_err(err)?;
            let combined = dual.combine(&lv);
            ensure(combined == *level, || {
                format!("case {case} vertex {v}: simulated {level} vs dual {combined}")
            })?;
        }
        for u in 0..n {
            let sad = sad_profile(&graph, u, &seq).map_err(err)?;
            ensure(sad.total() == Rational::one(), || {
                format!("case {case}: SAD mass {}", sad.total())
            })?;
            let dist = graph.distances_from(u);
            for (w, share) in sad.weights.iter().enumerate() {
                let d = dist[w].expect("connected") as i64;
                ensure(*share <= ratio(1, d + 1), || {
                    format!("case {case}: share {share} at distance {d} from {u}")
                })?;
            }
            if on_path {
                ensure(is_unimodal(&sad.weights), || {
                    format!(
                        "case {case}: SAD profile from {u} not unimodal: {:?}",
                        sad.weights
                    )
                })?;
                path_profiles += 1;
            }
        }
    }
    Ok(format!(
        "500 cases exact; share bound holds; {path_profiles} path profiles unimodal"
    ))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for case in 0..200 {
        let n = rng.gen_range(2..=7);
        let graph = random_connected_graph(&mut rng, n, 0.3);
        let lv = levels(&mut rng, n);
        let t = rng.gen_range(0..n);
        let inst = Instance::new(
            graph.clone(),
            WaterProfile::from_levels(lv).map_err(err)?,
            t,
        )
        .map_err(err)?;
        let seq = random_sequence(&mut rng, &graph, 10, false);
        let rounded = round_sequence(&inst, &seq).map_err(err)?;
        ensure(rounded.iter().all(Hypermove::is_complete), || {
            format!("case {case}: fractional move left")
        })?;
        let before = target_outcome(&inst, &seq).map_err(err)?;
        let after = target_outcome(&inst, &rounded).map_err(err)?;
        ensure(after >= before, || {
            format!("case {case}: rounding lowered {before} to {after}")
        })?;
    }
    let grid = [ratio(1, 4), half()];
    let config = OracleConfig::default();
    for case in 0..40 {
        let n = rng.gen_range(2..=5);
        let graph = random_connected_graph(&mut rng, n, 0.4);
        let lv = levels(&mut rng, n);
        let t = rng.gen_range(0..n);
        let inst =
            Instance::new(graph, WaterProfile::from_levels(lv).map_err(err)?, t).map_err(err)?;
        for depth in 1..=3 {
            let probe = mu_grid_probe(&inst, depth, &grid, &config).map_err(err)?;
            let complete = oracle(&inst, depth, SearchMode::SingleEdge)?;
            ensure(probe <= complete, || {
                format!("probe case {case} depth {depth}: grid {probe} beats complete {complete}")
            })?;
        }
    }
    Ok("200 rounded sequences complete and no worse; {1/4,1/2} grid never beats {1/2}".into())
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let eps = ratio(1, 1_000_000);
    let mut worst = Rational::zero();
    for case in 0..50 {
        let n = rng.gen_range(2..=7);
        let graph = random_connected_graph(&mut rng, n, 0.3);
        let lv = levels(&mut rng, n);
        let inst = Instance::new(
            graph.clone(),
            WaterProfile::from_levels(lv).map_err(err)?,
            0,
        )
        .map_err(err)?;
        let seq = random_sequence(&mut rng, &graph, 6, true);
        let expanded = expand_hypermoves(&inst, &seq, &eps).map_err(err)?;
        ensure(expanded.iter().all(Hypermove::is_single_edge), || {
            format!("case {case}: hypermove left")
        })?;
        let a = final_levels(&inst, &seq).map_err(err)?;
        let b = final_levels(&inst, &expanded).map_err(err)?;
        for (x, y) in a.iter().zip(&b) {
            let dev = (x - y).abs();
            ensure(dev < eps, || {
                format!("case {case}: deviation {}", to_decimal(&dev, 6))
            })?;
            if dev > worst {
                worst = dev;
            }
        }
    }
    Ok(format!(
        "50 expansions within 1e-6 (worst {})",
        to_decimal(&worst, 3)
    ))
}

fn criterion_9() -> Check {
    let caps = HeuristicCaps {
        exhaustive_vertices: 26,
        ..HeuristicCaps::default()
    };
    let mut ratios: Vec<Rational> = Vec::new();
    let mut report = Vec::new();
    for n in 3..=5 {
        let inst = build_star_example(n).map_err(err)?;
        let value = target_outcome(&inst, &star_pooling_strategy(n).map_err(err)?).map_err(err)?;
        let gla = gla_value(&inst, GlaMode::Exhaustive, &caps)
            .map_err(err)?
            .value;
        ensure(value > gla, || {
            format!("n={n}: strategy {value} does not beat GLA {gla}")
        })?;
        let r = &value / &gla;
        if let Some(prev) = ratios.last() {
            ensure(r > *prev, || {
                format!(
                    "n={n}: ratio {} not above {}",
                    to_decimal(&r, 6),
                    to_decimal(prev, 6)
                )
            })?;
        }
        if n == 4 {
            ensure(value >= ratio(25, 12), || {
                format!("n=4 value {value} below 25/12")
            })?;
        }
        report.push(format!("n={n} ratio {}", to_decimal(&r, 5)));
        ratios.push(r);
    }
    Ok(format!("{}; n=4 reaches 25/12", report.join(", ")))
}

fn level_counts(inst: &Instance) -> BTreeMap<Rational, usize> {
    let mut counts = BTreeMap::new();
    for l in inst.levels() {
        *counts.entry(l.clone()).or_insert(0) += 1;
    }
    counts
}

fn criterion_10() -> Check {
    let start = Instant::now();
    let one = CnfFormula::new(3, vec![vec![1, 2, 3]]).map_err(err)?;
    let comb = build_reduction(&one, None).map_err(err)?;
    ensure(comb.instance.vertex_count() == 45, || {
        format!("{} vertices", comb.instance.vertex_count())
    })?;
    let sat = brute_sat(&one)
        .map_err(err)?
        .ok_or("formula reported unsatisfiable")?;
    let v = target_outcome(&comb.instance, &witness_strategy(&comb, &sat).map_err(err)?)
        .map_err(err)?;
    ensure(v == ratio(61, 30), || format!("witness gave {v}"))?;

    let two = CnfFormula::new(6, vec![vec![1, 2, 3], vec![-4, 5, -6]]).map_err(err)?;
    let comb = build_reduction(&two, None).map_err(err)?;
    let size = comb.instance.vertex_count();
    let sat = brute_sat(&two)
        .map_err(err)?
        .ok_or("formula reported unsatisfiable")?;
    let seq = witness_strategy(&comb, &sat).map_err(err)?;
    let mut profile = comb.instance.profile.clone();
    let total = profile.total();
    for mv in seq.iter() {
        profile = apply_hypermove(&comb.instance.graph, &profile, mv).map_err(err)?;
        ensure(profile.total() == total, || "water not conserved".into())?;
    }
    let reached = profile.levels[comb.instance.target].clone();
    ensure(reached > int(2), || format!("n=2 witness gave {reached}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "45 vertices and 61/30; n=2 comb with {size} vertices reaches {} (≈{}), {:.2}s",
        format_rational(&reached),
        to_decimal(&reached, 6),
        elapsed.as_secs_f64()
    ))
}

fn criterion_11() -> Check {
    for (k, clauses) in [
        (3, vec![vec![1, 2, 3]]),
        (6, vec![vec![1, 2, 3], vec![-4, 5, -6]]),
        (4, vec![vec![1, -2, 3], vec![2, 3, -4], vec![-1, -3, 4]]),
    ] {
        let f = CnfFormula::new(k, clauses).map_err(err)?;
        let n = f.clauses.len();
        let comb = build_reduction(&f, None).map_err(err)?;
        let total = comb.instance.vertex_count();
        let twos = 4 * k * n.pow(4);
        let mut expected = BTreeMap::new();
        expected.insert(reservoir_level(), 1);
        expected.insert(int(3), n);
        expected.insert(int(2), twos);
        expected.insert(Rational::zero(), total - 1 - n - twos);
        ensure(level_counts(&comb.instance) == expected, || {
            format!("level multiset differs for n={n}, k={k}")
        })?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut satisfiable = 0;
    for case in 0..50 {
        let vars = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=6);
        let mut clauses = Vec::new();
        while clauses.len() < m {
            let width = rng.gen_range(1..=3.min(vars));
            let mut picked: Vec<i64> = Vec::new();
            while picked.len() < width {
                let v = rng.gen_range(1..=vars as i64);
                if picked.iter().all(|l| l.abs() != v) {
                    picked.push(if rng.gen_bool(0.5) { v } else { -v });
                }
            }
            clauses.push(picked);
        }
        let f = CnfFormula::new(vars, clauses).map_err(err)?;
        let g = to_exact_3sat(&f).map_err(err)?;
        ensure(g.is_exact_3sat(), || {
            format!("case {case}: conversion not exact")
        })?;
        let a = enumerate_sat(&f);
        let b = enumerate_sat(&g);
        ensure(a == b, || {
            format!("case {case}: satisfiability {a} before, {b} after")
        })?;
        satisfiable += usize::from(a);
    }
    Ok(format!(
        "level multisets match; 50 conversions equisatisfiable ({satisfiable} satisfiable)"
    ))
}

/// Satisfiability by direct enumeration, independent of the library solver.
fn enumerate_sat(f: &CnfFormula) -> bool {
    (0u64..1 << f.num_vars).any(|bits| {
        f.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let value = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                value == (l > 0)
            })
        })
    })
}

fn energy(xs: &[Rational]) -> Rational {
    xs.iter().fold(Rational::zero(), |acc, x| acc + x * x)
}

fn criterion_12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    for case in 0..1000 {
        let n = rng.gen_range(2..=8);
        let graph = random_connected_graph(&mut rng, n, 0.3);
        let lv = levels(&mut rng, n);
        let mv = if case % 2 == 0 {
            let &(a, b) = &graph.edges()[rng.gen_range(0..graph.edge_count())];
            Hypermove::edge(a, b, random_mu(&mut rng, 8)).map_err(err)?
        } else {
            let seq = random_sequence(&mut rng, &graph, 1, false);
            match seq.iter().next() {
                Some(mv) => mv.clone(),
                None => Hypermove::pool(0..n).map_err(err)?,
            }
        };
        let before = WaterProfile::from_levels(lv).map_err(err)?;
        let after = apply_hypermove(&graph, &before, &mv).map_err(err)?;
        ensure(after.total() == before.total(), || {
            format!("case {case}: mass changed")
        })?;
        ensure(after.max_level() <= before.max_level(), || {
            format!("case {case}: max grew")
        })?;
        ensure(after.min_level() >= before.min_level(), || {
            format!("case {case}: min shrank")
        })?;
        ensure(energy(&after.levels) <= energy(&before.levels), || {
            format!("case {case}: energy grew")
        })?;
        ensure(after.energy() == energy(&after.levels), || {
            format!("case {case}: energy mismatch")
        })?;
    }
    Ok("1000 moves conserve mass, contract the range and lose energy".into())
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("path solver matches oracle", criterion_1),
        ("complete-graph formula", criterion_2),
        ("path end equals best animal", criterion_3),
        ("no finite optimum with single edges", criterion_4),
        ("interior-target path fixture", criterion_5),
        ("duality and sharing profiles", criterion_6),
        ("rounding to complete moves", criterion_7),
        ("hypermove expansion", criterion_8),
        ("star gap over best animal", criterion_9),
        ("reduction, satisfiable side", criterion_10),
        ("reduction audits", criterion_11),
        ("move invariants", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
