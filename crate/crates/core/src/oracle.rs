//! Exhaustive bounded-depth search over sequences of complete moves.
//!
//! Every certificate is a feasible strategy, so the value is a lower bound on
//! `κ(v)` that is non-decreasing in the depth. Among optimal certificates the
//! search returns the shortest, then the lexicographically least (comparing
//! moves by their sorted vertex lists).

use std::fmt;
use std::num::NonZeroUsize;

use lru::LruCache;
use num_traits::Zero;
use rayon::prelude::*;

use crate::engine::{apply_set_in_place, Hypermove, MoveSequence};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    /// Complete hypermoves on every connected set of at least two vertices.
    Hypermove,
    /// Complete moves on single edges.
    SingleEdge,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Hypermove => "hypermove",
            SearchMode::SingleEdge => "single_edge",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_vertices: usize,
    pub max_depth: usize,
    /// Memo entries kept per first-level branch (least recently used evicted).
    pub memo_capacity: usize,
    pub workers: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_vertices: 10,
            max_depth: 5,
            memo_capacity: 1 << 16,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub pruned: u64,
    pub memo_hits: u64,
}

impl SearchStats {
    fn absorb(&mut self, other: SearchStats) {
        self.nodes += other.nodes;
        self.pruned += other.pruned;
        self.memo_hits += other.memo_hits;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub value: Rational,
    pub certificate: MoveSequence,
    pub depth: usize,
    pub mode: SearchMode,
    pub stats: SearchStats,
}

fn check_caps(inst: &Instance, depth: usize, config: &OracleConfig) -> Result<()> {
    if inst.vertex_count() > config.max_vertices {
        return Err(Error::CapExceeded(format!(
            "{} vertices exceed the cap of {}",
            inst.vertex_count(),
            config.max_vertices
        )));
    }
    if depth > config.max_depth {
        return Err(Error::CapExceeded(format!(
            "depth {depth} exceeds the cap of {}",
            config.max_depth
        )));
    }
    Ok(())
}

fn candidate_sets(inst: &Instance, mode: SearchMode) -> Vec<Vec<usize>> {
    match mode {
        SearchMode::Hypermove => inst.graph.connected_subsets(2, inst.vertex_count()),
        SearchMode::SingleEdge => inst
            .graph
            .edges()
            .iter()
            .map(|&(a, b)| vec![a, b])
            .collect(),
    }
}

fn is_level(levels: &[Rational], set: &[usize]) -> bool {
    set.iter().all(|&u| levels[u] == levels[set[0]])
}

fn max_level(levels: &[Rational]) -> &Rational {
    levels.iter().max().expect("nonempty profile")
}

/// Best certificate so far: candidate indices plus the value they reach.
#[derive(Clone)]
struct Incumbent {
    value: Rational,
    moves: Vec<usize>,
}

impl Incumbent {
    fn beaten_by(&self, value: &Rational, len: usize) -> bool {
        *value > self.value || (*value == self.value && len < self.moves.len())
    }
}

struct Search<'a> {
    candidates: &'a [Vec<usize>],
    target: usize,
    depth: usize,
    mu: Rational,
    best: Incumbent,
    memo: LruCache<Vec<Rational>, usize>,
    stats: SearchStats,
}

impl Search<'_> {
    fn dfs(&mut self, levels: &mut Vec<Rational>, path: &mut Vec<usize>) {
        self.stats.nodes += 1;
        if self.best.beaten_by(&levels[self.target], path.len()) {
            self.best = Incumbent {
                value: levels[self.target].clone(),
                moves: path.clone(),
            };
        }
        let remaining = self.depth - path.len();
        if remaining == 0 {
            return;
        }
        // no move can raise any level above the current maximum
        let max = max_level(levels);
        if *max < self.best.value
            || (*max == self.best.value && path.len() + 1 >= self.best.moves.len())
        {
            self.stats.pruned += 1;
            return;
        }
        if self
            .memo
            .get(levels.as_slice())
            .is_some_and(|&r| r >= remaining)
        {
            self.stats.memo_hits += 1;
            return;
        }
        for (i, set) in self.candidates.iter().enumerate() {
            if is_level(levels, set) {
                continue;
            }
            let saved: Vec<Rational> = set.iter().map(|&u| levels[u].clone()).collect();
            apply_set_in_place(levels, set, &self.mu);
            path.push(i);
            self.dfs(levels, path);
            path.pop();
            for (&u, old) in set.iter().zip(saved) {
                levels[u] = old;
            }
        }
        self.memo.put(levels.clone(), remaining);
    }
}

/// Best target level over all sequences of at most `depth` complete moves of
/// the given kind.
pub fn kappa_oracle(
    inst: &Instance,
    depth: usize,
    mode: SearchMode,
    config: &OracleConfig,
) -> Result<OracleResult> {
    check_caps(inst, depth, config)?;
    let candidates = candidate_sets(inst, mode);
    let mu = crate::rational::half();
    let root = inst.levels().to_vec();
    let target = inst.target;
    let mut stats = SearchStats {
        nodes: 1,
        ..SearchStats::default()
    };

    // the empty sequence and the best single move seed every branch
    let mut seed = Incumbent {
        value: root[target].clone(),
        moves: Vec::new(),
    };
    let mut branches = Vec::new();
    if depth >= 1 {
        for (i, set) in candidates.iter().enumerate() {
            if is_level(&root, set) {
                continue;
            }
            let mut levels = root.clone();
            apply_set_in_place(&mut levels, set, &mu);
            if seed.beaten_by(&levels[target], 1) {
                seed = Incumbent {
                    value: levels[target].clone(),
                    moves: vec![i],
                };
            }
            branches.push((i, levels));
        }
    }

    let capacity = NonZeroUsize::new(config.memo_capacity.max(1)).expect("positive");
    let run_branch = |(i, levels): &(usize, Vec<Rational>)| {
        let mut search = Search {
            candidates: &candidates,
            target,
            depth,
            mu: mu.clone(),
            best: seed.clone(),
            memo: LruCache::new(capacity),
            stats: SearchStats::default(),
        };
        search.dfs(&mut levels.clone(), &mut vec![*i]);
        (search.best, search.stats)
    };
    let outcomes: Vec<(Incumbent, SearchStats)> = if depth >= 2 && config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?;
        pool.install(|| branches.par_iter().map(run_branch).collect())
    } else if depth >= 2 {
        branches.iter().map(run_branch).collect()
    } else {
        stats.nodes += branches.len() as u64;
        Vec::new()
    };

    let mut best = seed;
    for (cand, branch_stats) in outcomes {
        stats.absorb(branch_stats);
        if cand.precedes(&best) {
            best = cand;
        }
    }
    let certificate = best
        .moves
        .iter()
        .map(|&i| Hypermove::pool(candidates[i].iter().copied()))
        .collect::<Result<MoveSequence>>()?;
    Ok(OracleResult {
        value: best.value,
        certificate,
        depth,
        mode,
        stats,
    })
}

impl Incumbent {
    /// Total order: higher value, then fewer moves, then lexicographically
    /// smaller candidate indices (candidates are sorted, so this is the
    /// lexicographic order of the moves themselves).
    fn precedes(&self, other: &Incumbent) -> bool {
        self.value > other.value
            || (self.value == other.value
                && (self.moves.len(), &self.moves) < (other.moves.len(), &other.moves))
    }
}

/// Best target level over sequences of at most `depth` single-edge moves
/// whose fractions are drawn from `grid`.
pub fn mu_grid_probe(
    inst: &Instance,
    depth: usize,
    grid: &[Rational],
    config: &OracleConfig,
) -> Result<Rational> {
    check_caps(inst, depth, config)?;
    for mu in grid {
        Hypermove::edge(0, 1, mu.clone())?;
    }
    let mut grid: Vec<Rational> = grid.iter().filter(|mu| !mu.is_zero()).cloned().collect();
    grid.sort();
    grid.dedup();
    let edges: Vec<Vec<usize>> = candidate_sets(inst, SearchMode::SingleEdge);

    struct Probe<'a> {
        edges: &'a [Vec<usize>],
        grid: &'a [Rational],
        target: usize,
        depth: usize,
        best: Rational,
        memo: LruCache<Vec<Rational>, usize>,
    }
    impl Probe<'_> {
        fn dfs(&mut self, levels: &mut Vec<Rational>, used: usize) {
            if levels[self.target] > self.best {
                self.best = levels[self.target].clone();
            }
            let remaining = self.depth - used;
            if remaining == 0 || *max_level(levels) <= self.best {
                return;
            }
            if self
                .memo
                .get(levels.as_slice())
                .is_some_and(|&r| r >= remaining)
            {
                return;
            }
            for set in self.edges {
                if is_level(levels, set) {
                    continue;
                }
                let saved: Vec<Rational> = set.iter().map(|&u| levels[u].clone()).collect();
                for mu in self.grid {
                    apply_set_in_place(levels, set, mu);
                    self.dfs(levels, used + 1);
                    for (&u, old) in set.iter().zip(&saved) {
                        levels[u] = old.clone();
                    }
                }
            }
            self.memo.put(levels.clone(), remaining);
        }
    }

    let mut probe = Probe {
        edges: &edges,
        grid: &grid,
        target: inst.target,
        depth,
        best: inst.target_level().clone(),
        memo: LruCache::new(NonZeroUsize::new(config.memo_capacity.max(1)).expect("positive")),
    };
    probe.dfs(&mut inst.levels().to_vec(), 0);
    Ok(probe.best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::target_outcome;
    use crate::graph::Graph;
    use crate::instance::{build_path, WaterProfile};
    use crate::rational::{half, int, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn check_certificate(inst: &Instance, res: &OracleResult) {
        assert_eq!(target_outcome(inst, &res.certificate).unwrap(), res.value);
        assert!(res.certificate.len() <= res.depth);
        assert!(&res.value <= inst.profile.max_level().unwrap());
    }

    #[test]
    fn three_path_middle_depth_one() {
        let inst = build_path(vec![int(0), int(0), int(1)], 1).unwrap();
        let res = kappa_oracle(&inst, 1, SearchMode::Hypermove, &cfg()).unwrap();
        assert_eq!(res.value, half());
        assert_eq!(
            res.certificate.moves,
            vec![Hypermove::pool([1, 2]).unwrap()]
        );
        check_certificate(&inst, &res);
    }

    #[test]
    fn no_finite_optimum_with_single_edges() {
        let inst = build_path(vec![int(0), half(), int(1)], 0).unwrap();
        let hyper = kappa_oracle(&inst, 1, SearchMode::Hypermove, &cfg()).unwrap();
        assert_eq!(hyper.value, half());
        let mut last = int(0);
        for d in 1..=5 {
            let res = kappa_oracle(&inst, d, SearchMode::SingleEdge, &cfg()).unwrap();
            check_certificate(&inst, &res);
            assert!(res.value > last && res.value < half(), "depth {d}");
            last = res.value;
        }
    }

    #[test]
    fn interior_path_fixture() {
        let inst = build_path(vec![ratio(3, 10), ratio(1, 5), ratio(1, 10), int(1)], 2).unwrap();
        let res = kappa_oracle(&inst, 2, SearchMode::Hypermove, &cfg()).unwrap();
        assert_eq!(res.value, ratio(3, 5));
        assert_eq!(
            res.certificate.moves,
            vec![
                Hypermove::pool([0, 1, 2]).unwrap(),
                Hypermove::pool([2, 3]).unwrap()
            ]
        );
    }

    #[test]
    fn depth_zero_is_initial_level() {
        let inst = build_path(vec![int(2), int(5)], 0).unwrap();
        let res = kappa_oracle(&inst, 0, SearchMode::Hypermove, &cfg()).unwrap();
        assert_eq!((res.value, res.certificate.len()), (int(2), 0));
    }

    #[test]
    fn caps_are_enforced() {
        let inst = build_path(vec![int(0); 11], 0).unwrap();
        assert!(matches!(
            kappa_oracle(&inst, 1, SearchMode::Hypermove, &cfg()),
            Err(Error::CapExceeded(_))
        ));
        let small = build_path(vec![int(0); 3], 0).unwrap();
        assert!(matches!(
            kappa_oracle(&small, 6, SearchMode::Hypermove, &cfg()),
            Err(Error::CapExceeded(_))
        ));
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
        loop {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            let g = Graph::with_default_names(n, edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let levels = (0..n)
                .map(|_| ratio(rng.gen_range(0..10), rng.gen_range(1..4)))
                .collect();
            let t = rng.gen_range(0..n);
            return Instance::new(g, WaterProfile::from_levels(levels).unwrap(), t).unwrap();
        }
    }

    #[test]
    fn monotone_in_depth_and_deterministic_across_workers() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..15 {
            let n = rng.gen_range(3..=5);
            let inst = random_instance(&mut rng, n);
            let mut last = inst.target_level().clone();
            for d in 1..=3 {
                let one = kappa_oracle(&inst, d, SearchMode::Hypermove, &cfg()).unwrap();
                let many = kappa_oracle(
                    &inst,
                    d,
                    SearchMode::Hypermove,
                    &OracleConfig {
                        workers: 4,
                        ..cfg()
                    },
                )
                .unwrap();
                assert_eq!(one, many);
                check_certificate(&inst, &one);
                assert!(one.value >= last);
                last = one.value;
            }
        }
    }

    #[test]
    fn memo_does_not_change_results() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 5);
            let a = kappa_oracle(&inst, 3, SearchMode::Hypermove, &cfg()).unwrap();
            let b = kappa_oracle(
                &inst,
                3,
                SearchMode::Hypermove,
                &OracleConfig {
                    memo_capacity: 1,
                    ..cfg()
                },
            )
            .unwrap();
            assert_eq!((a.value, a.certificate), (b.value, b.certificate));
        }
    }

    #[test]
    fn certificate_is_shortest_then_least() {
        // exhaustive reference over all sequences of at most two moves
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 4);
            let sets = inst.graph.connected_subsets(2, 4);
            let mut all: Vec<Vec<usize>> = vec![vec![]];
            for i in 0..sets.len() {
                all.push(vec![i]);
                for j in 0..sets.len() {
                    all.push(vec![i, j]);
                }
            }
            let outcome = |seq: &Vec<usize>| {
                let ms: MoveSequence = seq
                    .iter()
                    .map(|&i| Hypermove::pool(sets[i].clone()).unwrap())
                    .collect();
                target_outcome(&inst, &ms).unwrap()
            };
            let best_value = all.iter().map(outcome).max().unwrap();
            let expected = all
                .iter()
                .filter(|s| outcome(s) == best_value)
                .min_by(|a, b| (a.len(), *a).cmp(&(b.len(), *b)))
                .unwrap();
            let res = kappa_oracle(&inst, 2, SearchMode::Hypermove, &cfg()).unwrap();
            assert_eq!(res.value, best_value);
            let got: Vec<Vec<usize>> = res
                .certificate
                .iter()
                .map(|m| m.vertices().to_vec())
                .collect();
            let want: Vec<Vec<usize>> = expected.iter().map(|&i| sets[i].clone()).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn grid_probe_examples() {
        let inst = build_path(vec![int(0), half(), int(1)], 0).unwrap();
        let edge3 = kappa_oracle(&inst, 3, SearchMode::SingleEdge, &cfg()).unwrap();
        assert_eq!(
            mu_grid_probe(&inst, 3, &[half()], &cfg()).unwrap(),
            edge3.value
        );
        assert_eq!(mu_grid_probe(&inst, 3, &[int(0)], &cfg()).unwrap(), int(0));
        assert!(mu_grid_probe(&inst, 3, &[ratio(1, 4), half()], &cfg()).unwrap() <= edge3.value);
        assert!(mu_grid_probe(&inst, 1, &[int(1)], &cfg()).is_err());
    }
}
