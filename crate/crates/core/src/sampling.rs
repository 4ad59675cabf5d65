//! Seeded random instances and move sequences for self-checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::{Hypermove, MoveSequence};
use crate::graph::Graph;
use crate::instance::{Instance, WaterProfile};
use crate::rational::{ratio, Rational};

/// Rational in `[0, max_num]` with denominator at most `max_den`.
pub fn random_level<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(0..=max_num * den), den)
}

/// Fraction in `[0, ½]` with denominator at most `max_den`.
pub fn random_mu<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(0..=den / 2), den)
}

/// Connected graph on `n` vertices: a random spanning tree plus each other
/// pair with probability `p`.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let (a, b) = (parent.min(order[i]), parent.max(order[i]));
        edges.push((a, b));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::with_default_names(n, edges).expect("simple graph")
}

pub fn random_instance<R: Rng>(rng: &mut R, n: usize, p: f64) -> Instance {
    let graph = random_connected_graph(rng, n, p);
    let levels = (0..n).map(|_| random_level(rng, 5, 6)).collect();
    let target = rng.gen_range(0..n);
    Instance::new(
        graph,
        WaterProfile::from_levels(levels).expect("nonnegative"),
        target,
    )
    .expect("valid")
}

/// Connected vertex set of size 2..=`max_size` grown from a random vertex,
/// or `None` when the vertex has no neighbours.
pub fn random_connected_set<R: Rng>(
    rng: &mut R,
    graph: &Graph,
    max_size: usize,
) -> Option<Vec<usize>> {
    let start = rng.gen_range(0..graph.vertex_count());
    let goal = rng.gen_range(2..=max_size.max(2));
    let mut set = vec![start];
    while set.len() < goal {
        let mut frontier: Vec<usize> = set
            .iter()
            .flat_map(|&x| graph.neighbors(x).iter().copied())
            .filter(|y| !set.contains(y))
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        let Some(&next) = frontier.choose(rng) else {
            break;
        };
        set.push(next);
    }
    (set.len() >= 2).then_some(set)
}

/// Up to `max_moves` moves mixing single edges and hypermoves, each with a
/// random fraction (complete moves only when `complete`).
pub fn random_sequence<R: Rng>(
    rng: &mut R,
    graph: &Graph,
    max_moves: usize,
    complete: bool,
) -> MoveSequence {
    let len = rng.gen_range(0..=max_moves);
    let mut moves = Vec::with_capacity(len);
    if graph.edge_count() == 0 {
        return MoveSequence::default();
    }
    while moves.len() < len {
        let set = if rng.gen_bool(0.5) {
            let &(a, b) = graph.edges().choose(rng).expect("graph has edges");
            vec![a, b]
        } else {
            match random_connected_set(rng, graph, graph.vertex_count()) {
                Some(set) => set,
                None => continue,
            }
        };
        let mu = if complete {
            ratio(1, 2)
        } else {
            random_mu(rng, 8)
        };
        moves.push(Hypermove::new(set, mu).expect("valid move"));
    }
    MoveSequence::new(moves)
}

/// Up to `max_moves` single-edge moves with random fractions.
pub fn random_edge_sequence<R: Rng>(rng: &mut R, graph: &Graph, max_moves: usize) -> MoveSequence {
    if graph.edge_count() == 0 {
        return MoveSequence::default();
    }
    let len = rng.gen_range(0..=max_moves);
    (0..len)
        .map(|_| {
            let &(a, b) = graph.edges().choose(rng).expect("graph has edges");
            Hypermove::edge(a, b, random_mu(rng, 8)).expect("valid move")
        })
        .collect()
}
