//! Greedy lattice animals and the improving steps built on them.
//!
//! A lattice animal is a connected vertex set containing the target; pooling
//! it lifts the target to its mean, so the best animal is a one-move lower
//! bound on `κ(v)`. The planner repeatedly prepares the profile (raising
//! bottlenecks, enlarging the animal) before the final pool.

use std::cell::RefCell;
use std::cmp::Ordering;

use num_traits::Zero;

use crate::engine::{apply_in_place, Hypermove, MoveSequence};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::Instance;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeAnimal {
    pub vertices: Vec<usize>,
    pub value: Rational,
}

impl LatticeAnimal {
    fn from_set(vertices: Vec<usize>, levels: &[Rational]) -> Self {
        let value = mean(levels, &vertices);
        LatticeAnimal { vertices, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlaMode {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicCaps {
    /// Largest vertex count for exhaustive animal search.
    pub exhaustive_vertices: usize,
    /// Largest set pooled to prepare a bottleneck or boundary vertex.
    pub prep_size: usize,
    pub max_iterations: usize,
    /// Try every ordered selection of the best few candidates per step.
    pub order_search: bool,
}

impl Default for HeuristicCaps {
    fn default() -> Self {
        HeuristicCaps {
            exhaustive_vertices: 20,
            prep_size: 6,
            max_iterations: 1000,
            order_search: false,
        }
    }
}

/// Number of top candidates permuted when order search is enabled.
pub const ORDER_SEARCH_WIDTH: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicPlan {
    pub sequence: MoveSequence,
    pub achieved: Rational,
    pub final_animal: LatticeAnimal,
}

fn sum(levels: &[Rational], set: &[usize]) -> Rational {
    set.iter()
        .fold(Rational::zero(), |acc, &u| acc + &levels[u])
}

fn mean(levels: &[Rational], set: &[usize]) -> Rational {
    sum(levels, set) / Rational::from_integer(set.len().into())
}

/// Higher value first, then smaller set, then lexicographically smaller.
fn animal_order(a: &LatticeAnimal, b: &LatticeAnimal) -> Ordering {
    b.value
        .cmp(&a.value)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then(a.vertices.cmp(&b.vertices))
}

/// Best animal containing the connected set `seed`, by exhaustive
/// enumeration with a mean bound.
fn best_animal_exhaustive(graph: &Graph, levels: &[Rational], seed: &[usize]) -> LatticeAnimal {
    let mut seed = seed.to_vec();
    seed.sort_unstable();
    let best = RefCell::new(LatticeAnimal::from_set(seed.clone(), levels));
    graph.for_each_connected_superset(
        &seed,
        None,
        graph.vertex_count(),
        |members, blocked| {
            // a superset's mean never exceeds max(current mean, best free level)
            let free_max = (0..levels.len())
                .filter(|&x| !blocked[x])
                .map(|x| &levels[x])
                .max();
            let own = mean(levels, members);
            let bound = match free_max {
                Some(m) if *m > own => m.clone(),
                _ => own,
            };
            bound >= best.borrow().value
        },
        |set| {
            let cand = LatticeAnimal::from_set(set.to_vec(), levels);
            if animal_order(&cand, &best.borrow()) == Ordering::Less {
                *best.borrow_mut() = cand;
            }
        },
    );
    best.into_inner()
}

/// Local search from `seed`: grow greedily through the whole component and
/// keep the best intermediate set, then drop below-average non-cut vertices;
/// repeat while the mean improves.
fn best_animal_greedy(graph: &Graph, levels: &[Rational], seed: &[usize]) -> LatticeAnimal {
    let mut seed = seed.to_vec();
    seed.sort_unstable();
    let mut current = LatticeAnimal::from_set(seed.clone(), levels);
    loop {
        let mut improved = false;

        let mut grown = current.vertices.clone();
        let mut total = sum(levels, &grown);
        loop {
            let next = grown
                .iter()
                .flat_map(|&x| graph.neighbors(x).iter().copied())
                .filter(|y| !grown.contains(y))
                .max_by(|&a, &b| levels[a].cmp(&levels[b]).then(b.cmp(&a)));
            let Some(y) = next else { break };
            grown.push(y);
            total += &levels[y];
            let value = &total / Rational::from_integer(grown.len().into());
            if value > current.value {
                let mut vertices = grown.clone();
                vertices.sort_unstable();
                current = LatticeAnimal { vertices, value };
                improved = true;
            }
        }

        loop {
            let drop = current
                .vertices
                .iter()
                .copied()
                .filter(|u| !seed.contains(u) && levels[*u] < current.value)
                .filter(|&u| !graph.is_cut_vertex_of(&current.vertices, u))
                .min_by(|&a, &b| levels[a].cmp(&levels[b]).then(a.cmp(&b)));
            let Some(u) = drop else { break };
            current.vertices.retain(|&x| x != u);
            current.value = mean(levels, &current.vertices);
            improved = true;
        }

        if !improved {
            return current;
        }
    }
}

fn best_animal(graph: &Graph, levels: &[Rational], seed: &[usize], mode: GlaMode) -> LatticeAnimal {
    match mode {
        GlaMode::Exhaustive => best_animal_exhaustive(graph, levels, seed),
        GlaMode::Greedy => best_animal_greedy(graph, levels, seed),
    }
}

/// Animal of maximal mean containing the target. Exhaustive mode is exact
/// (ties: fewest vertices, then lexicographic); greedy mode is a lower bound.
pub fn gla_value(inst: &Instance, mode: GlaMode, caps: &HeuristicCaps) -> Result<LatticeAnimal> {
    if mode == GlaMode::Exhaustive && inst.vertex_count() > caps.exhaustive_vertices {
        return Err(Error::CapExceeded(format!(
            "{} vertices exceed the exhaustive cap of {}",
            inst.vertex_count(),
            caps.exhaustive_vertices
        )));
    }
    Ok(best_animal(
        &inst.graph,
        inst.levels(),
        &[inst.target],
        mode,
    ))
}

/// Non-target members of `animal` below its mean, ascending.
pub fn find_bottlenecks(inst: &Instance, animal: &LatticeAnimal) -> Vec<usize> {
    let levels = inst.levels();
    animal
        .vertices
        .iter()
        .copied()
        .filter(|&u| u != inst.target && levels[u] < animal.value)
        .collect()
}

/// Every pool on a connected set `C_u ∋ u` (at most `cap` vertices) that
/// raises the mean of `animal`, with the exact gain in that mean; best gain
/// first, then smaller set, then lexicographic.
fn bottleneck_options(
    inst: &Instance,
    animal: &LatticeAnimal,
    u: usize,
    cap: usize,
) -> Vec<(Rational, Vec<usize>)> {
    let levels = inst.levels();
    let in_animal: Vec<bool> = (0..levels.len())
        .map(|x| animal.vertices.contains(&x))
        .collect();
    let size = Rational::from_integer(animal.vertices.len().into());
    let mut options = Vec::new();
    inst.graph.for_each_connected_superset(
        &[u],
        None,
        cap,
        |_, _| true,
        |set| {
            if set.len() < 2 {
                return;
            }
            let avg = mean(levels, set);
            let delta = set
                .iter()
                .filter(|&&x| in_animal[x])
                .fold(Rational::zero(), |acc, &x| acc + &avg - &levels[x]);
            if delta > Rational::zero() {
                options.push((delta / &size, set.to_vec()));
            }
        },
    );
    options.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });
    options
}

/// Best pool on a connected set `C_u ∋ u` (at most `cap` vertices) for the
/// mean of `animal`; returns the move and the exact gain in that mean when
/// positive.
pub fn improve_bottleneck(
    inst: &Instance,
    animal: &LatticeAnimal,
    u: usize,
    cap: usize,
) -> Option<(Hypermove, Rational)> {
    let (gain, set) = bottleneck_options(inst, animal, u, cap)
        .into_iter()
        .next()?;
    Some((Hypermove::pool(set).expect("at least two vertices"), gain))
}

/// Boundary vertex preparation: pool a connected `C_u ∋ u` outside the
/// animal, then look for an animal through the animal and `u` that beats the
/// current mean. Returns the best such preparation and animal.
pub fn enlarge(
    inst: &Instance,
    animal: &LatticeAnimal,
    cap: usize,
    mode: GlaMode,
) -> Option<(Vec<Hypermove>, LatticeAnimal)> {
    let graph = &inst.graph;
    let n = inst.vertex_count();
    let in_animal: Vec<bool> = (0..n).map(|x| animal.vertices.contains(&x)).collect();
    let outside: Vec<bool> = in_animal.iter().map(|b| !b).collect();
    let mut boundary: Vec<usize> = animal
        .vertices
        .iter()
        .flat_map(|&x| graph.neighbors(x).iter().copied())
        .filter(|&y| !in_animal[y])
        .collect();
    boundary.sort_unstable();
    boundary.dedup();

    let mut best: Option<(LatticeAnimal, Vec<usize>)> = None;
    for u in boundary {
        let mut seed = animal.vertices.clone();
        seed.push(u);
        graph.for_each_connected_superset(
            &[u],
            Some(&outside),
            cap,
            |_, _| true,
            |set| {
                if set.len() < 2 {
                    return;
                }
                let mut levels = inst.levels().to_vec();
                let mv = Hypermove::pool(set.iter().copied()).expect("at least two vertices");
                apply_in_place(&mut levels, &mv);
                let cand = best_animal(graph, &levels, &seed, mode);
                if cand.value <= animal.value {
                    return;
                }
                let better = match &best {
                    None => true,
                    Some((b, s)) => {
                        cand.value > b.value || (cand.value == b.value && set < s.as_slice())
                    }
                };
                if better {
                    best = Some((cand, set.to_vec()));
                }
            },
        );
    }
    best.map(|(cand, set)| {
        (
            vec![Hypermove::pool(set).expect("at least two vertices")],
            cand,
        )
    })
}

/// Candidate preparations for the current profile and their exact effect on
/// the best animal value, best first.
fn candidates(
    inst: &Instance,
    animal: &LatticeAnimal,
    mode: GlaMode,
    caps: &HeuristicCaps,
) -> Vec<(Rational, Vec<Hypermove>)> {
    let mut improvable = find_bottlenecks(inst, animal);
    if *inst.target_level() < animal.value {
        improvable.insert(0, inst.target);
    }
    let mut preps: Vec<Vec<Hypermove>> = improvable
        .into_iter()
        .flat_map(|u| bottleneck_options(inst, animal, u, caps.prep_size))
        .map(|(_, set)| vec![Hypermove::pool(set).expect("at least two vertices")])
        .collect();
    preps.extend(enlarge(inst, animal, caps.prep_size, mode).map(|(moves, _)| moves));
    preps.sort();
    preps.dedup();

    let mut scored: Vec<(Rational, Vec<Hypermove>)> = preps
        .into_iter()
        .map(|moves| (value_after(inst, &moves, mode), moves))
        .collect();
    scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored
}

fn value_after(inst: &Instance, moves: &[Hypermove], mode: GlaMode) -> Rational {
    let mut levels = inst.levels().to_vec();
    for mv in moves {
        apply_in_place(&mut levels, mv);
    }
    best_animal(&inst.graph, &levels, &[inst.target], mode).value
}

/// Best ordered selection of the given preparations (by resulting animal
/// value, then fewer moves, then lexicographic).
fn best_ordering(
    inst: &Instance,
    preps: &[Vec<Hypermove>],
    mode: GlaMode,
) -> Option<(Rational, Vec<Hypermove>)> {
    fn extend(
        inst: &Instance,
        preps: &[Vec<Hypermove>],
        mode: GlaMode,
        used: &mut Vec<bool>,
        chosen: &mut Vec<Hypermove>,
        best: &mut Option<(Rational, Vec<Hypermove>)>,
    ) {
        if !chosen.is_empty() {
            let value = value_after(inst, chosen, mode);
            let better = match best {
                None => true,
                Some((v, m)) => {
                    value > *v || (value == *v && (chosen.len(), &*chosen) < (m.len(), &*m))
                }
            };
            if better {
                *best = Some((value, chosen.clone()));
            }
        }
        for i in 0..preps.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mark = chosen.len();
            chosen.extend(preps[i].iter().cloned());
            extend(inst, preps, mode, used, chosen, best);
            chosen.truncate(mark);
            used[i] = false;
        }
    }
    let mut best = None;
    extend(
        inst,
        preps,
        mode,
        &mut vec![false; preps.len()],
        &mut Vec::new(),
        &mut best,
    );
    best
}

/// Improve the profile step by step (largest exact gain first) until no
/// candidate raises the best animal value, then pool the final animal.
pub fn plan_heuristic(inst: &Instance, caps: &HeuristicCaps) -> Result<HeuristicPlan> {
    let mode = if inst.vertex_count() <= caps.exhaustive_vertices {
        GlaMode::Exhaustive
    } else {
        GlaMode::Greedy
    };
    let mut current = inst.clone();
    let mut moves: Vec<Hypermove> = Vec::new();
    let mut animal = best_animal(&current.graph, current.levels(), &[current.target], mode);

    for _ in 0..caps.max_iterations {
        let scored = candidates(&current, &animal, mode, caps);
        let step = if caps.order_search && scored.len() > 1 {
            let top: Vec<Vec<Hypermove>> = scored
                .iter()
                .take(ORDER_SEARCH_WIDTH)
                .map(|(_, m)| m.clone())
                .collect();
            best_ordering(&current, &top, mode)
        } else {
            scored.into_iter().next()
        };
        let Some((value, step)) = step else { break };
        if value <= animal.value {
            break;
        }
        let mut levels = current.levels().to_vec();
        for mv in &step {
            apply_in_place(&mut levels, mv);
        }
        current.profile.levels = levels;
        moves.extend(step);
        animal = best_animal(&current.graph, current.levels(), &[current.target], mode);
        debug_assert_eq!(animal.value, value);
    }

    if animal.vertices.len() >= 2 {
        moves.push(Hypermove::pool(animal.vertices.iter().copied())?);
    }
    let sequence = MoveSequence::new(moves);
    let achieved = crate::engine::target_outcome(inst, &sequence)?;
    Ok(HeuristicPlan {
        sequence,
        achieved,
        final_animal: animal,
    })
}
