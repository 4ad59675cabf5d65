//! Closed-form values of `κ(v)` on tractable graph families, each with a
//! strategy of complete moves that realizes the value exactly.

use std::fmt;

use num_traits::Zero;

use crate::engine::{Hypermove, MoveSequence};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{half, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Edge,
    PathEnd,
    PathGeneral,
    UniversalTarget,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Edge => "edge",
            Family::PathEnd => "path_end",
            Family::PathGeneral => "path_general",
            Family::UniversalTarget => "universal_target",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverResult {
    pub kappa: Rational,
    pub strategy: MoveSequence,
    pub family: Family,
}

fn is_k2(inst: &Instance) -> bool {
    inst.vertex_count() == 2 && inst.graph.edge_count() == 1
}

fn pool_or_nothing(block: &[usize]) -> Option<Hypermove> {
    (block.len() >= 2)
        .then(|| Hypermove::pool(block.iter().copied()).expect("block has two vertices"))
}

/// `K2`: stay put if the target is at least as full, otherwise pool.
pub fn kappa_edge(inst: &Instance) -> Result<SolverResult> {
    if !is_k2(inst) {
        return Err(Error::WrongFamily("graph is not K2".into()));
    }
    let v = inst.target;
    let other = 1 - v;
    let (lv, lo) = (&inst.levels()[v], &inst.levels()[other]);
    let (kappa, strategy) = if lv >= lo {
        (lv.clone(), MoveSequence::default())
    } else {
        (
            (lv + lo) * half(),
            MoveSequence::new(vec![Hypermove::pool([0, 1])?]),
        )
    };
    Ok(SolverResult {
        kappa,
        strategy,
        family: Family::Edge,
    })
}

/// Vertices of a path listed from one end, or an error.
fn path_positions(inst: &Instance) -> Result<Vec<usize>> {
    inst.graph
        .path_order()
        .ok_or_else(|| Error::WrongFamily("graph is not a path".into()))
}

fn prefix_sums(levels: &[Rational], order: &[usize]) -> Vec<Rational> {
    let mut sums = Vec::with_capacity(order.len() + 1);
    sums.push(Rational::zero());
    for &u in order {
        let next = sums.last().expect("nonempty") + &levels[u];
        sums.push(next);
    }
    sums
}

fn count(n: usize) -> Rational {
    Rational::from_integer(n.into())
}

/// Path with the target at an end: best mean of a prefix starting at the
/// target (smallest prefix on ties), realized by pooling that prefix.
pub fn kappa_path_end(inst: &Instance) -> Result<SolverResult> {
    let mut order = path_positions(inst)?;
    let v = inst.target;
    if order.last() == Some(&v) {
        order.reverse();
    }
    if order[0] != v {
        return Err(Error::WrongFamily(
            "target is not an end of the path".into(),
        ));
    }
    let sums = prefix_sums(inst.levels(), &order);
    let mut best_k = 1;
    let mut best = sums[1].clone();
    for (k, sum) in sums.iter().enumerate().skip(2) {
        let mean = sum / count(k);
        if mean > best {
            best = mean;
            best_k = k;
        }
    }
    let strategy = pool_or_nothing(&order[..best_k]).into_iter().collect();
    Ok(SolverResult {
        kappa: best,
        strategy,
        family: Family::PathEnd,
    })
}

/// Any target on a path: maximum over the two-pool strategies "pool
/// `{l..q−1}`, then `{v..r}`" (with `l ≤ v ≤ q ≤ r`) and their mirror images
/// "pool `{q̂+1..r}`, then `{l..v}`" (with `l ≤ q̂ ≤ v ≤ r`).
pub fn kappa_path_general(inst: &Instance) -> Result<SolverResult> {
    let order = path_positions(inst)?;
    let n = order.len();
    let v = order
        .iter()
        .position(|&u| u == inst.target)
        .expect("target lies on the path");
    let s = prefix_sums(inst.levels(), &order);
    let sum = |a: usize, b: usize| &s[b + 1] - &s[a];

    // (value, family, l, q, r); first strict improvement wins
    let mut best: Option<(Rational, u8, usize, usize, usize)> = None;
    let mut consider = |value: Rational, fam: u8, l: usize, q: usize, r: usize| {
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, fam, l, q, r));
        }
    };
    for l in 0..=v {
        for q in v..n {
            for r in q..n {
                let width = count(r - v + 1);
                let tail = sum(q, r) / &width;
                let head = if q == l {
                    Rational::zero()
                } else {
                    count(q - v) / (count(q - l) * &width) * sum(l, q - 1)
                };
                consider(head + tail, 1, l, q, r);
            }
        }
    }
    for l in 0..=v {
        for q in l..=v {
            for r in v..n {
                let width = count(v - l + 1);
                let head = sum(l, q) / &width;
                let tail = if q == r {
                    Rational::zero()
                } else {
                    count(v - q) / (count(r - q) * &width) * sum(q + 1, r)
                };
                consider(head + tail, 2, l, q, r);
            }
        }
    }

    let (kappa, fam, l, q, r) = best.expect("at least one triple");
    let (first, second) = if fam == 1 {
        let first = if q > v { &order[l..q] } else { &order[..0] };
        (first, &order[v..=r])
    } else {
        let first = if q < v {
            &order[q + 1..=r]
        } else {
            &order[..0]
        };
        (first, &order[l..=v])
    };
    let strategy = pool_or_nothing(first)
        .into_iter()
        .chain(pool_or_nothing(second))
        .collect();
    Ok(SolverResult {
        kappa,
        strategy,
        family: Family::PathGeneral,
    })
}

/// Target adjacent to every other vertex: visit the fuller vertices from the
/// least full upward, averaging with each in turn.
pub fn kappa_universal_target(inst: &Instance) -> Result<SolverResult> {
    let v = inst.target;
    let n = inst.vertex_count();
    if inst.graph.degree(v) + 1 != n {
        return Err(Error::WrongFamily(
            "target is not adjacent to every vertex".into(),
        ));
    }
    let levels = inst.levels();
    // strictly fuller vertices, by level descending then id; equal levels
    // contribute nothing
    let mut above: Vec<usize> = (0..n).filter(|&u| levels[u] > levels[v]).collect();
    above.sort_by(|&a, &b| levels[b].cmp(&levels[a]).then(a.cmp(&b)));

    let mut kappa = levels[v].clone();
    let mut moves = Vec::with_capacity(above.len());
    for &u in above.iter().rev() {
        kappa = (kappa + &levels[u]) * half();
        moves.push(Hypermove::pool([v, u])?);
    }
    Ok(SolverResult {
        kappa,
        strategy: MoveSequence::new(moves),
        family: Family::UniversalTarget,
    })
}

/// Dispatches to the first solver whose family matches, or returns
/// [`Error::WrongFamily`].
pub fn solve_auto(inst: &Instance) -> Result<SolverResult> {
    if is_k2(inst) {
        return kappa_edge(inst);
    }
    if inst.graph.path_order().is_some() {
        return match kappa_path_end(inst) {
            Ok(res) => Ok(res),
            Err(_) => kappa_path_general(inst),
        };
    }
    if inst.graph.degree(inst.target) + 1 == inst.vertex_count() {
        return kappa_universal_target(inst);
    }
    Err(Error::WrongFamily("no tractable family matches".into()))
}
