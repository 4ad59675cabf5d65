//! Exact execution of moves and hypermoves.
//!
//! A hypermove on a connected set `A` with fraction `μ ∈ [0, ½]` sends every
//! `u ∈ A` to `(1 − 2μ)·η(u) + 2μ·avg_A(η)`. For `|A| = 2` this is exactly the
//! single-pipe update `x ← x + μ(y − x)`, so single moves are hypermoves on
//! an edge.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::{Instance, WaterProfile};
use crate::rational::{format_rational, half, parse_rational, Rational};

/// Opening all pipes inside a connected vertex set for fraction `mu`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypermove {
    vertices: Vec<usize>,
    mu: Rational,
}

impl Hypermove {
    /// `vertices` is treated as a set (sorted, deduplicated); needs at least
    /// two distinct vertices and `0 ≤ mu ≤ ½`. Connectivity is checked
    /// against a graph at execution time.
    pub fn new(vertices: impl IntoIterator<Item = usize>, mu: Rational) -> Result<Self> {
        let mut vertices: Vec<usize> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.len() < 2 {
            return Err(Error::InvalidMove(
                "a move needs at least two vertices".into(),
            ));
        }
        if mu.is_negative() || mu > half() {
            return Err(Error::InvalidMove(format!(
                "mu = {} outside [0, 1/2]",
                format_rational(&mu)
            )));
        }
        Ok(Hypermove { vertices, mu })
    }

    /// Complete (`μ = ½`) hypermove.
    pub fn pool(vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        Hypermove::new(vertices, half())
    }

    /// Single-pipe move on `⟨a, b⟩`.
    pub fn edge(a: usize, b: usize, mu: Rational) -> Result<Self> {
        Hypermove::new([a, b], mu)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn is_complete(&self) -> bool {
        self.mu == half()
    }

    pub fn is_single_edge(&self) -> bool {
        self.vertices.len() == 2
    }

    pub fn with_mu(&self, mu: Rational) -> Result<Self> {
        Hypermove::new(self.vertices.iter().copied(), mu)
    }

    /// Checks that the move is executable on `graph`.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if let Some(&bad) = self.vertices.iter().find(|&&u| u >= graph.vertex_count()) {
            return Err(Error::InvalidMove(format!(
                "vertex {bad} is not in the graph"
            )));
        }
        if self.is_single_edge() {
            let (a, b) = (self.vertices[0], self.vertices[1]);
            if !graph.has_edge(a, b) {
                return Err(Error::InvalidMove(format!(
                    "no pipe between {} and {}",
                    graph.name(a),
                    graph.name(b)
                )));
            }
        } else if !graph.is_connected_subset(&self.vertices) {
            return Err(Error::InvalidMove(format!(
                "vertex set {{{}}} is not connected",
                names_of(graph, &self.vertices).join(",")
            )));
        }
        Ok(())
    }
}

fn names_of<'a>(graph: &'a Graph, set: &[usize]) -> Vec<&'a str> {
    set.iter().map(|&u| graph.name(u)).collect()
}

/// Ordered list of hypermoves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveSequence {
    pub moves: Vec<Hypermove>,
}

impl MoveSequence {
    pub fn new(moves: Vec<Hypermove>) -> Self {
        MoveSequence { moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn reversed(&self) -> MoveSequence {
        MoveSequence {
            moves: self.moves.iter().rev().cloned().collect(),
        }
    }

    pub fn validate(&self, graph: &Graph) -> Result<()> {
        self.moves.iter().try_for_each(|m| m.validate(graph))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hypermove> {
        self.moves.iter()
    }
}

impl FromIterator<Hypermove> for MoveSequence {
    fn from_iter<I: IntoIterator<Item = Hypermove>>(iter: I) -> Self {
        MoveSequence {
            moves: iter.into_iter().collect(),
        }
    }
}

/// Terminal profile of a sharing process: convex weights, one per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SadProfile {
    pub weights: Vec<Rational>,
}

impl SadProfile {
    /// Σ_u weights[u]·levels[u].
    pub fn combine(&self, levels: &[Rational]) -> Rational {
        self.weights
            .iter()
            .zip(levels)
            .fold(Rational::zero(), |acc, (w, x)| acc + w * x)
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |acc, w| acc + w)
    }
}

/// Profiles before and after each executed move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub profiles: Vec<WaterProfile>,
}

impl Trace {
    pub fn final_profile(&self) -> &WaterProfile {
        self.profiles
            .last()
            .expect("a trace holds the initial profile")
    }

    pub fn levels_at(&self, v: usize) -> Vec<Rational> {
        self.profiles.iter().map(|p| p.levels[v].clone()).collect()
    }
}

/// Applies a (validated) hypermove in place.
pub(crate) fn apply_in_place(levels: &mut [Rational], mv: &Hypermove) {
    apply_set_in_place(levels, &mv.vertices, &mv.mu);
}

pub(crate) fn apply_set_in_place(levels: &mut [Rational], set: &[usize], mu: &Rational) {
    if mu.is_zero() {
        return;
    }
    let sum = set
        .iter()
        .fold(Rational::zero(), |acc, &u| acc + &levels[u]);
    let avg = sum / Rational::from_integer(set.len().into());
    if *mu == half() {
        for &u in set {
            levels[u] = avg.clone();
        }
    } else {
        let pull = mu * Rational::from_integer(2.into());
        let keep = Rational::one() - &pull;
        let shift = &pull * &avg;
        for &u in set {
            levels[u] = &keep * &levels[u] + &shift;
        }
    }
}

pub(crate) fn run_in_place(levels: &mut [Rational], seq: &MoveSequence) {
    for mv in &seq.moves {
        apply_in_place(levels, mv);
    }
}

/// Single-pipe move on `⟨x, y⟩`.
pub fn apply_move(
    graph: &Graph,
    profile: &WaterProfile,
    edge: (usize, usize),
    mu: &Rational,
) -> Result<WaterProfile> {
    let (x, y) = edge;
    if x >= graph.vertex_count() || y >= graph.vertex_count() || !graph.has_edge(x, y) {
        return Err(Error::InvalidMove(format!("({x}, {y}) is not an edge")));
    }
    if mu.is_negative() || *mu > half() {
        return Err(Error::InvalidMove(format!(
            "mu = {} outside [0, 1/2]",
            format_rational(mu)
        )));
    }
    let mut out = profile.clone();
    let (ex, ey) = (profile.levels[x].clone(), profile.levels[y].clone());
    out.levels[x] = &ex + mu * (&ey - &ex);
    out.levels[y] = &ey + mu * (&ex - &ey);
    Ok(out)
}

pub fn apply_hypermove(
    graph: &Graph,
    profile: &WaterProfile,
    mv: &Hypermove,
) -> Result<WaterProfile> {
    mv.validate(graph)?;
    if profile.len() != graph.vertex_count() {
        return Err(Error::Validation("profile does not match graph".into()));
    }
    let mut out = profile.clone();
    apply_in_place(&mut out.levels, mv);
    Ok(out)
}

/// Executes `seq` and records every intermediate profile.
pub fn run_sequence(inst: &Instance, seq: &MoveSequence) -> Result<Trace> {
    seq.validate(&inst.graph)?;
    let mut profiles = Vec::with_capacity(seq.len() + 1);
    let mut current = inst.profile.clone();
    profiles.push(current.clone());
    for mv in &seq.moves {
        apply_in_place(&mut current.levels, mv);
        profiles.push(current.clone());
    }
    Ok(Trace { profiles })
}

/// Final profile only.
pub fn final_levels(inst: &Instance, seq: &MoveSequence) -> Result<Vec<Rational>> {
    seq.validate(&inst.graph)?;
    let mut levels = inst.profile.levels.clone();
    run_in_place(&mut levels, seq);
    Ok(levels)
}

/// Final water level at the instance target.
pub fn target_outcome(inst: &Instance, seq: &MoveSequence) -> Result<Rational> {
    Ok(final_levels(inst, seq)?.swap_remove(inst.target))
}

fn indicator(n: usize, u: usize) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); n];
    w[u] = Rational::one();
    w
}

/// Sharing process started from the indicator of `start`.
pub fn sad_profile(graph: &Graph, start: usize, seq: &MoveSequence) -> Result<SadProfile> {
    if start >= graph.vertex_count() {
        return Err(Error::Validation(format!("start {start} is not a vertex")));
    }
    seq.validate(graph)?;
    let mut weights = indicator(graph.vertex_count(), start);
    run_in_place(&mut weights, seq);
    Ok(SadProfile { weights })
}

/// Weights of the initial levels in the final level at `target`: the sharing
/// process from `target` along the time-reversed sequence.
pub fn dual_profile(graph: &Graph, target: usize, seq: &MoveSequence) -> Result<SadProfile> {
    sad_profile(graph, target, &seq.reversed())
}

/// Maximum deviation from the set average, over `set`.
fn max_deviation(levels: &[Rational], set: &[usize]) -> Rational {
    let sum = set
        .iter()
        .fold(Rational::zero(), |acc, &u| acc + &levels[u]);
    let avg = sum / Rational::from_integer(set.len().into());
    set.iter()
        .map(|&u| (&levels[u] - &avg).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Hard cap on full sweeps in [`sweep_to_tolerance`].
pub const MAX_SWEEPS: usize = 1_000_000;

/// Repeats full sweeps of complete moves over `spanning` (ascending edge
/// order) until every vertex of `set` is within `eps` of the set average.
/// Returns the new profile and the single-edge moves used.
pub fn sweep_to_tolerance(
    graph: &Graph,
    profile: &WaterProfile,
    set: &[usize],
    spanning: &[(usize, usize)],
    eps: &Rational,
) -> Result<(WaterProfile, MoveSequence)> {
    if !eps.is_positive() {
        return Err(Error::InvalidMove("tolerance must be positive".into()));
    }
    let mut set: Vec<usize> = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::InvalidMove("empty vertex set".into()));
    }
    let mut edges: Vec<(usize, usize)> = spanning
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    for &(a, b) in &edges {
        if !graph.has_edge(a, b) {
            return Err(Error::InvalidMove(format!("({a}, {b}) is not an edge")));
        }
        if set.binary_search(&a).is_err() || set.binary_search(&b).is_err() {
            return Err(Error::InvalidMove(format!(
                "edge ({a}, {b}) leaves the vertex set"
            )));
        }
    }
    let span = Graph::with_default_names(graph.vertex_count(), edges.iter().copied())?;
    if !span.is_connected_subset(&set) {
        return Err(Error::InvalidMove(
            "edge set does not span the vertex set".into(),
        ));
    }

    let mut levels = profile.levels.clone();
    let mut moves = Vec::new();
    let mut sweeps = 0;
    while max_deviation(&levels, &set) > *eps {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Internal("sweep cap reached".into()));
        }
        for &(a, b) in &edges {
            let mv = Hypermove::edge(a, b, half())?;
            apply_in_place(&mut levels, &mv);
            moves.push(mv);
        }
        sweeps += 1;
    }
    Ok((
        WaterProfile {
            levels,
            capacity: profile.capacity.clone(),
        },
        MoveSequence { moves },
    ))
}

/// Rounds every fraction to `0` (move deleted) or `½` without lowering the
/// final target level.
///
/// Moves are decided front to back. With the prefix already rounded and the
/// suffix untouched, the final target level is affine in the current `μ`
/// with slope `2·Σ_{u∈A} ξ_u·(avg_A − η(u))`, where `ξ` is the dual profile
/// of the suffix. A positive slope keeps the move as a complete one; a zero
/// or negative slope deletes it. For a single edge the slope sign is the
/// comparison of the dual weights of the fuller and the emptier barrel.
pub fn round_sequence(inst: &Instance, seq: &MoveSequence) -> Result<MoveSequence> {
    seq.validate(&inst.graph)?;
    let n = inst.vertex_count();
    let mut levels = inst.profile.levels.clone();
    let mut out = Vec::new();
    for (k, mv) in seq.moves.iter().enumerate() {
        let mut weights = indicator(n, inst.target);
        for later in seq.moves[k + 1..].iter().rev() {
            apply_in_place(&mut weights, later);
        }
        let set = mv.vertices();
        let sum = set
            .iter()
            .fold(Rational::zero(), |acc, &u| acc + &levels[u]);
        let avg = sum / Rational::from_integer(set.len().into());
        let slope = set.iter().fold(Rational::zero(), |acc, &u| {
            acc + &weights[u] * (&avg - &levels[u])
        });
        if slope.is_positive() {
            let complete = mv.with_mu(half())?;
            apply_in_place(&mut levels, &complete);
            out.push(complete);
        }
    }
    Ok(MoveSequence { moves: out })
}

/// Replaces every complete hypermove on more than two vertices by sweeps of
/// single-edge moves over the induced edges, the `i`-th such hypermove
/// (1-based) to tolerance `eps / 2^i`. Every vertex of the final profile ends
/// within `eps` of the profile produced by `seq`.
pub fn expand_hypermoves(
    inst: &Instance,
    seq: &MoveSequence,
    eps: &Rational,
) -> Result<MoveSequence> {
    if !eps.is_positive() {
        return Err(Error::InvalidMove("tolerance must be positive".into()));
    }
    seq.validate(&inst.graph)?;
    if let Some(bad) = seq.moves.iter().find(|m| !m.is_complete()) {
        return Err(Error::InvalidMove(format!(
            "expansion needs complete moves, found mu = {}",
            format_rational(bad.mu())
        )));
    }
    let mut profile = inst.profile.clone();
    let mut out = Vec::new();
    let mut budget = eps.clone();
    for mv in &seq.moves {
        if mv.is_single_edge() {
            apply_in_place(&mut profile.levels, mv);
            out.push(mv.clone());
            continue;
        }
        budget /= Rational::from_integer(2.into());
        let spanning = inst.graph.induced_edges(mv.vertices());
        let (next, sweeps) =
            sweep_to_tolerance(&inst.graph, &profile, mv.vertices(), &spanning, &budget)?;
        profile = next;
        out.extend(sweeps.moves);
    }
    Ok(MoveSequence { moves: out })
}

/// Parses the move-sequence format against `graph`:
///
/// ```text
/// open <name> <name> [<mu>]
/// pool <name>,<name>,... [<mu>]
/// ```
///
/// `mu` defaults to `1/2`. Every move is validated; errors carry the line.
pub fn parse_sequence(text: &str, graph: &Graph) -> Result<MoveSequence> {
    let mut moves = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let lookup = |name: &str| {
            graph
                .index_of(name)
                .ok_or_else(|| Error::syntax(line, format!("unknown vertex {name:?}")))
        };
        let read_mu = |tok: Option<&&str>| -> Result<Rational> {
            match tok {
                None => Ok(half()),
                Some(t) => {
                    parse_rational(t).ok_or_else(|| Error::syntax(line, format!("bad mu {t:?}")))
                }
            }
        };
        let mv = match keyword {
            "open" => {
                if !(2..=3).contains(&args.len()) {
                    return Err(Error::syntax(line, "expected `open <name> <name> [<mu>]`"));
                }
                let (a, b) = (lookup(args[0])?, lookup(args[1])?);
                if a == b {
                    return Err(Error::syntax(line, "a pipe needs two distinct barrels"));
                }
                Hypermove::edge(a, b, read_mu(args.get(2))?)
            }
            "pool" => {
                if !(1..=2).contains(&args.len()) {
                    return Err(Error::syntax(
                        line,
                        "expected `pool <name>,<name>,... [<mu>]`",
                    ));
                }
                let set = args[0]
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(lookup)
                    .collect::<Result<Vec<_>>>()?;
                Hypermove::new(set, read_mu(args.get(1))?)
            }
            other => return Err(Error::syntax(line, format!("unknown keyword {other:?}"))),
        }
        .map_err(|e| Error::syntax(line, e.to_string()))?;
        mv.validate(graph)
            .map_err(|e| Error::syntax(line, e.to_string()))?;
        moves.push(mv);
    }
    Ok(MoveSequence { moves })
}

/// Writes `seq` in the move-sequence format; `μ = ½` is left implicit.
pub fn serialize_sequence(seq: &MoveSequence, graph: &Graph) -> String {
    let mut out = String::new();
    for mv in &seq.moves {
        let names = names_of(graph, mv.vertices());
        if mv.is_single_edge() {
            let _ = write!(out, "open {} {}", names[0], names[1]);
        } else {
            let _ = write!(out, "pool {}", names.join(","));
        }
        if !mv.is_complete() {
            let _ = write!(out, " {}", format_rational(mv.mu()));
        }
        out.push('\n');
    }
    out
}
