//! CNF input, conversion to exact 3-SAT, and the comb-shaped instance whose
//! target can be pushed above level 2 exactly when the formula is
//! satisfiable.
//!
//! Layout: a shaft `r - [C₁] - a₁ - … - [Cₙ] - aₙ - v` where each `[Cⱼ]` is
//! three clause barrels wired in parallel between their flanking vertices;
//! one tooth path per variable with water in its middle third; and one
//! connector path from every clause barrel to the tooth end of its literal.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::engine::{target_outcome, Hypermove, MoveSequence};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::instance::{Instance, WaterProfile};
use crate::rational::{int, ratio, Rational};

/// Literals are nonzero signed variable indices (`3` is `x3`, `-3` its
/// negation); variables are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

fn var_of(lit: i64) -> usize {
    lit.unsigned_abs() as usize
}

impl CnfFormula {
    /// Sorts literals by variable, collapses duplicates and checks the
    /// formula invariants.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (j, mut clause) in clauses.into_iter().enumerate() {
            clause.sort_by_key(|&l| (var_of(l), l));
            clause.dedup();
            if clause.is_empty() {
                return Err(Error::Formula(format!("clause {} is empty", j + 1)));
            }
            for pair in clause.windows(2) {
                if var_of(pair[0]) == var_of(pair[1]) {
                    return Err(Error::Formula(format!(
                        "clause {} is a tautology on x{}",
                        j + 1,
                        var_of(pair[0])
                    )));
                }
            }
            if let Some(&l) = clause.iter().find(|&&l| l == 0 || var_of(l) > num_vars) {
                return Err(Error::Formula(format!(
                    "clause {} uses variable {} outside 1..={num_vars}",
                    j + 1,
                    var_of(l)
                )));
            }
            out.push(clause);
        }
        Ok(CnfFormula {
            num_vars,
            clauses: out,
        })
    }

    pub fn is_exact_3sat(&self) -> bool {
        self.clauses.iter().all(|c| c.len() == 3)
    }

    /// `assignment[i]` is the value of `x(i+1)`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                assignment
                    .get(var_of(l) - 1)
                    .is_some_and(|&val| val == (l > 0))
            })
        })
    }
}

/// Reads DIMACS CNF: `c` comments, an optional `p cnf <vars> <clauses>`
/// header, zero-terminated clauses possibly spanning lines, and an optional
/// `%` end marker. Without a header the variable count is the largest index.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || !clauses.is_empty() || !current.is_empty() {
                return Err(Error::syntax(
                    line_no,
                    "header must come first and only once",
                ));
            }
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v
                        .parse()
                        .map_err(|_| Error::syntax(line_no, "bad variable count"))?;
                    let c = c
                        .parse()
                        .map_err(|_| Error::syntax(line_no, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(Error::syntax(line_no, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::syntax(line_no, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::Formula(format!("empty clause on line {line_no}")));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let max_var = clauses
        .iter()
        .flatten()
        .map(|&l| var_of(l))
        .max()
        .unwrap_or(0);
    let num_vars = match header {
        Some((v, c)) => {
            if max_var > v {
                return Err(Error::Formula(format!(
                    "variable {max_var} exceeds the declared {v}"
                )));
            }
            if c != clauses.len() {
                return Err(Error::Formula(format!(
                    "header declares {c} clauses but {} were read",
                    clauses.len()
                )));
            }
            v
        }
        None => max_var,
    };
    CnfFormula::new(num_vars, clauses)
}

/// Renders a formula in DIMACS CNF.
pub fn serialize_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            out.push_str(&l.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Pads every clause to three distinct variables with three fresh dummy
/// variables, and appends the seven clauses over the dummies that contain a
/// negative literal; together they force all dummies to false.
pub fn to_exact_3sat(f: &CnfFormula) -> Result<CnfFormula> {
    let k = f.num_vars as i64;
    let (d1, d2, d3) = (k + 1, k + 2, k + 3);
    let mut clauses = Vec::with_capacity(f.clauses.len() + 7);
    for (j, c) in f.clauses.iter().enumerate() {
        let mut padded = c.clone();
        match c.len() {
            1 => padded.extend([d1, d2]),
            2 => padded.push(d1),
            3 => {}
            len => {
                return Err(Error::Formula(format!(
                    "clause {} has {len} literals; at most 3 are supported",
                    j + 1
                )))
            }
        }
        clauses.push(padded);
    }
    for pattern in 0..7u8 {
        // bit set = negative literal; pattern 7 (all negative) .. 1, never 0
        let neg = 7 - pattern;
        let lit = |bit: u8, d: i64| if neg >> bit & 1 == 1 { -d } else { d };
        clauses.push(vec![lit(2, d1), lit(1, d2), lit(0, d3)]);
    }
    CnfFormula::new(f.num_vars + 3, clauses)
}

/// Largest variable count accepted by [`brute_sat`].
pub const BRUTE_SAT_MAX_VARS: usize = 24;

/// First satisfying assignment in lexicographic order (`x1` most
/// significant, false before true), if any.
pub fn brute_sat(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    let k = f.num_vars;
    if k > BRUTE_SAT_MAX_VARS {
        return Err(Error::CapExceeded(format!(
            "{k} variables exceed the brute-force limit of {BRUTE_SAT_MAX_VARS}"
        )));
    }
    let mut assignment = vec![false; k];
    for mask in 0u32..(1u32 << k) {
        for (i, val) in assignment.iter_mut().enumerate() {
            *val = mask >> (k - 1 - i) & 1 == 1;
        }
        if f.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

/// Tooth and connector sizes. The default scale uses teeth of `12n⁴`
/// vertices and connectors of `2n²` edges, where the satisfiability
/// guarantee holds; other sizes are for experimentation only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionScale {
    /// Vertices per tooth; a positive multiple of 3.
    pub tooth_len: usize,
    /// Edges per connector path; at least 1.
    pub connector_edges: usize,
}

impl ReductionScale {
    pub fn default_for(n: usize) -> Self {
        ReductionScale {
            tooth_len: 12 * n.pow(4),
            connector_edges: 2 * n * n,
        }
    }
}

/// Named vertex ids of a comb instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Landmarks {
    pub reservoir: usize,
    pub target: usize,
    /// `anchors[j]` follows the barrels of clause `j`.
    pub anchors: Vec<usize>,
    /// `clause_barrels[j][s]` serves the `s`-th literal of clause `j`.
    pub clause_barrels: Vec<[usize; 3]>,
    /// Tooth vertices of each variable from the `xᵢ` end to the `¬xᵢ` end.
    pub teeth: Vec<Vec<usize>>,
    /// Internal connector vertices of `clause_barrels[j][s]`, listed from
    /// the barrel towards the tooth end.
    pub connectors: Vec<[Vec<usize>; 3]>,
}

impl Landmarks {
    /// Tooth end of a literal: `xᵢ` for positive, `¬xᵢ` for negative.
    pub fn literal_end(&self, lit: i64) -> usize {
        let tooth = &self.teeth[var_of(lit) - 1];
        if lit > 0 {
            tooth[0]
        } else {
            *tooth.last().expect("nonempty tooth")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombInstance {
    pub instance: Instance,
    pub formula: CnfFormula,
    pub landmarks: Landmarks,
    /// Clause count.
    pub n: usize,
    /// Variable count.
    pub k: usize,
    pub scale: ReductionScale,
    pub default_scale: bool,
}

/// Level of the reservoir `r`.
pub fn reservoir_level() -> Rational {
    ratio(13, 3)
}

/// Decision threshold: the target can exceed it iff the formula is
/// satisfiable (at default scale).
pub fn threshold() -> Rational {
    int(2)
}

struct Builder {
    names: Vec<String>,
    levels: Vec<Rational>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn add(&mut self, name: String, level: Rational) -> usize {
        self.names.push(name);
        self.levels.push(level);
        self.names.len() - 1
    }
}

/// Builds the comb instance of an exact 3-SAT formula.
pub fn build_reduction(f: &CnfFormula, scale: Option<ReductionScale>) -> Result<CombInstance> {
    if !f.is_exact_3sat() {
        return Err(Error::Formula(
            "every clause needs exactly 3 distinct variables".into(),
        ));
    }
    let n = f.clauses.len();
    let k = f.num_vars;
    if n == 0 {
        return Err(Error::Formula("formula has no clauses".into()));
    }
    let default = ReductionScale::default_for(n);
    let scale = scale.unwrap_or(default);
    if scale.tooth_len == 0 || !scale.tooth_len.is_multiple_of(3) || scale.connector_edges == 0 {
        return Err(Error::Formula(
            "tooth length must be a positive multiple of 3 and connectors nonempty".into(),
        ));
    }
    let third = scale.tooth_len / 3;
    let mut b = Builder {
        names: Vec::new(),
        levels: Vec::new(),
        edges: Vec::new(),
    };

    let reservoir = b.add("r".into(), reservoir_level());
    let mut anchors = Vec::with_capacity(n);
    let mut clause_barrels = Vec::with_capacity(n);
    let mut left = reservoir;
    for j in 1..=n {
        let barrels = [1, 2, 3].map(|s| b.add(format!("c{j}_{s}"), Rational::zero()));
        let anchor = b.add(format!("a{j}"), int(3));
        for &c in &barrels {
            b.edges.push((left, c));
            b.edges.push((c, anchor));
        }
        anchors.push(anchor);
        clause_barrels.push(barrels);
        left = anchor;
    }
    let target = b.add("v".into(), Rational::zero());
    b.edges.push((left, target));

    let mut teeth = Vec::with_capacity(k);
    for i in 1..=k {
        let mut tooth = Vec::with_capacity(scale.tooth_len);
        for p in 1..=scale.tooth_len {
            let name = if p == 1 {
                format!("x{i}")
            } else if p == scale.tooth_len {
                format!("not_x{i}")
            } else {
                format!("t{i}_{p}")
            };
            let level = if p > third && p <= 2 * third {
                int(2)
            } else {
                Rational::zero()
            };
            let id = b.add(name, level);
            if let Some(&prev) = tooth.last() {
                b.edges.push((prev, id));
            }
            tooth.push(id);
        }
        teeth.push(tooth);
    }

    let mut connectors = Vec::with_capacity(n);
    for (j, clause) in f.clauses.iter().enumerate() {
        let mut paths: [Vec<usize>; 3] = Default::default();
        for (s, &lit) in clause.iter().enumerate() {
            let tooth = &teeth[var_of(lit) - 1];
            let end = if lit > 0 {
                tooth[0]
            } else {
                tooth[scale.tooth_len - 1]
            };
            let mut prev = clause_barrels[j][s];
            for q in 1..scale.connector_edges {
                let id = b.add(format!("p{}_{}_{q}", j + 1, s + 1), Rational::zero());
                b.edges.push((prev, id));
                paths[s].push(id);
                prev = id;
            }
            b.edges.push((prev, end));
        }
        connectors.push(paths);
    }

    let graph = Graph::new(b.names, b.edges)?;
    let instance = Instance::new(graph, WaterProfile::from_levels(b.levels)?, target)?;
    Ok(CombInstance {
        instance,
        formula: f.clone(),
        landmarks: Landmarks {
            reservoir,
            target,
            anchors,
            clause_barrels,
            teeth,
            connectors,
        },
        n,
        k,
        scale,
        default_scale: scale == default,
    })
}

/// Closed-form vertex count at default scale.
pub fn expected_vertex_count(n: usize, k: usize) -> usize {
    12 * k * n.pow(4) + 6 * n.pow(3) + n + 2
}

/// Closed-form edge count at default scale.
pub fn expected_edge_count(n: usize, k: usize) -> usize {
    k * (12 * n.pow(4) - 1) + 6 * n.pow(3) + 6 * n + 1
}

/// Strategy for a satisfying assignment: each clause picks its true literal
/// of lowest variable index; each used literal pools its half of the tooth
/// (end through middle third) together with the connectors and barrels of
/// its clauses; finally the shaft path through the chosen barrels is pooled.
pub fn witness_strategy(comb: &CombInstance, assignment: &[bool]) -> Result<MoveSequence> {
    let f = &comb.formula;
    if assignment.len() != f.num_vars || !f.satisfied_by(assignment) {
        return Err(Error::Formula(
            "assignment does not satisfy the formula".into(),
        ));
    }
    let lm = &comb.landmarks;
    let third = comb.scale.tooth_len / 3;

    let mut chosen_slot = Vec::with_capacity(comb.n);
    // literal -> clauses assigned to it
    let mut stars: BTreeMap<(usize, bool), Vec<usize>> = BTreeMap::new();
    for (j, clause) in f.clauses.iter().enumerate() {
        let s = clause
            .iter()
            .position(|&l| assignment[var_of(l) - 1] == (l > 0))
            .expect("clause is satisfied");
        chosen_slot.push(s);
        let lit = clause[s];
        stars.entry((var_of(lit), lit < 0)).or_default().push(j);
    }

    let mut moves = Vec::with_capacity(stars.len() + 1);
    for (&(var, negative), clauses) in &stars {
        let tooth = &lm.teeth[var - 1];
        let side = if negative {
            &tooth[third..]
        } else {
            &tooth[..2 * third]
        };
        let mut set = side.to_vec();
        for &j in clauses {
            let s = chosen_slot[j];
            set.push(lm.clause_barrels[j][s]);
            set.extend(&lm.connectors[j][s]);
        }
        moves.push(Hypermove::pool(set)?);
    }
    let mut shaft = vec![lm.reservoir];
    for (j, &s) in chosen_slot.iter().enumerate() {
        shaft.push(lm.clause_barrels[j][s]);
        shaft.push(lm.anchors[j]);
    }
    shaft.push(lm.target);
    moves.push(Hypermove::pool(shaft)?);

    let seq = MoveSequence::new(moves);
    seq.validate(&comb.instance.graph)?;
    Ok(seq)
}

/// Whether `strategy` lifts the target strictly above the threshold 2.
pub fn decide_threshold(comb: &CombInstance, strategy: &MoveSequence) -> Result<bool> {
    Ok(target_outcome(&comb.instance, strategy)? > threshold())
}
