//! Water-transport instances: a graph, an exact water profile and a target.
//!
//! Text format (line based, `#` starts a comment):
//!
//! ```text
//! capacity <rational>      # optional, at most once
//! node <name> <rational>
//! edge <name> <name>
//! target <name>            # exactly once
//! ```

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{format_rational, parse_rational, ratio, Rational};

/// Water levels indexed by vertex id, with an optional barrel capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaterProfile {
    pub levels: Vec<Rational>,
    pub capacity: Option<Rational>,
}

impl WaterProfile {
    pub fn new(levels: Vec<Rational>, capacity: Option<Rational>) -> Result<Self> {
        let profile = WaterProfile { levels, capacity };
        profile.validate()?;
        Ok(profile)
    }

    /// Profile without a capacity bound.
    pub fn from_levels(levels: Vec<Rational>) -> Result<Self> {
        WaterProfile::new(levels, None)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.capacity {
            if c.is_negative() {
                return Err(Error::Validation("negative capacity".into()));
            }
        }
        for (u, level) in self.levels.iter().enumerate() {
            if level.is_negative() {
                return Err(Error::Validation(format!("negative level at vertex {u}")));
            }
            if let Some(c) = &self.capacity {
                if level > c {
                    return Err(Error::Validation(format!(
                        "level at vertex {u} exceeds capacity"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.levels.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn max_level(&self) -> Option<&Rational> {
        self.levels.iter().max()
    }

    pub fn min_level(&self) -> Option<&Rational> {
        self.levels.iter().min()
    }

    /// Σ η(u)².
    pub fn energy(&self) -> Rational {
        self.levels
            .iter()
            .fold(Rational::zero(), |acc, x| acc + x * x)
    }
}

/// The problem datum: graph, initial profile and target vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub profile: WaterProfile,
    pub target: usize,
}

impl Instance {
    pub fn new(graph: Graph, profile: WaterProfile, target: usize) -> Result<Self> {
        if profile.len() != graph.vertex_count() {
            return Err(Error::Validation(format!(
                "profile has {} levels for {} vertices",
                profile.len(),
                graph.vertex_count()
            )));
        }
        if target >= graph.vertex_count() {
            return Err(Error::Validation(format!(
                "target {target} is not a vertex"
            )));
        }
        profile.validate()?;
        Ok(Instance {
            graph,
            profile,
            target,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn levels(&self) -> &[Rational] {
        &self.profile.levels
    }

    pub fn target_level(&self) -> &Rational {
        &self.profile.levels[self.target]
    }

    /// Same graph and target with a different profile.
    pub fn with_levels(&self, levels: Vec<Rational>) -> Result<Instance> {
        Instance::new(
            self.graph.clone(),
            WaterProfile::new(levels, self.profile.capacity.clone())?,
            self.target,
        )
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the instance text format; rationals are read exactly.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut capacity: Option<(usize, Rational)> = None;
    let mut names = Vec::new();
    let mut levels = Vec::new();
    let mut node_lines = Vec::new();
    let mut edge_lines: Vec<(usize, String, String)> = Vec::new();
    let mut target: Option<(usize, String)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        match keyword {
            "capacity" => {
                let [value] = args else {
                    return Err(Error::syntax(line, "expected `capacity <rational>`"));
                };
                if capacity.is_some() {
                    return Err(Error::syntax(line, "capacity given more than once"));
                }
                let c = parse_rational(value)
                    .ok_or_else(|| Error::syntax(line, format!("bad rational {value:?}")))?;
                capacity = Some((line, c));
            }
            "node" => {
                let [name, value] = args else {
                    return Err(Error::syntax(line, "expected `node <name> <rational>`"));
                };
                let level = parse_rational(value)
                    .ok_or_else(|| Error::syntax(line, format!("bad rational {value:?}")))?;
                if names.iter().any(|n| n == name) {
                    return Err(Error::syntax(line, format!("duplicate node {name:?}")));
                }
                if name.contains(',') {
                    return Err(Error::syntax(
                        line,
                        format!("node name {name:?} contains a comma"),
                    ));
                }
                names.push(name.to_string());
                levels.push(level);
                node_lines.push(line);
            }
            "edge" => {
                let [a, b] = args else {
                    return Err(Error::syntax(line, "expected `edge <name> <name>`"));
                };
                edge_lines.push((line, a.to_string(), b.to_string()));
            }
            "target" => {
                let [name] = args else {
                    return Err(Error::syntax(line, "expected `target <name>`"));
                };
                if target.is_some() {
                    return Err(Error::syntax(line, "target given more than once"));
                }
                target = Some((line, name.to_string()));
            }
            other => return Err(Error::syntax(line, format!("unknown keyword {other:?}"))),
        }
    }

    let lookup = |line: usize, name: &str| -> Result<usize> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::syntax(line, format!("unknown vertex {name:?}")))
    };

    let mut edges = Vec::with_capacity(edge_lines.len());
    let mut seen = std::collections::HashSet::new();
    for (line, a, b) in &edge_lines {
        let (x, y) = (lookup(*line, a)?, lookup(*line, b)?);
        if x == y {
            return Err(Error::syntax(*line, format!("self-loop at {a:?}")));
        }
        if !seen.insert((x.min(y), x.max(y))) {
            return Err(Error::syntax(*line, format!("duplicate edge {a} {b}")));
        }
        edges.push((x, y));
    }

    if let Some((line, c)) = &capacity {
        if c.is_negative() {
            return Err(Error::syntax(*line, "negative capacity"));
        }
    }
    for (u, level) in levels.iter().enumerate() {
        if level.is_negative() {
            return Err(Error::syntax(
                node_lines[u],
                format!("negative level at {:?}", names[u]),
            ));
        }
        if let Some((_, c)) = &capacity {
            if level > c {
                return Err(Error::syntax(
                    node_lines[u],
                    format!("level at {:?} exceeds capacity", names[u]),
                ));
            }
        }
    }

    let (target_line, target_name) =
        target.ok_or_else(|| Error::Validation("missing target".into()))?;
    let target = lookup(target_line, &target_name)?;

    let graph = Graph::new(names, edges)?;
    let profile = WaterProfile::new(levels, capacity.map(|(_, c)| c))?;
    Instance::new(graph, profile, target)
}

/// Writes an instance in the text format; levels are emitted exactly.
pub fn serialize_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    if let Some(c) = &inst.profile.capacity {
        let _ = writeln!(out, "capacity {}", format_rational(c));
    }
    for (u, level) in inst.profile.levels.iter().enumerate() {
        let _ = writeln!(out, "node {} {}", g.name(u), format_rational(level));
    }
    for &(a, b) in g.edges() {
        let _ = writeln!(out, "edge {} {}", g.name(a), g.name(b));
    }
    let _ = writeln!(out, "target {}", g.name(inst.target));
    out
}

/// Path `0 – 1 – … – n−1` with the given levels.
pub fn build_path(levels: Vec<Rational>, target_index: usize) -> Result<Instance> {
    if levels.is_empty() {
        return Err(Error::Validation("empty level list".into()));
    }
    let n = levels.len();
    let graph = Graph::with_default_names(n, (1..n).map(|i| (i - 1, i)))?;
    Instance::new(graph, WaterProfile::from_levels(levels)?, target_index)
}

/// Complete graph on `levels.len()` vertices.
pub fn build_complete(levels: Vec<Rational>, target_index: usize) -> Result<Instance> {
    if levels.is_empty() {
        return Err(Error::Validation("empty level list".into()));
    }
    let n = levels.len();
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
    let graph = Graph::with_default_names(n, edges)?;
    Instance::new(graph, WaterProfile::from_levels(levels)?, target_index)
}

/// Star `K_{1,m}`: vertex 0 is the centre (and the target), leaves follow.
pub fn build_star_center(center_level: Rational, leaf_levels: Vec<Rational>) -> Result<Instance> {
    let m = leaf_levels.len();
    let graph = Graph::with_default_names(m + 1, (1..=m).map(|i| (0, i)))?;
    let mut levels = vec![center_level];
    levels.extend(leaf_levels);
    Instance::new(graph, WaterProfile::from_levels(levels)?, 0)
}

/// Leaf level of the symmetric star example: `⌈1000·(n + ln n + 1)⌉ / 1000`,
/// never below `n + ln n + 1`.
pub fn star_leaf_level(n: usize) -> Rational {
    let x = n as f64 + (n as f64).ln() + 1.0;
    let milli = (x * 1000.0).ceil() as i64;
    ratio(milli, 1000)
}

/// Vertex id of position `i` (0 = next to the centre, `n−1` = leaf) on ray
/// `k` of the symmetric star example with `n` rays.
pub fn star_ray_vertex(n: usize, k: usize, i: usize) -> usize {
    1 + k * n + i
}

/// Symmetric star with `n` rays of length `n` around the target centre;
/// only the leaves carry water, at [`star_leaf_level`].
pub fn build_star_example(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Validation("star example needs n >= 2".into()));
    }
    let total = n * n + 1;
    let mut names = vec!["v".to_string()];
    let mut edges = Vec::with_capacity(n * n);
    let mut levels = vec![Rational::zero(); total];
    let c = star_leaf_level(n);
    for k in 0..n {
        for i in 0..n {
            let id = star_ray_vertex(n, k, i);
            names.push(if i == n - 1 {
                format!("v{}", k + 1)
            } else {
                format!("r{}_{}", k + 1, i + 1)
            });
            let prev = if i == 0 { 0 } else { id - 1 };
            edges.push((prev, id));
        }
        levels[star_ray_vertex(n, k, n - 1)] = c.clone();
    }
    let graph = Graph::new(names, edges)?;
    Instance::new(graph, WaterProfile::from_levels(levels)?, 0)
}
