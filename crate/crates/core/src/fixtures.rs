//! Built-in demonstration instances and the strategies that go with them.

use num_traits::Zero;

use crate::engine::{Hypermove, MoveSequence};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heuristics::LatticeAnimal;
use crate::instance::{
    build_complete, build_path, build_star_center, build_star_example, star_ray_vertex, Instance,
    WaterProfile,
};
use crate::rational::{half, int, ratio, Rational};

fn named(
    names: &[&str],
    edges: &[(usize, usize)],
    levels: Vec<Rational>,
    target: usize,
) -> Instance {
    let graph = Graph::new(
        names.iter().map(|s| s.to_string()).collect(),
        edges.iter().copied(),
    )
    .expect("fixture graph is valid");
    Instance::new(
        graph,
        WaterProfile::from_levels(levels).expect("valid levels"),
        target,
    )
    .expect("valid fixture")
}

/// 4-path `(3/10, 1/5, 1/10, 1)` with the target third: the optimum pools
/// the left three, then the right pair, giving `3/5`.
pub fn interior_path() -> Instance {
    build_path(vec![ratio(3, 10), ratio(1, 5), ratio(1, 10), int(1)], 2).expect("valid fixture")
}

pub fn interior_path_strategy() -> MoveSequence {
    MoveSequence::new(vec![
        Hypermove::pool([0, 1, 2]).expect("valid"),
        Hypermove::pool([2, 3]).expect("valid"),
    ])
}

/// 3-path `(0, ½, 1)` with the target at the empty end: pooling all three
/// reaches `½`, single-edge moves only approach it.
pub fn no_finite_optimum_path() -> Instance {
    build_path(vec![int(0), half(), int(1)], 0).expect("valid fixture")
}

/// Pools `A_n, …, A_1` on the symmetric star with `n` rays, where `A_k` is
/// the union of the centre and rays `1..=k` minus the leaves of rays
/// `1..k`.
pub fn star_pooling_strategy(n: usize) -> Result<MoveSequence> {
    if n < 2 {
        return Err(Error::Validation("star example needs n >= 2".into()));
    }
    let mut moves = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let mut set = vec![0];
        for ray in 0..k {
            let last = if ray + 1 < k { n - 1 } else { n };
            set.extend((0..last).map(|i| star_ray_vertex(n, ray, i)));
        }
        debug_assert_eq!(set.len(), k * (n - 1) + 2);
        moves.push(Hypermove::pool(set)?);
    }
    Ok(MoveSequence::new(moves))
}

/// Instance where the optimal play lowers `u` before raising it: pooling
/// `{v,u,e,t}` moves water out of `u`, then pooling `{v,u,e,x}` brings the
/// big barrel `x` in.
pub fn non_monotone() -> Instance {
    named(
        &["v", "u", "e", "x", "t"],
        &[(0, 1), (1, 2), (2, 3), (2, 4)],
        vec![int(0), ratio(11, 10), int(0), int(7), ratio(19, 10)],
        0,
    )
}

pub fn non_monotone_strategy() -> MoveSequence {
    MoveSequence::new(vec![
        Hypermove::pool([0, 1, 2, 4]).expect("valid"),
        Hypermove::pool([0, 1, 2, 3]).expect("valid"),
    ])
}

/// Bottleneck `u` of the animal `{v,u,α}` is lifted by pooling it with the
/// side branch `β`.
pub fn bottleneck_star() -> (Instance, LatticeAnimal) {
    let inst = named(
        &["v", "u", "alpha", "beta"],
        &[(0, 1), (1, 2), (1, 3)],
        vec![ratio(9, 10), ratio(1, 10), ratio(4, 5), ratio(3, 5)],
        0,
    );
    let animal = LatticeAnimal {
        vertices: vec![0, 1, 2],
        value: ratio(3, 5),
    };
    (inst, animal)
}

/// The best animal is `{v}`; preparing `u` with `β` lets `{v,u,α}` win.
pub fn enlargement_star() -> Instance {
    named(
        &["v", "u", "alpha", "beta"],
        &[(0, 1), (1, 2), (1, 3)],
        vec![half(), int(0), ratio(4, 5), ratio(3, 5)],
        0,
    )
}

/// 5-path `y – v – u – w – z` where the best preparation of bottleneck `u`
/// also contains the target.
pub fn overlap_path() -> Instance {
    build_path(vec![ratio(3, 10), ratio(1, 5), int(0), int(1), int(0)], 1).expect("valid fixture")
}

/// Two bottlenecks `u`, `w` sharing the helper `γ`: opening `⟨w,γ⟩` before
/// `⟨u,γ⟩` beats pooling all three at once.
pub fn shared_helper() -> Instance {
    named(
        &["v", "u", "w", "alpha", "beta", "gamma"],
        &[(0, 1), (0, 2), (1, 3), (2, 4), (1, 5), (2, 5)],
        vec![
            ratio(3, 10),
            ratio(3, 20),
            ratio(1, 5),
            ratio(3, 5),
            ratio(11, 20),
            ratio(3, 10),
        ],
        0,
    )
}

/// A named demonstration: an instance and, where one is known, a strategy.
#[derive(Debug, Clone)]
pub struct Demo {
    pub name: String,
    pub description: &'static str,
    pub instance: Instance,
    pub strategy: Option<MoveSequence>,
}

/// Names accepted by [`demo`].
pub const DEMO_NAMES: &[&str] = &[
    "interior-path",
    "no-finite-optimum",
    "k3",
    "star-center",
    "star-2",
    "star-3",
    "star-4",
    "star-5",
    "non-monotone",
    "bottleneck",
    "enlargement",
    "overlap-path",
    "shared-helper",
];

pub fn demo(name: &str) -> Option<Demo> {
    let (description, instance, strategy) = match name {
        "interior-path" => (
            "4-path, interior target; two pools reach 3/5",
            interior_path(),
            Some(interior_path_strategy()),
        ),
        "no-finite-optimum" => (
            "3-path (0,1/2,1); only a pool over all three reaches 1/2",
            no_finite_optimum_path(),
            Some(MoveSequence::new(vec![Hypermove::pool([0, 1, 2]).ok()?])),
        ),
        "k3" => (
            "K3 (2,1,0) with the empty barrel as target",
            build_complete(vec![int(2), int(1), int(0)], 2).ok()?,
            None,
        ),
        "star-center" => (
            "star K_{1,3}, empty centre, leaves (3,2,1)",
            build_star_center(Rational::zero(), vec![int(3), int(2), int(1)]).ok()?,
            None,
        ),
        "non-monotone" => (
            "water at u first drops, then rises",
            non_monotone(),
            Some(non_monotone_strategy()),
        ),
        "bottleneck" => (
            "bottleneck lifted via a side branch",
            bottleneck_star().0,
            None,
        ),
        "enlargement" => (
            "animal enlarged after preparing a boundary vertex",
            enlargement_star(),
            None,
        ),
        "overlap-path" => ("best preparation overlaps the animal", overlap_path(), None),
        "shared-helper" => (
            "two bottlenecks share one helper; order matters",
            shared_helper(),
            None,
        ),
        other => {
            let n: usize = other.strip_prefix("star-")?.parse().ok()?;
            if !(2..=5).contains(&n) {
                return None;
            }
            (
                "symmetric star; nested pools beat the best animal",
                build_star_example(n).ok()?,
                Some(star_pooling_strategy(n).ok()?),
            )
        }
    };
    Some(Demo {
        name: name.to_string(),
        description,
        instance,
        strategy,
    })
}
