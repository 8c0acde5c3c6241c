//! Seeded generators of small random nets and instances.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resetnet::net::{Instance, Marking, Net, Objective, PlaceId, Tokens, TransitionId, ZeroTestNet};
use resetnet::semantics::NetView;
use resetnet::structure::detect_workflow;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for [`random_acyclic_net`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub places: usize,
    pub transitions: usize,
    pub max_weight: u32,
    pub max_resets: usize,
    /// Allow transitions with an empty preset.
    pub generators: bool,
}

/// A random net whose arcs respect a random linear order of its nodes.
pub fn random_acyclic_net(r: &mut impl Rng, shape: Shape) -> Net {
    let np = r.gen_range(1..=shape.places);
    let nt = r.gen_range(1..=shape.transitions);
    // position of each node in a random topological order
    let mut order: Vec<usize> = (0..np + nt).collect();
    order.shuffle(r);
    if !shape.generators {
        // a place comes first, so every transition has something to consume
        let first_place = order.iter().position(|x| *x < np).expect("at least one place");
        order.swap(0, first_place);
    }
    let pos = |node: usize| order.iter().position(|x| *x == node).expect("node is ordered");
    let mut b = Net::builder();
    let places: Vec<PlaceId> = (0..np).map(|i| b.add_place(format!("p{i}")).unwrap()).collect();
    for j in 0..nt {
        let t = b.add_transition(format!("t{j}")).unwrap();
        let tp = pos(np + j);
        let earlier: Vec<PlaceId> = places.iter().copied().filter(|p| pos(p.0) < tp).collect();
        let later: Vec<PlaceId> = places.iter().copied().filter(|p| pos(p.0) > tp).collect();
        let mut consumed = false;
        for p in &earlier {
            if r.gen_bool(0.5) {
                b.consume(t, *p, r.gen_range(1..=shape.max_weight)).unwrap();
                consumed = true;
            }
        }
        if !consumed && !shape.generators {
            let p = earlier.choose(r).expect("a place precedes every transition");
            b.consume(t, *p, r.gen_range(1..=shape.max_weight)).unwrap();
        }
        for p in &later {
            if r.gen_bool(0.5) {
                b.produce(t, *p, r.gen_range(1..=shape.max_weight)).unwrap();
            }
        }
        let resets = r.gen_range(0..=shape.max_resets);
        for _ in 0..resets {
            let p = *places.choose(r).unwrap();
            b.reset(t, p).unwrap();
        }
    }
    b.build()
}

pub fn random_marking(r: &mut impl Rng, places: usize, max: u64, density: f64) -> Marking {
    Marking::new(
        (0..places)
            .map(|_| {
                if r.gen_bool(density) {
                    Tokens::from(r.gen_range(0..=max))
                } else {
                    Tokens::zero()
                }
            })
            .collect(),
    )
}

/// The marking after firing random enabled transitions for up to `steps`
/// steps in the net's concrete semantics.
pub fn random_walk<'a>(r: &mut impl Rng, net: impl Into<NetView<'a>>, start: &Marking, steps: usize) -> Marking {
    let view = net.into();
    let mode = view.concrete_mode();
    let mut m = start.clone();
    for _ in 0..steps {
        let enabled: Vec<Marking> = (0..view.arcs().transition_count())
            .filter_map(|t| view.fire(&m, TransitionId(t), mode).ok())
            .collect();
        match enabled.choose(r) {
            Some(next) => m = next.clone(),
            None => break,
        }
    }
    m
}

/// A random target: either reachable by a short walk or drawn at random.
pub fn random_target<'a>(r: &mut impl Rng, net: impl Into<NetView<'a>>, initial: &Marking, max: u64) -> Marking {
    let view = net.into();
    if r.gen_bool(0.6) {
        let steps = r.gen_range(0..=4);
        random_walk(r, view, initial, steps)
    } else {
        random_marking(r, view.arcs().place_count(), max, 0.4)
    }
}

/// Random acyclic coverability instance with resets.
pub fn random_cover_instance(r: &mut impl Rng, shape: Shape) -> Instance {
    let net = random_acyclic_net(r, shape);
    let initial = random_marking(r, net.place_count(), 2, 0.6);
    let target = random_target(r, &net, &initial, 2);
    Instance::new(net, initial, target, Objective::Cover).unwrap()
}

/// A random acyclic workflow net with resets. Retries until the shape is a
/// workflow net.
pub fn random_workflow_net(r: &mut impl Rng, max_places: usize, max_transitions: usize) -> Net {
    loop {
        let n_mid = r.gen_range(0..=max_places.saturating_sub(2));
        let nt = r.gen_range(1..=max_transitions);
        // i first, f last, the rest shuffled in between
        let mut middle: Vec<usize> = (0..n_mid + nt).collect();
        middle.shuffle(r);
        let mut b = Net::builder();
        let i = b.add_place("i").unwrap();
        let mids: Vec<PlaceId> = (0..n_mid).map(|k| b.add_place(format!("p{k}")).unwrap()).collect();
        let f = b.add_place("f").unwrap();
        let rank = |node: usize| middle.iter().position(|x| *x == node).unwrap() + 1;
        let place_rank = |p: PlaceId| {
            if p == i {
                0
            } else if p == f {
                usize::MAX
            } else {
                rank(p.0 - 1)
            }
        };
        let all: Vec<PlaceId> = std::iter::once(i).chain(mids.iter().copied()).chain([f]).collect();
        for j in 0..nt {
            let t = b.add_transition(format!("t{j}")).unwrap();
            let tr = rank(n_mid + j);
            let earlier: Vec<PlaceId> = all.iter().copied().filter(|p| place_rank(*p) < tr).collect();
            let later: Vec<PlaceId> = all.iter().copied().filter(|p| place_rank(*p) > tr).collect();
            let pre: Vec<PlaceId> = earlier.iter().copied().filter(|_| r.gen_bool(0.4)).collect();
            let pre = if pre.is_empty() { vec![*earlier.choose(r).unwrap()] } else { pre };
            let post: Vec<PlaceId> = later.iter().copied().filter(|_| r.gen_bool(0.4)).collect();
            let post = if post.is_empty() { vec![*later.choose(r).unwrap()] } else { post };
            for p in pre {
                b.consume(t, p, r.gen_range(1..=2u32)).unwrap();
            }
            for p in post {
                b.produce(t, p, r.gen_range(1..=2u32)).unwrap();
            }
            for _ in 0..r.gen_range(0..=2) {
                b.reset(t, *all.choose(r).unwrap()).unwrap();
            }
        }
        let net = b.build();
        if detect_workflow(&net).is_some() {
            return net;
        }
    }
}

pub fn random_workflow_instance(r: &mut impl Rng) -> Instance {
    let net = random_workflow_net(r, 5, 4);
    let (i, _) = detect_workflow(&net).unwrap();
    let mut initial = net.zero_marking();
    initial.set(i, Tokens::from(r.gen_range(1..=3u64)));
    let target = if r.gen_bool(0.7) {
        let steps = r.gen_range(0..=5);
        random_walk(r, &net, &initial, steps)
    } else {
        random_marking(r, net.place_count(), 2, 0.4)
    };
    Instance::new(net, initial, target, Objective::Reach).unwrap()
}

/// Random net with zero tests. With `acyclic`, arcs follow a random order.
pub fn random_zero_test_net(r: &mut impl Rng, max_places: usize, max_transitions: usize, acyclic: bool) -> ZeroTestNet {
    let base = if acyclic {
        random_acyclic_net(
            r,
            Shape {
                places: max_places,
                transitions: max_transitions,
                max_weight: 2,
                max_resets: 0,
                generators: true,
            },
        )
    } else {
        let np = r.gen_range(1..=max_places);
        let nt = r.gen_range(1..=max_transitions);
        let mut b = Net::builder();
        let places: Vec<PlaceId> = (0..np).map(|i| b.add_place(format!("p{i}")).unwrap()).collect();
        for j in 0..nt {
            let t = b.add_transition(format!("t{j}")).unwrap();
            for p in &places {
                if r.gen_bool(0.35) {
                    b.consume(t, *p, r.gen_range(1..=2u32)).unwrap();
                }
                if r.gen_bool(0.35) {
                    b.produce(t, *p, r.gen_range(1..=2u32)).unwrap();
                }
            }
        }
        b.build()
    };
    let tests = (0..base.transition_count())
        .map(|_| base.places().filter(|_| r.gen_bool(0.25)).collect())
        .collect();
    ZeroTestNet::new(base, tests).unwrap()
}

pub fn random_zero_test_instance(r: &mut impl Rng, acyclic: bool) -> Instance {
    let z = random_zero_test_net(r, 4, 3, acyclic);
    let initial = random_marking(r, z.base().place_count(), 2, 0.6);
    let target = random_target(r, &z, &initial, 2);
    Instance::new(z, initial, target, Objective::Reach).unwrap()
}

/// Random acyclic cover instance with binary weights up to `max_weight`
/// and no generators, so its state space is finite.
pub fn random_binary_instance(r: &mut impl Rng, max_weight: u32) -> Instance {
    let net = random_acyclic_net(
        r,
        Shape {
            places: 4,
            transitions: 3,
            max_weight,
            max_resets: 1,
            generators: false,
        },
    );
    let initial = random_marking(r, net.place_count(), 2 * max_weight as u64, 0.8);
    let target = random_target(r, &net, &initial, max_weight as u64);
    Instance::new(net, initial, target, Objective::Cover).unwrap()
}

pub fn replay_concrete<'a>(net: impl Into<NetView<'a>>, start: &Marking, run: &[TransitionId]) -> Option<Marking> {
    let view = net.into();
    let mode = view.concrete_mode();
    resetnet::semantics::replay(view, start, run, mode)
        .ok()
        .map(|t| t.final_marking().clone())
}
