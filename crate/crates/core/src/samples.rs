//! Small hand-built nets used by tests, the CLI and the documentation.

use crate::net::{Net, ZeroTestNet};

/// Name, consumed arcs, produced arcs, reset places.
type Row<'a> = (&'a str, &'a [(&'a str, u32)], &'a [(&'a str, u32)], &'a [&'a str]);

fn build(places: &[&str], transitions: &[Row]) -> Net {
    let mut b = Net::builder();
    for p in places {
        b.add_place(*p).expect("sample place names are unique");
    }
    for (name, pre, post, resets) in transitions {
        let t = b.add_transition(*name).expect("sample names are unique");
        for (p, w) in *pre {
            let p = b.place_id(p).expect("sample place exists");
            b.consume(t, p, *w).expect("sample arc is valid");
        }
        for (p, w) in *post {
            let p = b.place_id(p).expect("sample place exists");
            b.produce(t, p, *w).expect("sample arc is valid");
        }
        for p in *resets {
            let p = b.place_id(p).expect("sample place exists");
            b.reset(t, p).expect("sample reset is valid");
        }
    }
    b.build()
}

/// Places `i, p1, p2, f`. `t1` moves a token from `i` to both `p1` and
/// `p2`; `t2` takes two from each and puts one in `f`. `t3` produces into
/// `p1` from nothing and `t4` drains `p1`.
pub fn two_branch() -> Net {
    build(
        &["i", "p1", "p2", "f"],
        &[
            ("t1", &[("i", 1)], &[("p1", 1), ("p2", 1)], &[]),
            ("t2", &[("p1", 2), ("p2", 2)], &[("f", 1)], &[]),
            ("t3", &[], &[("p1", 1)], &[]),
            ("t4", &[("p1", 1)], &[], &[]),
        ],
    )
}

/// [`two_branch`] without `t3` and `t4`: an acyclic workflow net from `i`
/// to `f`.
pub fn two_branch_workflow() -> Net {
    build(
        &["i", "p1", "p2", "f"],
        &[
            ("t1", &[("i", 1)], &[("p1", 1), ("p2", 1)], &[]),
            ("t2", &[("p1", 2), ("p2", 2)], &[("f", 1)], &[]),
        ],
    )
}

/// Places `a, b, c` and one transition `t` consuming 3 from `a` and 2 from
/// `b`, resetting `b` and `c`, then producing 4 to `c`.
pub fn reset_example() -> Net {
    build(
        &["a", "b", "c"],
        &[("t", &[("a", 3), ("b", 2)], &[("c", 4)], &["b", "c"])],
    )
}

/// A cyclic zero-test net: `t` consumes one from `a`, returns it, adds two
/// to `b`, and requires `b` to be empty.
pub fn zero_test_loop() -> ZeroTestNet {
    let base = build(&["a", "b"], &[("t", &[("a", 1)], &[("a", 1), ("b", 2)], &[])]);
    let b = base.place_id("b").expect("sample place exists");
    ZeroTestNet::new(base, vec![vec![b]]).expect("sample zero tests are valid")
}

/// Three-block formula with four real clauses, true under `x1 = 0, x2 = 1`
/// for every choice of the universal variables.
pub const THREE_BLOCK_QDIMACS: &str = "\
c forall y1 exists x1 forall y2 exists x2 forall y3 exists x3
p cnf 6 10
a 1 0
e 2 0
a 3 0
e 4 0
a 5 0
e 6 0
1 -2 -3 0
-2 -3 4 0
3 4 -5 0
4 5 6 0
1 -1 0
2 -2 0
3 -3 0
4 -4 0
5 -5 0
6 -6 0
";
