//! End-to-end acceptance suite. Prints one `[PASS]` or `[FAIL]` line per
//! criterion and exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use resetnet::deciders::{
    concretize_cover_witness, decide_cover_rapn, decide_cover_rapn_with, decide_reach_rawn, decide_reach_rawn_with,
    oracle_search, oracle_search_with, reach_norm_bound, Answer, CoverOptions, SearchBudget, SearchObserver, Verdict,
};
use resetnet::net::{Instance, Marking, Objective, TransitionId};
use resetnet::qbf::{eval_qbf, parse_qdimacs, Clause, Literal, Qbf, Var};
use resetnet::reductions::{
    acyclify_zero_tests, binary_to_unary, compile_qbf_to_rawn, goodness_report, synthesize_cover_run,
    zero_tests_to_resets, CompiledQbfNet, PlaceRole, TransitionRole,
};
use resetnet::samples;
use resetnet::semantics::{fire, replay, FiringMode};
use resetnet::structure::{validate_structure, ClaimedKind};

use common::{
    random_binary_instance, random_cover_instance, random_workflow_instance, random_zero_test_instance, replay_concrete,
    rng, Shape,
};

// Pinned sizes, budgets and time limits.
const FIGURE_TIME: Duration = Duration::from_secs(1);
const SEMANTICS_TIME: Duration = Duration::from_millis(100);
const COVER_NETS: usize = 500;
const COVER_ORACLE_STATES: usize = 100_000;
const COVER_TIME: Duration = Duration::from_secs(300);
const WORKFLOW_NETS: usize = 500;
const WORKFLOW_ORACLE_STATES: usize = 1_000_000;
const K2_FORMULAS: usize = 120;
const QBF_TIME: Duration = Duration::from_secs(600);
/// Concrete states per compiled net explored without pruning for criterion 6.
const INVARIANT_STATES: usize = 20_000;
const ZERO_TEST_INSTANCES: usize = 200;
const ZERO_TEST_STEPS: usize = 6;
const BINARY_INSTANCES: usize = 100;
const BINARY_MAX_WEIGHT: u32 = 16;
const BINARY_ORACLE_STATES: usize = 500_000;

struct Report {
    passed: bool,
    detail: String,
}

fn report(passed: bool, detail: impl Into<String>) -> Report {
    Report {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Report) -> Report {
    let start = Instant::now();
    let mut r = f();
    let elapsed = start.elapsed();
    match limit {
        Some(limit) => {
            if elapsed > limit {
                r.passed = false;
            }
            r.detail = format!("{} ({:.2?}, limit {:?})", r.detail, elapsed, limit);
        }
        None => r.detail = format!("{} ({:.2?})", r.detail, elapsed),
    }
    r
}

fn budget(states: usize) -> SearchBudget {
    SearchBudget {
        max_steps: None,
        max_norm: None,
        max_states: Some(states),
    }
}

fn two_branch_figures() -> Report {
    let inst = |net, target: &[u64], objective| {
        Instance::new(net, Marking::from_counts(&[2, 0, 0, 0]), Marking::from_counts(target), objective).unwrap()
    };
    let reach = decide_reach_rawn(&inst(samples::two_branch_workflow(), &[0, 0, 0, 1], Objective::Reach)).unwrap();
    let witness_ok = reach.answer == Answer::Yes
        && reach.witness.as_deref() == Some(&[TransitionId(0), TransitionId(0), TransitionId(1)][..]);
    let no = decide_reach_rawn(&inst(samples::two_branch_workflow(), &[0, 0, 1, 0], Objective::Reach)).unwrap();
    let cover = decide_cover_rapn(&inst(samples::two_branch(), &[0, 0, 1, 0], Objective::Cover)).unwrap();
    report(
        witness_ok && no.answer == Answer::No && cover.answer == Answer::Yes,
        format!(
            "reach (0,0,0,1): {} witness {:?}; reach (0,0,1,0): {}; cover (0,0,1,0): {}",
            reach.answer, reach.witness, no.answer, cover.answer
        ),
    )
}

fn reset_firing() -> Report {
    let net = samples::reset_example();
    let out = fire(&net, &Marking::from_counts(&[6, 2, 1]), TransitionId(0)).unwrap();
    report(
        out == Marking::from_counts(&[3, 0, 4]),
        format!("(6,2,1) fires to {out}, expected (3,0,4)"),
    )
}

fn abstraction_soundness() -> Report {
    let mut r = rng(3);
    let shape = Shape {
        places: 5,
        transitions: 4,
        max_weight: 2,
        max_resets: 2,
        generators: true,
    };
    let (mut yes, mut no, mut violations) = (0, 0, Vec::new());
    for n in 0..COVER_NETS {
        let inst = random_cover_instance(&mut r, shape);
        let v = decide_cover_rapn(&inst).unwrap();
        let oracle = oracle_search(&inst, &budget(COVER_ORACLE_STATES));
        match v.answer {
            Answer::Yes => {
                yes += 1;
                let net = inst.net.as_reset().unwrap();
                let run = concretize_cover_witness(net, &inst.initial, v.witness.as_ref().unwrap(), &inst.target);
                let covers = run
                    .ok()
                    .and_then(|run| replay_concrete(net, &inst.initial, &run))
                    .is_some_and(|m| m.covers(&inst.target));
                if !covers {
                    violations.push(format!("#{n}: (b) concretized witness does not cover"));
                }
            }
            Answer::No => {
                no += 1;
                if oracle.answer == Answer::Yes {
                    violations.push(format!("#{n}: (c) decider no, oracle found a cover"));
                }
            }
            Answer::Exhausted => violations.push(format!("#{n}: decider exhausted")),
        }
        if oracle.answer == Answer::Yes && v.answer != Answer::Yes {
            violations.push(format!("#{n}: (a) oracle yes, decider {}", v.answer));
        }
    }
    report(
        violations.is_empty(),
        format!("{COVER_NETS} nets, {yes} coverable, {no} not; violations: {violations:?}"),
    )
}

struct NormCheck {
    bound: BigUint,
    violations: usize,
}

impl SearchObserver for NormCheck {
    fn on_state(&mut self, m: &Marking) {
        if m.norm() > self.bound {
            self.violations += 1;
        }
    }
}

fn reach_bound() -> Report {
    let mut r = rng(4);
    let (mut yes, mut violations) = (0, Vec::new());
    for n in 0..WORKFLOW_NETS {
        let inst = random_workflow_instance(&mut r);
        let mut obs = NormCheck {
            bound: reach_norm_bound(&inst),
            violations: 0,
        };
        let v = decide_reach_rawn_with(&inst, &mut obs).unwrap();
        let oracle = oracle_search(&inst, &budget(WORKFLOW_ORACLE_STATES));
        if obs.violations > 0 {
            violations.push(format!("#{n}: {} markings above the bound", obs.violations));
        }
        if oracle.answer == Answer::Exhausted || v.answer != oracle.answer {
            violations.push(format!("#{n}: decider {} oracle {}", v.answer, oracle.answer));
        }
        if v.answer == Answer::Yes {
            yes += 1;
            let end = replay_concrete(inst.net.as_reset().unwrap(), &inst.initial, v.witness.as_ref().unwrap());
            if end.as_ref() != Some(&inst.target) {
                violations.push(format!("#{n}: witness does not reach the target"));
            }
        }
    }
    report(
        violations.is_empty(),
        format!("{WORKFLOW_NETS} workflow nets, {yes} reachable; violations: {violations:?}"),
    )
}

/// Checks the step invariants of compiled nets on every explored edge.
struct Invariants<'a> {
    c: &'a CompiledQbfNet,
    target: Marking,
    edges: usize,
    violations: Vec<String>,
}

impl Invariants<'_> {
    fn exclusive(&self, m: &Marking) -> bool {
        (1..=self.c.k).all(|i| {
            [Var::Y(i), Var::X(i)].into_iter().all(|var| {
                let neg = self.c.place(PlaceRole::Literal(Literal::neg(var)));
                let pos = self.c.place(PlaceRole::Literal(Literal::pos(var)));
                m[neg].is_zero() || m[pos].is_zero()
            })
        })
    }
}

impl SearchObserver for Invariants<'_> {
    fn on_state(&mut self, m: &Marking) {
        if m.covers(&self.target) && *m != self.target {
            self.violations.push(format!("covering marking {m} differs from the target"));
        }
    }

    fn on_edge(&mut self, from: &Marking, t: TransitionId, to: &Marking) {
        self.edges += 1;
        let f = self.c.place(PlaceRole::Final);
        let name = self.c.net.transition(t).name();
        match (from.count(f), to.count(f)) {
            (Some(a), Some(b)) if b >= a && b - a <= BigUint::from(1u32) => {}
            _ => self.violations.push(format!("{name}: f changes from {} to {}", from[f], to[f])),
        }
        if !self.exclusive(to) {
            self.violations.push(format!("{name}: literal exclusivity broken in {to}"));
        }
        match (goodness_report(self.c, from), goodness_report(self.c, to)) {
            (Ok(a), Ok(b)) => {
                let grows = a.g.iter().zip(&b.g).chain(a.g_prime.iter().zip(&b.g_prime)).any(|(x, y)| y > x);
                if grows {
                    self.violations.push(format!("{name}: a balance function grew"));
                }
            }
            _ => self.violations.push(format!("{name}: goodness undefined")),
        }
    }
}

/// Replays a covering run and checks that every marking is good and the
/// last one is exactly the target.
fn check_covering_run(c: &CompiledQbfNet, run: &[TransitionId]) -> Result<(), String> {
    let trace = replay(&c.net, &c.initial_marking(), run, FiringMode::Concrete).map_err(|e| e.to_string())?;
    if trace.final_marking() != &c.target_marking() {
        return Err(format!("run ends in {}", trace.final_marking()));
    }
    for m in trace.markings() {
        if !goodness_report(c, m).map_err(|e| e.to_string())?.is_good {
            return Err(format!("bad marking {m} on a covering run"));
        }
    }
    Ok(())
}

#[derive(Default)]
struct QbfTally {
    formulas: usize,
    true_formulas: usize,
    edges: usize,
    mismatches: Vec<String>,
    invariant_violations: Vec<String>,
}

fn check_formula(q: &Qbf, tally: &mut QbfTally) {
    tally.formulas += 1;
    let truth = eval_qbf(q).unwrap();
    let (c, inst) = compile_qbf_to_rawn(q).unwrap();
    let mut obs = Invariants {
        c: &c,
        target: inst.target.clone(),
        edges: 0,
        violations: Vec::new(),
    };
    let v: Verdict = decide_cover_rapn_with(&inst, &CoverOptions::default(), &mut obs).unwrap();
    // the decider prunes, so also walk the concrete state space unpruned
    oracle_search_with(&inst, &budget(INVARIANT_STATES), &mut obs);
    tally.edges += obs.edges;
    if (v.answer == Answer::Yes) != truth || v.answer == Answer::Exhausted {
        tally.mismatches.push(format!("{q}: eval {truth}, decider {}", v.answer));
    }
    let mut broken = obs.violations;
    if let Some(w) = &v.witness {
        if let Err(e) = check_covering_run(&c, w) {
            broken.push(format!("decider witness: {e}"));
        }
    }
    if truth {
        tally.true_formulas += 1;
        match synthesize_cover_run(&c, q) {
            Ok(run) => {
                if let Err(e) = check_covering_run(&c, &run) {
                    broken.push(format!("synthesized run: {e}"));
                }
            }
            Err(e) => broken.push(format!("synthesis failed: {e}")),
        }
    }
    tally
        .invariant_violations
        .extend(broken.into_iter().map(|e| format!("{q}: {e}")));
}

fn k1_formulas() -> Vec<Qbf> {
    let lits = [
        Literal::pos(Var::Y(1)),
        Literal::neg(Var::Y(1)),
        Literal::pos(Var::X(1)),
        Literal::neg(Var::X(1)),
    ];
    let clauses: Vec<Clause> = (1u32..16)
        .map(|mask| {
            let chosen = lits.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| *l);
            Clause::new(chosen.collect()).unwrap()
        })
        .collect();
    let mut out = vec![Qbf::new(1, vec![]).unwrap()];
    for a in 0..clauses.len() {
        out.push(Qbf::new(1, vec![clauses[a].clone()]).unwrap());
        for b in a + 1..clauses.len() {
            out.push(Qbf::new(1, vec![clauses[a].clone(), clauses[b].clone()]).unwrap());
            for c in b + 1..clauses.len() {
                out.push(Qbf::new(1, vec![clauses[a].clone(), clauses[b].clone(), clauses[c].clone()]).unwrap());
            }
        }
    }
    out
}

fn random_k2_formula(r: &mut impl Rng) -> Qbf {
    let vars = [Var::Y(1), Var::X(1), Var::Y(2), Var::X(2)];
    let clauses = (0..r.gen_range(1..=4))
        .map(|_| {
            let width = r.gen_range(1..=3);
            let lits = vars
                .choose_multiple(r, width)
                .map(|v| Literal {
                    var: *v,
                    positive: r.gen_bool(0.5),
                })
                .collect();
            Clause::new(lits).unwrap()
        })
        .collect();
    Qbf::new(2, clauses).unwrap()
}

fn qbf_suite() -> (Report, Report) {
    let start = Instant::now();
    let mut tally = QbfTally::default();
    let k1 = k1_formulas();
    for q in &k1 {
        check_formula(q, &mut tally);
    }
    let mut r = rng(5);
    for _ in 0..K2_FORMULAS {
        check_formula(&random_k2_formula(&mut r), &mut tally);
    }
    let three = parse_qdimacs(samples::THREE_BLOCK_QDIMACS).unwrap();
    check_formula(&three, &mut tally);
    let (c, inst) = compile_qbf_to_rawn(&three).unwrap();
    let cover = decide_cover_rapn(&inst).unwrap();
    let run = synthesize_cover_run(&c, &three).unwrap();
    let end = replay_concrete(&c.net, &inst.initial, &run);
    let mut expected = c.net.zero_marking();
    expected.set(c.place(PlaceRole::Final), 8u64.into());
    let s = c.transition(TransitionRole::Satisfaction);
    let three_ok = cover.answer == Answer::Yes
        && end.as_ref() == Some(&expected)
        && run.iter().filter(|t| **t == s).count() == 8;
    let elapsed = start.elapsed();

    let equivalence = report(
        tally.mismatches.is_empty() && three_ok && k1.len() == 576 && elapsed <= QBF_TIME,
        format!(
            "{} k=1 and {K2_FORMULAS} k=2 formulas plus the three-block one, {} true; three-block coverable and \
             synthesized run ends at f=8: {three_ok}; mismatches: {:?} ({elapsed:.2?}, limit {QBF_TIME:?})",
            k1.len(),
            tally.true_formulas,
            tally.mismatches
        ),
    );
    let shown: Vec<&String> = tally.invariant_violations.iter().take(5).collect();
    let invariants = report(
        tally.invariant_violations.is_empty() && tally.edges > 0,
        format!(
            "{} explored edges over {} compiled nets; {} violations {shown:?}",
            tally.edges,
            tally.formulas,
            tally.invariant_violations.len()
        ),
    );
    (equivalence, invariants)
}

fn step_budget(steps: usize) -> SearchBudget {
    SearchBudget {
        max_steps: Some(steps),
        max_norm: None,
        max_states: None,
    }
}

fn reductions() -> Report {
    let mut r = rng(7);
    let mut violations = Vec::new();
    let (mut split_yes, mut copy_yes) = (0, 0);
    for n in 0..ZERO_TEST_INSTANCES {
        let inst = random_zero_test_instance(&mut r, false);
        let red = acyclify_zero_tests(&inst).unwrap();
        let out = red.instance.net.as_zero_test().unwrap();
        if !validate_structure(out, &ClaimedKind::Plain).unwrap().acyclic {
            violations.push(format!("split #{n}: output has a cycle"));
        }
        let src = oracle_search(&inst, &step_budget(ZERO_TEST_STEPS));
        let dst = oracle_search(&red.instance, &step_budget(3 * ZERO_TEST_STEPS));
        let agree = match (src.answer, dst.answer) {
            (Answer::Yes, Answer::Yes) => {
                split_yes += 1;
                let (a, b) = (src.witness.unwrap(), dst.witness.unwrap());
                let lifted = replay_concrete(out, &red.instance.initial, &red.lift_run(&a));
                b.len() == 3 * a.len() && lifted.as_ref() == Some(&red.instance.target)
            }
            (Answer::Yes, _) | (_, Answer::Yes) => false,
            (s, Answer::No) => s == Answer::No,
            _ => true,
        };
        if !agree {
            violations.push(format!("split #{n}: source {} vs split {}", src.answer, dst.answer));
        }
    }
    for n in 0..ZERO_TEST_INSTANCES {
        let inst = random_zero_test_instance(&mut r, true);
        let red = zero_tests_to_resets(&inst).unwrap();
        let out = red.instance.net.as_reset().unwrap();
        if !validate_structure(out, &ClaimedKind::Plain).unwrap().acyclic {
            violations.push(format!("copy #{n}: output has a cycle"));
        }
        let src = oracle_search(&inst, &step_budget(ZERO_TEST_STEPS));
        let dst = oracle_search(&red.instance, &step_budget(ZERO_TEST_STEPS));
        let agree = match (src.answer, dst.answer) {
            (Answer::Yes, Answer::Yes) => {
                copy_yes += 1;
                let (a, b) = (src.witness.unwrap(), dst.witness.unwrap());
                let projected = replay_concrete(inst.net.as_zero_test().unwrap(), &inst.initial, &red.project_run(&b));
                a.len() == b.len() && projected.as_ref() == Some(&inst.target)
            }
            (Answer::Yes, _) | (_, Answer::Yes) => false,
            (s, Answer::No) => s == Answer::No,
            _ => true,
        };
        if !agree {
            violations.push(format!("copy #{n}: source {} vs copy {}", src.answer, dst.answer));
        }
    }
    report(
        violations.is_empty(),
        format!(
            "{ZERO_TEST_INSTANCES} split instances ({split_yes} reachable), {ZERO_TEST_INSTANCES} copy instances \
             ({copy_yes} reachable); violations: {violations:?}"
        ),
    )
}

fn unary() -> Report {
    let mut r = rng(8);
    let (mut yes, mut violations) = (0, Vec::new());
    for n in 0..BINARY_INSTANCES {
        let inst = random_binary_instance(&mut r, BINARY_MAX_WEIGHT);
        let red = binary_to_unary(&inst).unwrap();
        let net = inst.net.as_reset().unwrap();
        let bits: usize = net
            .transitions()
            .iter()
            .flat_map(|t| t.pre().iter().chain(t.post()))
            .map(|(_, w)| w.bits() as usize)
            .sum();
        if red.gadget_size() > 2 * bits {
            violations.push(format!("#{n}: gadget size {} exceeds 2·{bits}", red.gadget_size()));
        }
        let src = oracle_search(&inst, &budget(BINARY_ORACLE_STATES));
        let dst = oracle_search(&red.instance, &budget(BINARY_ORACLE_STATES));
        if src.answer == Answer::Exhausted || src.answer != dst.answer {
            violations.push(format!("#{n}: source {} vs unary {}", src.answer, dst.answer));
        }
        if let Some(w) = &src.witness {
            yes += 1;
            let lifted = replay_concrete(red.instance.net.arcs(), &red.instance.initial, &red.lift_run(w));
            if !lifted.is_some_and(|m| m.covers(&red.instance.target)) {
                violations.push(format!("#{n}: lifted witness does not cover"));
            }
        }
    }
    report(
        violations.is_empty(),
        format!("{BINARY_INSTANCES} instances, {yes} coverable; violations: {violations:?}"),
    )
}

fn main() {
    let (qbf_equivalence, qbf_invariants) = qbf_suite();
    let results = [
        timed(Some(FIGURE_TIME), two_branch_figures),
        timed(Some(SEMANTICS_TIME), reset_firing),
        timed(Some(COVER_TIME), abstraction_soundness),
        timed(None, reach_bound),
        qbf_equivalence,
        qbf_invariants,
        timed(None, reductions),
        timed(None, unary),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {}", i + 1, r.detail);
        failed += usize::from(!r.passed);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
