//! Quantified Boolean formulas with a strictly alternating `∀y ∃x` prefix.
//!
//! Variables are numbered in prefix order: DIMACS variable `2i−1` is `y_i`
//! and `2i` is `x_i`. Only one variable per quantifier block is accepted.

use std::fmt::{self, Write as _};

use thiserror::Error;

/// Largest block count [`eval_qbf`] accepts.
pub const MAX_EVAL_BLOCKS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Universal variable of block `i` (1-based).
    Y(usize),
    /// Existential variable of block `i` (1-based).
    X(usize),
}

impl Var {
    pub fn block(self) -> usize {
        match self {
            Var::Y(i) | Var::X(i) => i,
        }
    }

    /// Position in the prefix, starting at 0.
    pub fn position(self) -> usize {
        match self {
            Var::Y(i) => 2 * (i - 1),
            Var::X(i) => 2 * (i - 1) + 1,
        }
    }

    pub fn from_position(pos: usize) -> Var {
        if pos.is_multiple_of(2) {
            Var::Y(pos / 2 + 1)
        } else {
            Var::X(pos / 2 + 1)
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Y(i) => write!(f, "y{i}"),
            Var::X(i) => write!(f, "x{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: Var,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: Var) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: Var) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var.position() as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var.position()] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "{}", self.var)
    }
}

/// A non-empty set of literals, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(Vec<Literal>);

impl Clause {
    /// Sorts and deduplicates; `None` for an empty clause.
    pub fn new(mut lits: Vec<Literal>) -> Option<Self> {
        lits.sort();
        lits.dedup();
        (!lits.is_empty()).then_some(Clause(lits))
    }

    /// The tautology `(¬v ∨ v)`.
    pub fn tautology(var: Var) -> Self {
        Clause(vec![Literal::neg(var), Literal::pos(var)])
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.holds(assignment))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Qbf {
    k: usize,
    clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QbfError {
    #[error("line {line}: malformed header, expected `p cnf <vars> <clauses>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: prefix must alternate `a`/`e` one variable at a time, starting with `a`")]
    NonAlternatingPrefix { line: usize },
    #[error("line {line}: variable {var} is not bound by the prefix")]
    UnboundVariable { line: usize, var: i64 },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("header announces {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("variable {var} out of range for {k} blocks")]
    VariableOutOfRange { var: Var, k: usize },
    #[error("evaluation supports at most {MAX_EVAL_BLOCKS} blocks, got {0}")]
    TooLarge(usize),
}

impl Qbf {
    pub fn new(k: usize, clauses: Vec<Clause>) -> Result<Self, QbfError> {
        for c in &clauses {
            for l in c.literals() {
                let b = l.var.block();
                if b == 0 || b > k {
                    return Err(QbfError::VariableOutOfRange { var: l.var, k });
                }
            }
        }
        Ok(Qbf { k, clauses })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn var_count(&self) -> usize {
        2 * self.k
    }
}

impl fmt::Display for Qbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.k {
            write!(f, "∀y{i} ∃x{i} ")?;
        }
        f.write_str(":")?;
        for (j, c) in self.clauses.iter().enumerate() {
            f.write_str(if j == 0 { " (" } else { " ∧ (" })?;
            for (n, l) in c.literals().iter().enumerate() {
                if n > 0 {
                    f.write_str(" ∨ ")?;
                }
                write!(f, "{l}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn syntax(line: usize, message: impl Into<String>) -> QbfError {
    QbfError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses the QDIMACS subset: a `p cnf V C` header, one quantifier line per
/// variable alternating `a` and `e`, then `C` zero-terminated clauses.
/// Lines starting with `c` or `#` are comments.
pub fn parse_qdimacs(text: &str) -> Result<Qbf, QbfError> {
    let mut header: Option<(usize, usize)> = None;
    // DIMACS variable -> prefix position
    let mut position: Vec<Option<usize>> = Vec::new();
    let mut bound = 0usize;
    let mut in_prefix = true;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let first = tokens.next().expect("line is not empty");
        if first == "p" {
            if header.is_some() {
                return Err(QbfError::MalformedHeader { line });
            }
            let rest: Vec<&str> = tokens.collect();
            let parsed = match rest.as_slice() {
                ["cnf", v, c] => v.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            let (v, c) = parsed.ok_or(QbfError::MalformedHeader { line })?;
            position = vec![None; v + 1];
            header = Some((v, c));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(QbfError::MalformedHeader { line });
        };
        if first == "a" || first == "e" {
            if !in_prefix {
                return Err(syntax(line, "quantifier after the first clause"));
            }
            let expect_universal = bound.is_multiple_of(2);
            if (first == "a") != expect_universal {
                return Err(QbfError::NonAlternatingPrefix { line });
            }
            let nums: Vec<&str> = tokens.collect();
            let [v, "0"] = nums.as_slice() else {
                return Err(QbfError::NonAlternatingPrefix { line });
            };
            let v: usize = v
                .parse()
                .map_err(|_| syntax(line, format!("bad variable `{v}`")))?;
            if v == 0 || v > vars || position[v].is_some() {
                return Err(syntax(line, format!("variable {v} is out of range or bound twice")));
            }
            position[v] = Some(bound);
            bound += 1;
            continue;
        }
        if in_prefix {
            in_prefix = false;
            if !bound.is_multiple_of(2) || bound != vars {
                return Err(QbfError::NonAlternatingPrefix { line });
            }
        }
        for tok in std::iter::once(first).chain(tokens) {
            let n: i64 = tok
                .parse()
                .map_err(|_| syntax(line, format!("bad literal `{tok}`")))?;
            if current.is_empty() {
                current_line = line;
            }
            if n == 0 {
                let lits = std::mem::take(&mut current);
                let clause = Clause::new(lits).ok_or(QbfError::EmptyClause { line })?;
                clauses.push(clause);
                continue;
            }
            let v = n.unsigned_abs() as usize;
            let pos = position
                .get(v)
                .copied()
                .flatten()
                .ok_or(QbfError::UnboundVariable { line, var: n })?;
            current.push(Literal {
                var: Var::from_position(pos),
                positive: n > 0,
            });
        }
    }
    let Some((vars, count)) = header else {
        return Err(QbfError::MalformedHeader { line: 0 });
    };
    if in_prefix && (!bound.is_multiple_of(2) || bound != vars) {
        return Err(QbfError::NonAlternatingPrefix {
            line: text.lines().count(),
        });
    }
    if !current.is_empty() {
        return Err(syntax(current_line, "clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(QbfError::ClauseCountMismatch {
            expected: count,
            found: clauses.len(),
        });
    }
    Qbf::new(vars / 2, clauses)
}

/// Writes `q` in the dialect [`parse_qdimacs`] reads.
pub fn serialize_qdimacs(q: &Qbf) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", q.var_count(), q.clauses.len());
    for v in 1..=q.var_count() {
        let _ = writeln!(out, "{} {v} 0", if v % 2 == 1 { 'a' } else { 'e' });
    }
    for c in &q.clauses {
        for l in c.literals() {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Truth value of `q` by plain recursion over the prefix.
pub fn eval_qbf(q: &Qbf) -> Result<bool, QbfError> {
    eval_partial(q, &[])
}

/// Truth value of `q` with the first `fixed.len()` prefix variables set.
pub fn eval_partial(q: &Qbf, fixed: &[bool]) -> Result<bool, QbfError> {
    if q.k > MAX_EVAL_BLOCKS {
        return Err(QbfError::TooLarge(q.k));
    }
    let mut assignment = vec![false; q.var_count()];
    assignment[..fixed.len()].copy_from_slice(fixed);
    Ok(eval_from(q, &mut assignment, fixed.len()))
}

fn eval_from(q: &Qbf, assignment: &mut [bool], pos: usize) -> bool {
    if pos == assignment.len() {
        return q.clauses.iter().all(|c| c.holds(assignment));
    }
    let universal = pos.is_multiple_of(2);
    for value in [false, true] {
        assignment[pos] = value;
        let r = eval_from(q, assignment, pos + 1);
        if universal && !r {
            return false;
        }
        if !universal && r {
            return true;
        }
    }
    universal
}

/// Appends the tautologies `(¬y_i ∨ y_i)` and `(¬x_i ∨ x_i)` for every
/// block that lacks them.
pub fn normalize_qbf(q: &Qbf) -> Qbf {
    let mut clauses = q.clauses.clone();
    for i in 1..=q.k {
        for var in [Var::Y(i), Var::X(i)] {
            let t = Clause::tautology(var);
            if !clauses.contains(&t) {
                clauses.push(t);
            }
        }
    }
    Qbf { k: q.k, clauses }
}
