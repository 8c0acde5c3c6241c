//! Line-oriented text format for nets and instances.
//!
//! ```text
//! net two_branch workflow i f
//! place i
//! place p1
//! trans t1
//! arc i -> t1
//! arc t1 -> p1 2
//! reset t1 p1
//! initial i=1
//! target p1=2
//! objective cover
//! ```
//!
//! Declarations may appear anywhere in the file. `#` starts a comment at
//! the start of a line or after whitespace, so names such as `t#sim` are
//! allowed. A file uses either `reset` or `ztest` lines, never both.
//! Serialization lists everything in declaration order and is stable
//! under a second round trip.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::net::{AnyNet, Instance, Marking, Net, NetError, Objective, Tokens, ZeroTestNet};
use crate::structure::ClaimedKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown identifier `{id}`")]
    UnknownId { line: usize, id: String },
    #[error("line {line}: arc weight must be at least 1")]
    ZeroWeight { line: usize },
    #[error("line {line}: a net cannot have both resets and zero tests")]
    MixedResetZtest { line: usize },
    #[error("line {line}: {source}")]
    Net { line: usize, source: NetError },
}

/// A parsed net file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetDocument {
    pub name: String,
    pub kind: ClaimedKind,
    pub net: AnyNet,
    /// Present when the file has an `initial`, `target` or `objective` line.
    pub instance: Option<Instance>,
}

impl NetDocument {
    pub fn new(name: impl Into<String>, kind: ClaimedKind, net: impl Into<AnyNet>) -> Self {
        NetDocument {
            name: name.into(),
            kind,
            net: net.into(),
            instance: None,
        }
    }

    pub fn from_instance(name: impl Into<String>, kind: ClaimedKind, instance: Instance) -> Self {
        NetDocument {
            name: name.into(),
            kind,
            net: instance.net.clone(),
            instance: Some(instance),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut prev_space = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_space {
            return &line[..i];
        }
        prev_space = c.is_whitespace();
    }
    line
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn net_err(line: usize) -> impl Fn(NetError) -> FormatError {
    move |source| FormatError::Net { line, source }
}

fn parse_count(line: usize, s: &str) -> Result<BigUint, FormatError> {
    s.parse::<BigUint>()
        .map_err(|_| syntax(line, format!("`{s}` is not a natural number")))
}

/// Parses `p=n` entries separated by commas or whitespace. Unlisted places
/// are 0.
pub fn parse_marking(net: &Net, spec: &str) -> Result<Marking, FormatError> {
    parse_marking_at(net, spec.split(|c: char| c == ',' || c.is_whitespace()), 1)
}

fn parse_marking_at<'a>(
    net: &Net,
    entries: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<Marking, FormatError> {
    let mut m = net.zero_marking();
    let mut seen = vec![false; net.place_count()];
    for entry in entries.filter(|e| !e.is_empty()) {
        let (name, count) = entry
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected `place=count`, found `{entry}`")))?;
        let p = net.place_id(name).ok_or_else(|| FormatError::UnknownId {
            line,
            id: name.to_string(),
        })?;
        if std::mem::replace(&mut seen[p.0], true) {
            return Err(syntax(line, format!("place `{name}` listed twice")));
        }
        m.set(p, Tokens::Finite(parse_count(line, count)?));
    }
    Ok(m)
}

/// Formats the non-zero entries of `m` as `p=n` separated by `sep`.
pub fn format_marking(net: &Net, m: &Marking, sep: &str) -> String {
    m.iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(p, v)| format!("{}={v}", net.place_name(p)))
        .collect::<Vec<_>>()
        .join(sep)
}

pub fn parse_net_file(text: &str) -> Result<NetDocument, FormatError> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, w)| !w.is_empty())
        .collect();

    let Some(((header_line, header), body)) = lines.split_first() else {
        return Err(syntax(1, "empty file; expected `net <name>`"));
    };
    let header_line = *header_line;
    if header[0] != "net" {
        return Err(syntax(header_line, "the first line must be `net <name>`"));
    }
    let name = header
        .get(1)
        .ok_or_else(|| syntax(header_line, "missing net name"))?
        .to_string();
    let kind = match &header[2..] {
        [] => ClaimedKind::Plain,
        ["acyclic"] => ClaimedKind::Acyclic,
        ["workflow", i, f] => ClaimedKind::Workflow {
            initial: i.to_string(),
            final_place: f.to_string(),
        },
        _ => return Err(syntax(header_line, "expected `net <name> [acyclic | workflow <i> <f>]`")),
    };

    // declarations first, so arcs may mention nodes declared later
    let mut b = Net::builder();
    for (line, words) in body {
        let line = *line;
        match words[0] {
            "place" | "trans" => {
                let [_, id] = words[..] else {
                    return Err(syntax(line, format!("expected `{} <id>`", words[0])));
                };
                if id.contains('=') || id == "->" {
                    return Err(syntax(line, format!("invalid identifier `{id}`")));
                }
                if words[0] == "place" {
                    b.add_place(id).map_err(net_err(line))?;
                } else {
                    b.add_transition(id).map_err(net_err(line))?;
                }
            }
            "arc" | "reset" | "ztest" | "initial" | "target" | "objective" => {}
            "net" => return Err(syntax(line, "only one `net` header is allowed")),
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    if let ClaimedKind::Workflow { initial, final_place } = &kind {
        for id in [initial, final_place] {
            if b.place_id(id).is_none() {
                return Err(FormatError::UnknownId {
                    line: header_line,
                    id: id.clone(),
                });
            }
        }
    }

    let place = |b: &crate::net::NetBuilder, line, id: &str| {
        b.place_id(id).ok_or_else(|| FormatError::UnknownId {
            line,
            id: id.to_string(),
        })
    };
    let trans = |b: &crate::net::NetBuilder, line, id: &str| {
        b.transition_id(id).ok_or_else(|| FormatError::UnknownId {
            line,
            id: id.to_string(),
        })
    };

    let mut ztests: Vec<Vec<_>> = Vec::new();
    let mut first_reset = None;
    let mut first_ztest = None;
    let mut initial = None;
    let mut target = None;
    let mut objective = None;
    for (line, words) in body {
        let line = *line;
        match words[0] {
            "arc" => {
                let (from, to, weight) = match words[..] {
                    [_, from, "->", to] => (from, to, BigUint::one()),
                    [_, from, "->", to, w] => (from, to, parse_count(line, w)?),
                    _ => return Err(syntax(line, "expected `arc <from> -> <to> [<weight>]`")),
                };
                if weight.is_zero() {
                    return Err(FormatError::ZeroWeight { line });
                }
                match (b.place_id(from), b.transition_id(to), b.transition_id(from), b.place_id(to)) {
                    (Some(p), Some(t), _, _) => b.consume(t, p, weight),
                    (_, _, Some(t), Some(p)) => b.produce(t, p, weight),
                    _ => {
                        let unknown = [from, to]
                            .into_iter()
                            .find(|id| b.place_id(id).is_none() && b.transition_id(id).is_none());
                        return Err(match unknown {
                            Some(id) => FormatError::UnknownId {
                                line,
                                id: id.to_string(),
                            },
                            None => syntax(line, "an arc must join a place and a transition"),
                        });
                    }
                }
                .map_err(net_err(line))?;
            }
            kw @ ("reset" | "ztest") => {
                let [_, t, places @ ..] = &words[..] else {
                    unreachable!("words is non-empty");
                };
                if places.is_empty() {
                    return Err(syntax(line, format!("expected `{kw} <trans> <place> ...`")));
                }
                let t = trans(&b, line, t)?;
                if kw == "reset" {
                    first_reset.get_or_insert(line);
                } else {
                    first_ztest.get_or_insert(line);
                }
                if first_reset.is_some() && first_ztest.is_some() {
                    return Err(FormatError::MixedResetZtest { line });
                }
                for p in places {
                    let p = place(&b, line, p)?;
                    if kw == "reset" {
                        b.reset(t, p).map_err(net_err(line))?;
                    } else {
                        if ztests.len() <= t.0 {
                            ztests.resize(t.0 + 1, Vec::new());
                        }
                        ztests[t.0].push(p);
                    }
                }
            }
            kw @ ("initial" | "target") => {
                let slot = if kw == "initial" { &mut initial } else { &mut target };
                if slot.is_some() {
                    return Err(syntax(line, format!("duplicate `{kw}` line")));
                }
                *slot = Some((line, words[1..].to_vec()));
            }
            "objective" => {
                if objective.is_some() {
                    return Err(syntax(line, "duplicate `objective` line"));
                }
                objective = Some(match words[..] {
                    [_, "reach"] => Objective::Reach,
                    [_, "cover"] => Objective::Cover,
                    _ => return Err(syntax(line, "expected `objective reach|cover`")),
                });
            }
            _ => {}
        }
    }

    let base = b.build();
    let net: AnyNet = if first_ztest.is_some() {
        ZeroTestNet::new(base, ztests)
            .map_err(net_err(first_ztest.unwrap_or(header_line)))?
            .into()
    } else {
        base.into()
    };
    let instance = if initial.is_some() || target.is_some() || objective.is_some() {
        let arcs = net.arcs();
        let marking = |m: Option<(usize, Vec<&str>)>| match m {
            Some((line, words)) => parse_marking_at(arcs, words.into_iter(), line),
            None => Ok(arcs.zero_marking()),
        };
        let initial = marking(initial)?;
        let target = marking(target)?;
        Some(
            Instance::new(net.clone(), initial, target, objective.unwrap_or(Objective::Reach))
                .map_err(net_err(header_line))?,
        )
    } else {
        None
    };
    Ok(NetDocument {
        name,
        kind,
        net,
        instance,
    })
}

pub fn serialize_net_file(doc: &NetDocument) -> String {
    let net = doc.net.arcs();
    let mut out = String::new();
    let _ = match &doc.kind {
        ClaimedKind::Plain => writeln!(out, "net {}", doc.name),
        ClaimedKind::Acyclic => writeln!(out, "net {} acyclic", doc.name),
        ClaimedKind::Workflow { initial, final_place } => {
            writeln!(out, "net {} workflow {initial} {final_place}", doc.name)
        }
    };
    for name in net.place_names() {
        let _ = writeln!(out, "place {name}");
    }
    for t in net.transitions() {
        let _ = writeln!(out, "trans {}", t.name());
    }
    let weight = |w: &BigUint| if w.is_one() { String::new() } else { format!(" {w}") };
    for t in net.transitions() {
        for (p, w) in t.pre() {
            let _ = writeln!(out, "arc {} -> {}{}", net.place_name(*p), t.name(), weight(w));
        }
        for (p, w) in t.post() {
            let _ = writeln!(out, "arc {} -> {}{}", t.name(), net.place_name(*p), weight(w));
        }
    }
    for (id, t) in net.transition_ids().zip(net.transitions()) {
        let (kw, places) = match &doc.net {
            AnyNet::Reset(_) => ("reset", t.resets()),
            AnyNet::ZeroTest(z) => ("ztest", z.zero_tests(id)),
        };
        if !places.is_empty() {
            let names: Vec<&str> = places.iter().map(|p| net.place_name(*p)).collect();
            let _ = writeln!(out, "{kw} {} {}", t.name(), names.join(" "));
        }
    }
    if let Some(inst) = &doc.instance {
        for (kw, m) in [("initial", &inst.initial), ("target", &inst.target)] {
            let entries = format_marking(net, m, " ");
            if entries.is_empty() {
                let _ = writeln!(out, "{kw}");
            } else {
                let _ = writeln!(out, "{kw} {entries}");
            }
        }
        let _ = writeln!(out, "objective {}", inst.objective);
    }
    out
}
