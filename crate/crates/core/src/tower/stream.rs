//! The event-stream data model and its line-oriented text format.

use std::fmt::{self, Write as _};
use std::io::BufRead;
use std::str::FromStr;

use crate::format;
use crate::geometry::Metric;
use crate::{Error, Result};

/// Which tower a stream encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Order complexes connected by the induced simplicial maps.
    Simplicial,
    /// The cubical complexes themselves, connected by the cubical maps.
    Cubical,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Simplicial => "simplicial",
            Mode::Cubical => "cubical",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplicial" => Ok(Mode::Simplicial),
            "cubical" => Ok(Mode::Cubical),
            _ => Err(Error::InvalidParameter(format!(
                "unknown mode `{s}` (expected simplicial or cubical)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamHeader {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub metric: Metric,
    pub seed: u64,
    pub lambda: f64,
    pub m: u32,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// Subsequent events happen at scale `alpha`.
    Scale(f64),
    /// A new simplex (or cube) with a fresh id. For `dim == 0` the vertex
    /// list is empty and the id names the new vertex.
    Include {
        id: usize,
        dim: usize,
        vertices: Vec<usize>,
    },
    /// Vertex `drop` is identified with vertex `keep < drop`.
    Contract { keep: usize, drop: usize },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Scale(a) => write!(f, "S {}", format::real(*a)),
            Event::Include { id, dim, vertices } => {
                write!(f, "I {id} {dim}")?;
                for v in vertices {
                    write!(f, " {v}")?;
                }
                Ok(())
            }
            Event::Contract { keep, drop } => write!(f, "C {keep} {drop}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    pub header: StreamHeader,
    pub events: Vec<Event>,
}

impl EventStream {
    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        writeln!(
            out,
            "H {} {} {} {} {} {} {} {}",
            h.n,
            h.d,
            h.k,
            h.metric,
            h.seed,
            format::real(h.lambda),
            h.m,
            h.mode
        )
        .expect("write to string");
        for e in &self.events {
            writeln!(out, "{e}").expect("write to string");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut header = None;
        let mut events = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let err = |msg: String| Error::Parse { line: lineno, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let Some((&tag, rest)) = toks.split_first() else {
                continue;
            };
            if header.is_none() {
                if tag != "H" {
                    return Err(err("stream must start with an `H` header".into()));
                }
                header = Some(parse_header(rest).map_err(err)?);
                continue;
            }
            let event = match tag {
                "S" => match rest {
                    [a] => Event::Scale(
                        format::parse_real(a)
                            .filter(|a| a.is_finite() && *a >= 0.0)
                            .ok_or_else(|| err(format!("bad scale `{a}`")))?,
                    ),
                    _ => return Err(err("expected `S alpha`".into())),
                },
                "I" => {
                    let nums = parse_ids(rest).map_err(err)?;
                    if nums.len() < 2 {
                        return Err(err("expected `I id dim vertices...`".into()));
                    }
                    Event::Include {
                        id: nums[0],
                        dim: nums[1],
                        vertices: nums[2..].to_vec(),
                    }
                }
                "C" => match parse_ids(rest).map_err(err)?.as_slice() {
                    &[keep, drop] => Event::Contract { keep, drop },
                    _ => return Err(err("expected `C i j`".into())),
                },
                "H" => return Err(err("duplicate header".into())),
                _ => return Err(err(format!("unknown event tag `{tag}`"))),
            };
            events.push(event);
        }
        let header = header.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        Ok(EventStream { header, events })
    }

    /// Number of `Scale` events.
    pub fn scale_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Scale(_)))
            .count()
    }

    pub fn include_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Include { .. }))
            .count()
    }

    pub fn contract_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Contract { .. }))
            .count()
    }
}

fn parse_ids(toks: &[&str]) -> std::result::Result<Vec<usize>, String> {
    toks.iter()
        .map(|t| t.parse().map_err(|_| format!("bad integer `{t}`")))
        .collect()
}

fn parse_header(toks: &[&str]) -> std::result::Result<StreamHeader, String> {
    let &[n, d, k, metric, seed, lambda, m, mode] = toks else {
        return Err("expected `H n d k metric seed lambda m mode`".into());
    };
    let int = |t: &str, what: &str| t.parse::<usize>().map_err(|_| format!("bad {what} `{t}`"));
    Ok(StreamHeader {
        n: int(n, "n")?,
        d: int(d, "d")?,
        k: int(k, "k")?,
        metric: metric.parse().map_err(|e: Error| e.to_string())?,
        seed: seed.parse().map_err(|_| format!("bad seed `{seed}`"))?,
        lambda: format::parse_real(lambda)
            .filter(|l| l.is_finite() && *l > 0.0)
            .ok_or_else(|| format!("bad lambda `{lambda}`"))?,
        m: m.parse().map_err(|_| format!("bad m `{m}`"))?,
        mode: mode.parse().map_err(|e: Error| e.to_string())?,
    })
}
