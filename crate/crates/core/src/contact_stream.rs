//! Contact-sequence ingestion: parsing, binning and windowing.
//!
//! A contact sequence is a set of undirected, time-stamped contacts `(i, j, t)`.
//! Contacts are canonicalized to `i < j`, sorted by `(t, i, j)` and
//! deduplicated, so equal sequences have equal representations.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// A single undirected contact, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub i: NodeId,
    pub j: NodeId,
    pub t: f64,
}

impl ContactEvent {
    /// Builds a canonical contact; rejects self-contacts and invalid times.
    pub fn new(i: NodeId, j: NodeId, t: f64) -> Result<Self> {
        if i == j {
            return Err(Error::SelfLoop { line: 0, node: i });
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::domain(format!(
                "contact time must be finite and non-negative, got {t}"
            )));
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Ok(ContactEvent { i, j, t })
    }

    fn sort_key(&self) -> (f64, NodeId, NodeId) {
        (self.t, self.i, self.j)
    }
}

fn cmp_events(a: &ContactEvent, b: &ContactEvent) -> std::cmp::Ordering {
    let (ta, ia, ja) = a.sort_key();
    let (tb, ib, jb) = b.sort_key();
    ta.total_cmp(&tb).then(ia.cmp(&ib)).then(ja.cmp(&jb))
}

/// Canonicalized contact sequence with its active-time index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContactSequence {
    events: Vec<ContactEvent>,
    nodes: BTreeSet<NodeId>,
    active_times: Vec<f64>,
}

impl ContactSequence {
    /// Builds a sequence from already-validated contacts (any order, duplicates allowed).
    pub fn from_events(events: impl IntoIterator<Item = ContactEvent>) -> Self {
        let mut events: Vec<ContactEvent> = events
            .into_iter()
            .map(|e| {
                let (i, j) = if e.i < e.j { (e.i, e.j) } else { (e.j, e.i) };
                ContactEvent { i, j, t: e.t }
            })
            .collect();
        events.sort_by(cmp_events);
        events.dedup_by(|a, b| cmp_events(a, b).is_eq());

        let nodes = events.iter().flat_map(|e| [e.i, e.j]).collect();
        let mut active_times: Vec<f64> = events.iter().map(|e| e.t).collect();
        active_times.dedup();
        ContactSequence {
            events,
            nodes,
            active_times,
        }
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    /// Strictly increasing distinct contact times.
    pub fn active_times(&self) -> &[f64] {
        &self.active_times
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Times at which `node` takes part in at least one contact.
    pub fn node_active_times(&self, node: NodeId) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .events
            .iter()
            .filter(|e| e.i == node || e.j == node)
            .map(|e| e.t)
            .collect();
        times.dedup();
        times
    }

    /// True when every timestamp is an integer slice index.
    pub fn is_sliced(&self) -> bool {
        self.active_times
            .iter()
            .all(|t| t.fract() == 0.0 && *t <= i64::MAX as f64)
    }

    /// Coarse-grains times to `floor(t / bin_width)`; contacts sharing a bin collapse.
    pub fn bin(&self, bin_width: f64) -> Result<Self> {
        if !bin_width.is_finite() || bin_width <= 0.0 {
            return Err(Error::domain(format!(
                "bin width must be a positive finite number, got {bin_width}"
            )));
        }
        Ok(Self::from_events(self.events.iter().map(|e| ContactEvent {
            t: (e.t / bin_width).floor(),
            ..*e
        })))
    }

    /// Keeps contacts with `t_start <= t < t_end`, shifted so the window starts at 0.
    pub fn window(&self, t_start: f64, t_end: f64) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::domain("window bounds must be finite"));
        }
        if t_start >= t_end {
            return Err(Error::domain(format!(
                "window start {t_start} must precede window end {t_end}"
            )));
        }
        Ok(Self::from_events(
            self.events
                .iter()
                .filter(|e| e.t >= t_start && e.t < t_end)
                .map(|e| ContactEvent {
                    t: e.t - t_start,
                    ..*e
                }),
        ))
    }

    /// Writes the `t i j` line format read by [`parse_contacts`].
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.events.len() * 12);
        for e in &self.events {
            let _ = writeln!(out, "{} {} {}", e.t, e.i, e.j);
        }
        out
    }
}

/// Parses whitespace-separated `t i j` lines. `#` lines are comments and
/// columns beyond the third are ignored.
pub fn parse_contacts(text: &str) -> Result<ContactSequence> {
    parse_lines(text.lines().map(|l| Ok::<_, std::io::Error>(l.to_owned())))
}

/// Streaming variant of [`parse_contacts`].
pub fn read_contacts(reader: impl BufRead) -> Result<ContactSequence> {
    parse_lines(reader.lines())
}

fn parse_lines<E: std::fmt::Display>(
    lines: impl Iterator<Item = std::result::Result<String, E>>,
) -> Result<ContactSequence> {
    let mut events = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `t i j`, found {} field(s)", fields.len()),
            });
        }
        let t: f64 = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid timestamp `{}`", fields[0]),
        })?;
        let node = |s: &str| -> Result<NodeId> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node identifier `{s}`"),
            })
        };
        let i = node(fields[1])?;
        let j = node(fields[2])?;
        if !t.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite timestamp `{}`", fields[0]),
            });
        }
        if t < 0.0 {
            return Err(Error::domain(format!(
                "line {line_no}: negative timestamp {t}"
            )));
        }
        if i == j {
            return Err(Error::SelfLoop {
                line: line_no,
                node: i,
            });
        }
        events.push(ContactEvent::new(i, j, t)?);
    }
    Ok(ContactSequence::from_events(events))
}
