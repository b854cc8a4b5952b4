//! Directed blockage graph.
//!
//! A blocked MR b contributes the edge BS -> b (its direct link is unusable)
//! and the edges b -> b-1 and b -> b+1 ("I cannot relay for you"). A flow
//! towards MR f loses its left relay mode when an edge f-1 -> f exists and
//! its right relay mode when f+1 -> f exists.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::channel::received_power_mw;
use crate::error::{Error, Result};
use crate::mode::{Mode, ModeSet};
use crate::scenario::Scenario;

/// A vertex of the blockage graph. MR indices are zero-based; the text form
/// numbers MRs from 1 (`MR1` is index 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Bs,
    Mr(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Bs => f.write_str("BS"),
            Node::Mr(i) => write!(f, "MR{}", i + 1),
        }
    }
}

impl FromStr for Node {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "BS" {
            return Ok(Node::Bs);
        }
        s.strip_prefix("MR")
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .map(|n| Node::Mr(n - 1))
            .ok_or_else(|| Error::InvalidInput(format!("unknown graph node {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockageGraph {
    mr_count: usize,
    edges: BTreeSet<(Node, Node)>,
}

/// Builds the graph for the blocked MR set of an F-MR train.
pub fn build_graph(blocked: &BTreeSet<usize>, mr_count: usize) -> Result<BlockageGraph> {
    let mut edges = BTreeSet::new();
    for &b in blocked {
        if b >= mr_count {
            return Err(Error::InvalidInput(format!("blocked MR index {b} out of range 0..{mr_count}")));
        }
        edges.insert((Node::Bs, Node::Mr(b)));
        if b > 0 {
            edges.insert((Node::Mr(b), Node::Mr(b - 1)));
        }
        if b + 1 < mr_count {
            edges.insert((Node::Mr(b), Node::Mr(b + 1)));
        }
    }
    Ok(BlockageGraph { mr_count, edges })
}

impl BlockageGraph {
    pub fn mr_count(&self) -> usize {
        self.mr_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: Node, to: Node) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn is_blocked(&self, mr: usize) -> bool {
        self.has_edge(Node::Bs, Node::Mr(mr))
    }

    /// Modes the graph and the train ends rule out for a flow towards `mr`.
    /// The UAV mode is never forbidden here.
    pub fn forbidden_modes(&self, mr: usize) -> ModeSet {
        let mut set = ModeSet::EMPTY;
        if self.is_blocked(mr) {
            set.insert(Mode::Direct);
        }
        if mr == 0 || self.has_edge(Node::Mr(mr - 1), Node::Mr(mr)) {
            set.insert(Mode::Left);
        }
        if mr + 1 >= self.mr_count || self.has_edge(Node::Mr(mr + 1), Node::Mr(mr)) {
            set.insert(Mode::Right);
        }
        set
    }

    /// Transmission modes left over once the forbidden ones are removed.
    pub fn allowed_modes(&self, mr: usize) -> ModeSet {
        let forbidden = self.forbidden_modes(mr);
        Mode::TRANSMIT.into_iter().filter(|m| !forbidden.contains(*m)).collect()
    }

    /// One `u->v` line per edge, in sorted order.
    pub fn to_edge_list(&self) -> String {
        self.edges.iter().map(|(u, v)| format!("{u}->{v}\n")).collect()
    }

    /// Parses the text produced by [`to_edge_list`](Self::to_edge_list).
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_edge_list(text: &str, mr_count: usize) -> Result<Self> {
        let mut edges = BTreeSet::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (u, v) = line
                .split_once("->")
                .ok_or_else(|| Error::InvalidInput(format!("malformed edge line {line:?}")))?;
            let (u, v): (Node, Node) = (u.parse()?, v.parse()?);
            for n in [u, v] {
                if let Node::Mr(i) = n {
                    if i >= mr_count {
                        return Err(Error::InvalidInput(format!("node {n} out of range for {mr_count} MRs")));
                    }
                }
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at {u}")));
            }
            edges.insert((u, v));
        }
        Ok(BlockageGraph { mr_count, edges })
    }
}

/// Blocked set derived from a received-power threshold: MR f is blocked when
/// its direct link delivers at most `threshold_mw`.
pub fn blocked_from_threshold(scenario: &Scenario, threshold_mw: f64) -> Result<BTreeSet<usize>> {
    let mut blocked = BTreeSet::new();
    for (i, &mr) in scenario.mr_pos.iter().enumerate() {
        if received_power_mw(scenario.bs_pos, mr, &scenario.params, scenario.alignment)? <= threshold_mw {
            blocked.insert(i);
        }
    }
    Ok(blocked)
}
