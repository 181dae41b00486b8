//! Exact integer max-flow / min-cut (Dinic's blocking-flow method) with the
//! two canonical minimum cuts.
//!
//! The minimal cut is the set of nodes reachable from the source in the
//! final residual graph; the maximal cut is the complement of the nodes that
//! can still reach the sink. Every other minimum cut lies between them.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetArc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
}

/// An s-t network with nonnegative integer capacities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    node_count: usize,
    source: usize,
    sink: usize,
    arcs: Vec<NetArc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Minimal,
    Maximal,
}

/// Max-flow value, a minimum cut, and the per-arc flow certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub flow_value: i64,
    /// `source_side[v]` is true when `v` is on the source side of the cut.
    pub source_side: Vec<bool>,
    /// Flow on each arc, in [`FlowNetwork::arcs`] order.
    pub flow: Vec<i64>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize) -> Result<Self> {
        if source >= node_count || sink >= node_count {
            return Err(Error::InvalidNetwork(format!(
                "terminals ({source}, {sink}) outside 0..{node_count}"
            )));
        }
        if source == sink {
            return Err(Error::InvalidNetwork("source equals sink".into()));
        }
        Ok(FlowNetwork { node_count, source, sink, arcs: Vec::new() })
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: i64) -> Result<()> {
        if from >= self.node_count || to >= self.node_count {
            return Err(Error::InvalidNetwork(format!("arc ({from}, {to}) outside 0..{}", self.node_count)));
        }
        if capacity < 0 {
            return Err(Error::InvalidNetwork(format!("negative capacity on ({from}, {to})")));
        }
        self.arcs.push(NetArc { from, to, capacity });
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[NetArc] {
        &self.arcs
    }

    /// Copy with parallel arcs summed and zero-capacity arcs dropped.
    pub fn merge_parallel(&self) -> Result<FlowNetwork> {
        let mut merged: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for a in &self.arcs {
            let slot = merged.entry((a.from, a.to)).or_insert(0);
            *slot = slot.checked_add(a.capacity).ok_or(Error::Overflow("merging parallel arcs"))?;
        }
        let arcs = merged
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|((from, to), capacity)| NetArc { from, to, capacity })
            .collect();
        Ok(FlowNetwork { arcs, ..*self })
    }

    /// Total capacity of arcs leaving `source_side`.
    pub fn cut_capacity(&self, source_side: &[bool]) -> i128 {
        self.arcs
            .iter()
            .filter(|a| source_side[a.from] && !source_side[a.to])
            .map(|a| a.capacity as i128)
            .sum()
    }

    /// Fails when a flow value could exceed `i64`.
    pub fn check_capacity_bound(&self) -> Result<()> {
        let mut out_of_source: i64 = 0;
        for a in self.arcs.iter().filter(|a| a.from == self.source && a.to != self.source) {
            out_of_source = out_of_source
                .checked_add(a.capacity)
                .ok_or(Error::Overflow("bounding the flow value"))?;
        }
        Ok(())
    }

    /// Plain-text dump: a `p <nodes> <source> <sink>` header followed by one
    /// `from to capacity` line per arc.
    pub fn to_text(&self) -> String {
        let mut out = format!("p {} {} {}\n", self.node_count, self.source, self.sink);
        for a in &self.arcs {
            let _ = writeln!(out, "{} {} {}", a.from, a.to, a.capacity);
        }
        out
    }

    /// Parses [`FlowNetwork::to_text`] output. `#` starts a comment that runs
    /// to the end of the line; parallel arcs are merged.
    pub fn from_text(text: &str) -> Result<FlowNetwork> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::Format("empty network dump".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "p" {
            return Err(Error::Format(format!("line {no}: expected `p <nodes> <source> <sink>`")));
        }
        let num = |s: &str, no: usize| -> Result<usize> {
            s.parse().map_err(|_| Error::Format(format!("line {no}: bad integer `{s}`")))
        };
        let mut net = FlowNetwork::new(num(fields[1], no)?, num(fields[2], no)?, num(fields[3], no)?)?;
        for (no, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Format(format!("line {no}: expected `from to capacity`")));
            }
            let cap: i64 = parts[2]
                .parse()
                .map_err(|_| Error::Format(format!("line {no}: bad capacity `{}`", parts[2])))?;
            net.add_arc(num(parts[0], no)?, num(parts[1], no)?, cap)?;
        }
        net.merge_parallel()
    }
}

/// A finished max-flow computation; keeps the residual graph so both
/// canonical cuts can be read off.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    node_count: usize,
    source: usize,
    sink: usize,
    value: i64,
    // residual graph, edge 2a is arc a, edge 2a+1 its reverse
    head: Vec<usize>,
    residual: Vec<i64>,
    original: Vec<i64>,
    adj_start: Vec<usize>,
    adj: Vec<usize>,
}

impl FlowSolution {
    pub fn flow_value(&self) -> i64 {
        self.value
    }

    pub fn arc_flows(&self) -> Vec<i64> {
        (0..self.original.len()).map(|a| self.original[a] - self.residual[2 * a]).collect()
    }

    pub fn cut(&self, side: CutSide) -> Vec<bool> {
        match side {
            CutSide::Minimal => self.reachable_from_source(),
            CutSide::Maximal => self.reaching_sink().into_iter().map(|r| !r).collect(),
        }
    }

    pub fn into_cut_result(self, side: CutSide) -> CutResult {
        CutResult { flow_value: self.value, source_side: self.cut(side), flow: self.arc_flows() }
    }

    fn edges_of(&self, v: usize) -> &[usize] {
        &self.adj[self.adj_start[v]..self.adj_start[v + 1]]
    }

    fn reachable_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(u) = queue.pop_front() {
            for &e in self.edges_of(u) {
                let v = self.head[e];
                if self.residual[e] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn reaching_sink(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([self.sink]);
        seen[self.sink] = true;
        while let Some(w) = queue.pop_front() {
            for &e in self.edges_of(w) {
                // e^1 runs head[e] -> w
                let v = self.head[e];
                if self.residual[e ^ 1] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

struct Dinic {
    sol: FlowSolution,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl Dinic {
    fn new(net: &FlowNetwork) -> Self {
        let n = net.node_count;
        let m = net.arcs.len();
        let mut head = Vec::with_capacity(2 * m);
        let mut residual = Vec::with_capacity(2 * m);
        let mut degree = vec![0usize; n + 1];
        for a in &net.arcs {
            head.push(a.to);
            residual.push(a.capacity);
            head.push(a.from);
            residual.push(0);
            degree[a.from] += 1;
            degree[a.to] += 1;
        }
        let mut adj_start = vec![0usize; n + 1];
        for v in 0..n {
            adj_start[v + 1] = adj_start[v] + degree[v];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![0usize; 2 * m];
        for (a, arc) in net.arcs.iter().enumerate() {
            adj[fill[arc.from]] = 2 * a;
            fill[arc.from] += 1;
            adj[fill[arc.to]] = 2 * a + 1;
            fill[arc.to] += 1;
        }
        Dinic {
            sol: FlowSolution {
                node_count: n,
                source: net.source,
                sink: net.sink,
                value: 0,
                head,
                residual,
                original: net.arcs.iter().map(|a| a.capacity).collect(),
                adj_start,
                adj,
            },
            level: vec![-1; n],
            cursor: vec![0; n],
        }
    }

    fn build_levels(&mut self) -> bool {
        let s = &self.sol;
        self.level.fill(-1);
        self.level[s.source] = 0;
        let mut queue = VecDeque::from([s.source]);
        while let Some(u) = queue.pop_front() {
            for &e in s.edges_of(u) {
                let v = s.head[e];
                if s.residual[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    if v == s.sink {
                        return true;
                    }
                    queue.push_back(v);
                }
            }
        }
        self.level[s.sink] >= 0
    }

    fn blocking_flow(&mut self) -> i64 {
        let (source, sink) = (self.sol.source, self.sol.sink);
        self.cursor.copy_from_slice(&self.sol.adj_start[..self.sol.node_count]);
        let mut pushed: i64 = 0;
        let mut path: Vec<usize> = Vec::new();
        let mut u = source;
        loop {
            if u == sink {
                let f = path.iter().map(|&e| self.sol.residual[e]).min().unwrap_or(0);
                for &e in &path {
                    self.sol.residual[e] -= f;
                    self.sol.residual[e ^ 1] += f;
                }
                pushed += f;
                // retreat to the tail of the first saturated edge
                let cut = path.iter().position(|&e| self.sol.residual[e] == 0).unwrap_or(0);
                path.truncate(cut);
                u = path.last().map_or(source, |&e| self.sol.head[e]);
                continue;
            }
            let end = self.sol.adj_start[u + 1];
            let mut advanced = false;
            while self.cursor[u] < end {
                let e = self.sol.adj[self.cursor[u]];
                let v = self.sol.head[e];
                if self.sol.residual[e] > 0 && self.level[v] == self.level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                self.cursor[u] += 1;
            }
            if !advanced {
                match path.pop() {
                    None => return pushed,
                    Some(e) => {
                        // dead end: drop u from this phase
                        self.level[u] = -1;
                        u = self.sol.head[e ^ 1];
                        self.cursor[u] += 1;
                    }
                }
            }
        }
    }
}

/// Runs max-flow and keeps the residual graph.
pub fn solve(net: &FlowNetwork) -> Result<FlowSolution> {
    net.check_capacity_bound()?;
    let mut dinic = Dinic::new(net);
    while dinic.build_levels() {
        let f = dinic.blocking_flow();
        dinic.sol.value += f;
    }
    Ok(dinic.sol)
}

/// Max-flow with the minimal minimum cut.
pub fn max_flow(net: &FlowNetwork) -> Result<CutResult> {
    Ok(solve(net)?.into_cut_result(CutSide::Minimal))
}

/// Source side of the minimal or maximal minimum cut.
pub fn min_cut_extreme(net: &FlowNetwork, side: CutSide) -> Result<Vec<bool>> {
    Ok(solve(net)?.cut(side))
}
