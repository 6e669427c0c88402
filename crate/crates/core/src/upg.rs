//! Filtered graph maps `f(E_i) = E_i · u_i` with each `u_i` a closed path
//! in the lower strata `G_{i-1}`.
//!
//! Representatives are supplied by the user (see `fixtures/`); this module
//! validates them, iterates and tightens edge paths, recognises
//! exceptional paths `E_i υ^k Ē_j`, detects splittings and searches for
//! closed paths whose `alpha` grows at least linearly.
//!
//! In JSON, edges are listed in filtration order and suffix entries name
//! edges, with a `~` prefix for the reversed edge.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::Automorphism;
use crate::word::{max_power, Letter, ReducedWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UpgError {
    #[error("invalid graph: {0}")]
    Structural(String),
    #[error("edge path exceeded {cap} edges")]
    LengthBudgetExceeded { cap: usize },
    #[error("no splitting found within {0} iterations")]
    NotFoundWithinBudget(usize),
    #[error("no growth witness found")]
    NoWitnessFound,
    #[error("path is not {0}")]
    BadPath(&'static str),
    #[error("not an exceptional path: {0}")]
    BadExceptional(String),
    #[error("graph is not a rose, cannot read off an automorphism")]
    NotARose,
}

pub const DEFAULT_LENGTH_CAP: usize = 10_000_000;

/// An edge traversed forwards (`E_i`) or backwards (`Ē_i`); `edge` is
/// 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl DirectedEdge {
    pub fn forward(edge: usize) -> DirectedEdge {
        DirectedEdge { edge, forward: true }
    }

    pub fn backward(edge: usize) -> DirectedEdge {
        DirectedEdge { edge, forward: false }
    }

    pub fn inverse(self) -> DirectedEdge {
        DirectedEdge {
            edge: self.edge,
            forward: !self.forward,
        }
    }

    fn signed(self) -> i64 {
        let i = self.edge as i64 + 1;
        if self.forward {
            i
        } else {
            -i
        }
    }
}

fn push_tight(stack: &mut Vec<DirectedEdge>, e: DirectedEdge) {
    if stack.last() == Some(&e.inverse()) {
        stack.pop();
    } else {
        stack.push(e);
    }
}

/// A sequence of directed edges. Paths produced by this module are tight.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath(Vec<DirectedEdge>);

impl EdgePath {
    pub fn new(edges: Vec<DirectedEdge>) -> EdgePath {
        EdgePath(edges)
    }

    /// `[[·]]`: cancels every backtrack.
    pub fn tightened(edges: impl IntoIterator<Item = DirectedEdge>) -> EdgePath {
        let mut stack = Vec::new();
        for e in edges {
            push_tight(&mut stack, e);
        }
        EdgePath(stack)
    }

    pub fn edges(&self) -> &[DirectedEdge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_tight(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn inverse(&self) -> EdgePath {
        EdgePath(self.0.iter().rev().map(|e| e.inverse()).collect())
    }

    pub fn concat(&self, other: &EdgePath) -> EdgePath {
        EdgePath::tightened(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn power(&self, k: usize) -> EdgePath {
        EdgePath::tightened((0..k).flat_map(|_| self.0.iter().copied()))
    }

    /// `alpha` over the edge alphabet.
    pub fn alpha(&self) -> usize {
        max_power(&self.0)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0.iter().map(|e| e.signed()).collect()
    }
}

impl Serialize for DirectedEdge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.signed().serialize(s)
    }
}

impl Serialize for EdgePath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_signed().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum VertexRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EdgeJson {
    name: String,
    from: VertexRef,
    to: VertexRef,
    #[serde(default)]
    suffix: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

/// A graph with edges `E_1, ..., E_K` in filtration order and
/// `f(E_i) = E_i · u_i`. Vertices are fixed by `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredGraphMap {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    suffixes: Vec<EdgePath>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    LowerStratumViolation,
    DisconnectedSuffix,
    SuffixNotClosed,
    SuffixNotTight,
    SplittingFailure,
    GraphDisconnected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub kind: IssueKind,
    /// 1-based edge index, when the issue concerns one stratum.
    pub index: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub strata: usize,
    pub issues: Vec<Issue>,
}

/// An edge `E_i` with `f(E_i) = E_i υ^l` for a closed indivisible Nielsen
/// path `υ`, `l > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearEdge {
    pub edge: usize,
    pub nielsen_loop: EdgePath,
    pub exponent: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NielsenPathRecord {
    pub path: EdgePath,
    pub indivisible: bool,
}

/// `E_i υ^power Ē_j`, a negative power meaning `ῡ^|power|`. Indices are
/// 1-based with `j <= i`; `f(E_i) = E_i υ^l`, `f(E_j) = E_j υ^s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalPath {
    pub i: usize,
    pub j: usize,
    pub power: i64,
    pub nielsen_loop: EdgePath,
    pub l: usize,
    pub s: usize,
}

impl ExceptionalPath {
    pub fn is_fixed(&self) -> bool {
        self.l == self.s
    }

    pub fn to_edge_path(&self) -> EdgePath {
        let body = if self.power >= 0 {
            self.nielsen_loop.power(self.power as usize)
        } else {
            self.nielsen_loop.inverse().power(self.power.unsigned_abs() as usize)
        };
        let mut edges = vec![DirectedEdge::forward(self.i - 1)];
        edges.extend_from_slice(body.edges());
        edges.push(DirectedEdge::backward(self.j - 1));
        EdgePath::tightened(edges)
    }
}

/// `[[f^k(E_i υ^r Ē_j)]] = E_i υ^{k(l-s)+r} Ē_j`.
pub fn exceptional_closed_form(e: &ExceptionalPath, k: u64) -> ExceptionalPath {
    let mut out = e.clone();
    out.power = e.power + k as i64 * (e.l as i64 - e.s as i64);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    Edge(DirectedEdge),
    /// The path reads `to_edge_path()` or, when `reversed`, its inverse.
    Exceptional { path: ExceptionalPath, reversed: bool },
}

impl Piece {
    pub fn to_edge_path(&self) -> EdgePath {
        match self {
            Piece::Edge(e) => EdgePath::new(vec![*e]),
            Piece::Exceptional { path, reversed } => {
                let p = path.to_edge_path();
                if *reversed {
                    p.inverse()
                } else {
                    p
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Splitting {
    /// Least `M` at which `[[f^M(σ)]]` and `[[f^{M+1}(σ)]]` both split.
    pub m: usize,
    pub path: EdgePath,
    pub pieces: Vec<Piece>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessCertificate {
    pub sigma: EdgePath,
    /// Least-squares slope of `alpha_k` against `k` on the second half.
    pub slope: f64,
    /// `min_k (alpha_k - k)`, so `alpha_k >= k + intercept` on the table.
    pub intercept: i64,
    /// `(k, alpha([[f^k(σ)]]))` for `k = 1..=K`.
    pub table: Vec<(u64, usize)>,
}

pub const DEFAULT_WITNESS_ITERATIONS: usize = 50;
/// Tolerance on the unit slope.
pub const SLOPE_TOLERANCE: f64 = 0.02;

impl FilteredGraphMap {
    pub fn from_json(text: &str) -> Result<FilteredGraphMap, crate::Error> {
        let raw: GraphJson = serde_json::from_str(text)?;
        FilteredGraphMap::from_raw(raw).map_err(Into::into)
    }

    fn from_raw(raw: GraphJson) -> Result<FilteredGraphMap, UpgError> {
        let structural = |m: String| UpgError::Structural(m);
        let mut vertex_index = HashMap::new();
        for (k, v) in raw.vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), k).is_some() {
                return Err(structural(format!("duplicate vertex {v:?}")));
            }
        }
        let resolve = |r: &VertexRef| -> Result<usize, UpgError> {
            match r {
                VertexRef::Index(k) if *k < raw.vertices.len() => Ok(*k),
                VertexRef::Index(k) => Err(structural(format!("vertex index {k} out of range"))),
                VertexRef::Name(n) => vertex_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| structural(format!("dangling edge endpoint {n:?}"))),
            }
        };
        let mut edge_index = HashMap::new();
        let mut edges = Vec::new();
        for (k, e) in raw.edges.iter().enumerate() {
            if e.name.starts_with('~') || e.name.is_empty() {
                return Err(structural(format!("bad edge name {:?}", e.name)));
            }
            if edge_index.insert(e.name.clone(), k).is_some() {
                return Err(structural(format!("duplicate edge {:?}", e.name)));
            }
            edges.push(Edge {
                name: e.name.clone(),
                from: resolve(&e.from)?,
                to: resolve(&e.to)?,
            });
        }
        let mut suffixes = Vec::new();
        for e in &raw.edges {
            let path = e
                .suffix
                .iter()
                .map(|s| {
                    let (name, forward) = match s.strip_prefix('~') {
                        Some(n) => (n, false),
                        None => (s.as_str(), true),
                    };
                    edge_index
                        .get(name)
                        .map(|&edge| DirectedEdge { edge, forward })
                        .ok_or_else(|| structural(format!("unknown edge {s:?} in suffix of {}", e.name)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            suffixes.push(EdgePath::new(path));
        }
        Ok(FilteredGraphMap {
            vertices: raw.vertices,
            edges,
            suffixes,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = GraphJson {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .zip(&self.suffixes)
                .map(|(e, u)| EdgeJson {
                    name: e.name.clone(),
                    from: VertexRef::Name(self.vertices[e.from].clone()),
                    to: VertexRef::Name(self.vertices[e.to].clone()),
                    suffix: self.path_names(u),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("graph serializes")
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn suffix(&self, edge: usize) -> &EdgePath {
        &self.suffixes[edge]
    }

    pub fn edge_by_name(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// Parses names like `["E2", "~E1"]` into an edge path (not tightened).
    pub fn path(&self, names: &[&str]) -> Result<EdgePath, UpgError> {
        names
            .iter()
            .map(|s| {
                let (name, forward) = match s.strip_prefix('~') {
                    Some(n) => (n, false),
                    None => (*s, true),
                };
                self.edge_by_name(name)
                    .map(|edge| DirectedEdge { edge, forward })
                    .ok_or_else(|| UpgError::Structural(format!("unknown edge {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EdgePath::new)
    }

    pub fn path_names(&self, p: &EdgePath) -> Vec<String> {
        p.edges()
            .iter()
            .map(|e| {
                let n = &self.edges[e.edge].name;
                if e.forward {
                    n.clone()
                } else {
                    format!("~{n}")
                }
            })
            .collect()
    }

    pub fn initial_vertex(&self, e: DirectedEdge) -> usize {
        let edge = &self.edges[e.edge];
        if e.forward {
            edge.from
        } else {
            edge.to
        }
    }

    pub fn terminal_vertex(&self, e: DirectedEdge) -> usize {
        self.initial_vertex(e.inverse())
    }

    pub fn is_connected_path(&self, p: &EdgePath) -> bool {
        p.edges()
            .windows(2)
            .all(|w| self.terminal_vertex(w[0]) == self.initial_vertex(w[1]))
    }

    pub fn is_closed(&self, p: &EdgePath) -> bool {
        match (p.edges().first(), p.edges().last()) {
            (Some(&a), Some(&b)) => self.initial_vertex(a) == self.terminal_vertex(b),
            _ => true,
        }
    }

    fn check_path(&self, p: &EdgePath) -> Result<(), UpgError> {
        if p.edges().iter().any(|e| e.edge >= self.edges.len()) {
            return Err(UpgError::Structural("edge index out of range".into()));
        }
        if !self.is_connected_path(p) {
            return Err(UpgError::BadPath("connected"));
        }
        if !p.is_tight() {
            return Err(UpgError::BadPath("tight"));
        }
        Ok(())
    }

    fn push_image(&self, out: &mut Vec<DirectedEdge>, e: DirectedEdge) {
        let u = &self.suffixes[e.edge];
        if e.forward {
            push_tight(out, e);
            for &x in u.edges() {
                push_tight(out, x);
            }
        } else {
            for &x in u.edges().iter().rev() {
                push_tight(out, x.inverse());
            }
            push_tight(out, e);
        }
    }

    /// `[[f(γ)]]`.
    pub fn apply(&self, p: &EdgePath) -> EdgePath {
        let mut out = Vec::with_capacity(p.len() * 2);
        for &e in p.edges() {
            self.push_image(&mut out, e);
        }
        EdgePath(out)
    }

    pub fn iterate_path(&self, p: &EdgePath, k: usize) -> Result<EdgePath, UpgError> {
        self.iterate_path_with_cap(p, k, DEFAULT_LENGTH_CAP)
    }

    /// `[[f^k(γ)]]`, tightening after every application.
    pub fn iterate_path_with_cap(&self, p: &EdgePath, k: usize, cap: usize) -> Result<EdgePath, UpgError> {
        self.check_path(p)?;
        let mut cur = p.clone();
        for _ in 0..k {
            cur = self.apply(&cur);
            if cur.len() > cap {
                return Err(UpgError::LengthBudgetExceeded { cap });
            }
        }
        Ok(cur)
    }

    pub fn validate_upg_rep(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (i, u) in self.suffixes.iter().enumerate() {
            let index = Some(i + 1);
            let mut stratum_ok = true;
            if let Some(bad) = u.edges().iter().find(|e| e.edge >= i) {
                stratum_ok = false;
                issues.push(Issue {
                    kind: IssueKind::LowerStratumViolation,
                    index,
                    message: format!(
                        "lower-stratum violation at i={}: suffix crosses {}",
                        i + 1,
                        self.edges[bad.edge].name
                    ),
                });
            }
            if !self.is_connected_path(u) {
                stratum_ok = false;
                issues.push(Issue {
                    kind: IssueKind::DisconnectedSuffix,
                    index,
                    message: format!("suffix of {} is not an edge path", self.edges[i].name),
                });
            }
            let at = self.edges[i].to;
            if let (Some(&first), Some(&last)) = (u.edges().first(), u.edges().last()) {
                if self.initial_vertex(first) != at || self.terminal_vertex(last) != at {
                    stratum_ok = false;
                    issues.push(Issue {
                        kind: IssueKind::SuffixNotClosed,
                        index,
                        message: format!(
                            "suffix of {} is not a closed path at {}",
                            self.edges[i].name, self.vertices[at]
                        ),
                    });
                }
            }
            if !u.is_tight() {
                stratum_ok = false;
                issues.push(Issue {
                    kind: IssueKind::SuffixNotTight,
                    index,
                    message: format!("suffix of {} is not tight", self.edges[i].name),
                });
            }
            if stratum_ok {
                // E_i · u_i must be a 1-splitting of f(E_i)
                let e = DirectedEdge::forward(i);
                let mut edges = vec![e];
                edges.extend_from_slice(u.edges());
                let whole = self.apply(&EdgePath::new(edges));
                let mut split = self.apply(&EdgePath::new(vec![e])).0;
                split.extend_from_slice(self.apply(u).edges());
                if whole.0 != split {
                    issues.push(Issue {
                        kind: IssueKind::SplittingFailure,
                        index,
                        message: format!("E_{} · u_{} is not a splitting", i + 1, i + 1),
                    });
                }
            }
        }
        if !self.graph_connected() {
            issues.push(Issue {
                kind: IssueKind::GraphDisconnected,
                index: None,
                message: "graph is not connected".into(),
            });
        }
        ValidationReport {
            valid: issues.is_empty(),
            strata: self.edges.len(),
            issues,
        }
    }

    fn graph_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return self.edges.is_empty();
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    pub fn is_nielsen(&self, p: &EdgePath) -> bool {
        !p.is_empty() && self.apply(p) == *p
    }

    pub fn nielsen_record(&self, p: &EdgePath) -> Option<NielsenPathRecord> {
        if !self.is_nielsen(p) {
            return None;
        }
        let divisible = (1..p.len()).any(|cut| {
            self.is_nielsen(&EdgePath::new(p.edges()[..cut].to_vec()))
                && self.is_nielsen(&EdgePath::new(p.edges()[cut..].to_vec()))
        });
        Some(NielsenPathRecord {
            path: p.clone(),
            indivisible: !divisible,
        })
    }

    /// Edges twisting around a closed indivisible Nielsen path.
    pub fn linear_edges(&self) -> Vec<LinearEdge> {
        let mut out = Vec::new();
        for (i, u) in self.suffixes.iter().enumerate() {
            if u.is_empty() || !u.is_tight() {
                continue;
            }
            let (root, exponent) = primitive_root(u.edges());
            let root = EdgePath::new(root);
            if !self.is_closed(&root) {
                continue;
            }
            if let Some(rec) = self.nielsen_record(&root) {
                if rec.indivisible {
                    out.push(LinearEdge {
                        edge: i,
                        nielsen_loop: root,
                        exponent,
                    });
                }
            }
        }
        out
    }

    /// Builds `E_i υ^power Ē_j` (1-based, `j <= i`) from linear edges `i`
    /// and `j` sharing the same Nielsen loop.
    pub fn exceptional(&self, i: usize, j: usize, power: i64) -> Result<ExceptionalPath, UpgError> {
        if j > i || j == 0 || i > self.edges.len() {
            return Err(UpgError::BadExceptional(format!("need 1 <= j <= i <= K, got i={i}, j={j}")));
        }
        let linear = self.linear_edges();
        let find = |e: usize| linear.iter().find(|l| l.edge == e - 1);
        let (li, lj) = match (find(i), find(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(UpgError::BadExceptional(format!("E{i} and E{j} must both be linear"))),
        };
        if li.nielsen_loop != lj.nielsen_loop {
            return Err(UpgError::BadExceptional("edges twist around different loops".into()));
        }
        if i == j && power == 0 {
            return Err(UpgError::BadExceptional("E_i Ē_i is not tight".into()));
        }
        Ok(ExceptionalPath {
            i,
            j,
            power,
            nielsen_loop: li.nielsen_loop.clone(),
            l: li.exponent,
            s: lj.exponent,
        })
    }

    /// Greedy longest-match parse into single edges and exceptional paths.
    pub fn parse_pieces(&self, p: &EdgePath) -> Vec<Piece> {
        let linear: HashMap<usize, LinearEdge> =
            self.linear_edges().into_iter().map(|l| (l.edge, l)).collect();
        let e = p.edges();
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < e.len() {
            let cur = e[pos];
            let mut best: Option<(usize, Piece)> = None;
            if let (true, Some(la)) = (cur.forward, linear.get(&cur.edge)) {
                for dir in [1i64, -1] {
                    let unit = if dir > 0 {
                        la.nielsen_loop.clone()
                    } else {
                        la.nielsen_loop.inverse()
                    };
                    let m = unit.len();
                    let mut copies = 0;
                    while pos + 1 + (copies + 1) * m <= e.len()
                        && e[pos + 1 + copies * m..pos + 1 + (copies + 1) * m] == *unit.edges()
                    {
                        copies += 1;
                    }
                    for k in (0..=copies).rev() {
                        let end = pos + 1 + k * m;
                        if end >= e.len() || e[end].forward {
                            continue;
                        }
                        let b = e[end].edge;
                        let Some(lb) = linear.get(&b) else { continue };
                        if lb.nielsen_loop != la.nielsen_loop || (b == cur.edge && k == 0) {
                            continue;
                        }
                        let len = k * m + 2;
                        if best.as_ref().map_or(true, |(l, _)| len > *l) {
                            let power = dir * k as i64;
                            let (a1, b1) = (cur.edge + 1, b + 1);
                            let piece = if a1 >= b1 {
                                Piece::Exceptional {
                                    path: ExceptionalPath {
                                        i: a1,
                                        j: b1,
                                        power,
                                        nielsen_loop: la.nielsen_loop.clone(),
                                        l: la.exponent,
                                        s: lb.exponent,
                                    },
                                    reversed: false,
                                }
                            } else {
                                Piece::Exceptional {
                                    path: ExceptionalPath {
                                        i: b1,
                                        j: a1,
                                        power: -power,
                                        nielsen_loop: la.nielsen_loop.clone(),
                                        l: lb.exponent,
                                        s: la.exponent,
                                    },
                                    reversed: true,
                                }
                            };
                            best = Some((len, piece));
                        }
                        break;
                    }
                }
            }
            match best {
                Some((len, piece)) => {
                    out.push(piece);
                    pos += len;
                }
                None => {
                    out.push(Piece::Edge(cur));
                    pos += 1;
                }
            }
        }
        out
    }

    /// Whether juxtaposing the tightened images of the pieces needs no
    /// further cancellation.
    pub fn is_one_splitting(&self, pieces: &[Piece]) -> bool {
        self.splits_under(pieces, 1)
    }

    /// `[[f^k(σ_1 ... σ_r)]] = [[f^k(σ_1)]] ... [[f^k(σ_r)]]`.
    pub fn splits_under(&self, pieces: &[Piece], k: usize) -> bool {
        let mut prev: Option<DirectedEdge> = None;
        for piece in pieces {
            let mut img = piece.to_edge_path();
            for _ in 0..k {
                img = self.apply(&img);
            }
            let (Some(&first), Some(&last)) = (img.edges().first(), img.edges().last()) else {
                return false;
            };
            if prev == Some(first.inverse()) {
                return false;
            }
            prev = Some(last);
        }
        true
    }

    /// Least `M <= k_max` such that `[[f^M(σ)]]` and `[[f^{M+1}(σ)]]` both
    /// parse into a splitting.
    pub fn detect_splitting(&self, sigma: &EdgePath, k_max: usize) -> Result<Splitting, UpgError> {
        self.check_path(sigma)?;
        if !self.is_closed(sigma) {
            return Err(UpgError::BadPath("closed"));
        }
        let mut cur = sigma.clone();
        let mut cur_ok = self.is_one_splitting(&self.parse_pieces(&cur));
        for m in 0..=k_max {
            let next = self.apply(&cur);
            if next.len() > DEFAULT_LENGTH_CAP {
                return Err(UpgError::LengthBudgetExceeded {
                    cap: DEFAULT_LENGTH_CAP,
                });
            }
            let next_ok = self.is_one_splitting(&self.parse_pieces(&next));
            if cur_ok && next_ok {
                let pieces = self.parse_pieces(&cur);
                return Ok(Splitting {
                    m,
                    path: cur,
                    pieces,
                });
            }
            cur = next;
            cur_ok = next_ok;
        }
        Err(UpgError::NotFoundWithinBudget(k_max))
    }

    /// `alpha([[f^k(γ)]])` for `k = 1..=iterations`, with the fitted slope
    /// and intercept.
    pub fn witness_growth(&self, gamma: &EdgePath, iterations: usize) -> Result<WitnessCertificate, UpgError> {
        self.check_path(gamma)?;
        let mut cur = gamma.clone();
        let mut table = Vec::with_capacity(iterations);
        for k in 1..=iterations {
            cur = self.apply(&cur);
            if cur.len() > DEFAULT_LENGTH_CAP {
                return Err(UpgError::LengthBudgetExceeded {
                    cap: DEFAULT_LENGTH_CAP,
                });
            }
            table.push((k as u64, cur.alpha()));
        }
        let tail: Vec<(f64, f64)> = table[table.len() / 2..]
            .iter()
            .map(|&(k, a)| (k as f64, a as f64))
            .collect();
        let slope = crate::translen::least_squares(&tail).map_or(0.0, |fit| fit.slope);
        let intercept = table
            .iter()
            .map(|&(k, a)| a as i64 - k as i64)
            .min()
            .unwrap_or(0);
        Ok(WitnessCertificate {
            sigma: gamma.clone(),
            slope,
            intercept,
            table,
        })
    }

    /// Candidate closed paths in search order: loop edges, suffix loops
    /// and `E_i u_i Ē_i`, then every tight closed path of two or three
    /// edges.
    pub fn witness_candidates(&self) -> Vec<EdgePath> {
        let mut loops: Vec<EdgePath> = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == e.to {
                loops.push(EdgePath::new(vec![DirectedEdge::forward(i)]));
            }
        }
        let mut out = loops.clone();
        for (i, e) in self.edges.iter().enumerate() {
            let u = &self.suffixes[i];
            if !u.is_empty() {
                out.push(u.clone());
                if e.from != e.to {
                    let mut p = vec![DirectedEdge::forward(i)];
                    p.extend_from_slice(u.edges());
                    p.push(DirectedEdge::backward(i));
                    out.push(EdgePath::tightened(p));
                }
            }
        }
        out.extend(self.tight_closed_paths(3).into_iter().filter(|p| p.len() > 1));
        let mut seen = std::collections::HashSet::new();
        out.into_iter()
            .filter(|p| !p.is_empty() && self.is_closed(p) && seen.insert(p.clone()))
            .collect()
    }

    /// Tight closed edge paths with at most `max_len` edges, shortest first.
    pub fn tight_closed_paths(&self, max_len: usize) -> Vec<EdgePath> {
        let all: Vec<DirectedEdge> = (0..self.edges.len())
            .flat_map(|i| [DirectedEdge::forward(i), DirectedEdge::backward(i)])
            .collect();
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<DirectedEdge>> = all.iter().map(|&e| vec![e]).collect();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                let path = EdgePath::new(p.clone());
                if self.is_closed(&path) {
                    out.push(path);
                }
                let last = *p.last().expect("nonempty");
                for &e in &all {
                    if e != last.inverse() && self.initial_vertex(e) == self.terminal_vertex(last) {
                        let mut q = p.clone();
                        q.push(e);
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// First candidate closed path whose `alpha` grows with slope at least
    /// one over `iterations` steps.
    pub fn find_witness(&self, iterations: usize) -> Result<WitnessCertificate, UpgError> {
        for sigma in self.witness_candidates() {
            let Ok(cert) = self.witness_growth(&sigma, iterations) else {
                continue;
            };
            if cert.slope >= 1.0 - SLOPE_TOLERANCE {
                return Ok(cert);
            }
        }
        Err(UpgError::NoWitnessFound)
    }

    /// For a one-vertex graph, the automorphism `x_i -> x_i u_i` of the
    /// free group on the edges.
    pub fn to_automorphism(&self) -> Result<Automorphism, crate::Error> {
        if self.vertices.len() != 1 {
            return Err(UpgError::NotARose.into());
        }
        let rank = self.edges.len();
        let letter = |e: &DirectedEdge| Letter::new(e.edge + 1, !e.forward);
        let images = self
            .suffixes
            .iter()
            .enumerate()
            .map(|(i, u)| {
                ReducedWord::from_letters(
                    rank,
                    std::iter::once(Letter::new(i + 1, false)).chain(u.edges().iter().map(letter)),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Automorphism::new(rank, images)?)
    }

    /// Path in a rose read as a word in the free group on the edges.
    pub fn path_to_word(&self, p: &EdgePath) -> Result<ReducedWord, crate::Error> {
        Ok(ReducedWord::from_letters(
            self.edges.len(),
            p.edges().iter().map(|e| Letter::new(e.edge + 1, !e.forward)),
        )?)
    }
}

impl fmt::Display for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|e| {
                if e.forward {
                    format!("E{}", e.edge + 1)
                } else {
                    format!("~E{}", e.edge + 1)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn primitive_root(u: &[DirectedEdge]) -> (Vec<DirectedEdge>, usize) {
    let n = u.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| u[i] == u[i - d]) {
            return (u[..d].to_vec(), n / d);
        }
    }
    (u.to_vec(), 1)
}

/// Fixtures shipped with the crate.
pub mod fixtures {
    use super::FilteredGraphMap;

    pub const DEHN_TWIST: &str = include_str!("../fixtures/dehn_twist.json");
    pub const THREE_STRATUM: &str = include_str!("../fixtures/three_stratum.json");
    pub const FOUR_STRATUM_NESTED: &str = include_str!("../fixtures/four_stratum_nested.json");
    pub const IDENTITY_ROSE: &str = include_str!("../fixtures/identity_rose.json");
    pub const THETA_TWIST: &str = include_str!("../fixtures/theta_twist.json");

    pub fn load(text: &str) -> FilteredGraphMap {
        FilteredGraphMap::from_json(text).expect("shipped fixture parses")
    }

    pub fn dehn_twist() -> FilteredGraphMap {
        load(DEHN_TWIST)
    }

    pub fn three_stratum() -> FilteredGraphMap {
        load(THREE_STRATUM)
    }

    pub fn four_stratum_nested() -> FilteredGraphMap {
        load(FOUR_STRATUM_NESTED)
    }

    pub fn identity_rose() -> FilteredGraphMap {
        load(IDENTITY_ROSE)
    }

    pub fn theta_twist() -> FilteredGraphMap {
        load(THETA_TWIST)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn shipped_fixtures_validate() {
        for map in [dehn_twist(), three_stratum(), four_stratum_nested(), identity_rose(), theta_twist()] {
            let r = map.validate_upg_rep();
            assert!(r.valid, "{:?}", r.issues);
        }
    }

    #[test]
    fn single_fixed_loop_is_valid() {
        let m = FilteredGraphMap::from_json(
            r#"{"vertices":["v"],"edges":[{"name":"E1","from":"v","to":"v","suffix":[]}]}"#,
        )
        .unwrap();
        assert!(m.validate_upg_rep().valid);
    }

    #[test]
    fn lower_stratum_violation_is_reported() {
        let m = FilteredGraphMap::from_json(
            r#"{"vertices":["v"],"edges":[
                {"name":"E1","from":"v","to":"v","suffix":[]},
                {"name":"E2","from":"v","to":"v","suffix":["E1","E2"]}]}"#,
        )
        .unwrap();
        let r = m.validate_upg_rep();
        assert!(!r.valid);
        assert_eq!(r.issues[0].kind, IssueKind::LowerStratumViolation);
        assert_eq!(r.issues[0].index, Some(2));
        assert!(r.issues[0].message.starts_with("lower-stratum violation at i=2"));
    }

    #[test]
    fn other_issues_are_reported() {
        let m = FilteredGraphMap::from_json(
            r#"{"vertices":["p","q","r"],"edges":[
                {"name":"E1","from":"p","to":"q","suffix":[]},
                {"name":"E2","from":"p","to":"q","suffix":["E1","~E1"]},
                {"name":"E3","from":"q","to":"p","suffix":["E1"]}]}"#,
        )
        .unwrap();
        let kinds: Vec<IssueKind> = m.validate_upg_rep().issues.iter().map(|i| i.kind).collect();
        assert!(kinds.contains(&IssueKind::SuffixNotClosed));
        assert!(kinds.contains(&IssueKind::SuffixNotTight));
        assert!(kinds.contains(&IssueKind::GraphDisconnected));
    }

    #[test]
    fn structural_errors() {
        let dangling = r#"{"vertices":["v"],"edges":[{"name":"E1","from":"v","to":"w"}]}"#;
        assert!(matches!(
            FilteredGraphMap::from_json(dangling),
            Err(crate::Error::Upg(UpgError::Structural(_)))
        ));
        let unknown = r#"{"vertices":["v"],"edges":[{"name":"E1","from":0,"to":0,"suffix":["E9"]}]}"#;
        assert!(FilteredGraphMap::from_json(unknown).is_err());
        let dup = r#"{"vertices":["v"],"edges":[{"name":"E1","from":0,"to":0},{"name":"E1","from":0,"to":0}]}"#;
        assert!(FilteredGraphMap::from_json(dup).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = theta_twist();
        assert_eq!(FilteredGraphMap::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn iterate_examples() {
        let m = dehn_twist();
        let e1 = m.path(&["E1"]).unwrap();
        assert_eq!(m.iterate_path(&e1, 17).unwrap(), e1);
        let e2 = m.path(&["E2"]).unwrap();
        for k in 0..20 {
            let expected = m.path(&["E2"]).unwrap().concat(&e1.power(k));
            assert_eq!(m.iterate_path(&e2, k).unwrap(), expected);
        }
        let long = m.path(&["E2", "E1"]).unwrap();
        assert_eq!(
            m.iterate_path_with_cap(&long, 30, 10),
            Err(UpgError::LengthBudgetExceeded { cap: 10 })
        );
        assert!(m.iterate_path(&m.path(&["E2", "~E2"]).unwrap(), 1).is_err());
    }

    #[test]
    fn iteration_is_a_semigroup_action() {
        let m = four_stratum_nested();
        let g = m.path(&["E4", "~E3", "E2", "E1", "~E4"]).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let lhs = m.iterate_path(&g, a + b).unwrap();
                let rhs = m.iterate_path(&m.iterate_path(&g, a).unwrap(), b).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn exceptional_formula_examples() {
        let m = four_stratum_nested();
        // E3 twists by E1^2, E2 by E1: l = 2, s = 1
        let e = m.exceptional(3, 2, 0).unwrap();
        assert_eq!((e.l, e.s), (2, 1));
        let e3 = exceptional_closed_form(&e, 3);
        assert_eq!(e3.power, 3);
        assert_eq!(e3.to_edge_path(), m.path(&["E3", "E1", "E1", "E1", "~E2"]).unwrap());
        assert_eq!(m.iterate_path(&e.to_edge_path(), 3).unwrap(), e3.to_edge_path());

        let e = m.exceptional(3, 2, 5).unwrap();
        assert_eq!(exceptional_closed_form(&e, 10).power, 15);

        // l = 1, s = 3 on the three-stratum fixture
        let t = three_stratum();
        let e = t.exceptional(3, 2, 0).unwrap();
        assert_eq!((e.l, e.s), (1, 3));
        let e4 = exceptional_closed_form(&e, 4);
        assert_eq!(e4.power, -8);
        assert_eq!(t.iterate_path(&e.to_edge_path(), 4).unwrap(), e4.to_edge_path());

        // l = s: a Nielsen path
        let fixed = t.exceptional(2, 2, 3).unwrap();
        assert!(fixed.is_fixed());
        assert_eq!(exceptional_closed_form(&fixed, 9).power, 3);
        assert_eq!(t.apply(&fixed.to_edge_path()), fixed.to_edge_path());
    }

    #[test]
    fn exceptional_constructor_rejects_bad_input() {
        let t = three_stratum();
        assert!(t.exceptional(2, 3, 0).is_err());
        assert!(t.exceptional(2, 1, 0).is_err());
        assert!(t.exceptional(2, 2, 0).is_err());
        let m = four_stratum_nested();
        assert!(m.exceptional(4, 2, 0).is_err());
    }

    #[test]
    fn path_alpha_examples() {
        let m = dehn_twist();
        assert_eq!(m.path(&["E2", "E1", "E1", "E1"]).unwrap().alpha(), 3);
        assert_eq!(m.path(&["E2"]).unwrap().alpha(), 1);
        let t = three_stratum();
        let e = t.exceptional(3, 2, 7).unwrap();
        assert!(e.to_edge_path().alpha() >= 7);
    }

    #[test]
    fn splitting_examples() {
        let m = dehn_twist();
        let s = m.detect_splitting(&m.path(&["E2"]).unwrap(), 10).unwrap();
        assert_eq!(s.m, 0);
        let s = m.detect_splitting(&m.path(&["E2", "E1"]).unwrap(), 10).unwrap();
        assert_eq!(s.m, 0);
        assert_eq!(
            s.pieces,
            vec![
                Piece::Edge(DirectedEdge::forward(1)),
                Piece::Edge(DirectedEdge::forward(0))
            ]
        );

        let t = three_stratum();
        let sigma = t.path(&["E3", "~E1", "E2"]).unwrap();
        let s = t.detect_splitting(&sigma, 10).unwrap();
        assert_eq!(s.m, 1);
        for k in 1..=5 {
            assert!(t.splits_under(&s.pieces, k));
            let later = t.iterate_path(&sigma, s.m + k).unwrap();
            assert!(t.is_one_splitting(&t.parse_pieces(&later)));
        }
        assert!(t.detect_splitting(&t.path(&["E2", "E3"]).unwrap(), 3).is_ok());
        assert_eq!(
            t.detect_splitting(&sigma, 0),
            Err(UpgError::NotFoundWithinBudget(0))
        );
    }

    #[test]
    fn reversed_exceptional_pieces_parse() {
        let t = three_stratum();
        // E2 υ^2 Ē3 is the inverse of E3 ῡ^2 Ē2
        let p = t.path(&["E2", "E1", "E1", "~E3"]).unwrap();
        let pieces = t.parse_pieces(&p);
        assert_eq!(pieces.len(), 1);
        match &pieces[0] {
            Piece::Exceptional { path, reversed } => {
                assert!(reversed);
                assert_eq!((path.i, path.j, path.power), (3, 2, -2));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(pieces[0].to_edge_path(), p);
    }

    #[test]
    fn witness_examples() {
        let m = dehn_twist();
        let w = m.find_witness(DEFAULT_WITNESS_ITERATIONS).unwrap();
        assert_eq!(w.sigma, m.path(&["E2"]).unwrap());
        assert!((w.slope - 1.0).abs() < 1e-9);
        assert_eq!(w.intercept, 0);
        assert_eq!(identity_rose().find_witness(20), Err(UpgError::NoWitnessFound));

        let t = three_stratum();
        let w = t.find_witness(DEFAULT_WITNESS_ITERATIONS).unwrap();
        assert!(w.slope >= 1.0);
        // the non-fixed exceptional loop grows with slope |l - s| = 2
        let e = t.exceptional(3, 2, 0).unwrap().to_edge_path();
        let g = t.witness_growth(&e, 50).unwrap();
        assert!((g.slope - 2.0).abs() < 1e-9);

        let theta = theta_twist();
        assert!(theta.find_witness(30).is_ok());
    }

    #[test]
    fn nielsen_records() {
        let t = three_stratum();
        let e1 = t.path(&["E1"]).unwrap();
        let rec = t.nielsen_record(&e1).unwrap();
        assert!(rec.indivisible);
        assert!(!t.nielsen_record(&e1.power(2)).unwrap().indivisible);
        let fixed = t.exceptional(2, 2, 1).unwrap().to_edge_path();
        for k in 0..=10 {
            assert_eq!(t.iterate_path(&fixed, k).unwrap(), fixed);
        }
        assert!(t.nielsen_record(&t.path(&["E2"]).unwrap()).is_none());
    }

    #[test]
    fn rose_models_match_automorphisms() {
        let m = dehn_twist();
        let phi = m.to_automorphism().unwrap();
        assert_eq!(phi, Automorphism::parse(2, &["a", "ba"]).unwrap());
        let nested = four_stratum_nested();
        let psi = nested.to_automorphism().unwrap();
        let g = nested.path(&["E4", "~E3", "E2"]).unwrap();
        let mut w = nested.path_to_word(&g).unwrap();
        for k in 1..8 {
            w = psi.apply(&w).unwrap();
            assert_eq!(nested.path_to_word(&nested.iterate_path(&g, k).unwrap()).unwrap(), w);
        }
        assert!(matches!(theta_twist().to_automorphism(), Err(crate::Error::Upg(UpgError::NotARose))));
    }
}
