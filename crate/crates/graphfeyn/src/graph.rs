//! Weighted graphs `(X, b, m)` with magnetic and electric potentials.
//!
//! A weighted graph is a finite vertex set `X` carrying a positive measure
//! `m`, together with symmetric edge weights `b > 0` (no self loops). A
//! magnetic potential is an antisymmetric real function on edges, an electric
//! potential a real function on vertices. This module houses the data model,
//! validation, Dirichlet restriction, ball exhaustions and standard builders.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("empty vertex subset")]
    EmptySubset,
    #[error("subset is not contained in the ambient vertex set")]
    NotASubset,
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("invalid builder descriptor `{0}`")]
    BadDescriptor(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
}

/// A single constraint violation found by [`validate`] / [`validate_file`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NonpositiveMeasure { id: String },
    NonfiniteNumber { context: String },
    SelfLoop { id: String },
    NonpositiveWeight { u: String, w: String },
    ThetaOnNonEdge { u: String, w: String },
    ThetaAntisymmetryBreach { u: String, w: String },
    DuplicateEdge { u: String, w: String },
    DuplicateVertex { id: String },
    UnknownEndpoint { id: String },
    MissingPotential { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonpositiveMeasure { id } => write!(f, "nonpositive measure at `{id}`"),
            Violation::NonfiniteNumber { context } => write!(f, "nonfinite number: {context}"),
            Violation::SelfLoop { id } => write!(f, "self-loop at `{id}`"),
            Violation::NonpositiveWeight { u, w } => {
                write!(f, "nonpositive edge weight on ({u},{w})")
            }
            Violation::ThetaOnNonEdge { u, w } => write!(f, "theta on non-edge ({u},{w})"),
            Violation::ThetaAntisymmetryBreach { u, w } => {
                write!(f, "theta antisymmetry breach on ({u},{w})")
            }
            Violation::DuplicateEdge { u, w } => write!(f, "duplicate edge ({u},{w})"),
            Violation::DuplicateVertex { id } => write!(f, "duplicate vertex id `{id}`"),
            Violation::UnknownEndpoint { id } => write!(f, "edge endpoint `{id}` is not a vertex"),
            Violation::MissingPotential { id } => {
                write!(f, "electric potential missing at `{id}`")
            }
        }
    }
}

/// On-disk graph format: vertices with measure/potential, undirected edges
/// with weight and the magnetic phase `theta(u,w)` (so `theta(w,u) = -theta`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: String,
    #[serde(default = "default_measure")]
    pub m: f64,
    #[serde(default)]
    pub v: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: String,
    pub w: String,
    pub b: f64,
    #[serde(default)]
    pub theta: f64,
}

fn default_measure() -> f64 {
    1.0
}

/// Finite weighted graph `(X, b, m)`. Vertex ids are opaque strings mapped to
/// dense indices in file order; all numeric APIs use indices.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    m: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
    // canonical key (min, max) -> b
    edges: BTreeMap<(usize, usize), f64>,
    // Sum_y b(x,y), cached so degree(x)*m(x) reproduces it exactly
    weight_sum: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(
        ids: Vec<String>,
        m: Vec<f64>,
        edge_list: &[(usize, usize, f64)],
    ) -> Result<Self, GraphError> {
        if ids.len() != m.len() {
            return Err(GraphError::Invalid(
                "vertex id and measure lists differ in length".into(),
            ));
        }
        let mut index = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GraphError::Invalid(format!("duplicate vertex id `{id}`")));
            }
        }
        for (i, &mi) in m.iter().enumerate() {
            if !(mi > 0.0) || !mi.is_finite() {
                return Err(GraphError::Invalid(format!(
                    "nonpositive measure at `{}`",
                    ids[i]
                )));
            }
        }
        let n = ids.len();
        let mut edges = BTreeMap::new();
        let mut adj = vec![Vec::new(); n];
        for &(u, w, b) in edge_list {
            if u >= n || w >= n {
                return Err(GraphError::IndexOutOfRange(u.max(w)));
            }
            if u == w {
                return Err(GraphError::Invalid(format!("self-loop at `{}`", ids[u])));
            }
            if !(b > 0.0) || !b.is_finite() {
                return Err(GraphError::Invalid(format!(
                    "nonpositive edge weight on ({},{})",
                    ids[u], ids[w]
                )));
            }
            let key = (u.min(w), u.max(w));
            if edges.insert(key, b).is_some() {
                return Err(GraphError::Invalid(format!(
                    "duplicate edge ({},{})",
                    ids[u], ids[w]
                )));
            }
        }
        for (&(u, w), &b) in &edges {
            adj[u].push((w, b));
            adj[w].push((u, b));
        }
        for nb in &mut adj {
            nb.sort_by_key(|&(y, _)| y);
        }
        let weight_sum = adj
            .iter()
            .map(|nb| nb.iter().map(|&(_, b)| b).sum())
            .collect();
        Ok(WeightedGraph {
            ids,
            index,
            m,
            adj,
            edges,
            weight_sum,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
    }

    pub fn measure(&self, x: usize) -> f64 {
        self.m[x]
    }

    pub fn measures(&self) -> &[f64] {
        &self.m
    }

    /// Symmetric edge-weight accessor: `b(x,y) = b(y,x)`, zero off edges and
    /// on the diagonal.
    pub fn b(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        self.edges
            .get(&(x.min(y), x.max(y)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adj[x]
    }

    pub fn edge_keys(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(u, w), &b)| (u, w, b))
    }

    pub fn weight_sum(&self, x: usize) -> f64 {
        self.weight_sum[x]
    }

    /// Weighted degree `deg(x) = (1/m(x)) Σ_y b(x,y)`; zero on isolated
    /// vertices.
    pub fn degree(&self, x: usize) -> f64 {
        self.weight_sum[x] / self.m[x]
    }

    pub fn degree_of_id(&self, id: &str) -> Result<f64, GraphError> {
        Ok(self.degree(self.index_of(id)?))
    }

    pub fn max_degree(&self) -> f64 {
        (0..self.len()).map(|x| self.degree(x)).fold(0.0, f64::max)
    }
}

/// Antisymmetric magnetic potential on edges. One orientation is stored with
/// the canonical key `(min, max)`; the accessor negates for the other order.
#[derive(Debug, Clone, Default)]
pub struct MagneticPotential {
    theta: BTreeMap<(usize, usize), f64>,
}

impl MagneticPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Record `theta(x, y) = value` (and implicitly `theta(y, x) = -value`).
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        if x <= y {
            self.theta.insert((x, y), value);
        } else {
            self.theta.insert((y, x), -value);
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        if x <= y {
            self.theta.get(&(x, y)).copied().unwrap_or(0.0)
        } else {
            -self.theta.get(&(y, x)).copied().unwrap_or(0.0)
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.theta.iter().map(|(&(u, w), &t)| (u, w, t))
    }
}

/// Real electric potential, one value per vertex.
#[derive(Debug, Clone)]
pub struct ElectricPotential {
    values: Vec<f64>,
}

impl ElectricPotential {
    pub fn zero(n: usize) -> Self {
        ElectricPotential {
            values: vec![0.0; n],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        ElectricPotential { values }
    }

    /// `v = -deg`, the comparison potential of the domination bound.
    pub fn neg_degree(g: &WeightedGraph) -> Self {
        ElectricPotential {
            values: (0..g.len()).map(|x| -g.degree(x)).collect(),
        }
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Subset `W` of the ambient vertex set, kept sorted with a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl VertexSet {
    pub fn full(g: &WeightedGraph) -> Self {
        VertexSet {
            members: (0..g.len()).collect(),
            mask: vec![true; g.len()],
        }
    }

    pub fn from_members(
        g: &WeightedGraph,
        members: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GraphError> {
        let mut mask = vec![false; g.len()];
        for x in members {
            if x >= g.len() {
                return Err(GraphError::IndexOutOfRange(x));
            }
            mask[x] = true;
        }
        let members = (0..g.len()).filter(|&x| mask[x]).collect();
        Ok(VertexSet { members, mask })
    }

    pub fn from_ids<'a>(
        g: &WeightedGraph,
        ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, GraphError> {
        let mut members = Vec::new();
        for id in ids {
            members.push(g.index_of(id)?);
        }
        Self::from_members(g, members)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask.get(x).copied().unwrap_or(false)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.mask.len()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }
}

/// Validate a constructed instance against the standing hypotheses.
/// Report-style: returns every violation found, empty means valid.
pub fn validate(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for x in 0..g.len() {
        let m = g.measure(x);
        if !(m > 0.0) {
            out.push(Violation::NonpositiveMeasure {
                id: g.id(x).to_string(),
            });
        }
        if !m.is_finite() {
            out.push(Violation::NonfiniteNumber {
                context: format!("m({})", g.id(x)),
            });
        }
    }
    for (u, w, b) in g.edge_keys() {
        if u == w {
            out.push(Violation::SelfLoop {
                id: g.id(u).to_string(),
            });
        }
        if !(b > 0.0) || !b.is_finite() {
            out.push(Violation::NonpositiveWeight {
                u: g.id(u).to_string(),
                w: g.id(w).to_string(),
            });
        }
    }
    for (u, w, t) in theta.entries() {
        if u >= g.len() || w >= g.len() || g.b(u, w) == 0.0 {
            let uid = if u < g.len() { g.id(u).to_string() } else { u.to_string() };
            let wid = if w < g.len() { g.id(w).to_string() } else { w.to_string() };
            out.push(Violation::ThetaOnNonEdge { u: uid, w: wid });
        }
        if !t.is_finite() {
            out.push(Violation::NonfiniteNumber {
                context: format!("theta({u},{w})"),
            });
        }
    }
    if v.len() != g.len() {
        for x in v.len()..g.len() {
            out.push(Violation::MissingPotential {
                id: g.id(x).to_string(),
            });
        }
    }
    for (x, &val) in v.values().iter().enumerate().take(g.len()) {
        if !val.is_finite() {
            out.push(Violation::NonfiniteNumber {
                context: format!("v({})", g.id(x)),
            });
        }
    }
    out
}

/// Validate a raw graph file before construction.
pub fn validate_file(file: &GraphFile) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, rec) in file.vertices.iter().enumerate() {
        if index.insert(rec.id.as_str(), i).is_some() {
            out.push(Violation::DuplicateVertex { id: rec.id.clone() });
        }
        if !(rec.m > 0.0) {
            out.push(Violation::NonpositiveMeasure { id: rec.id.clone() });
        }
        if !rec.m.is_finite() {
            out.push(Violation::NonfiniteNumber {
                context: format!("m({})", rec.id),
            });
        }
        if !rec.v.is_finite() {
            out.push(Violation::NonfiniteNumber {
                context: format!("v({})", rec.id),
            });
        }
    }
    let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
    for e in &file.edges {
        let (iu, iw) = match (index.get(e.u.as_str()), index.get(e.w.as_str())) {
            (Some(&a), Some(&b)) => (a, b),
            (u, w) => {
                if u.is_none() {
                    out.push(Violation::UnknownEndpoint { id: e.u.clone() });
                }
                if w.is_none() {
                    out.push(Violation::UnknownEndpoint { id: e.w.clone() });
                }
                continue;
            }
        };
        if iu == iw {
            out.push(Violation::SelfLoop { id: e.u.clone() });
            continue;
        }
        if !e.b.is_finite() || !e.theta.is_finite() {
            out.push(Violation::NonfiniteNumber {
                context: format!("edge ({},{})", e.u, e.w),
            });
            continue;
        }
        if e.b == 0.0 && e.theta != 0.0 {
            out.push(Violation::ThetaOnNonEdge {
                u: e.u.clone(),
                w: e.w.clone(),
            });
            continue;
        }
        if e.b <= 0.0 {
            out.push(Violation::NonpositiveWeight {
                u: e.u.clone(),
                w: e.w.clone(),
            });
            continue;
        }
        let key = (iu.min(iw), iu.max(iw));
        // theta in the canonical orientation min -> max
        let theta_canon = if iu <= iw { e.theta } else { -e.theta };
        match seen.get(&key) {
            None => {
                seen.insert(key, theta_canon);
            }
            Some(&prev) if prev != theta_canon => {
                out.push(Violation::ThetaAntisymmetryBreach {
                    u: e.u.clone(),
                    w: e.w.clone(),
                });
            }
            Some(_) => {
                out.push(Violation::DuplicateEdge {
                    u: e.u.clone(),
                    w: e.w.clone(),
                });
            }
        }
    }
    out
}

/// Assemble an instance from a validated file.
pub fn instance_from_file(
    file: &GraphFile,
) -> Result<(WeightedGraph, MagneticPotential, ElectricPotential), GraphError> {
    let violations = validate_file(file);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(GraphError::Invalid(msgs.join("; ")));
    }
    let ids: Vec<String> = file.vertices.iter().map(|r| r.id.clone()).collect();
    let m: Vec<f64> = file.vertices.iter().map(|r| r.m).collect();
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut edge_list = Vec::new();
    let mut theta = MagneticPotential::zero();
    for e in &file.edges {
        let u = index[e.u.as_str()];
        let w = index[e.w.as_str()];
        edge_list.push((u, w, e.b));
        if e.theta != 0.0 {
            theta.set(u, w, e.theta);
        }
    }
    let g = WeightedGraph::new(ids, m, &edge_list)?;
    let v = ElectricPotential::from_values(file.vertices.iter().map(|r| r.v).collect());
    Ok((g, theta, v))
}

/// Dirichlet restriction data for `L^(W)`: edges with both endpoints in `W`
/// plus the AMBIENT degree per retained vertex. The diagonal of the restricted
/// operator keeps the ambient degree; only the off-diagonal coupling is cut.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub graph: WeightedGraph,
    pub theta: MagneticPotential,
    pub v: ElectricPotential,
    /// deg in the ambient graph, indexed like `graph`
    pub ambient_deg: Vec<f64>,
    /// ambient index of each restricted vertex
    pub ambient_index: Vec<usize>,
}

pub fn restrict(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    w: &VertexSet,
) -> Result<Restriction, GraphError> {
    if w.is_empty() {
        return Err(GraphError::EmptySubset);
    }
    if w.mask.len() != g.len() {
        return Err(GraphError::NotASubset);
    }
    let members = w.members();
    let mut local = vec![usize::MAX; g.len()];
    for (i, &x) in members.iter().enumerate() {
        local[x] = i;
    }
    let ids: Vec<String> = members.iter().map(|&x| g.id(x).to_string()).collect();
    let m: Vec<f64> = members.iter().map(|&x| g.measure(x)).collect();
    let mut edge_list = Vec::new();
    let mut sub_theta = MagneticPotential::zero();
    for (u, wv, b) in g.edge_keys() {
        if w.contains(u) && w.contains(wv) {
            let (lu, lw) = (local[u], local[wv]);
            edge_list.push((lu, lw, b));
            let t = theta.get(u, wv);
            if t != 0.0 {
                sub_theta.set(lu, lw, t);
            }
        }
    }
    let graph = WeightedGraph::new(ids, m, &edge_list)?;
    let ambient_deg = members.iter().map(|&x| g.degree(x)).collect();
    let vv = ElectricPotential::from_values(members.iter().map(|&x| v.get(x)).collect());
    Ok(Restriction {
        graph,
        theta: sub_theta,
        v: vv,
        ambient_deg,
        ambient_index: members.to_vec(),
    })
}

/// BFS distances from `center`; unreachable vertices get `usize::MAX`.
pub fn bfs_distances(g: &WeightedGraph, center: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    dist[center] = 0;
    let mut queue = VecDeque::from([center]);
    while let Some(x) = queue.pop_front() {
        for &(y, _) in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Combinatorial balls `B(center, r)` for each radius; nested by construction.
pub fn ball_exhaustion(
    g: &WeightedGraph,
    center: usize,
    radii: &[usize],
) -> Result<Vec<VertexSet>, GraphError> {
    if center >= g.len() {
        return Err(GraphError::IndexOutOfRange(center));
    }
    if radii.windows(2).any(|p| p[0] >= p[1]) {
        return Err(GraphError::RadiiNotIncreasing);
    }
    let dist = bfs_distances(g, center);
    radii
        .iter()
        .map(|&r| VertexSet::from_members(g, (0..g.len()).filter(|&x| dist[x] <= r)))
        .collect()
}

/// Descriptors for the bundled standard graphs: all have `b = 1`, `m = 1`,
/// `v = 0`; the Harper box carries the Landau-gauge phase
/// `theta((x1,x2),(x1,x2+1)) = 2 pi alpha x1` on vertical edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardGraph {
    Path(usize),
    Cycle(usize),
    LatticeBox { dim: usize, side: usize },
    HarperBox { side: usize, alpha: f64 },
}

impl std::str::FromStr for StandardGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::BadDescriptor(s.to_string());
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let name = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1]
            .split(',')
            .map(str::trim)
            .collect();
        let int = |a: &str| a.parse::<usize>().map_err(|_| bad());
        match (name, args.as_slice()) {
            ("path", [n]) => Ok(StandardGraph::Path(int(n)?)),
            ("cycle", [n]) => Ok(StandardGraph::Cycle(int(n)?)),
            ("lattice_box", [d, side]) => Ok(StandardGraph::LatticeBox {
                dim: int(d)?,
                side: int(side)?,
            }),
            ("harper_box", [side, alpha]) => Ok(StandardGraph::HarperBox {
                side: int(side)?,
                alpha: alpha.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

pub fn build_standard(
    spec: StandardGraph,
) -> Result<(WeightedGraph, MagneticPotential, ElectricPotential), GraphError> {
    match spec {
        StandardGraph::Path(n) => {
            check_size(n)?;
            let ids = (0..n).map(|i| i.to_string()).collect();
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
            let g = WeightedGraph::new(ids, vec![1.0; n], &edges)?;
            let v = ElectricPotential::zero(n);
            Ok((g, MagneticPotential::zero(), v))
        }
        StandardGraph::Cycle(n) => {
            check_size(n)?;
            let ids = (0..n).map(|i| i.to_string()).collect();
            let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
            if n > 2 {
                edges.push((n - 1, 0, 1.0));
            }
            let g = WeightedGraph::new(ids, vec![1.0; n], &edges)?;
            let v = ElectricPotential::zero(n);
            Ok((g, MagneticPotential::zero(), v))
        }
        StandardGraph::LatticeBox { dim, side } => {
            check_size(side)?;
            check_size(dim)?;
            let n = side.checked_pow(dim as u32).ok_or_else(|| {
                GraphError::BadDescriptor(format!("lattice_box({dim},{side}) overflows"))
            })?;
            let coords = |mut i: usize| -> Vec<usize> {
                let mut c = vec![0; dim];
                for slot in c.iter_mut() {
                    *slot = i % side;
                    i /= side;
                }
                c
            };
            let ids = (0..n)
                .map(|i| {
                    coords(i)
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            let mut edges = Vec::new();
            for i in 0..n {
                let c = coords(i);
                for (axis, &ci) in c.iter().enumerate() {
                    if ci + 1 < side {
                        let j = i + side.pow(axis as u32);
                        edges.push((i, j, 1.0));
                    }
                }
            }
            let g = WeightedGraph::new(ids, vec![1.0; n], &edges)?;
            let v = ElectricPotential::zero(n);
            Ok((g, MagneticPotential::zero(), v))
        }
        StandardGraph::HarperBox { side, alpha } => {
            let (g, mut theta, v) = build_standard(StandardGraph::LatticeBox { dim: 2, side })?;
            // Landau gauge: flux alpha per plaquette carried by vertical edges.
            for x1 in 0..side {
                for x2 in 0..side.saturating_sub(1) {
                    let a = x2 * side + x1;
                    let b = (x2 + 1) * side + x1;
                    let phase = std::f64::consts::TAU * alpha * x1 as f64;
                    if phase != 0.0 {
                        theta.set(a, b, phase);
                    }
                }
            }
            Ok((g, theta, v))
        }
    }
}

fn check_size(n: usize) -> Result<(), GraphError> {
    if n < 1 {
        Err(GraphError::BadDescriptor("size must be >= 1".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn k2() -> (WeightedGraph, MagneticPotential, ElectricPotential) {
        let g = WeightedGraph::new(
            vec!["a".into(), "b".into()],
            vec![1.0, 1.0],
            &[(0, 1, 1.0)],
        )
        .unwrap();
        let v = ElectricPotential::zero(2);
        (g, MagneticPotential::zero(), v)
    }

    #[test]
    fn degree_two_vertex() {
        let (g, _, _) = k2();
        assert_eq!(g.degree(0), 1.0);
        assert_eq!(g.degree(1), 1.0);
    }

    #[test]
    fn degree_star_center() {
        let g = WeightedGraph::new(
            vec!["x".into(), "y1".into(), "y2".into()],
            vec![2.0, 1.0, 1.0],
            &[(0, 1, 1.0), (0, 2, 3.0)],
        )
        .unwrap();
        assert_eq!(g.degree(0), 2.0);
    }

    #[test]
    fn degree_isolated_vertex() {
        let g = WeightedGraph::new(vec!["x".into()], vec![1.0], &[]).unwrap();
        assert_eq!(g.degree(0), 0.0);
    }

    #[test]
    fn degree_unknown_id_is_error() {
        let (g, _, _) = k2();
        assert!(g.degree_of_id("zzz").is_err());
    }

    #[test]
    fn accessors_symmetric_antisymmetric() {
        let (g, _, _) = k2();
        assert_eq!(g.b(0, 1), g.b(1, 0));
        assert_eq!(g.b(0, 0), 0.0);
        let mut theta = MagneticPotential::zero();
        theta.set(1, 0, 0.25);
        assert_eq!(theta.get(1, 0), 0.25);
        assert_eq!(theta.get(0, 1), -0.25);
    }

    #[test]
    fn validate_clean_instance() {
        let (g, theta, v) = k2();
        assert!(validate(&g, &theta, &v).is_empty());
    }

    #[test]
    fn validate_theta_on_non_edge() {
        let (g, _, v) = k2();
        let g3 = WeightedGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![1.0; 3],
            &[(0, 1, 1.0)],
        )
        .unwrap();
        let mut theta = MagneticPotential::zero();
        theta.set(1, 2, 0.5);
        let report = validate(&g3, &theta, &ElectricPotential::zero(3));
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::ThetaOnNonEdge { .. }));
        drop((g, v));
    }

    #[test]
    fn validate_file_nonpositive_measure() {
        let file = GraphFile {
            vertices: vec![VertexRecord {
                id: "a".into(),
                m: 0.0,
                v: 0.0,
            }],
            edges: vec![],
        };
        let report = validate_file(&file);
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::NonpositiveMeasure { .. }));
    }

    #[test]
    fn restrict_full_is_identity() {
        let (g, theta, v) = k2();
        let w = VertexSet::full(&g);
        let r = restrict(&g, &theta, &v, &w).unwrap();
        assert_eq!(r.graph.len(), 2);
        assert_eq!(r.graph.b(0, 1), 1.0);
        assert_eq!(r.ambient_deg, vec![1.0, 1.0]);
    }

    #[test]
    fn restrict_keeps_ambient_degree() {
        let (g, theta, v) = k2();
        let w = VertexSet::from_members(&g, [0]).unwrap();
        let r = restrict(&g, &theta, &v, &w).unwrap();
        assert_eq!(r.graph.len(), 1);
        assert!(r.graph.edge_keys().next().is_none());
        assert_eq!(r.ambient_deg, vec![1.0]);
    }

    #[test]
    fn restrict_path_pair() {
        let (g, theta, v) = build_standard(StandardGraph::Path(3)).unwrap();
        let w = VertexSet::from_members(&g, [0, 1]).unwrap();
        let r = restrict(&g, &theta, &v, &w).unwrap();
        assert_eq!(r.graph.b(0, 1), 1.0);
        assert_eq!(r.ambient_deg, vec![1.0, 2.0]);
    }

    #[test]
    fn restrict_empty_is_error() {
        let (g, theta, v) = k2();
        let w = VertexSet::from_members(&g, []).unwrap();
        assert!(restrict(&g, &theta, &v, &w).is_err());
    }

    #[test]
    fn restriction_is_transitive() {
        let (g, theta, v) = build_standard(StandardGraph::Path(6)).unwrap();
        let w1 = VertexSet::from_members(&g, 0..5).unwrap();
        let r1 = restrict(&g, &theta, &v, &w1).unwrap();
        let w2 = VertexSet::from_members(&r1.graph, 0..3).unwrap();
        let r2 = restrict(&r1.graph, &r1.theta, &r1.v, &w2).unwrap();
        let w_direct = VertexSet::from_members(&g, 0..3).unwrap();
        let direct = restrict(&g, &theta, &v, &w_direct).unwrap();
        for (u, w, b) in direct.graph.edge_keys() {
            assert_eq!(r2.graph.b(u, w), b);
        }
        // ambient degree is the degree in the ORIGINAL graph, so the one-step
        // ambient deg of the two-step chain must be read from r1.ambient_deg
        for (i, &x) in r2.ambient_index.iter().enumerate() {
            assert_eq!(r1.ambient_deg[x], direct.ambient_deg[i]);
        }
    }

    #[test]
    fn ball_radius_zero() {
        let (g, _, _) = build_standard(StandardGraph::Path(3)).unwrap();
        let balls = ball_exhaustion(&g, 1, &[0]).unwrap();
        assert_eq!(balls[0].members(), &[1]);
    }

    #[test]
    fn ball_path_radius_one() {
        let (g, _, _) = build_standard(StandardGraph::Path(3)).unwrap();
        let balls = ball_exhaustion(&g, 1, &[1]).unwrap();
        assert_eq!(balls[0].members(), &[0, 1, 2]);
    }

    #[test]
    fn balls_nested() {
        let (g, _, _) = build_standard(StandardGraph::Cycle(9)).unwrap();
        let balls = ball_exhaustion(&g, 0, &[1, 2]).unwrap();
        assert!(balls[0].is_subset_of(&balls[1]));
    }

    #[test]
    fn balls_cover_component_at_diameter() {
        let (g, _, _) = build_standard(StandardGraph::Path(7)).unwrap();
        let balls = ball_exhaustion(&g, 0, &[6]).unwrap();
        assert!(balls[0].is_full());
    }

    #[test]
    fn build_path2_is_k2() {
        let (g, theta, v) = build_standard(StandardGraph::Path(2)).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.b(0, 1), 1.0);
        assert!(validate(&g, &theta, &v).is_empty());
    }

    #[test]
    fn harper_zero_flux_has_no_phases() {
        let (_, theta, _) = build_standard(StandardGraph::HarperBox {
            side: 4,
            alpha: 0.0,
        })
        .unwrap();
        assert_eq!(theta.entries().count(), 0);
    }

    #[test]
    fn harper_flux_is_landau_gauge() {
        let (g, theta, _) = build_standard(StandardGraph::HarperBox {
            side: 3,
            alpha: 0.25,
        })
        .unwrap();
        // horizontal edge (0,0)-(1,0): no phase
        let a = g.index_of("0,0").unwrap();
        let b = g.index_of("1,0").unwrap();
        assert_eq!(theta.get(a, b), 0.0);
        // vertical edge (1,0)-(1,1): 2 pi * 0.25 * 1
        let c = g.index_of("1,1").unwrap();
        assert!((theta.get(b, c) - std::f64::consts::TAU * 0.25).abs() < 1e-15);
    }

    #[test]
    fn cycle3_every_degree_two() {
        let (g, _, _) = build_standard(StandardGraph::Cycle(3)).unwrap();
        for x in 0..3 {
            assert_eq!(g.degree(x), 2.0);
        }
    }

    #[test]
    fn builder_rejects_zero_size() {
        assert!(build_standard(StandardGraph::Path(0)).is_err());
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!(
            "path(200)".parse::<StandardGraph>().unwrap(),
            StandardGraph::Path(200)
        );
        assert_eq!(
            "harper_box(4, 0.25)".parse::<StandardGraph>().unwrap(),
            StandardGraph::HarperBox {
                side: 4,
                alpha: 0.25
            }
        );
        assert!("triangle(3)".parse::<StandardGraph>().is_err());
    }

    #[test]
    fn degree_times_measure_matches_weight_sum() {
        let g = WeightedGraph::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![0.7, 1.3, 2.1],
            &[(0, 1, 0.3), (1, 2, 1.7), (0, 2, 0.9)],
        )
        .unwrap();
        for x in 0..3 {
            let lhs = g.degree(x) * g.measure(x);
            let rhs = g.weight_sum(x);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1.0));
        }
    }
}
