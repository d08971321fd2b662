//! Graph-structured Hilbert spaces and walk counting.
//!
//! Each vertex carries a finite local Hilbert space and each edge a bounded
//! two-body coupling. The same graph drives both the analytic Lieb-Robinson
//! series (through [`count_walks`]) and the exact simulator (through its
//! tensor-product layout).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Finite interaction graph with per-vertex local dimensions and norm caps.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGraph {
    local_dims: Vec<usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    coupling_cap: f64,
    field_cap: f64,
}

impl SpinGraph {
    /// Builds a graph; edges are stored as sorted `(lo, hi)` pairs and
    /// duplicates are dropped.
    pub fn new(
        local_dims: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        coupling_cap: f64,
        field_cap: f64,
    ) -> Result<Self> {
        let n = local_dims.len();
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex"));
        }
        if local_dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("local dimensions must be at least 2"));
        }
        if !(coupling_cap >= 0.0 && coupling_cap.is_finite()) {
            return Err(Error::InvalidArgument("J must be finite and non-negative"));
        }
        if !(field_cap >= 0.0 && field_cap.is_finite()) {
            return Err(Error::InvalidArgument("B must be finite and non-negative"));
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, count: n });
                }
            }
            if u == v {
                return Err(Error::InvalidArgument("self-loops are not allowed"));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &list {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self { local_dims, edges: list, adjacency, coupling_cap, field_cap })
    }

    /// Path graph on `length` qubits.
    pub fn chain(length: usize, coupling_cap: f64, field_cap: f64) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidArgument("chain length must be positive"));
        }
        Self::new(vec![2; length], (1..length).map(|v| (v - 1, v)), coupling_cap, field_cap)
    }

    pub fn vertex_count(&self) -> usize {
        self.local_dims.len()
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edge-operator norm cap `J`.
    pub fn coupling_cap(&self) -> f64 {
        self.coupling_cap
    }

    /// Vertex-operator norm cap `B`.
    pub fn field_cap(&self) -> f64 {
        self.field_cap
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Product of the local dimensions, or `None` on overflow.
    pub fn hilbert_dim(&self) -> Option<usize> {
        self.local_dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }
}

/// Non-empty set of vertices of a particular graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region {
    vertices: Vec<usize>,
    host_size: usize,
}

impl Region {
    pub fn new(graph: &SpinGraph, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let count = graph.vertex_count();
        let mut list: Vec<usize> = vertices.into_iter().collect();
        if let Some(&bad) = list.iter().find(|&&v| v >= count) {
            return Err(Error::VertexOutOfRange { vertex: bad, count });
        }
        list.sort_unstable();
        list.dedup();
        if list.is_empty() {
            return Err(Error::InvalidArgument("region must be non-empty"));
        }
        Ok(Self { vertices: list, host_size: count })
    }

    pub fn single(graph: &SpinGraph, vertex: usize) -> Result<Self> {
        Self::new(graph, [vertex])
    }

    /// Sorted vertex indices.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn host_size(&self) -> usize {
        self.host_size
    }

    /// Vertices not in the region; `None` when the region is the whole graph.
    pub fn complement(&self) -> Option<Region> {
        let rest: Vec<usize> = (0..self.host_size).filter(|v| !self.contains(*v)).collect();
        (!rest.is_empty()).then_some(Region { vertices: rest, host_size: self.host_size })
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.vertices.iter().all(|v| !other.contains(*v))
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        vertices.sort_unstable();
        vertices.dedup();
        Region { vertices, host_size: self.host_size }
    }

    fn check_host(&self, graph: &SpinGraph) -> Result<()> {
        if self.host_size != graph.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: graph.vertex_count(),
                found: self.host_size,
            });
        }
        Ok(())
    }
}

fn check_pair(graph: &SpinGraph, x: &Region, y: &Region) -> Result<()> {
    x.check_host(graph)?;
    y.check_host(graph)?;
    if !x.is_disjoint(y) {
        return Err(Error::RegionsOverlap);
    }
    Ok(())
}

/// Minimum shortest-path length between members of `x` and `y` (multi-source
/// BFS). `Ok(None)` means no path connects the two regions.
pub fn graph_distance(graph: &SpinGraph, x: &Region, y: &Region) -> Result<Option<usize>> {
    check_pair(graph, x, y)?;
    let mut dist = vec![usize::MAX; graph.vertex_count()];
    let mut queue = VecDeque::new();
    for &v in x.vertices() {
        dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        if y.contains(u) {
            return Ok(Some(dist[u]));
        }
        for &w in graph.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

/// Number of walks, or an analytic ceiling once exact integers overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkCount {
    Exact(u128),
    UpperBound(f64),
}

impl WalkCount {
    pub fn value(self) -> f64 {
        match self {
            WalkCount::Exact(n) => n as f64,
            WalkCount::UpperBound(b) => b,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, WalkCount::Exact(_))
    }
}

/// Incremental walk counter: the `n`-th item is the number of length-`n`
/// walks starting in `x` and ending in `y`.
///
/// Walks may revisit vertices. Each step costs `O(|E|)`.
pub struct WalkCounter<'g> {
    graph: &'g SpinGraph,
    targets: Vec<usize>,
    frontier: Option<Vec<u128>>,
    sources: usize,
    step: usize,
}

impl<'g> WalkCounter<'g> {
    pub fn new(graph: &'g SpinGraph, x: &Region, y: &Region) -> Result<Self> {
        check_pair(graph, x, y)?;
        let mut frontier = vec![0u128; graph.vertex_count()];
        for &v in x.vertices() {
            frontier[v] = 1;
        }
        Ok(Self {
            graph,
            targets: y.vertices().to_vec(),
            frontier: Some(frontier),
            sources: x.len(),
            step: 0,
        })
    }

    fn fallback(&self) -> f64 {
        let d = self.graph.max_degree() as f64;
        self.sources as f64 * d.powi(self.step as i32)
    }

    fn advance(&mut self) {
        if let Some(cur) = self.frontier.take() {
            let mut next = vec![0u128; cur.len()];
            let mut ok = true;
            'outer: for (v, slot) in next.iter_mut().enumerate() {
                for &u in self.graph.neighbors(v) {
                    match slot.checked_add(cur[u]) {
                        Some(s) => *slot = s,
                        None => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if ok {
                self.frontier = Some(next);
            }
        }
        self.step += 1;
    }
}

impl Iterator for WalkCounter<'_> {
    type Item = WalkCount;

    fn next(&mut self) -> Option<WalkCount> {
        let out = match &self.frontier {
            Some(counts) => {
                let total = self
                    .targets
                    .iter()
                    .try_fold(0u128, |acc, &v| acc.checked_add(counts[v]));
                match total {
                    Some(t) => WalkCount::Exact(t),
                    None => WalkCount::UpperBound(self.fallback()),
                }
            }
            None => WalkCount::UpperBound(self.fallback()),
        };
        self.advance();
        Some(out)
    }
}

/// Number of length-`n` walks from `x` to `y`.
pub fn count_walks(graph: &SpinGraph, x: &Region, y: &Region, n: usize) -> Result<WalkCount> {
    let mut counter = WalkCounter::new(graph, x, y)?;
    Ok(counter.nth(n).expect("walk counter is infinite"))
}

/// `C(n, k)` or `None` if it does not fit in `u128`.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step
        let num = (n as u128 - k as u128) + i;
        let g = gcd(acc, i);
        let (a, den) = (acc / g, i / g);
        acc = a.checked_mul(num / den)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Walk ceiling on an infinite line between single sites at distance `r`:
/// `C(n, (n + r) / 2)` when `n >= r` and `n - r` is even, zero otherwise.
/// `None` on `u128` overflow.
pub fn walk_bound_chain(r: u64, n: u64) -> Option<u128> {
    if n < r || !(n - r).is_multiple_of(2) {
        return Some(0);
    }
    binomial(n, (n + r) / 2)
}
