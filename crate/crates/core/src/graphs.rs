//! Seeded datasets: random graphs, hop-count distance matrices, random-walk
//! similarity matrices and Gaussian point clouds.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Retry budget for drawing a connected Erdős–Rényi graph.
pub const MAX_CONNECT_ATTEMPTS: usize = 100;

/// An undirected, unweighted simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.edges.insert((a, b));
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for a in 1..n {
            g.edges.insert((a - 1, a));
        }
        g
    }

    /// Adds the edge `{a, b}`. Returns `false` if it was already present.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool> {
        if a == b {
            return Err(Error::InvalidParameter(format!("self-loop at node {a}")));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidParameter(format!(
                "edge ({a}, {b}) out of range for {} nodes",
                self.n
            )));
        }
        Ok(self.edges.insert((a.min(b), a.max(b))))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        bfs(&self.adjacency_lists(), 0).iter().all(Option::is_some)
    }
}

fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let next = dist[v].unwrap() + 1;
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(next);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// A dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn matmul(&self, other: &SquareMatrix) -> SquareMatrix {
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    pub fn is_row_stochastic(&self, tol: f64) -> bool {
        self.data.iter().all(|&x| x >= 0.0)
            && self.rows().all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= tol)
    }
}

/// Tolerance for symmetry when validating a distance matrix read from text.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Tolerance on row sums of a similarity matrix.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Symmetric, nonnegative, finite, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(SquareMatrix);

impl DistanceMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        if m.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        if m.data.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidMatrix("negative distance".into()));
        }
        if !m.has_zero_diagonal() {
            return Err(Error::InvalidMatrix("nonzero diagonal".into()));
        }
        if !m.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::InvalidMatrix("distance matrix is not symmetric".into()));
        }
        Ok(DistanceMatrix(m))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }
}

/// Row-stochastic, nonnegative, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix(SquareMatrix);

impl SimilarityMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self> {
        if m.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        if !m.has_zero_diagonal() {
            return Err(Error::InvalidMatrix("nonzero diagonal".into()));
        }
        if !m.is_row_stochastic(ROW_SUM_TOL) {
            return Err(Error::InvalidMatrix(
                "similarity rows must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(SimilarityMatrix(m))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }
}

/// `G(n, p)`: every pair is an edge independently with probability `p`.
/// Disconnected draws are discarded; attempt `k` uses seed `derive_seed(seed, k)`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n}, need n >= 2")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p}, need 0 < p <= 1")));
    }
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let g = erdos_renyi_once(n, p, derive_seed(seed, attempt as u64));
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::ConnectivityNotAchieved {
        attempts: MAX_CONNECT_ATTEMPTS,
    })
}

fn erdos_renyi_once(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < p {
                g.edges.insert((a, b));
            }
        }
    }
    g
}

/// Preferential attachment: start from a clique on `m + 1` nodes, then each new
/// node links to `m` distinct existing nodes drawn with probability
/// proportional to degree.
pub fn gen_barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!(
            "n = {n}, m = {m}, need n > m >= 1"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::complete(m + 1);
    g.n = n;
    // Each node appears once per incident edge end.
    let mut ends: Vec<usize> = Vec::with_capacity(2 * (m * (m + 1) / 2 + (n - m - 1) * m));
    for &(a, b) in &g.edges {
        ends.push(a);
        ends.push(b);
    }
    let mut targets = Vec::with_capacity(m);
    for v in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = ends[rng.random_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.edges.insert((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    Ok(g)
}

/// Hop counts between every pair of nodes, by BFS from each node.
pub fn all_pairs_shortest_paths(g: &Graph) -> Result<DistanceMatrix> {
    let adj = g.adjacency_lists();
    let mut m = SquareMatrix::zeros(g.n);
    for s in 0..g.n {
        for (t, d) in bfs(&adj, s).into_iter().enumerate() {
            match d {
                Some(d) => m.set(s, t, d as f64),
                None => return Err(Error::Disconnected { from: s, to: t }),
            }
        }
    }
    Ok(DistanceMatrix(m))
}

/// `steps`-step transition probabilities of the simple random walk, with the
/// return-to-self mass removed and each row renormalized.
pub fn random_walk_similarity(g: &Graph, steps: usize) -> Result<SimilarityMatrix> {
    if steps < 1 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let deg = g.degrees();
    if let Some(v) = deg.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedNode(v));
    }
    let mut t = SquareMatrix::zeros(g.n);
    for (a, b) in g.edges() {
        t.set(a, b, 1.0 / deg[a] as f64);
        t.set(b, a, 1.0 / deg[b] as f64);
    }
    let mut power = t.clone();
    for _ in 1..steps {
        power = power.matmul(&t);
    }
    for i in 0..g.n {
        power.set(i, i, 0.0);
        let sum: f64 = power.row(i).iter().sum();
        if sum <= 0.0 {
            return Err(Error::DegenerateSimilarity { row: i });
        }
        for j in 0..g.n {
            let v = power.get(i, j) / sum;
            power.set(i, j, v);
        }
    }
    Ok(SimilarityMatrix(power))
}

/// Euclidean distances between `n` standard Gaussian points in `R^n`.
pub fn random_points_distance_matrix(n: usize, seed: u64) -> Result<DistanceMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n}, need n >= 2")));
    }
    let mut rng = rng_from_seed(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            let d = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    Ok(DistanceMatrix(m))
}
