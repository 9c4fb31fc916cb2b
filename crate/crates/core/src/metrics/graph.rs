use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::matfun::{self, SymMatrix};
use crate::math;

use super::CentralityKind;

/// Undirected weighted graph on a fixed vertex set `0..node_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: Matrix,
}

impl WeightedGraph {
    /// Validates symmetry, zero diagonal and nonnegative finite weights.
    pub fn new(weights: Matrix) -> Result<Self> {
        if !weights.is_square() || weights.rows() == 0 {
            return Err(Error::InvalidGraph("weight matrix must be square and nonempty"));
        }
        if !weights.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = weights.rows();
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidGraph("self loops are not allowed"));
            }
            for j in (i + 1)..n {
                if weights[(i, j)] != weights[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                if weights[(i, j)] < 0.0 {
                    return Err(Error::InvalidGraph("negative edge weight"));
                }
            }
        }
        Ok(Self { weights })
    }

    /// Graph with no edges.
    pub fn empty(node_count: usize) -> Result<Self> {
        Self::new(Matrix::zeros(node_count, node_count))
    }

    /// Builds a graph from `(u, v, weight)` triples; repeated edges add up.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = Matrix::zeros(node_count, node_count);
        for &(u, v, x) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidGraph("edge endpoint out of range"));
            }
            if u == v {
                return Err(Error::InvalidGraph("self loops are not allowed"));
            }
            w[(u, v)] += x;
            w[(v, u)] += x;
        }
        Self::new(w)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weighted_degrees(&self) -> Vec<f64> {
        (0..self.node_count())
            .map(|v| self.weights.row(v).iter().sum())
            .collect()
    }

    /// `diag(row sums) − W`.
    pub fn laplacian(&self) -> SymMatrix {
        let deg = self.weighted_degrees();
        let mut l = self.weights.scale(-1.0);
        for (i, d) in deg.into_iter().enumerate() {
            l[(i, i)] = d;
        }
        SymMatrix::new(l).expect("laplacian of a valid graph is symmetric")
    }

    /// Harmonic closeness `Σ_{u≠v} 1/d(v,u)` with hop distances on the
    /// binarised graph; unreachable pairs contribute 0.
    pub fn harmonic_closeness(&self) -> Vec<f64> {
        let n = self.node_count();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|v| (0..n).filter(|&u| self.weights[(v, u)] > 0.0).collect())
            .collect();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::with_capacity(n);
        (0..n)
            .map(|s| {
                dist.iter_mut().for_each(|d| *d = usize::MAX);
                dist[s] = 0;
                queue.clear();
                queue.push_back(s);
                let mut total = 0.0;
                while let Some(v) = queue.pop_front() {
                    for &u in &adj[v] {
                        if dist[u] == usize::MAX {
                            dist[u] = dist[v] + 1;
                            total += 1.0 / dist[u] as f64;
                            queue.push_back(u);
                        }
                    }
                }
                total
            })
            .collect()
    }
}

/// Per-node centrality vector.
pub fn centrality(g: &WeightedGraph, kind: CentralityKind) -> Vec<f64> {
    match kind {
        CentralityKind::Degree => g.weighted_degrees(),
        CentralityKind::Closeness => g.harmonic_closeness(),
    }
}

pub(super) fn l1_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| math::abs(x - y)).sum()
}

/// `Σ_v |C(G1,v) − C(G2,v)|`.
pub fn centrality_distance(g1: &WeightedGraph, g2: &WeightedGraph, kind: CentralityKind) -> Result<f64> {
    if g1.node_count() != g2.node_count() {
        return Err(Error::NodeCountMismatch(g1.node_count(), g2.node_count()));
    }
    Ok(l1_gap(&centrality(g1, kind), &centrality(g2, kind)))
}

/// Laplacian spectrum of one graph, reused across all pairs it appears in.
#[derive(Debug, Clone)]
pub struct DiffusionSpectrum {
    weights: Matrix,
    values: Vec<f64>,
    vectors: Matrix,
}

impl DiffusionSpectrum {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        let eig = matfun::sym_eig(&g.laplacian())?;
        Ok(Self {
            weights: g.weights.clone(),
            values: eig.values,
            vectors: eig.vectors,
        })
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    /// `max_τ ‖expm(−τL₁) − expm(−τL₂)‖_F` over `τ = k/grid, k = 1..=grid`.
    ///
    /// With `L₁ = V·diag(λ)·Vᵀ`, `L₂ = U·diag(μ)·Uᵀ` and `C = (VᵀU)∘(VᵀU)`,
    /// the squared norm is `Σe^{−2τλ} + Σe^{−2τμ} − 2·aᵀCb` with
    /// `a = e^{−τλ}`, `b = e^{−τμ}`, so each τ costs `O(n²)`.
    pub fn distance_to(&self, other: &DiffusionSpectrum, grid: usize) -> f64 {
        if self.weights == other.weights {
            return 0.0;
        }
        let n = self.node_count();
        let mut overlap = self.vectors.t_matmul(&other.vectors).expect("equal node counts");
        overlap = overlap.map(|x| x * x);
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut best = 0.0f64;
        for k in 1..=grid {
            let tau = k as f64 / grid as f64;
            for (ai, &l) in a.iter_mut().zip(&self.values) {
                *ai = math::exp(-tau * l);
            }
            for (bi, &m) in b.iter_mut().zip(&other.values) {
                *bi = math::exp(-tau * m);
            }
            let aa: f64 = a.iter().map(|x| x * x).sum();
            let bb: f64 = b.iter().map(|x| x * x).sum();
            let mut cross = 0.0;
            for (i, &ai) in a.iter().enumerate() {
                cross += ai * crate::linalg::dot(overlap.row(i), &b);
            }
            best = best.max(aa + bb - 2.0 * cross);
        }
        math::sqrt(best.max(0.0))
    }
}

/// Heat-kernel diffusion distance between two graphs on the same vertex set.
pub fn diffusion_distance(g1: &WeightedGraph, g2: &WeightedGraph, tau_grid_size: usize) -> Result<f64> {
    if g1.node_count() != g2.node_count() {
        return Err(Error::NodeCountMismatch(g1.node_count(), g2.node_count()));
    }
    if tau_grid_size == 0 {
        return Err(Error::config("diffusion tau grid must have at least one point"));
    }
    Ok(DiffusionSpectrum::new(g1)?.distance_to(&DiffusionSpectrum::new(g2)?, tau_grid_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn complete(n: usize) -> WeightedGraph {
        WeightedGraph::new(Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap()
    }

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(WeightedGraph::new(Matrix::from_rows(&[[1.0]]).unwrap()).is_err());
        assert!(WeightedGraph::new(Matrix::from_rows(&[[0.0, -1.0], [-1.0, 0.0]]).unwrap()).is_err());
        assert!(WeightedGraph::new(Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap()).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn degree_examples() {
        let k3 = complete(3);
        let empty = WeightedGraph::empty(3).unwrap();
        assert_eq!(
            centrality_distance(&k3, &k3, CentralityKind::Degree).unwrap(),
            0.0
        );
        assert_eq!(
            centrality_distance(&k3, &empty, CentralityKind::Degree).unwrap(),
            6.0
        );
        assert_eq!(
            centrality_distance(&path3(), &k3, CentralityKind::Degree).unwrap(),
            2.0
        );
        assert_eq!(
            centrality_distance(&k3, &complete(4), CentralityKind::Degree),
            Err(Error::NodeCountMismatch(3, 4))
        );
    }

    #[test]
    fn harmonic_closeness_handles_disconnection() {
        // path 0-1-2: node 0 sees 1 at distance 1 and 2 at distance 2
        assert_eq!(path3().harmonic_closeness(), vec![1.5, 2.0, 1.5]);
        let g = WeightedGraph::from_edges(4, &[(0, 1, 3.0)]).unwrap();
        assert_eq!(g.harmonic_closeness(), vec![1.0, 1.0, 0.0, 0.0]);
        // K3 vs path: |2 − 1.5| + 0 + |2 − 1.5|
        assert_eq!(
            centrality_distance(&complete(3), &path3(), CentralityKind::Closeness).unwrap(),
            1.0
        );
    }

    #[test]
    fn diffusion_examples() {
        let k2 = complete(2);
        let e2 = WeightedGraph::empty(2).unwrap();
        assert_eq!(diffusion_distance(&k2, &k2, 50).unwrap(), 0.0);
        let d = diffusion_distance(&k2, &e2, 50).unwrap();
        assert_abs_diff_eq!(d, 1.0 - math::exp(-2.0), epsilon = 1e-7);
        assert_eq!(d, diffusion_distance(&e2, &k2, 50).unwrap());
    }

    #[test]
    fn diffusion_matches_explicit_heat_kernels() {
        let g1 = WeightedGraph::from_edges(4, &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 0.5)]).unwrap();
        let g2 = WeightedGraph::from_edges(4, &[(0, 2, 1.0), (1, 3, 3.0)]).unwrap();
        let grid = 20;
        let mut best = 0.0f64;
        for k in 1..=grid {
            let tau = k as f64 / grid as f64;
            let h1 =
                matfun::expm_sym(&SymMatrix::new(g1.laplacian().as_matrix().scale(-tau)).unwrap()).unwrap();
            let h2 =
                matfun::expm_sym(&SymMatrix::new(g2.laplacian().as_matrix().scale(-tau)).unwrap()).unwrap();
            best = best.max(h1.as_matrix().sub(h2.as_matrix()).unwrap().frobenius_norm());
        }
        assert_abs_diff_eq!(diffusion_distance(&g1, &g2, grid).unwrap(), best, epsilon = 1e-10);
    }
}
