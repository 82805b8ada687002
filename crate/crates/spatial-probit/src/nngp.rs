//! Nearest Neighbor Gaussian Process: voxel ordering, neighbor sets, the
//! B/F kriging factors, sparse density/sampling, and sparse-precision
//! assembly.
//!
//! The joint density factorizes over ordered voxels, each conditioned on at
//! most m earlier nearest neighbors. With B_j the kriging weights of voxel
//! j onto its neighbor set and F_j the conditional variance, the implied
//! precision (I-B)^T F^{-1} (I-B) is sparse with at most m(m+1)n/2 strict
//! off-diagonal nonzeros.

use crate::covariance::{euclid, CorrFn, MaternParams, JITTER_REL};
use crate::error::{Error, Result};
use crate::stats::LN_2PI;
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Lexicographic voxel order: x first, then y. Returns original indices in
/// sorted order.
pub fn order_voxels(coords: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..coords.len()).collect();
    idx.sort_by(|&a, &b| {
        coords[a][0]
            .total_cmp(&coords[b][0])
            .then(coords[a][1].total_cmp(&coords[b][1]))
    });
    idx
}

/// Directed acyclic neighbor structure over lexicographically ordered
/// voxels. `order[p]` is the original index of ordered position p;
/// `neighbors[p]` holds ordered positions (all < p), ascending.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    pub order: Vec<usize>,
    pub neighbors: Vec<Vec<usize>>,
    pub m: usize,
    ordered_coords: Vec<[f64; 2]>,
}

impl NeighborGraph {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn ordered_coords(&self) -> &[[f64; 2]] {
        &self.ordered_coords
    }
}

/// Build the neighbor graph: each ordered voxel links to the min(p, m)
/// earlier voxels with the shortest Euclidean distance, ties broken by the
/// smaller ordered index.
pub fn build_neighbors(coords: &[[f64; 2]], m: usize) -> Result<NeighborGraph> {
    if m == 0 {
        return Err(Error::InvalidInput("neighbor count m must be >= 1".into()));
    }
    if coords.is_empty() {
        return Err(Error::InvalidInput("no voxels".into()));
    }
    let order = order_voxels(coords);
    let ordered_coords: Vec<[f64; 2]> = order.iter().map(|&j| coords[j]).collect();
    let n = coords.len();
    let mut neighbors = Vec::with_capacity(n);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n);
    for p in 0..n {
        let k = p.min(m);
        if k == 0 {
            neighbors.push(Vec::new());
            continue;
        }
        cand.clear();
        let sp = ordered_coords[p];
        for (q, sq) in ordered_coords[..p].iter().enumerate() {
            let dx = sp[0] - sq[0];
            let dy = sp[1] - sq[1];
            cand.push((dx * dx + dy * dy, q));
        }
        let cmp = |a: &(f64, usize), b: &(f64, usize)| {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        };
        if cand.len() > k {
            cand.select_nth_unstable_by(k - 1, cmp);
            cand.truncate(k);
        }
        let mut set: Vec<usize> = cand.iter().map(|&(_, q)| q).collect();
        set.sort_unstable();
        neighbors.push(set);
    }
    Ok(NeighborGraph {
        order,
        neighbors,
        m,
        ordered_coords,
    })
}

/// Distances needed by the kriging solves, cached so that factor rebuilds
/// under new spatial parameters touch no coordinates.
pub struct DistCache {
    /// Per position: distance from the voxel to each neighbor.
    cross: Vec<Vec<f64>>,
    /// Per position: neighbor-pair distances, lower triangle row-major.
    within: Vec<Vec<f64>>,
}

impl DistCache {
    pub fn build(graph: &NeighborGraph) -> Self {
        let oc = &graph.ordered_coords;
        let mut cross = Vec::with_capacity(graph.n());
        let mut within = Vec::with_capacity(graph.n());
        for p in 0..graph.n() {
            let nb = &graph.neighbors[p];
            let k = nb.len();
            let mut c = Vec::with_capacity(k);
            for &q in nb {
                c.push(euclid(oc[p], oc[q]));
            }
            let mut w = Vec::with_capacity(k * k.saturating_sub(1) / 2);
            for a in 1..k {
                for b in 0..a {
                    w.push(euclid(oc[nb[a]], oc[nb[b]]));
                }
            }
            cross.push(c);
            within.push(w);
        }
        Self { cross, within }
    }
}

/// Kriging weights and conditional variances per ordered voxel.
#[derive(Debug, Clone)]
pub struct NngpFactors {
    pub b: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub sigma2: f64,
}

/// Factors from the Matern parameters (exact kernel path).
pub fn nngp_factors(
    graph: &NeighborGraph,
    theta: &MaternParams,
) -> Result<NngpFactors> {
    let cache = DistCache::build(graph);
    nngp_factors_cached(graph, &cache, theta)
}

/// Factors through any correlation evaluator and a prebuilt distance cache.
pub fn nngp_factors_cached<C: CorrFn>(
    graph: &NeighborGraph,
    cache: &DistCache,
    corr: &C,
) -> Result<NngpFactors> {
    let sigma2 = corr.sigma2();
    let n = graph.n();
    let mut b = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for p in 0..n {
        let k = graph.neighbors[p].len();
        if k == 0 {
            b.push(Vec::new());
            f.push(sigma2);
            continue;
        }
        let mut c_n = DMatrix::from_element(k, k, sigma2);
        let mut t = 0;
        for a in 1..k {
            for bb in 0..a {
                let v = sigma2 * corr.corr(cache.within[p][t]);
                c_n[(a, bb)] = v;
                c_n[(bb, a)] = v;
                t += 1;
            }
        }
        let cross = DVector::from_fn(k, |a, _| sigma2 * corr.corr(cache.cross[p][a]));
        let chol = match Cholesky::new(c_n.clone()) {
            Some(ch) => ch,
            None => {
                for a in 0..k {
                    c_n[(a, a)] += JITTER_REL * sigma2;
                }
                Cholesky::new(c_n).ok_or(Error::Singular {
                    context: format!("NNGP neighbor covariance at ordered voxel {p}"),
                })?
            }
        };
        let weights = chol.solve(&cross);
        let fv = sigma2 - cross.dot(&weights);
        if !(fv > 0.0) {
            return Err(Error::Singular {
                context: format!(
                    "NNGP conditional variance nonpositive at ordered voxel {p}"
                ),
            });
        }
        b.push(weights.as_slice().to_vec());
        f.push(fv);
    }
    Ok(NngpFactors { b, f, sigma2 })
}

/// Sparse NNGP log-density of w (original index space).
pub fn nngp_logdensity(w: &[f64], graph: &NeighborGraph, factors: &NngpFactors) -> f64 {
    let w_ord: Vec<f64> = graph.order.iter().map(|&j| w[j]).collect();
    nngp_logdensity_ordered(&w_ord, graph, factors)
}

/// Same, with w already in graph order.
pub fn nngp_logdensity_ordered(
    w_ord: &[f64],
    graph: &NeighborGraph,
    factors: &NngpFactors,
) -> f64 {
    let mut ld = 0.0;
    for p in 0..graph.n() {
        let mut mean = 0.0;
        for (t, &q) in graph.neighbors[p].iter().enumerate() {
            mean += factors.b[p][t] * w_ord[q];
        }
        let r = w_ord[p] - mean;
        ld += -0.5 * (LN_2PI + factors.f[p].ln() + r * r / factors.f[p]);
    }
    ld
}

/// Ancestral draw from the NNGP (original index space).
pub fn nngp_sample<R: Rng + ?Sized>(
    graph: &NeighborGraph,
    factors: &NngpFactors,
    rng: &mut R,
) -> Vec<f64> {
    let w_ord = nngp_sample_ordered(graph, factors, rng);
    let mut w = vec![0.0; graph.n()];
    for (p, &j) in graph.order.iter().enumerate() {
        w[j] = w_ord[p];
    }
    w
}

pub fn nngp_sample_ordered<R: Rng + ?Sized>(
    graph: &NeighborGraph,
    factors: &NngpFactors,
    rng: &mut R,
) -> Vec<f64> {
    let n = graph.n();
    let mut w = vec![0.0; n];
    for p in 0..n {
        let mut mean = 0.0;
        for (t, &q) in graph.neighbors[p].iter().enumerate() {
            mean += factors.b[p][t] * w[q];
        }
        let z: f64 = rng.sample(StandardNormal);
        w[p] = mean + factors.f[p].sqrt() * z;
    }
    w
}

/// Symmetric sparse matrix stored as full sorted rows.
#[derive(Debug, Clone)]
pub struct SparseSym {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn quad_form(&self, w: &[f64]) -> f64 {
        let mut s = 0.0;
        for (j, row) in self.rows.iter().enumerate() {
            let mut rj = 0.0;
            for &(k, v) in row {
                rj += v * w[k];
            }
            s += w[j] * rj;
        }
        s
    }

    /// Structural nonzeros in the strict upper triangle.
    pub fn nnz_off_diagonal_upper(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .map(|(j, row)| row.iter().filter(|&&(k, _)| k > j).count())
            .sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (j, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                m[(j, k)] = v;
            }
        }
        m
    }
}

/// Assemble (I-B)^T F^{-1} (I-B) in the original index space.
pub fn nngp_precision(graph: &NeighborGraph, factors: &NngpFactors) -> SparseSym {
    let ordered = nngp_precision_ordered(graph, factors);
    // Relabel ordered positions back to original voxel indices.
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); graph.n()];
    for (p, row) in ordered.rows.iter().enumerate() {
        let j = graph.order[p];
        rows[j] = row
            .iter()
            .map(|&(q, v)| (graph.order[q], v))
            .collect();
        rows[j].sort_unstable_by_key(|&(k, _)| k);
    }
    SparseSym {
        n: graph.n(),
        rows,
    }
}

/// Precision over ordered positions.
pub fn nngp_precision_ordered(graph: &NeighborGraph, factors: &NngpFactors) -> SparseSym {
    let n = graph.n();
    let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); n];
    let mut stencil: Vec<(usize, f64)> = Vec::new();
    for p in 0..n {
        stencil.clear();
        stencil.push((p, 1.0));
        for (t, &q) in graph.neighbors[p].iter().enumerate() {
            stencil.push((q, -factors.b[p][t]));
        }
        let finv = 1.0 / factors.f[p];
        for a in 0..stencil.len() {
            let (ia, va) = stencil[a];
            for b in 0..stencil.len() {
                let (ib, vb) = stencil[b];
                *maps[ia].entry(ib).or_insert(0.0) += finv * va * vb;
            }
        }
    }
    let rows = maps
        .into_iter()
        .map(|m| m.into_iter().collect::<Vec<_>>())
        .collect();
    SparseSym { n, rows }
}
