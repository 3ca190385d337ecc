//! W*-correspondences over multi-matrix algebras in multiplicity normal form.
//!
//! `E = ⊕_{r,s} ℂ^{n_r × n_s} ⊗ ℂ^{mult[r][s]}`: every slot (an "edge") has a
//! source block `s` and a range block `r`. The left action multiplies by `a_r`
//! on the left, the right action by `a_s` on the right.
//!
//! The tensor power `E^{⊗k}` is indexed by composable edge sequences
//! `e_1 e_2 ⋯ e_k` with `source(e_i) = range(e_{i+1})`. Such a path carries an
//! `n_{range(e_1)} × n_{source(e_k)}` matrix and the balanced tensor product is
//! concatenation followed by a matrix product. Level zero consists of the
//! vertices (blocks) themselves, carrying the blocks of an element of `M`.
//!
//! Paths are ordered lexicographically with the first edge most significant, and
//! edges are ordered by `(range, source, slot)`. Two consequences are used
//! everywhere: paths with a common range are contiguous, and the level `j + k`
//! paths with a given level-`j` prefix are contiguous and ordered like their
//! level-`k` suffixes.

use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{AlgebraElement, MultiMatrixAlgebra};
use crate::error::{HardyError, Result};
use crate::linalg::{self, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub range: usize,
    pub source: usize,
    pub slot: usize,
}

/// A path of length `k`, stored as its first edge plus the index of its tail in
/// level `k - 1`. Level-zero paths are vertices and have no first edge.
#[derive(Clone, Copy, Debug)]
pub struct Path {
    pub range: usize,
    pub source: usize,
    pub first: Option<usize>,
    pub tail: usize,
}

#[derive(Debug)]
pub struct PathLevel {
    level: usize,
    paths: Vec<Path>,
    range_start: Vec<usize>,
    range_count: Vec<usize>,
}

impl PathLevel {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, idx: usize) -> &Path {
        &self.paths[idx]
    }

    /// Indices of the paths whose range is block `u`.
    pub fn with_range(&self, u: usize) -> std::ops::Range<usize> {
        self.range_start[u]..self.range_start[u] + self.range_count[u]
    }
}

struct Inner {
    algebra: MultiMatrixAlgebra,
    mult: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    levels: Mutex<Vec<Arc<PathLevel>>>,
}

/// A correspondence, cheap to clone; path levels are built lazily and shared.
#[derive(Clone)]
pub struct Correspondence {
    inner: Arc<Inner>,
}

impl PartialEq for Correspondence {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.algebra == other.inner.algebra && self.inner.mult == other.inner.mult)
    }
}

impl fmt::Debug for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Correspondence")
            .field("algebra", &self.inner.algebra)
            .field("mult", &self.inner.mult)
            .finish()
    }
}

impl Correspondence {
    /// `mult[r][s]` is the number of slots from source block `s` to range block `r`.
    pub fn new(algebra: &MultiMatrixAlgebra, mult: Vec<Vec<usize>>) -> Result<Self> {
        let b = algebra.num_blocks();
        if mult.len() != b || mult.iter().any(|row| row.len() != b) {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{b}x{b} multiplicity matrix"),
                actual: format!(
                    "{} rows of lengths {:?}",
                    mult.len(),
                    mult.iter().map(Vec::len).collect::<Vec<_>>()
                ),
            });
        }
        let mut edges = Vec::new();
        for (r, row) in mult.iter().enumerate() {
            for (s, &count) in row.iter().enumerate() {
                for slot in 0..count {
                    edges.push(Edge { range: r, source: s, slot });
                }
            }
        }
        let level0 = PathLevel {
            level: 0,
            paths: (0..b).map(|v| Path { range: v, source: v, first: None, tail: v }).collect(),
            range_start: (0..b).collect(),
            range_count: vec![1; b],
        };
        Ok(Self {
            inner: Arc::new(Inner {
                algebra: algebra.clone(),
                mult,
                edges,
                levels: Mutex::new(vec![Arc::new(level0)]),
            }),
        })
    }

    /// `E = ℂ^d` over `M = ℂ`.
    pub fn free(d: usize) -> Self {
        Self::new(&MultiMatrixAlgebra::scalars(), vec![vec![d]]).expect("1x1 multiplicity")
    }

    /// Graph correspondence over `ℂ^B`; `adjacency[r][s]` counts edges `s → r`.
    pub fn graph(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let algebra = MultiMatrixAlgebra::diagonal(adjacency.len())?;
        Self::new(&algebra, adjacency)
    }

    pub fn zero(algebra: &MultiMatrixAlgebra) -> Self {
        let b = algebra.num_blocks();
        Self::new(algebra, vec![vec![0; b]; b]).expect("square zero matrix")
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.inner.algebra
    }

    pub fn mult(&self) -> &[Vec<usize>] {
        &self.inner.mult
    }

    pub fn edges(&self) -> &[Edge] {
        &self.inner.edges
    }

    pub fn num_blocks(&self) -> usize {
        self.inner.algebra.num_blocks()
    }

    pub fn block_size(&self, b: usize) -> usize {
        self.inner.algebra.block_size(b)
    }

    pub fn is_zero(&self) -> bool {
        self.inner.edges.is_empty()
    }

    pub fn level(&self, k: usize) -> Arc<PathLevel> {
        let mut levels = self.inner.levels.lock().expect("path cache poisoned");
        while levels.len() <= k {
            let prev = levels.last().expect("level zero present").clone();
            let next = self.extend(&prev);
            levels.push(Arc::new(next));
        }
        levels[k].clone()
    }

    fn extend(&self, prev: &PathLevel) -> PathLevel {
        let b = self.num_blocks();
        let mut paths = Vec::new();
        let mut range_start = vec![0; b];
        let mut range_count = vec![0; b];
        for (e_idx, e) in self.inner.edges.iter().enumerate() {
            if range_count[e.range] == 0 {
                range_start[e.range] = paths.len();
            }
            for q in prev.with_range(e.source) {
                paths.push(Path {
                    range: e.range,
                    source: prev.paths[q].source,
                    first: Some(e_idx),
                    tail: q,
                });
                range_count[e.range] += 1;
            }
        }
        for u in 0..b {
            if range_count[u] == 0 {
                range_start[u] = paths.len();
            }
        }
        PathLevel { level: prev.level + 1, paths, range_start, range_count }
    }

    /// Edge sequence of a path.
    pub fn path_edges(&self, level: usize, idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(level);
        let mut k = level;
        let mut i = idx;
        while k > 0 {
            let p = *self.level(k).path(i);
            out.push(p.first.expect("positive level path has an edge"));
            i = p.tail;
            k -= 1;
        }
        out
    }

    /// Human-readable path label: edge indices joined by dots, or `v<b>` at level 0.
    pub fn path_label(&self, level: usize, idx: usize) -> String {
        if level == 0 {
            return format!("v{idx}");
        }
        self.path_edges(level, idx)
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Index of the path with the given edge sequence, if it is composable.
    pub fn find_path(&self, edges: &[usize]) -> Option<usize> {
        let k = edges.len();
        if k == 0 {
            return None;
        }
        for w in edges.windows(2) {
            if self.inner.edges[w[0]].source != self.inner.edges[w[1]].range {
                return None;
            }
        }
        let level = self.level(k);
        let first = edges[0];
        level.paths().iter().position(|p| {
            p.first == Some(first) && (k == 1 || self.path_edges(k - 1, p.tail) == edges[1..])
        })
    }

    /// `Σ_{paths of range u} widths[source]`.
    pub fn fan_dim(&self, level: usize, u: usize, widths: &[usize]) -> usize {
        let lvl = self.level(level);
        lvl.with_range(u).map(|q| widths[lvl.path(q).source]).sum()
    }

    /// Storage dimension of `E^{⊗k}`: `Σ_paths n_range · n_source`.
    pub fn dim(&self, level: usize) -> usize {
        let lvl = self.level(level);
        lvl.paths()
            .iter()
            .map(|p| self.block_size(p.range) * self.block_size(p.source))
            .sum()
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(HardyError::CorrespondenceMismatch);
        }
        Ok(())
    }
}

/// An element of `E^{⊗k}`: one matrix per path.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrElement {
    corr: Correspondence,
    level: usize,
    blocks: Vec<CMatrix>,
}

impl CorrElement {
    pub fn new(corr: &Correspondence, level: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        let lvl = corr.level(level);
        if blocks.len() != lvl.len() {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{} path blocks at level {level}", lvl.len()),
                actual: format!("{}", blocks.len()),
            });
        }
        for (p, blk) in lvl.paths().iter().zip(&blocks) {
            let shape = (corr.block_size(p.range), corr.block_size(p.source));
            if blk.shape() != shape {
                return Err(HardyError::ShapeMismatch {
                    expected: format!("{}x{}", shape.0, shape.1),
                    actual: format!("{}x{}", blk.nrows(), blk.ncols()),
                });
            }
            linalg::check_finite(blk)?;
        }
        Ok(Self { corr: corr.clone(), level, blocks })
    }

    pub fn zero(corr: &Correspondence, level: usize) -> Self {
        let lvl = corr.level(level);
        let blocks = lvl
            .paths()
            .iter()
            .map(|p| linalg::zeros(corr.block_size(p.range), corr.block_size(p.source)))
            .collect();
        Self { corr: corr.clone(), level, blocks }
    }

    /// Matrix unit `e_{ij}` placed on one path.
    pub fn unit(corr: &Correspondence, level: usize, path: usize, i: usize, j: usize) -> Self {
        let mut out = Self::zero(corr, level);
        out.blocks[path][(i, j)] = linalg::ONE;
        out
    }

    /// Every matrix unit on every path: an orthonormal basis of `E^{⊗k}` for the
    /// trace inner product.
    pub fn basis(corr: &Correspondence, level: usize) -> Vec<Self> {
        let lvl = corr.level(level);
        let mut out = Vec::new();
        for (idx, p) in lvl.paths().iter().enumerate() {
            for i in 0..corr.block_size(p.range) {
                for j in 0..corr.block_size(p.source) {
                    out.push(Self::unit(corr, level, idx, i, j));
                }
            }
        }
        out
    }

    /// `M` viewed as `E^{⊗0}`.
    pub fn from_algebra(corr: &Correspondence, a: &AlgebraElement) -> Result<Self> {
        if a.algebra() != corr.algebra() {
            return Err(HardyError::AlgebraMismatch);
        }
        Ok(Self { corr: corr.clone(), level: 0, blocks: a.blocks().to_vec() })
    }

    pub fn to_algebra(&self) -> Result<AlgebraElement> {
        if self.level != 0 {
            return Err(HardyError::LevelMismatch { left: self.level, right: 0 });
        }
        AlgebraElement::new(self.corr.algebra(), self.blocks.clone())
    }

    /// Row-major concatenation of the path blocks.
    pub fn from_flat(corr: &Correspondence, level: usize, data: &[C64]) -> Result<Self> {
        let dim = corr.dim(level);
        if data.len() != dim {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{dim} coordinates at level {level}"),
                actual: format!("{}", data.len()),
            });
        }
        let lvl = corr.level(level);
        let mut blocks = Vec::with_capacity(lvl.len());
        let mut off = 0;
        for p in lvl.paths() {
            let (r, c) = (corr.block_size(p.range), corr.block_size(p.source));
            blocks.push(linalg::unvec_row(&data[off..off + r * c], r, c));
            off += r * c;
        }
        Self::new(corr, level, blocks)
    }

    pub fn to_flat(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.corr.dim(self.level));
        for blk in &self.blocks {
            for i in 0..blk.nrows() {
                for j in 0..blk.ncols() {
                    out.push(blk[(i, j)]);
                }
            }
        }
        out
    }

    /// Gaussian entries on every path.
    pub fn random<R: Rng + ?Sized>(corr: &Correspondence, level: usize, rng: &mut R) -> Self {
        let lvl = corr.level(level);
        let blocks = lvl
            .paths()
            .iter()
            .map(|p| {
                CMatrix::from_fn(corr.block_size(p.range), corr.block_size(p.source), |_, _| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    linalg::c64(re, im)
                })
            })
            .collect();
        Self { corr: corr.clone(), level, blocks }
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, path: usize) -> &CMatrix {
        &self.blocks[path]
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        self.corr.same(&other.corr)?;
        if self.level != other.level {
            return Err(HardyError::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(())
    }

    /// `⟨ξ, ζ⟩ ∈ M`, block `s` equal to `Σ_{source(p) = s} ξ_p* ζ_p`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        self.compatible(other)?;
        let alg = self.corr.algebra();
        let mut blocks: Vec<CMatrix> =
            alg.block_sizes().iter().map(|&n| linalg::zeros(n, n)).collect();
        let lvl = self.corr.level(self.level);
        for (idx, p) in lvl.paths().iter().enumerate() {
            blocks[p.source] += self.blocks[idx].adjoint() * &other.blocks[idx];
        }
        AlgebraElement::new(alg, blocks)
    }

    /// `φ_k(a) ξ b`.
    pub fn bimodule_action(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<Self> {
        let alg = self.corr.algebra();
        if a.algebra() != alg || b.algebra() != alg {
            return Err(HardyError::AlgebraMismatch);
        }
        let lvl = self.corr.level(self.level);
        let blocks = lvl
            .paths()
            .iter()
            .zip(&self.blocks)
            .map(|(p, x)| a.block(p.range) * x * b.block(p.source))
            .collect();
        Ok(Self { corr: self.corr.clone(), level: self.level, blocks })
    }

    pub fn left_action(&self, a: &AlgebraElement) -> Result<Self> {
        self.bimodule_action(a, &AlgebraElement::identity(self.corr.algebra()))
    }

    pub fn right_action(&self, b: &AlgebraElement) -> Result<Self> {
        self.bimodule_action(&AlgebraElement::identity(self.corr.algebra()), b)
    }

    /// Balanced tensor product `ξ ⊗ ζ ∈ E^{⊗(j+k)}`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.corr.same(&other.corr)?;
        let corr = &self.corr;
        let (j, k) = (self.level, other.level);
        let left = corr.level(j);
        let right = corr.level(k);
        let mut blocks = Vec::with_capacity(corr.level(j + k).len());
        for (pi, p) in left.paths().iter().enumerate() {
            for q in right.with_range(p.source) {
                blocks.push(&self.blocks[pi] * &other.blocks[q]);
            }
        }
        Self::new(corr, j + k, blocks)
    }

    /// `‖⟨ξ, ξ⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.inner_product(self).expect("self-compatible").norm().sqrt()
    }

    /// Norm of the coordinate vector.
    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().map(|b| b.iter().map(|v| v.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            corr: self.corr.clone(),
            level: self.level,
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        Self {
            corr: self.corr.clone(),
            level: self.level,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `ξ^{⊗k}`, with `ξ^{⊗0}` the unit of `M`.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if self.level != 1 {
            return Err(HardyError::LevelMismatch { left: self.level, right: 1 });
        }
        let mut out = Self::from_algebra(&self.corr, &AlgebraElement::identity(self.corr.algebra()))?;
        for _ in 0..k {
            out = self.tensor(&out)?;
        }
        Ok(out)
    }
}
