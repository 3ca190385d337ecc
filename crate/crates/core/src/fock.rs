//! Truncated Fock spaces `F_N(E) = ⊕_{k ≤ N} E^{⊗k}` and their induced
//! versions `F_N(E) ⊗_σ H`.
//!
//! Both share one coordinate scheme. A level-`k` vector assigns to every path
//! `p` an `n_{range p} × w_{source p}` block (row-major), where the widths are
//! `w_b = n_b` for `F_N(E)` itself and `w_b = m_b` (the multiplicities of `σ`)
//! for the induced space: `ξ ⊗ h` with `h` in block `s` of `H` is the matrix
//! product `ξ_p h_s`.
//!
//! Operators commuting with the left action of `M` are stored as [`FanMap`]s,
//! one small block per vertex, and are applied without materializing dense
//! matrices. Dense matrices are produced only on request.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{AlgebraElement, Representation};
use crate::corr::{CorrElement, Correspondence};
use crate::error::{HardyError, Result};
use crate::linalg::{self, CMatrix, C64};

/// Coordinates of one level under a given choice of widths.
#[derive(Clone, Debug)]
pub struct LevelGeometry {
    /// Flat offset of each path block.
    pub offsets: Vec<usize>,
    /// Offset of each path inside the fan of its range vertex.
    pub fan_offsets: Vec<usize>,
    /// `Σ_{paths of range u} w_{source}` for each vertex `u`.
    pub fan_dims: Vec<usize>,
    pub dim: usize,
}

pub fn level_geometry(corr: &Correspondence, widths: &[usize], k: usize) -> LevelGeometry {
    let lvl = corr.level(k);
    let b = corr.num_blocks();
    let mut offsets = Vec::with_capacity(lvl.len());
    let mut fan_offsets = vec![0; lvl.len()];
    let mut dim = 0;
    for p in lvl.paths() {
        offsets.push(dim);
        dim += corr.block_size(p.range) * widths[p.source];
    }
    let fan_dims = (0..b)
        .map(|u| {
            let mut acc = 0;
            for q in lvl.with_range(u) {
                fan_offsets[q] = acc;
                acc += widths[lvl.path(q).source];
            }
            acc
        })
        .collect();
    LevelGeometry { offsets, fan_offsets, fan_dims, dim }
}

/// `F_N(E)` (no representation) or `F_N(E) ⊗_σ H`.
#[derive(Clone, Debug)]
pub struct TruncatedFock {
    corr: Correspondence,
    rep: Option<Representation>,
    widths: Vec<usize>,
    truncation: usize,
    level_start: Vec<usize>,
    geometry: Vec<LevelGeometry>,
}

impl TruncatedFock {
    pub fn new(corr: &Correspondence, truncation: usize) -> Self {
        let widths = corr.algebra().block_sizes().to_vec();
        Self::with_widths(corr, None, widths, truncation)
    }

    pub fn induced(corr: &Correspondence, rep: &Representation, truncation: usize) -> Result<Self> {
        if rep.algebra() != corr.algebra() {
            return Err(HardyError::AlgebraMismatch);
        }
        let widths = rep.multiplicities().to_vec();
        Ok(Self::with_widths(corr, Some(rep.clone()), widths, truncation))
    }

    fn with_widths(
        corr: &Correspondence,
        rep: Option<Representation>,
        widths: Vec<usize>,
        truncation: usize,
    ) -> Self {
        let geometry: Vec<LevelGeometry> =
            (0..=truncation).map(|k| level_geometry(corr, &widths, k)).collect();
        let mut level_start = Vec::with_capacity(truncation + 2);
        let mut acc = 0;
        for g in &geometry {
            level_start.push(acc);
            acc += g.dim;
        }
        level_start.push(acc);
        Self { corr: corr.clone(), rep, widths, truncation, level_start, geometry }
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn representation(&self) -> Option<&Representation> {
        self.rep.as_ref()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.level_start[self.truncation + 1]
    }

    pub fn level_dim(&self, k: usize) -> usize {
        self.geometry[k].dim
    }

    pub fn level_range(&self, k: usize) -> std::ops::Range<usize> {
        self.level_start[k]..self.level_start[k + 1]
    }

    pub fn geometry(&self, k: usize) -> &LevelGeometry {
        &self.geometry[k]
    }

    /// Level of a flat coordinate.
    pub fn level_of(&self, idx: usize) -> usize {
        self.level_start.partition_point(|&s| s <= idx) - 1
    }

    /// Diagonal mask of the level projection `P_k`.
    pub fn level_projection(&self, k: usize) -> CMatrix {
        let mut p = linalg::zeros(self.dim(), self.dim());
        for i in self.level_range(k) {
            p[(i, i)] = linalg::ONE;
        }
        p
    }

    /// The embedding of level zero (`M`, or `H` in the induced case).
    pub fn vacuum_embedding(&self) -> CMatrix {
        let d0 = self.level_dim(0);
        let mut out = linalg::zeros(self.dim(), d0);
        for i in 0..d0 {
            out[(i, i)] = linalg::ONE;
        }
        out
    }

    /// `1 ∈ M` as a level-zero vector of `F_N(E)`.
    pub fn vacuum(&self) -> Result<CMatrix> {
        if self.rep.is_some() {
            return Err(HardyError::InvalidStructure(
                "the vacuum vector lives in the uninduced Fock space".into(),
            ));
        }
        let unit = CorrElement::from_algebra(&self.corr, &AlgebraElement::identity(self.corr.algebra()))?;
        let mut out = linalg::zeros(self.dim(), 1);
        for (i, v) in unit.to_flat().into_iter().enumerate() {
            out[(i, 0)] = v;
        }
        Ok(out)
    }

    fn check_rows(&self, x: &CMatrix) -> Result<()> {
        if x.nrows() != self.dim() {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{} rows", self.dim()),
                actual: format!("{}", x.nrows()),
            });
        }
        Ok(())
    }

    /// Copies of a level of `x` (rows of that level, all columns).
    pub fn level_rows(&self, x: &CMatrix, k: usize) -> CMatrix {
        let r = self.level_range(k);
        x.rows(r.start, r.len()).into_owned()
    }

    /// `(T_ξ ⊗ I) x` for a level-`j ≥ 1` element, compressed to levels `≤ N`.
    pub fn apply_creation(&self, xi: &CorrElement, x: &CMatrix) -> Result<CMatrix> {
        self.check_creation(xi)?;
        self.check_rows(x)?;
        let j = xi.level();
        let cols = x.ncols();
        let mut out = linalg::zeros(self.dim(), cols);
        let left = self.corr.level(j);
        for k in 0..=self.truncation - j {
            let right = self.corr.level(k);
            let g_in = &self.geometry[k];
            let g_out = &self.geometry[k + j];
            let (s_in, s_out) = (self.level_start[k], self.level_start[k + j]);
            let mut target = 0;
            for (pi, p) in left.paths().iter().enumerate() {
                let xi_p = xi.block(pi);
                let n_r = self.corr.block_size(p.range);
                for q in right.with_range(p.source) {
                    let w = self.widths[right.path(q).source];
                    let n_v = self.corr.block_size(p.source);
                    let block = gather(x, s_in + g_in.offsets[q], n_v, w);
                    let prod = xi_p * block;
                    scatter_add(&mut out, s_out + g_out.offsets[target], n_r, w, &prod);
                    target += 1;
                }
            }
        }
        Ok(out)
    }

    /// `(T_ξ ⊗ I)* y`.
    pub fn apply_creation_adjoint(&self, xi: &CorrElement, y: &CMatrix) -> Result<CMatrix> {
        self.check_creation(xi)?;
        self.check_rows(y)?;
        let j = xi.level();
        let cols = y.ncols();
        let mut out = linalg::zeros(self.dim(), cols);
        let left = self.corr.level(j);
        for k in 0..=self.truncation - j {
            let right = self.corr.level(k);
            let g_in = &self.geometry[k + j];
            let g_out = &self.geometry[k];
            let (s_in, s_out) = (self.level_start[k + j], self.level_start[k]);
            let mut source = 0;
            for (pi, p) in left.paths().iter().enumerate() {
                let xi_adj = xi.block(pi).adjoint();
                let n_r = self.corr.block_size(p.range);
                let n_v = self.corr.block_size(p.source);
                for q in right.with_range(p.source) {
                    let w = self.widths[right.path(q).source];
                    let block = gather(y, s_in + g_in.offsets[source], n_r, w);
                    scatter_add(&mut out, s_out + g_out.offsets[q], n_v, w, &(&xi_adj * block));
                    source += 1;
                }
            }
        }
        Ok(out)
    }

    /// `(φ_∞(a) ⊗ I) x`.
    pub fn apply_phi(&self, a: &AlgebraElement, x: &CMatrix) -> Result<CMatrix> {
        self.check_rows(x)?;
        let mut out = linalg::zeros(self.dim(), x.ncols());
        for k in 0..=self.truncation {
            let r = self.level_range(k);
            let level = x.rows(r.start, r.len()).into_owned();
            let acted = apply_phi_level(&self.corr, &self.widths, k, a, &level)?;
            out.rows_mut(r.start, r.len()).copy_from(&acted);
        }
        Ok(out)
    }

    fn check_creation(&self, xi: &CorrElement) -> Result<()> {
        if xi.corr() != &self.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        if xi.level() == 0 {
            return Err(HardyError::LevelZero);
        }
        if xi.level() > self.truncation {
            return Err(HardyError::TruncationTooSmall { level: xi.level(), truncation: self.truncation });
        }
        Ok(())
    }

    /// Dense `T_ξ ⊗ I`.
    pub fn creation_operator(&self, xi: &CorrElement) -> Result<CMatrix> {
        self.apply_creation(xi, &linalg::identity(self.dim()))
    }

    /// Dense `φ_∞(a) ⊗ I`.
    pub fn phi_inf(&self, a: &AlgebraElement) -> Result<CMatrix> {
        self.apply_phi(a, &linalg::identity(self.dim()))
    }

    /// Flat vectors of `x` on one level, as level-`k` elements of `E^{⊗k}`.
    /// Only meaningful for the uninduced space.
    pub fn level_element(&self, x: &CMatrix, col: usize, k: usize) -> Result<CorrElement> {
        if self.rep.is_some() {
            return Err(HardyError::InvalidStructure(
                "level elements are read from the uninduced Fock space".into(),
            ));
        }
        let r = self.level_range(k);
        let data: Vec<C64> = (r.start..r.end).map(|i| x[(i, col)]).collect();
        CorrElement::from_flat(&self.corr, k, &data)
    }

    /// Residual of the upper (level-raising-inverse) part of a dense operator:
    /// the Frobenius norm of all entries mapping level `j` into a level `i < j`.
    pub fn upper_residual(&self, x: &CMatrix) -> Result<f64> {
        if x.shape() != (self.dim(), self.dim()) {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{0}x{0}", self.dim()),
                actual: format!("{}x{}", x.nrows(), x.ncols()),
            });
        }
        let mut acc = 0.0;
        for j in 1..=self.truncation {
            let cols = self.level_range(j);
            let rows = self.level_start[j];
            acc += x
                .view((0, cols.start), (rows, cols.len()))
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>();
        }
        Ok(acc.sqrt())
    }
}

/// `(φ_k(a) ⊗ I) x` for flat level-`k` vectors under the given widths.
pub fn apply_phi_level(
    corr: &Correspondence,
    widths: &[usize],
    k: usize,
    a: &AlgebraElement,
    x: &CMatrix,
) -> Result<CMatrix> {
    if a.algebra() != corr.algebra() {
        return Err(HardyError::AlgebraMismatch);
    }
    let g = level_geometry(corr, widths, k);
    if x.nrows() != g.dim {
        return Err(HardyError::ShapeMismatch {
            expected: format!("{} rows", g.dim),
            actual: format!("{}", x.nrows()),
        });
    }
    let lvl = corr.level(k);
    let mut out = linalg::zeros(g.dim, x.ncols());
    for (qi, q) in lvl.paths().iter().enumerate() {
        let n = corr.block_size(q.range);
        let w = widths[q.source];
        let block = gather(x, g.offsets[qi], n, w);
        scatter_add(&mut out, g.offsets[qi], n, w, &(a.block(q.range) * block));
    }
    Ok(out)
}

/// The insertion `L_ξ : H → E^{⊗k} ⊗_σ H`, `h ↦ ξ ⊗ h`, as a dense matrix.
pub fn insertion_map(xi: &CorrElement, rep: &Representation) -> Result<CMatrix> {
    let corr = xi.corr();
    if rep.algebra() != corr.algebra() {
        return Err(HardyError::AlgebraMismatch);
    }
    let k = xi.level();
    let g = level_geometry(corr, rep.multiplicities(), k);
    let lvl = corr.level(k);
    let mut out = linalg::zeros(g.dim, rep.dim());
    for (pi, p) in lvl.paths().iter().enumerate() {
        let s = p.source;
        let ms = rep.multiplicity(s);
        let block = xi.block(pi);
        for r in 0..corr.block_size(p.range) {
            for i in 0..corr.block_size(s) {
                for c in 0..ms {
                    out[(g.offsets[pi] + r * ms + c, rep.offset(s) + i * ms + c)] = block[(r, i)];
                }
            }
        }
    }
    Ok(out)
}

/// Row-major `n × w` blocks of every column of `x`, side by side:
/// the result is `n × (w · cols)`.
fn gather(x: &CMatrix, off: usize, n: usize, w: usize) -> CMatrix {
    let cols = x.ncols();
    let mut out = linalg::zeros(n, w * cols);
    for col in 0..cols {
        for i in 0..n {
            for c in 0..w {
                out[(i, col * w + c)] = x[(off + i * w + c, col)];
            }
        }
    }
    out
}

fn scatter_add(out: &mut CMatrix, off: usize, n: usize, w: usize, m: &CMatrix) {
    let cols = out.ncols();
    for col in 0..cols {
        for i in 0..n {
            for c in 0..w {
                out[(off + i * w + c, col)] += m[(i, col * w + c)];
            }
        }
    }
}

/// An operator from level `from` to level `to` that commutes with the left
/// action of `M`, stored as one block per vertex `u`:
/// `Z_u : fan(u, from) → fan(u, to)`, acting as `I_{n_u} ⊗ Z_u`.
///
/// Intertwiners `H → E^{⊗k} ⊗_σ H` (level 0 to level k in the induced frame),
/// defect operators and elements of `σ(M)'` all have this form.
#[derive(Clone, Debug, PartialEq)]
pub struct FanMap {
    corr: Correspondence,
    widths: Vec<usize>,
    from: usize,
    to: usize,
    blocks: Vec<CMatrix>,
}

impl FanMap {
    pub fn new(
        corr: &Correspondence,
        widths: &[usize],
        from: usize,
        to: usize,
        blocks: Vec<CMatrix>,
    ) -> Result<Self> {
        let g_from = level_geometry(corr, widths, from);
        let g_to = level_geometry(corr, widths, to);
        if blocks.len() != corr.num_blocks() {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{} vertex blocks", corr.num_blocks()),
                actual: format!("{}", blocks.len()),
            });
        }
        for (u, blk) in blocks.iter().enumerate() {
            let shape = (g_to.fan_dims[u], g_from.fan_dims[u]);
            if blk.shape() != shape {
                return Err(HardyError::ShapeMismatch {
                    expected: format!("vertex {u} block {}x{}", shape.0, shape.1),
                    actual: format!("{}x{}", blk.nrows(), blk.ncols()),
                });
            }
        }
        Ok(Self { corr: corr.clone(), widths: widths.to_vec(), from, to, blocks })
    }

    pub fn zero(corr: &Correspondence, widths: &[usize], from: usize, to: usize) -> Self {
        let g_from = level_geometry(corr, widths, from);
        let g_to = level_geometry(corr, widths, to);
        let blocks = (0..corr.num_blocks())
            .map(|u| linalg::zeros(g_to.fan_dims[u], g_from.fan_dims[u]))
            .collect();
        Self { corr: corr.clone(), widths: widths.to_vec(), from, to, blocks }
    }

    pub fn identity(corr: &Correspondence, widths: &[usize], level: usize) -> Self {
        let g = level_geometry(corr, widths, level);
        let blocks = g.fan_dims.iter().map(|&f| linalg::identity(f)).collect();
        Self { corr: corr.clone(), widths: widths.to_vec(), from: level, to: level, blocks }
    }

    /// Gaussian vertex blocks.
    pub fn random<R: Rng + ?Sized>(
        corr: &Correspondence,
        widths: &[usize],
        from: usize,
        to: usize,
        rng: &mut R,
    ) -> Self {
        let mut out = Self::zero(corr, widths, from, to);
        for blk in &mut out.blocks {
            for v in blk.iter_mut() {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                *v = linalg::c64(re, im);
            }
        }
        out
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn from_level(&self) -> usize {
        self.from
    }

    pub fn to_level(&self) -> usize {
        self.to
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, u: usize) -> &CMatrix {
        &self.blocks[u]
    }

    fn same_frame(&self, other: &Self) -> Result<()> {
        if self.corr != other.corr || self.widths != other.widths {
            return Err(HardyError::CorrespondenceMismatch);
        }
        Ok(())
    }

    /// Operator norm: the largest vertex block norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::operator_norm_unchecked).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Commutant trace `Σ_u Tr Z_u`, with the unnormalized trace on `M`.
    pub fn trace(&self) -> Result<C64> {
        if self.from != self.to {
            return Err(HardyError::LevelMismatch { left: self.from, right: self.to });
        }
        Ok(self.blocks.iter().map(linalg::trace).sum())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            corr: self.corr.clone(),
            widths: self.widths.clone(),
            from: self.to,
            to: self.from,
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            *b *= c;
        }
        out
    }

    fn same_levels(&self, other: &Self) -> Result<()> {
        self.same_frame(other)?;
        if self.from != other.from || self.to != other.to {
            return Err(HardyError::LevelMismatch { left: self.to, right: other.to });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_levels(other)?;
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_levels(other)?;
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&other.blocks) {
            *a -= b;
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        if other.to != self.from {
            return Err(HardyError::LevelMismatch { left: self.from, right: other.to });
        }
        Ok(Self {
            corr: self.corr.clone(),
            widths: self.widths.clone(),
            from: other.from,
            to: self.to,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        })
    }

    /// Positive square root of a positive vertex-block operator.
    pub fn positive_sqrt(&self) -> Result<Self> {
        self.positive_sqrt_with_tol(linalg::TOL_PSD)
    }

    pub fn positive_sqrt_with_tol(&self, tol: f64) -> Result<Self> {
        if self.from != self.to {
            return Err(HardyError::LevelMismatch { left: self.from, right: self.to });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| linalg::positive_sqrt_with_tol(b, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks, ..self.clone() })
    }

    /// `(I_{E^{⊗k}} ⊗ self) ∘ other`, where `other` lands on level `k + from`.
    ///
    /// Under the prefix-contiguous path order, `I_{E^{⊗k}} ⊗ Z` acts on the fan of
    /// `u` as the block diagonal `⊕_{prefix p of range u} Z_{source p}`.
    pub fn ampliate_compose(&self, k: usize, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        if other.to != k + self.from {
            return Err(HardyError::LevelMismatch { left: k + self.from, right: other.to });
        }
        let pre = self.corr.level(k);
        let g_from = level_geometry(&self.corr, &self.widths, self.from);
        let g_to = level_geometry(&self.corr, &self.widths, self.to);
        let g_out = level_geometry(&self.corr, &self.widths, k + self.to);
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (u, w) in other.blocks.iter().enumerate() {
            let mut out = linalg::zeros(g_out.fan_dims[u], w.ncols());
            let (mut r_in, mut r_out) = (0, 0);
            for p in pre.with_range(u) {
                let v = pre.path(p).source;
                let (fi, fo) = (g_from.fan_dims[v], g_to.fan_dims[v]);
                if fi > 0 && fo > 0 && w.ncols() > 0 {
                    let seg = w.rows(r_in, fi);
                    out.rows_mut(r_out, fo).copy_from(&(&self.blocks[v] * seg));
                }
                r_in += fi;
                r_out += fo;
            }
            blocks.push(out);
        }
        Ok(Self {
            corr: self.corr.clone(),
            widths: self.widths.clone(),
            from: other.from,
            to: k + self.to,
            blocks,
        })
    }

    /// `I_{E^{⊗k}} ⊗ self` as a fan map from level `k + from` to `k + to`.
    pub fn ampliate(&self, k: usize) -> Self {
        let id = Self::identity(&self.corr, &self.widths, k + self.from);
        self.ampliate_compose(k, &id).expect("frames agree")
    }

    /// `(I_{E^{⊗k}} ⊗ self) x` on flat level-`(k + from)` vectors (columns of `x`).
    pub fn apply_ampliated(&self, k: usize, x: &CMatrix) -> Result<CMatrix> {
        let g_in = level_geometry(&self.corr, &self.widths, k + self.from);
        let g_out = level_geometry(&self.corr, &self.widths, k + self.to);
        if x.nrows() != g_in.dim {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{} rows", g_in.dim),
                actual: format!("{}", x.nrows()),
            });
        }
        let lvl_from = self.corr.level(self.from);
        let lvl_to = self.corr.level(self.to);
        let g_from = level_geometry(&self.corr, &self.widths, self.from);
        let g_to = level_geometry(&self.corr, &self.widths, self.to);
        let pre = self.corr.level(k);
        let cols = x.ncols();
        let mut out = linalg::zeros(g_out.dim, cols);
        let (mut idx_in, mut idx_out) = (0, 0);
        for p in pre.paths() {
            let v = p.source;
            let n_r = self.corr.block_size(p.range);
            let (fi, fo) = (g_from.fan_dims[v], g_to.fan_dims[v]);
            let range_in = lvl_from.with_range(v);
            let range_out = lvl_to.with_range(v);
            if fi > 0 && fo > 0 {
                // Rows indexed by (column, i), fan columns on the right.
                let mut g = linalg::zeros(cols * n_r, fi);
                for (t, q) in range_in.clone().enumerate() {
                    let w = self.widths[lvl_from.path(q).source];
                    let off = g_in.offsets[idx_in + t];
                    let fan = g_from.fan_offsets[q];
                    for col in 0..cols {
                        for i in 0..n_r {
                            for c in 0..w {
                                g[(col * n_r + i, fan + c)] = x[(off + i * w + c, col)];
                            }
                        }
                    }
                }
                let h = g * self.blocks[v].transpose();
                for (t, q) in range_out.clone().enumerate() {
                    let w = self.widths[lvl_to.path(q).source];
                    let off = g_out.offsets[idx_out + t];
                    let fan = g_to.fan_offsets[q];
                    for col in 0..cols {
                        for i in 0..n_r {
                            for c in 0..w {
                                out[(off + i * w + c, col)] = h[(col * n_r + i, fan + c)];
                            }
                        }
                    }
                }
            }
            idx_in += range_in.len();
            idx_out += range_out.len();
        }
        Ok(out)
    }

    /// Dense matrix `I_{n_u} ⊗ Z_u` in flat coordinates.
    pub fn to_dense(&self) -> CMatrix {
        let g_from = level_geometry(&self.corr, &self.widths, self.from);
        let id = linalg::identity(g_from.dim);
        self.apply_ampliated(0, &id).expect("identity has matching rows")
    }

    /// Best fan-map approximation of a dense operator from level `from` to level
    /// `to`, together with the residual `‖x − dense(Z)‖`. The residual vanishes
    /// exactly when `x` commutes with the left action of `M`.
    pub fn from_dense(
        corr: &Correspondence,
        widths: &[usize],
        from: usize,
        to: usize,
        x: &CMatrix,
    ) -> Result<(Self, f64)> {
        let g_from = level_geometry(corr, widths, from);
        let g_to = level_geometry(corr, widths, to);
        if x.shape() != (g_to.dim, g_from.dim) {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{}x{}", g_to.dim, g_from.dim),
                actual: format!("{}x{}", x.nrows(), x.ncols()),
            });
        }
        let lvl_from = corr.level(from);
        let lvl_to = corr.level(to);
        let mut blocks = Vec::with_capacity(corr.num_blocks());
        for u in 0..corr.num_blocks() {
            let n = corr.block_size(u);
            let mut z = linalg::zeros(g_to.fan_dims[u], g_from.fan_dims[u]);
            for q_to in lvl_to.with_range(u) {
                let w_to = widths[lvl_to.path(q_to).source];
                for q_from in lvl_from.with_range(u) {
                    let w_from = widths[lvl_from.path(q_from).source];
                    for i in 0..n {
                        for c_to in 0..w_to {
                            for c_from in 0..w_from {
                                let r = g_to.offsets[q_to] + i * w_to + c_to;
                                let c = g_from.offsets[q_from] + i * w_from + c_from;
                                z[(g_to.fan_offsets[q_to] + c_to, g_from.fan_offsets[q_from] + c_from)] +=
                                    x[(r, c)];
                            }
                        }
                    }
                }
            }
            blocks.push(z / linalg::real(n as f64));
        }
        let fan = Self { corr: corr.clone(), widths: widths.to_vec(), from, to, blocks };
        let residual = linalg::residual_norm(&(x - fan.to_dense()));
        Ok((fan, residual))
    }
}

/// A Fock polynomial `X = φ_∞(ξ_0) + Σ_{k ≥ 1} T_{ξ_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockPolynomial {
    corr: Correspondence,
    coeffs: Vec<CorrElement>,
}

impl FockPolynomial {
    /// `coeffs[k]` must be a level-`k` element. An empty list is the zero polynomial.
    pub fn new(corr: &Correspondence, coeffs: Vec<CorrElement>) -> Result<Self> {
        for (k, c) in coeffs.iter().enumerate() {
            if c.corr() != corr {
                return Err(HardyError::CorrespondenceMismatch);
            }
            if c.level() != k {
                return Err(HardyError::LevelMismatch { left: c.level(), right: k });
            }
        }
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(CorrElement::zero(corr, 0));
        }
        Ok(Self { corr: corr.clone(), coeffs })
    }

    pub fn zero(corr: &Correspondence) -> Self {
        Self { corr: corr.clone(), coeffs: vec![CorrElement::zero(corr, 0)] }
    }

    pub fn unit(corr: &Correspondence) -> Self {
        Self::constant(corr, &AlgebraElement::identity(corr.algebra())).expect("own algebra")
    }

    pub fn constant(corr: &Correspondence, a: &AlgebraElement) -> Result<Self> {
        Ok(Self { corr: corr.clone(), coeffs: vec![CorrElement::from_algebra(corr, a)?] })
    }

    /// `T_ξ` (or `φ_∞(ξ)` at level zero).
    pub fn monomial(xi: &CorrElement) -> Self {
        let corr = xi.corr().clone();
        let mut coeffs: Vec<CorrElement> = (0..xi.level()).map(|k| CorrElement::zero(&corr, k)).collect();
        coeffs.push(xi.clone());
        Self { corr, coeffs }
    }

    /// Scalar coefficients for `M = E = ℂ`: `Σ c_k z^k`.
    pub fn scalar(corr: &Correspondence, coeffs: &[C64]) -> Result<Self> {
        let els = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let unit = CorrElement::from_flat(corr, k, &vec![linalg::ONE; corr.dim(k)])?;
                if corr.dim(k) != 1 {
                    return Err(HardyError::InvalidStructure(
                        "scalar polynomials need a one-dimensional correspondence".into(),
                    ));
                }
                Ok(unit.scale(c))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(corr, els)
    }

    /// Gaussian coefficients on every level up to `degree`.
    pub fn random<R: Rng + ?Sized>(corr: &Correspondence, degree: usize, rng: &mut R) -> Self {
        let coeffs = (0..=degree).map(|k| CorrElement::random(corr, k, rng)).collect();
        Self { corr: corr.clone(), coeffs }
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[CorrElement] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> CorrElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| CorrElement::zero(&self.corr, k))
    }

    pub fn constant_term(&self) -> AlgebraElement {
        self.coeffs[0].to_algebra().expect("level-zero coefficient")
    }

    /// `c_X = Σ_k ‖ξ_k‖`.
    pub fn coefficient_norm_sum(&self) -> f64 {
        self.coeffs.iter().map(CorrElement::norm).sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.corr != other.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        let deg = self.degree().max(other.degree());
        let coeffs = (0..=deg)
            .map(|k| self.coefficient(k).add(&other.coefficient(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { corr: self.corr.clone(), coeffs })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { corr: self.corr.clone(), coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    /// Convolution `(XY)_m = Σ_{i+j=m} ξ_i ⊗ η_j`; level-zero factors act through
    /// the bimodule structure, which the balanced tensor already encodes.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.corr != other.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        let deg = self.degree() + other.degree();
        let mut coeffs: Vec<CorrElement> = (0..=deg).map(|k| CorrElement::zero(&self.corr, k)).collect();
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&x.tensor(y)?)?;
            }
        }
        Ok(Self { corr: self.corr.clone(), coeffs })
    }

    /// `(X ⊗ I) x` on flat vectors of the given space.
    pub fn apply(&self, fock: &TruncatedFock, x: &CMatrix) -> Result<CMatrix> {
        if fock.corr() != &self.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        let mut out = fock.apply_phi(&self.constant_term(), x)?;
        for xi in self.coeffs.iter().skip(1).take(fock.truncation()) {
            out += fock.apply_creation(xi, x)?;
        }
        Ok(out)
    }

    /// `(X ⊗ I)* y`.
    pub fn apply_adjoint(&self, fock: &TruncatedFock, y: &CMatrix) -> Result<CMatrix> {
        if fock.corr() != &self.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        let mut out = fock.apply_phi(&self.constant_term().adjoint(), y)?;
        for xi in self.coeffs.iter().skip(1).take(fock.truncation()) {
            out += fock.apply_creation_adjoint(xi, y)?;
        }
        Ok(out)
    }

    /// Dense `X ⊗ I`. The flag is set when the degree exceeds the truncation,
    /// in which case the top coefficients are invisible.
    pub fn materialize(&self, fock: &TruncatedFock) -> Result<(CMatrix, bool)> {
        let m = self.apply(fock, &linalg::identity(fock.dim()))?;
        Ok((m, self.degree() > fock.truncation()))
    }
}

/// The level-`m` Fourier coefficient of an analytic operator: the element
/// `ζ_m` with `(X ι(1))_m = ζ_m`. Level zero gives the gauge expectation.
///
/// In the induced space, `σ` must be faithful so that `ζ_m` can be read off from
/// `(X ⊗ I)(1 ⊗ h)`.
pub fn gauge_coefficient(fock: &TruncatedFock, x: &CMatrix, m: usize) -> Result<CorrElement> {
    if m > fock.truncation() {
        return Err(HardyError::TruncationTooSmall { level: m, truncation: fock.truncation() });
    }
    let upper = fock.upper_residual(x)?;
    if upper > 1e-10 {
        return Err(HardyError::NotAnalytic { residual: upper });
    }
    let corr = fock.corr();
    match fock.representation() {
        None => {
            let y = x * fock.vacuum()?;
            fock.level_element(&y, 0, m)
        }
        Some(rep) => {
            if !rep.is_faithful() {
                return Err(HardyError::FaithfulnessRequired);
            }
            let lvl = corr.level(m);
            let g = fock.geometry(m);
            let start = fock.level_range(m).start;
            let mut blocks: Vec<CMatrix> = lvl
                .paths()
                .iter()
                .map(|p| linalg::zeros(corr.block_size(p.range), corr.block_size(p.source)))
                .collect();
            for s in 0..corr.num_blocks() {
                let ms = rep.multiplicity(s);
                for i in 0..corr.block_size(s) {
                    // h = basis vector (block s, row i, copy 0).
                    let col = x.column(rep.offset(s) + i * ms);
                    for (pi, p) in lvl.paths().iter().enumerate() {
                        if p.source != s {
                            continue;
                        }
                        for r in 0..corr.block_size(p.range) {
                            blocks[pi][(r, i)] = col[start + g.offsets[pi] + r * ms];
                        }
                    }
                }
            }
            CorrElement::new(corr, m, blocks)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiMatrixAlgebra;
    use crate::linalg::{real, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_poly(corr: &Correspondence, c: &[f64]) -> FockPolynomial {
        let c: Vec<C64> = c.iter().map(|&x| real(x)).collect();
        FockPolynomial::scalar(corr, &c).unwrap()
    }

    #[test]
    fn scalar_creation_is_lower_shift() {
        let e = Correspondence::free(1);
        let f = TruncatedFock::new(&e, 3);
        let one = CorrElement::from_flat(&e, 1, &[linalg::ONE]).unwrap();
        let t = f.creation_operator(&one).unwrap();
        let mut shift = linalg::zeros(4, 4);
        for i in 0..3 {
            shift[(i + 1, i)] = linalg::ONE;
        }
        assert_eq!(t, shift);
    }

    #[test]
    fn free_creation_prepends_letter() {
        let e = Correspondence::free(2);
        let f = TruncatedFock::new(&e, 2);
        let e1 = CorrElement::unit(&e, 1, 0, 0, 0);
        let t = f.creation_operator(&e1).unwrap();
        assert_eq!(t.iter().filter(|v| **v != ZERO).count(), 3);
        // vacuum (index 0) → word "1" (index 1); word "1" (1) → "11" (3); "2" (2) → "12" (4).
        assert_eq!(t[(1, 0)], linalg::ONE);
        assert_eq!(t[(3, 1)], linalg::ONE);
        assert_eq!(t[(4, 2)], linalg::ONE);
    }

    #[test]
    fn creation_errors() {
        let e = Correspondence::free(2);
        let f = TruncatedFock::new(&e, 2);
        let zero_level = CorrElement::zero(&e, 0);
        assert_eq!(f.creation_operator(&zero_level), Err(HardyError::LevelZero));
        let deep = CorrElement::zero(&e, 3);
        assert_eq!(
            f.creation_operator(&deep),
            Err(HardyError::TruncationTooSmall { level: 3, truncation: 2 })
        );
        assert_eq!(f.creation_operator(&CorrElement::zero(&e, 1)).unwrap().iter().filter(|v| **v != ZERO).count(), 0);
    }

    #[test]
    fn phi_inf_of_vertex_projection_is_range_mask() {
        let g = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let f = TruncatedFock::new(&g, 2);
        let p0 = AlgebraElement::block_projection(g.algebra(), 0);
        let m = f.phi_inf(&p0).unwrap();
        let mut idx = 0;
        for k in 0..=2 {
            for p in g.level(k).paths() {
                let expected = if p.range == 0 { linalg::ONE } else { ZERO };
                assert_eq!(m[(idx, idx)], expected);
                idx += 1;
            }
        }
        assert_eq!(linalg::frobenius(&(&m - CMatrix::from_diagonal(&m.diagonal()))), 0.0);
    }

    #[test]
    fn scalar_polynomials() {
        let e = Correspondence::free(1);
        let x = scalar_poly(&e, &[1.0, 2.0]);
        let y = scalar_poly(&e, &[1.0, 3.0]);
        let xy = x.multiply(&y).unwrap();
        let flat: Vec<C64> = xy.coefficients().iter().map(|c| c.to_flat()[0]).collect();
        assert_eq!(flat, vec![real(1.0), real(5.0), real(6.0)]);
        let f = TruncatedFock::new(&e, 2);
        let (m, over) = x.materialize(&f).unwrap();
        assert!(!over);
        let expected = CMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0, 1.0].map(real),
        );
        assert_eq!(m, expected);
        let (u, _) = FockPolynomial::unit(&e).materialize(&f).unwrap();
        assert_eq!(u, linalg::identity(3));
        let (z, _) = FockPolynomial::zero(&e).materialize(&f).unwrap();
        assert_eq!(linalg::max_abs(&z), 0.0);
    }

    #[test]
    fn gauge_readback() {
        let e = Correspondence::free(1);
        let f = TruncatedFock::new(&e, 3);
        let (m, _) = scalar_poly(&e, &[1.0, 2.0, 3.0]).materialize(&f).unwrap();
        assert_eq!(gauge_coefficient(&f, &m, 2).unwrap().to_flat(), vec![real(3.0)]);
        let upper = m.transpose();
        assert!(matches!(gauge_coefficient(&f, &upper, 0), Err(HardyError::NotAnalytic { .. })));
    }

    #[test]
    fn product_of_letters() {
        let e = Correspondence::free(2);
        let e1 = CorrElement::unit(&e, 1, 0, 0, 0);
        let e2 = CorrElement::unit(&e, 1, 1, 0, 0);
        let p = FockPolynomial::monomial(&e1).multiply(&FockPolynomial::monomial(&e2)).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coefficient(2), e1.tensor(&e2).unwrap());
    }

    #[test]
    fn fan_map_dense_round_trip() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let corr = Correspondence::new(&alg, vec![vec![1, 1], vec![2, 0]]).unwrap();
        let widths = [2, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = FanMap::random(&corr, &widths, 1, 2, &mut rng);
        let dense = z.to_dense();
        let (back, res) = FanMap::from_dense(&corr, &widths, 1, 2, &dense).unwrap();
        assert!(res < 1e-12);
        assert!(back.sub(&z).unwrap().max_abs() < 1e-12);
        // Ampliation agrees between the flat and fan pictures.
        let y = FanMap::random(&corr, &widths, 0, 2, &mut rng);
        let w = FanMap::random(&corr, &widths, 1, 1, &mut rng);
        let fan = w.ampliate_compose(1, &y).unwrap().to_dense();
        let flat = w.apply_ampliated(1, &y.to_dense()).unwrap();
        assert!(linalg::max_abs(&(fan - flat)) < 1e-12);
    }
}
