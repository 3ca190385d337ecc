//! Finite-dimensional W*-algebras `M = ⊕_b M_{n_b}(ℂ)` and their normal
//! representations.
//!
//! A representation with multiplicities `(m_b)` acts on `H = ⊕_b ℂ^{n_b} ⊗ ℂ^{m_b}`.
//! Basis vectors of `H` are ordered by (block, matrix row, multiplicity index),
//! so the coordinate of `(b, i, c)` is `offset_b + i * m_b + c`. Every module in
//! the crate relies on this ordering.

use std::fmt;

use crate::error::{HardyError, Result};
use crate::linalg::{self, CMatrix, C64};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiMatrixAlgebra {
    block_sizes: Vec<usize>,
}

impl fmt::Debug for MultiMatrixAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{:?}", self.block_sizes)
    }
}

impl MultiMatrixAlgebra {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(HardyError::InvalidStructure("algebra needs at least one block".into()));
        }
        if block_sizes.contains(&0) {
            return Err(HardyError::InvalidStructure("block sizes must be positive".into()));
        }
        Ok(Self { block_sizes })
    }

    /// `ℂ`, the algebra of the classical disc.
    pub fn scalars() -> Self {
        Self { block_sizes: vec![1] }
    }

    /// `M_n(ℂ)`.
    pub fn full_matrix(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `ℂ^k`, the vertex algebra of a graph with `k` vertices.
    pub fn diagonal(k: usize) -> Result<Self> {
        Self::new(vec![1; k])
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_size(&self, b: usize) -> usize {
        self.block_sizes[b]
    }

    pub fn dim(&self) -> usize {
        self.block_sizes.iter().map(|n| n * n).sum()
    }

    /// Matrix units `e_{ij}` of every block; they span `M`.
    pub fn matrix_units(&self) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(self.dim());
        for (b, &n) in self.block_sizes.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    out.push(AlgebraElement::matrix_unit(self, b, i, j));
                }
            }
        }
        out
    }
}

/// An element of `M`, one dense block per summand.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    algebra: MultiMatrixAlgebra,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn new(algebra: &MultiMatrixAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{} blocks", algebra.num_blocks()),
                actual: format!("{} blocks", blocks.len()),
            });
        }
        for (b, blk) in blocks.iter().enumerate() {
            let n = algebra.block_size(b);
            if blk.shape() != (n, n) {
                return Err(HardyError::ShapeMismatch {
                    expected: format!("block {b} of shape {n}x{n}"),
                    actual: format!("{}x{}", blk.nrows(), blk.ncols()),
                });
            }
            linalg::check_finite(blk)?;
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    pub fn zero(algebra: &MultiMatrixAlgebra) -> Self {
        let blocks = algebra.block_sizes().iter().map(|&n| linalg::zeros(n, n)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn identity(algebra: &MultiMatrixAlgebra) -> Self {
        Self::scalar(algebra, linalg::ONE)
    }

    pub fn scalar(algebra: &MultiMatrixAlgebra, c: C64) -> Self {
        let blocks = algebra
            .block_sizes()
            .iter()
            .map(|&n| linalg::identity(n) * c)
            .collect();
        Self { algebra: algebra.clone(), blocks }
    }

    /// The central projection onto block `b`; for graphs, the vertex projection.
    pub fn block_projection(algebra: &MultiMatrixAlgebra, b: usize) -> Self {
        let mut out = Self::zero(algebra);
        out.blocks[b] = linalg::identity(algebra.block_size(b));
        out
    }

    pub fn matrix_unit(algebra: &MultiMatrixAlgebra, b: usize, i: usize, j: usize) -> Self {
        let mut out = Self::zero(algebra);
        out.blocks[b][(i, j)] = linalg::ONE;
        out
    }

    /// Element of a commutative algebra `ℂ^k` from its diagonal entries.
    pub fn from_diagonal(algebra: &MultiMatrixAlgebra, values: &[C64]) -> Result<Self> {
        let blocks = values.iter().map(|&v| CMatrix::from_element(1, 1, v)).collect();
        Self::new(algebra, blocks)
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &CMatrix {
        &self.blocks[b]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(HardyError::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(self.zip_with(other, |a, b| a * b))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// C*-norm: the largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::operator_norm_unchecked)
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Unnormalized trace, summed over blocks.
    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(linalg::trace).sum()
    }

    pub fn positive_sqrt(&self) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(linalg::positive_sqrt)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    /// Block-diagonal dense matrix of size `Σ n_b`.
    pub fn to_dense(&self) -> CMatrix {
        let total: usize = self.algebra.block_sizes().iter().sum();
        let mut out = linalg::zeros(total, total);
        let mut off = 0;
        for blk in &self.blocks {
            let n = blk.nrows();
            out.view_mut((off, off), (n, n)).copy_from(blk);
            off += n;
        }
        out
    }
}

/// A normal representation `σ` of `M` with multiplicities `m_b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Representation {
    algebra: MultiMatrixAlgebra,
    multiplicities: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Representation {
    pub fn new(algebra: &MultiMatrixAlgebra, multiplicities: Vec<usize>) -> Result<Self> {
        if multiplicities.len() != algebra.num_blocks() {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{} multiplicities", algebra.num_blocks()),
                actual: format!("{}", multiplicities.len()),
            });
        }
        let mut offsets = Vec::with_capacity(multiplicities.len());
        let mut dim = 0;
        for (b, &m) in multiplicities.iter().enumerate() {
            offsets.push(dim);
            dim += algebra.block_size(b) * m;
        }
        Ok(Self { algebra: algebra.clone(), multiplicities, offsets, dim })
    }

    /// Every block with multiplicity one.
    pub fn standard(algebra: &MultiMatrixAlgebra) -> Self {
        Self::new(algebra, vec![1; algebra.num_blocks()]).expect("lengths agree")
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn multiplicity(&self, b: usize) -> usize {
        self.multiplicities[b]
    }

    pub fn offset(&self, b: usize) -> usize {
        self.offsets[b]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_faithful(&self) -> bool {
        self.multiplicities.iter().all(|&m| m >= 1)
    }

    /// `σ(a) = ⊕_b a_b ⊗ I_{m_b}`.
    pub fn sigma_matrix(&self, a: &AlgebraElement) -> Result<CMatrix> {
        if a.algebra() != &self.algebra {
            return Err(HardyError::AlgebraMismatch);
        }
        let mut out = linalg::zeros(self.dim, self.dim);
        for (b, blk) in a.blocks().iter().enumerate() {
            let m = self.multiplicities[b];
            if m == 0 {
                continue;
            }
            let n = blk.nrows();
            let piece = linalg::kron(blk, &linalg::identity(m));
            out.view_mut((self.offsets[b], self.offsets[b]), (n * m, n * m))
                .copy_from(&piece);
        }
        Ok(out)
    }

    /// The commutant `σ(M)' ≅ ⊕_{m_b > 0} M_{m_b}(ℂ)`.
    ///
    /// Solved numerically as the nullspace of `X ↦ [X, σ(g)]` over matrix units
    /// `g`, then checked against the analytic form `⊕ I_{n_b} ⊗ M_{m_b}`.
    pub fn commutant_basis(&self) -> Result<Commutant> {
        let commutant = Commutant::analytic(self);
        let h = self.dim;
        if h == 0 {
            return Ok(commutant);
        }
        let mut gram = linalg::zeros(h * h, h * h);
        let id = linalg::identity(h);
        for g in self.algebra.matrix_units() {
            let s = self.sigma_matrix(&g)?;
            // Row-major vec: vec(XS) = (I ⊗ Sᵀ) vec(X), vec(SX) = (S ⊗ I) vec(X).
            let op = linalg::kron(&id, &s.transpose()) - linalg::kron(&s, &id);
            gram += op.adjoint() * &op;
        }
        let null = linalg::nullspace_of_gram(&gram, 1e-9);
        let expected = commutant.algebra.as_ref().map_or(0, |a| a.dim());
        if null.ncols() != expected {
            return Err(HardyError::Internal(format!(
                "commutant has numerical dimension {} but analytic dimension {expected}",
                null.ncols()
            )));
        }
        let projector = &null * null.adjoint();
        for gen in commutant.generators() {
            let v = CMatrix::from_column_slice(h * h, 1, linalg::vec_row(&gen).as_slice());
            let miss = linalg::frobenius(&(&v - &projector * &v));
            if miss > 1e-9 {
                return Err(HardyError::Internal(format!(
                    "analytic commutant generator leaves the numerical nullspace by {miss:.3e}"
                )));
            }
        }
        Ok(commutant)
    }
}

/// `σ(M)'` together with its embedding into `B(H)`.
#[derive(Clone, Debug)]
pub struct Commutant {
    rep: Representation,
    /// `None` when every multiplicity vanishes (then `H = 0`).
    algebra: Option<MultiMatrixAlgebra>,
    /// Source block of `M` for each commutant block.
    source_blocks: Vec<usize>,
}

impl Commutant {
    fn analytic(rep: &Representation) -> Self {
        let source_blocks: Vec<usize> =
            (0..rep.algebra.num_blocks()).filter(|&b| rep.multiplicity(b) > 0).collect();
        let sizes: Vec<usize> = source_blocks.iter().map(|&b| rep.multiplicity(b)).collect();
        let algebra = MultiMatrixAlgebra::new(sizes).ok();
        Self { rep: rep.clone(), algebra, source_blocks }
    }

    pub fn algebra(&self) -> Option<&MultiMatrixAlgebra> {
        self.algebra.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.algebra.as_ref().map_or(0, |a| a.dim())
    }

    pub fn source_blocks(&self) -> &[usize] {
        &self.source_blocks
    }

    /// `y ↦ ⊕_b I_{n_b} ⊗ y_b`.
    pub fn embed(&self, y: &AlgebraElement) -> Result<CMatrix> {
        match &self.algebra {
            Some(a) if a == y.algebra() => {}
            _ => return Err(HardyError::AlgebraMismatch),
        }
        let h = self.rep.dim();
        let mut out = linalg::zeros(h, h);
        for (k, &b) in self.source_blocks.iter().enumerate() {
            let n = self.rep.algebra().block_size(b);
            let m = self.rep.multiplicity(b);
            let off = self.rep.offset(b);
            let piece = linalg::kron(&linalg::identity(n), y.block(k));
            out.view_mut((off, off), (n * m, n * m)).copy_from(&piece);
        }
        Ok(out)
    }

    /// Embedded matrix units of `σ(M)'`.
    pub fn generators(&self) -> Vec<CMatrix> {
        match &self.algebra {
            Some(a) => a
                .matrix_units()
                .iter()
                .map(|u| self.embed(u).expect("unit of own algebra"))
                .collect(),
            None => Vec::new(),
        }
    }

    /// Residual of `x` against membership in `σ(M)'`.
    pub fn membership_residual(&self, x: &CMatrix) -> Result<f64> {
        let h = self.rep.dim();
        if x.shape() != (h, h) {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{h}x{h}"),
                actual: format!("{}x{}", x.nrows(), x.ncols()),
            });
        }
        let mut worst: f64 = 0.0;
        for g in self.rep.algebra().matrix_units() {
            let s = self.rep.sigma_matrix(&g)?;
            worst = worst.max(linalg::residual_norm(&(x * &s - &s * x)));
        }
        Ok(worst)
    }

    /// Recovers `y` from an embedded element `⊕ I_{n_b} ⊗ y_b` by averaging
    /// over the `n_b` diagonal copies.
    pub fn extract(&self, x: &CMatrix) -> Result<AlgebraElement> {
        let algebra = self.algebra.as_ref().ok_or(HardyError::NotInstantiable)?;
        let mut blocks = Vec::with_capacity(self.source_blocks.len());
        for &b in &self.source_blocks {
            let n = self.rep.algebra().block_size(b);
            let m = self.rep.multiplicity(b);
            let off = self.rep.offset(b);
            let mut y = linalg::zeros(m, m);
            for i in 0..n {
                y += x.view((off + i * m, off + i * m), (m, m));
            }
            blocks.push(y / linalg::real(n as f64));
        }
        AlgebraElement::new(algebra, blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, real, ZERO};

    #[test]
    fn identity_maps_to_identity() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let rep = Representation::new(&alg, vec![2, 3]).unwrap();
        let s = rep.sigma_matrix(&AlgebraElement::identity(&alg)).unwrap();
        assert_eq!(s, linalg::identity(7));
    }

    #[test]
    fn sigma_of_diagonal_algebra() {
        let alg = MultiMatrixAlgebra::diagonal(2).unwrap();
        let rep = Representation::new(&alg, vec![1, 2]).unwrap();
        let a = AlgebraElement::from_diagonal(&alg, &[real(2.0), c64(0.0, 3.0)]).unwrap();
        let s = rep.sigma_matrix(&a).unwrap();
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            real(2.0),
            c64(0.0, 3.0),
            c64(0.0, 3.0),
        ]));
        assert_eq!(s, expected);
    }

    #[test]
    fn sigma_of_matrix_unit_is_kronecker() {
        let alg = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let rep = Representation::new(&alg, vec![2]).unwrap();
        let e12 = AlgebraElement::matrix_unit(&alg, 0, 0, 1);
        let s = rep.sigma_matrix(&e12).unwrap();
        // e12 ⊗ I2 sends basis (1, c) to (0, c).
        let mut expected = linalg::zeros(4, 4);
        expected[(0, 2)] = linalg::ONE;
        expected[(1, 3)] = linalg::ONE;
        assert_eq!(s, expected);
        let svd = s.svd(false, false);
        assert_eq!(svd.singular_values.iter().filter(|&&x| x > 0.5).count(), 2);
    }

    #[test]
    fn sigma_rejects_foreign_element() {
        let alg = MultiMatrixAlgebra::scalars();
        let other = MultiMatrixAlgebra::diagonal(2).unwrap();
        let rep = Representation::standard(&alg);
        assert_eq!(
            rep.sigma_matrix(&AlgebraElement::identity(&other)),
            Err(HardyError::AlgebraMismatch)
        );
    }

    #[test]
    fn commutant_dimensions() {
        let scal = MultiMatrixAlgebra::scalars();
        let c = Representation::new(&scal, vec![3]).unwrap().commutant_basis().unwrap();
        assert_eq!(c.dim(), 9);

        let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let rep = Representation::new(&m2, vec![3]).unwrap();
        let c = rep.commutant_basis().unwrap();
        assert_eq!(c.dim(), 9);
        for g in c.generators() {
            assert!(c.membership_residual(&g).unwrap() < 1e-12);
        }

        let diag = MultiMatrixAlgebra::diagonal(2).unwrap();
        let c = Representation::new(&diag, vec![1, 1]).unwrap().commutant_basis().unwrap();
        assert_eq!(c.dim(), 2);
        for g in c.generators() {
            assert_eq!(g[(0, 1)], ZERO);
            assert_eq!(g[(1, 0)], ZERO);
        }
    }

    #[test]
    fn commutant_drops_empty_blocks() {
        let diag = MultiMatrixAlgebra::diagonal(3).unwrap();
        let rep = Representation::new(&diag, vec![2, 0, 1]).unwrap();
        assert!(!rep.is_faithful());
        let c = rep.commutant_basis().unwrap();
        assert_eq!(c.dim(), 5);
        assert_eq!(c.source_blocks(), &[0, 2]);
    }

    #[test]
    fn commutant_extract_inverts_embed() {
        let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let rep = Representation::new(&m2, vec![3]).unwrap();
        let c = rep.commutant_basis().unwrap();
        let y = AlgebraElement::matrix_unit(c.algebra().unwrap(), 0, 0, 0);
        let x = c.embed(&y).unwrap();
        assert_eq!(linalg::trace(&x), real(2.0));
        assert_eq!(c.extract(&x).unwrap(), y);
    }

    #[test]
    fn adjoint_is_involutive_bit_exactly() {
        let alg = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let a = AlgebraElement::new(
            &alg,
            vec![
                CMatrix::from_row_slice(2, 2, &[c64(1.0, 2.0), c64(-0.3, 0.1), c64(0.7, -1.1), c64(0.0, 5.0)]),
                CMatrix::from_element(1, 1, c64(2.5, -0.25)),
            ],
        )
        .unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn element_constructor_checks_shapes() {
        let alg = MultiMatrixAlgebra::new(vec![2]).unwrap();
        assert!(AlgebraElement::new(&alg, vec![linalg::zeros(1, 1)]).is_err());
        assert!(MultiMatrixAlgebra::new(vec![]).is_err());
        assert!(MultiMatrixAlgebra::new(vec![1, 0]).is_err());
    }
}
