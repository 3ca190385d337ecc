//! The σ-dual `E^σ`, its Fock space, and the unitary
//! `U : F(E^σ) ⊗_ι H → F(E) ⊗_σ H`,
//! `U(η_1 ⊗ ⋯ ⊗ η_n ⊗ h) = (I_{E^{⊗(n−1)}} ⊗ η_1) ⋯ (I_E ⊗ η_{n−1}) η_n h`.
//!
//! `E^σ` is a correspondence over `σ(M)'` with `⟨η, ζ⟩ = η*ζ` and
//! `c·η·d = (I_E ⊗ c)ηd`. Its tensor powers are never put in normal form.
//! Level `k + 1` is spanned by the words `η_i ⊗ v` with `v` running over an
//! orthonormal basis of level `k`, and its Gram matrix has blocks
//! `⟨v, ⟨η_i, η_j⟩·v'⟩`, where `σ(M)'` acts on level `k` through the first
//! letter. The null space of that Gram matrix (the balancing relations) is
//! discarded with a rank-revealing eigendecomposition, leaving an orthonormal
//! basis of the quotient. `U` is then computed independently on those bases in
//! the path coordinates of `F(E) ⊗_σ H`.

use crate::algebra::{AlgebraElement, Commutant, Representation};
use crate::corr::{CorrElement, Correspondence};
use crate::error::{HardyError, Result};
use crate::fock::{self, FanMap, TruncatedFock};
use crate::linalg::{self, CMatrix};
use crate::poisson::{self, DiscPoint};

/// Relative eigenvalue threshold for null vectors of word-space Gram matrices.
pub const QUOTIENT_THRESHOLD: f64 = 1e-10;

/// One level of `F(E^σ) ⊗ H` after quotienting.
#[derive(Clone, Debug)]
struct WordLevel {
    /// Raw coordinates of the orthonormal quotient basis (columns).
    basis: CMatrix,
    /// Maps a raw word vector to its coordinates in the quotient basis.
    reduce: CMatrix,
    /// Left action of each matrix unit of `σ(M)'` in quotient coordinates.
    left_units: Vec<CMatrix>,
    /// Image of the quotient basis under `U` (flat coordinates of level `k`).
    image: CMatrix,
}

#[derive(Clone, Debug)]
pub struct DualCorrespondence {
    corr: Correspondence,
    rep: Representation,
    commutant: Commutant,
    basis: Vec<CMatrix>,
    basis_fans: Vec<FanMap>,
    /// `A(E_α)_{l,i} = ⟨η_l, (I_E ⊗ E_α) η_i⟩` for every matrix unit `E_α`.
    unit_actions: Vec<CMatrix>,
    unit_matrices: Vec<CMatrix>,
    levels: Vec<WordLevel>,
    truncation: usize,
    basis_residual: f64,
}

impl DualCorrespondence {
    /// Solves for a basis of `E^σ` and builds word spaces up to level `N`.
    pub fn new(corr: &Correspondence, rep: &Representation, truncation: usize) -> Result<Self> {
        if rep.algebra() != corr.algebra() {
            return Err(HardyError::AlgebraMismatch);
        }
        let commutant = rep.commutant_basis()?;
        let (basis, basis_residual) = intertwiner_basis(corr, rep)?;
        let widths = rep.multiplicities();
        let basis_fans = basis
            .iter()
            .map(|b| FanMap::from_dense(corr, widths, 0, 1, b).map(|(f, _)| f))
            .collect::<Result<Vec<_>>>()?;

        let unit_matrices = commutant.generators();
        let mut unit_actions = Vec::with_capacity(unit_matrices.len());
        for u in &unit_matrices {
            let (u_fan, _) = FanMap::from_dense(corr, widths, 0, 0, u)?;
            let mut a = linalg::zeros(basis.len(), basis.len());
            for (i, fan) in basis_fans.iter().enumerate() {
                let acted = u_fan.ampliate_compose(1, fan)?.to_dense();
                let mut rebuilt = linalg::zeros(acted.nrows(), acted.ncols());
                for (l, b) in basis.iter().enumerate() {
                    a[(l, i)] = linalg::frobenius_inner(b, &acted);
                    rebuilt += b * a[(l, i)];
                }
                let miss = linalg::frobenius(&(acted - rebuilt));
                if miss > 1e-10 {
                    return Err(HardyError::Internal(format!(
                        "left action of σ(M)' leaves E^σ by {miss:.3e}"
                    )));
                }
            }
            unit_actions.push(a);
        }

        let mut out = Self {
            corr: corr.clone(),
            rep: rep.clone(),
            commutant,
            basis,
            basis_fans,
            unit_actions,
            unit_matrices,
            levels: Vec::new(),
            truncation,
            basis_residual,
        };
        out.build_levels()?;
        Ok(out)
    }

    fn build_levels(&mut self) -> Result<()> {
        let h = self.rep.dim();
        let level0 = WordLevel {
            basis: linalg::identity(h),
            reduce: linalg::identity(h),
            left_units: self.unit_matrices.clone(),
            image: linalg::identity(h),
        };
        self.levels.push(level0);
        let dd = self.basis.len();
        for k in 0..self.truncation {
            let prev = &self.levels[k];
            let pd = prev.basis.ncols();
            let raw = dd * pd;
            // Gram blocks ⟨v, ⟨η_i, η_j⟩·v'⟩.
            let mut gram = linalg::zeros(raw, raw);
            for i in 0..dd {
                for j in 0..dd {
                    let c = self.basis[i].adjoint() * &self.basis[j];
                    let block = self.left_action_on(prev, &c)?;
                    gram.view_mut((i * pd, j * pd), (pd, pd)).copy_from(&block);
                }
            }
            let (values, vectors) = linalg::hermitian_eigen(&gram);
            let top = values.last().copied().unwrap_or(0.0).max(0.0);
            let keep: Vec<usize> =
                (0..raw).filter(|&t| values[t] > QUOTIENT_THRESHOLD * top.max(1.0)).collect();
            let mut basis = linalg::zeros(raw, keep.len());
            for (c, &t) in keep.iter().enumerate() {
                let scale = linalg::real(1.0 / values[t].sqrt());
                basis.set_column(c, &(vectors.column(t) * scale));
            }
            let reduce = basis.adjoint() * &gram;

            let mut left_units = Vec::with_capacity(self.unit_actions.len());
            for a in &self.unit_actions {
                let lifted = linalg::kron(a, &linalg::identity(pd));
                left_units.push(&reduce * lifted * &basis);
            }

            let next_dim = fock::level_geometry(&self.corr, self.rep.multiplicities(), k + 1).dim;
            let mut raw_image = linalg::zeros(next_dim, raw);
            for (i, fan) in self.basis_fans.iter().enumerate() {
                let block = fan.apply_ampliated(k, &prev.image)?;
                raw_image.view_mut((0, i * pd), (next_dim, pd)).copy_from(&block);
            }
            let image = raw_image * &basis;
            self.levels.push(WordLevel { basis, reduce, left_units, image });
        }
        Ok(())
    }

    /// Action of `c ∈ σ(M)'` (dense on `H`) on a level in quotient coordinates.
    fn left_action_on(&self, level: &WordLevel, c: &CMatrix) -> Result<CMatrix> {
        let dim = level.basis.ncols();
        let mut out = linalg::zeros(dim, dim);
        if self.unit_matrices.is_empty() {
            return Ok(out);
        }
        let y = self.commutant.extract(c)?;
        let mut idx = 0;
        for blk in y.blocks() {
            for i in 0..blk.nrows() {
                for j in 0..blk.ncols() {
                    out += &level.left_units[idx] * blk[(i, j)];
                    idx += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn commutant(&self) -> &Commutant {
        &self.commutant
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `dim E^σ`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Frobenius-orthonormal basis of `E^σ`, as dense intertwiners.
    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Largest intertwining residual over the basis.
    pub fn basis_residual(&self) -> f64 {
        self.basis_residual
    }

    /// Dimension of level `k` of the quotiented word space.
    pub fn word_dim(&self, k: usize) -> usize {
        self.levels[k].basis.ncols()
    }

    /// Coordinates of an intertwiner in the basis, with the reconstruction residual.
    pub fn coordinates(&self, eta: &CMatrix) -> (Vec<linalg::C64>, f64) {
        let coeffs: Vec<_> = self.basis.iter().map(|b| linalg::frobenius_inner(b, eta)).collect();
        let mut rebuilt = linalg::zeros(eta.nrows(), eta.ncols());
        for (b, &c) in self.basis.iter().zip(&coeffs) {
            rebuilt += b * c;
        }
        (coeffs, linalg::frobenius(&(eta - rebuilt)))
    }

    /// Creation by `Σ β_i η_i`, from level `k` to level `k + 1`, in quotient coordinates.
    pub fn word_creation(&self, beta: &[linalg::C64], k: usize) -> CMatrix {
        let pd = self.word_dim(k);
        let b = CMatrix::from_column_slice(beta.len(), 1, beta);
        &self.levels[k + 1].reduce * linalg::kron(&b, &linalg::identity(pd))
    }

    /// Left action of `c ∈ σ(M)'` on level `k`, in quotient coordinates.
    pub fn word_left_action(&self, c: &CMatrix, k: usize) -> Result<CMatrix> {
        self.left_action_on(&self.levels[k], c)
    }

    fn require_faithful(&self) -> Result<()> {
        if !self.rep.is_faithful() {
            return Err(HardyError::FaithfulnessRequired);
        }
        Ok(())
    }

    /// The level-`k` block of `U` in quotient coordinates, after checking that
    /// the dimensions of both sides agree.
    pub fn level_unitary(&self, k: usize) -> Result<CMatrix> {
        self.require_faithful()?;
        let fock_dim = fock::level_geometry(&self.corr, self.rep.multiplicities(), k).dim;
        let word = self.word_dim(k);
        if word != fock_dim {
            return Err(HardyError::DimensionMismatch { level: k, word_space: word, fock: fock_dim });
        }
        Ok(self.levels[k].image.clone())
    }

    /// Dense `U : F_N(E^σ) ⊗ H → F_N(E) ⊗_σ H` (block diagonal over levels).
    pub fn inverse_fourier_u(&self) -> Result<CMatrix> {
        let fock = TruncatedFock::induced(&self.corr, &self.rep, self.truncation)?;
        let mut u = linalg::zeros(fock.dim(), fock.dim());
        for k in 0..=self.truncation {
            let r = fock.level_range(k);
            u.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&self.level_unitary(k)?);
        }
        Ok(u)
    }

    /// Dense creation operator `T_η ⊗ I` on `F_N(E^σ) ⊗ H` (quotient coordinates).
    pub fn word_creation_operator(&self, beta: &[linalg::C64]) -> Result<CMatrix> {
        let fock = TruncatedFock::induced(&self.corr, &self.rep, self.truncation)?;
        let mut t = linalg::zeros(fock.dim(), fock.dim());
        for k in 0..self.truncation {
            let (rk, rk1) = (fock.level_range(k), fock.level_range(k + 1));
            let block = self.word_creation(beta, k);
            t.view_mut((rk1.start, rk.start), (rk1.len(), rk.len())).copy_from(&block);
        }
        Ok(t)
    }

    /// Dense `φ_{∞}(c) ⊗ I` on `F_N(E^σ) ⊗ H` for `c ∈ σ(M)'`.
    pub fn word_phi_inf(&self, c: &CMatrix) -> Result<CMatrix> {
        let fock = TruncatedFock::induced(&self.corr, &self.rep, self.truncation)?;
        let mut out = linalg::zeros(fock.dim(), fock.dim());
        for k in 0..=self.truncation {
            let r = fock.level_range(k);
            out.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&self.word_left_action(c, k)?);
        }
        Ok(out)
    }
}

/// Orthonormal basis of the intertwiners `H → E ⊗_σ H`, from the nullspace of
/// `η ↦ η σ(g) − (φ(g) ⊗ I) η` over matrix units `g`.
fn intertwiner_basis(corr: &Correspondence, rep: &Representation) -> Result<(Vec<CMatrix>, f64)> {
    let widths = rep.multiplicities();
    let rows = fock::level_geometry(corr, widths, 1).dim;
    let cols = rep.dim();
    let n = rows * cols;
    let expected: usize = corr
        .edges()
        .iter()
        .map(|e| rep.multiplicity(e.range) * rep.multiplicity(e.source))
        .sum();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let mut gram = linalg::zeros(n, n);
    let mut ops = Vec::new();
    for g in corr.algebra().matrix_units() {
        let s = rep.sigma_matrix(&g)?;
        let p = fock::apply_phi_level(corr, widths, 1, &g, &linalg::identity(rows))?;
        let op = linalg::kron(&linalg::identity(rows), &s.transpose()) - linalg::kron(&p, &linalg::identity(cols));
        gram += op.adjoint() * &op;
        ops.push((s, p));
    }
    let null = linalg::nullspace_of_gram(&gram, QUOTIENT_THRESHOLD);
    if null.ncols() != expected {
        return Err(HardyError::Internal(format!(
            "intertwiner space has numerical dimension {} but {expected} was expected",
            null.ncols()
        )));
    }
    let mut basis = Vec::with_capacity(null.ncols());
    let mut worst: f64 = 0.0;
    for c in 0..null.ncols() {
        let col: Vec<_> = null.column(c).iter().copied().collect();
        let eta = linalg::unvec_row(&col, rows, cols);
        for (s, p) in &ops {
            worst = worst.max(linalg::residual_norm(&(&eta * s - p * &eta)));
        }
        basis.push(eta);
    }
    if worst > 1e-10 {
        return Err(HardyError::NotIntertwining { residual: worst });
    }
    Ok((basis, worst))
}

/// Level-wise unitarity and commutant residuals of `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityResiduals {
    /// `max_k ‖W_k* W_k − I‖`.
    pub isometry: f64,
    /// `max ‖[σ^{F(E)}(X), U ι^{F(E^σ)}(X') U*]‖` over generator pairs.
    pub commutation: f64,
    /// `max_k ‖U_k φ_k(c) U_k* − I_{E^{⊗k}} ⊗ c‖` over matrix units `c`.
    pub left_action: f64,
}

pub fn duality_residuals(dual: &DualCorrespondence) -> Result<DualityResiduals> {
    let corr = dual.corr();
    let rep = dual.representation();
    let fock = TruncatedFock::induced(corr, rep, dual.truncation())?;
    let mut isometry: f64 = 0.0;
    for k in 0..=dual.truncation() {
        let w = dual.level_unitary(k)?;
        let gram = w.adjoint() * &w;
        isometry = isometry.max(linalg::residual_norm(&(gram - linalg::identity(w.ncols()))));
    }
    let u = dual.inverse_fourier_u()?;
    let u_adj = u.adjoint();

    let mut left_ops = Vec::new();
    for xi in CorrElement::basis(corr, 1) {
        if dual.truncation() >= 1 {
            left_ops.push(fock.creation_operator(&xi)?);
        }
    }
    for a in corr.algebra().matrix_units() {
        left_ops.push(fock.phi_inf(&a)?);
    }

    let mut right_ops = Vec::new();
    let mut left_action: f64 = 0.0;
    for i in 0..dual.dim() {
        let mut beta = vec![linalg::ZERO; dual.dim()];
        beta[i] = linalg::ONE;
        right_ops.push(&u * dual.word_creation_operator(&beta)? * &u_adj);
    }
    let widths = rep.multiplicities();
    for c in dual.commutant().generators() {
        let transported = &u * dual.word_phi_inf(&c)? * &u_adj;
        let (c_fan, _) = FanMap::from_dense(corr, widths, 0, 0, &c)?;
        for k in 0..=dual.truncation() {
            let r = fock.level_range(k);
            let block = transported.view((r.start, r.start), (r.len(), r.len())).into_owned();
            left_action = left_action.max(linalg::residual_norm(&(block - c_fan.ampliate(k).to_dense())));
        }
        right_ops.push(transported);
    }

    let mut commutation: f64 = 0.0;
    for x in &left_ops {
        for y in &right_ops {
            commutation = commutation.max(linalg::residual_norm(&(x * y - y * x)));
        }
    }
    Ok(DualityResiduals { isometry, commutation, left_action })
}

/// `ρ(T_η^n) ι_H` computed through `U`, compared with `η^{(n)}`; also the
/// Poisson kernel as `ρ(φ_∞(Δ_*)(I − T_η)^{−1}) ι_H`.
#[derive(Clone, Debug)]
pub struct DualKernel {
    /// Levels `U(η^{⊗n} ⊗ ·)`, `n ≤ N`, as dense maps `H → E^{⊗n} ⊗ H`.
    pub cauchy_levels: Vec<CMatrix>,
    /// `max_n ‖U(η^{⊗n} ⊗ ·) − η^{(n)}‖`.
    pub cauchy_residual: f64,
    /// `max_n ‖U φ_n(Δ_*) (η^{⊗n} ⊗ ·) − K_n(η)‖`.
    pub poisson_residual: f64,
    /// Residual of expanding `η` in the basis of `E^σ`.
    pub coordinate_residual: f64,
}

pub fn cauchy_via_dual(eta: &DiscPoint, dual: &DualCorrespondence) -> Result<DualKernel> {
    eta.require_strict()?;
    dual.require_faithful()?;
    if eta.corr() != dual.corr() || eta.representation() != dual.representation() {
        return Err(HardyError::CorrespondenceMismatch);
    }
    let n = dual.truncation();
    let (beta, coordinate_residual) = dual.coordinates(eta.matrix());
    let powers = eta.eta_powers(n)?;
    let kernel = poisson::poisson_kernel(eta, n)?;
    let defect_star = eta.defect_star().to_dense();

    let mut word = linalg::identity(eta.representation().dim());
    let mut cauchy_levels = Vec::with_capacity(n + 1);
    let mut cauchy_residual: f64 = 0.0;
    let mut poisson_residual: f64 = 0.0;
    for (k, power) in powers.iter().enumerate().take(n + 1) {
        if k > 0 {
            word = dual.word_creation(&beta, k - 1) * word;
        }
        let w = dual.level_unitary(k)?;
        let image = &w * &word;
        cauchy_residual = cauchy_residual.max(linalg::residual_norm(&(&image - power.to_dense())));
        let weighted = &w * dual.word_left_action(&defect_star, k)? * &word;
        poisson_residual =
            poisson_residual.max(linalg::residual_norm(&(weighted - kernel.level(k).to_dense())));
        cauchy_levels.push(image);
    }
    Ok(DualKernel { cauchy_levels, cauchy_residual, poisson_residual, coordinate_residual })
}

/// `⟨η, ζ⟩ = η*ζ`, which lands in `σ(M)'`; returns it as an element of the
/// commutant algebra.
pub fn dual_inner_product(dual: &DualCorrespondence, eta: &CMatrix, zeta: &CMatrix) -> Result<AlgebraElement> {
    let c = eta.adjoint() * zeta;
    let miss = dual.commutant().membership_residual(&c)?;
    if miss > 1e-10 {
        return Err(HardyError::NotInCommutant { residual: miss });
    }
    dual.commutant().extract(&c)
}
