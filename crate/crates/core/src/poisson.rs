//! Disc points `η ∈ E^σ`, their tensor powers `η^{(n)}`, the Cauchy and Poisson
//! kernels, and evaluation of Fock polynomials at `η*`.
//!
//! An element of `E^σ` is an operator `η : H → E ⊗_σ H` with
//! `η σ(a) = (φ(a) ⊗ I) η`. Such operators are exactly the [`FanMap`]s from
//! level 0 to level 1 in the induced frame, which is how they are stored and
//! composed. `η^{(n)} : H → E^{⊗n} ⊗ H` follows
//! `η^{(n+1)} = (I_{E^{⊗n}} ⊗ η) η^{(n)} = (I_E ⊗ η^{(n)}) η`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, Representation};
use crate::corr::{CorrElement, Correspondence};
use crate::error::{HardyError, Result};
use crate::fock::{self, FanMap, FockPolynomial, TruncatedFock};
use crate::linalg::{self, CMatrix};
use crate::mutation::Mutation;

/// Points with norm above `1 + CLOSED_DISC_SLACK` are rejected.
pub const CLOSED_DISC_SLACK: f64 = 1e-10;
/// Points with norm below `1 - STRICT_MARGIN` are strict contractions.
pub const STRICT_MARGIN: f64 = 1e-12;
/// Recursion orders of `η^{(n)}` must agree to this accuracy.
pub const POWER_ORDER_TOL: f64 = 1e-12;

/// A validated element of the closed unit ball of `E^σ`.
#[derive(Clone, Debug)]
pub struct DiscPoint {
    corr: Correspondence,
    rep: Representation,
    matrix: CMatrix,
    fan: FanMap,
    norm: f64,
    strict: bool,
    defect_star: FanMap,
    defect: FanMap,
    intertwining_residual: f64,
}

impl DiscPoint {
    /// Validates a dense `η : H → E ⊗_σ H`.
    pub fn new(corr: &Correspondence, rep: &Representation, matrix: CMatrix) -> Result<Self> {
        if rep.algebra() != corr.algebra() {
            return Err(HardyError::AlgebraMismatch);
        }
        let widths = rep.multiplicities();
        let rows = fock::level_geometry(corr, widths, 1).dim;
        if matrix.shape() != (rows, rep.dim()) {
            return Err(HardyError::ShapeMismatch {
                expected: format!("{rows}x{}", rep.dim()),
                actual: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        linalg::check_finite(&matrix)?;
        let norm = linalg::operator_norm(&matrix)?;
        let mut residual: f64 = 0.0;
        for g in corr.algebra().matrix_units() {
            let left = &matrix * rep.sigma_matrix(&g)?;
            let right = fock::apply_phi_level(corr, widths, 1, &g, &matrix)?;
            residual = residual.max(linalg::residual_norm(&(left - right)));
        }
        if residual > 1e-10 * norm.max(1.0) {
            return Err(HardyError::NotIntertwining { residual });
        }
        if norm > 1.0 + CLOSED_DISC_SLACK {
            return Err(HardyError::OutsideClosedDisc { norm });
        }
        let (fan, _) = FanMap::from_dense(corr, widths, 0, 1, &matrix)?;
        Self::finish(corr, rep, matrix, fan, norm, residual)
    }

    /// Builds a point from its vertex blocks.
    pub fn from_fan(corr: &Correspondence, rep: &Representation, fan: FanMap) -> Result<Self> {
        if fan.from_level() != 0 || fan.to_level() != 1 || fan.widths() != rep.multiplicities() {
            return Err(HardyError::ShapeMismatch {
                expected: "level 0 → 1 map in the frame of σ".into(),
                actual: format!("level {} → {}", fan.from_level(), fan.to_level()),
            });
        }
        let matrix = fan.to_dense();
        linalg::check_finite(&matrix)?;
        let norm = fan.norm();
        if norm > 1.0 + CLOSED_DISC_SLACK {
            return Err(HardyError::OutsideClosedDisc { norm });
        }
        Self::finish(corr, rep, matrix, fan, norm, 0.0)
    }

    fn finish(
        corr: &Correspondence,
        rep: &Representation,
        matrix: CMatrix,
        fan: FanMap,
        norm: f64,
        intertwining_residual: f64,
    ) -> Result<Self> {
        let widths = rep.multiplicities();
        let tol = 4.0 * CLOSED_DISC_SLACK;
        let id0 = FanMap::identity(corr, widths, 0);
        let id1 = FanMap::identity(corr, widths, 1);
        let defect_star = id0.sub(&fan.adjoint().compose(&fan)?)?.positive_sqrt_with_tol(tol)?;
        let defect = id1.sub(&fan.compose(&fan.adjoint())?)?.positive_sqrt_with_tol(tol)?;
        Ok(Self {
            corr: corr.clone(),
            rep: rep.clone(),
            matrix,
            fan,
            norm,
            strict: norm < 1.0 - STRICT_MARGIN,
            defect_star,
            defect,
            intertwining_residual,
        })
    }

    pub fn zero(corr: &Correspondence, rep: &Representation) -> Result<Self> {
        let fan = FanMap::zero(corr, rep.multiplicities(), 0, 1);
        Self::from_fan(corr, rep, fan)
    }

    /// A seeded Gaussian intertwiner rescaled to the target norm.
    pub fn random(corr: &Correspondence, rep: &Representation, seed: u64, target_norm: f64) -> Result<Self> {
        if !(0.0..=1.0 + CLOSED_DISC_SLACK).contains(&target_norm) {
            return Err(HardyError::OutsideClosedDisc { norm: target_norm });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = FanMap::random(corr, rep.multiplicities(), 0, 1, &mut rng);
        let n = raw.norm();
        if target_norm == 0.0 {
            return Self::zero(corr, rep);
        }
        if n == 0.0 {
            return Err(HardyError::NotInstantiable);
        }
        Self::from_fan(corr, rep, raw.scale(linalg::real(target_norm / n)))
    }

    pub fn corr(&self) -> &Correspondence {
        &self.corr
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn widths(&self) -> &[usize] {
        self.rep.multiplicities()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn fan(&self) -> &FanMap {
        &self.fan
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn intertwining_residual(&self) -> f64 {
        self.intertwining_residual
    }

    /// `Δ_*(η) = (I_H − η*η)^{1/2}`.
    pub fn defect_star(&self) -> &FanMap {
        &self.defect_star
    }

    /// `Δ(η) = (I_{E⊗H} − ηη*)^{1/2}`.
    pub fn defect(&self) -> &FanMap {
        &self.defect
    }

    pub fn require_strict(&self) -> Result<()> {
        if !self.strict {
            return Err(HardyError::NotStrictContraction { norm: self.norm });
        }
        Ok(())
    }

    /// `η^{(0)}, …, η^{(n)}`, each computed by both recursions; the orders are
    /// required to agree.
    pub fn eta_powers(&self, n: usize) -> Result<Vec<FanMap>> {
        let (powers, gap) = self.eta_powers_with_gap(n)?;
        if gap > POWER_ORDER_TOL {
            return Err(HardyError::Internal(format!(
                "recursion orders for η^(n) disagree by {gap:.3e}"
            )));
        }
        Ok(powers)
    }

    /// Powers via `(I_{E^{⊗k}} ⊗ η) η^{(k)}`, plus the largest entrywise gap to
    /// `(I_E ⊗ η^{(k)}) η`.
    pub fn eta_powers_with_gap(&self, n: usize) -> Result<(Vec<FanMap>, f64)> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(FanMap::identity(&self.corr, self.widths(), 0));
        let mut gap: f64 = 0.0;
        for k in 0..n {
            let next = self.fan.ampliate_compose(k, &out[k])?;
            let other = out[k].ampliate_compose(1, &self.fan)?;
            gap = gap.max(next.sub(&other)?.max_abs());
            out.push(next);
        }
        Ok((out, gap))
    }

    pub fn eta_power(&self, n: usize) -> Result<FanMap> {
        Ok(self.eta_powers(n)?.pop().expect("n + 1 powers"))
    }

    /// `η̂*(ξ) = η^{(k)*} L_ξ`, the covariant representation evaluated at `ξ`.
    pub fn covariant_eval(&self, xi: &CorrElement) -> Result<CMatrix> {
        if xi.corr() != &self.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        if xi.level() == 0 {
            return self.rep.sigma_matrix(&xi.to_algebra()?);
        }
        let power = self.eta_power(xi.level())?.to_dense();
        Ok(power.adjoint() * fock::insertion_map(xi, &self.rep)?)
    }

    /// `X̂(η*) = Σ_k η̂*(ξ_k)`.
    pub fn fourier_eval(&self, x: &FockPolynomial) -> Result<CMatrix> {
        if x.corr() != &self.corr {
            return Err(HardyError::CorrespondenceMismatch);
        }
        let powers = self.eta_powers(x.degree())?;
        let mut out = self.rep.sigma_matrix(&x.constant_term())?;
        for (k, xi) in x.coefficients().iter().enumerate().skip(1) {
            out += powers[k].to_dense().adjoint() * fock::insertion_map(xi, &self.rep)?;
        }
        Ok(out)
    }

    /// `P_η(a) = η*(I_E ⊗ a)η` for `a ∈ σ(M)'` given as a level-0 fan map.
    pub fn cp_map(&self, a: &FanMap) -> Result<FanMap> {
        self.fan.adjoint().compose(&a.ampliate_compose(1, &self.fan)?)
    }
}

/// A column operator `H → F_N(E) ⊗_σ H`, one intertwiner per level.
#[derive(Clone, Debug)]
pub struct KernelColumn {
    fock: TruncatedFock,
    levels: Vec<FanMap>,
}

impl KernelColumn {
    pub fn fock(&self) -> &TruncatedFock {
        &self.fock
    }

    pub fn truncation(&self) -> usize {
        self.fock.truncation()
    }

    pub fn levels(&self) -> &[FanMap] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &FanMap {
        &self.levels[k]
    }

    pub fn to_dense(&self) -> CMatrix {
        let h = self.fock.level_dim(0);
        let mut out = linalg::zeros(self.fock.dim(), h);
        for (k, lvl) in self.levels.iter().enumerate() {
            let r = self.fock.level_range(k);
            out.rows_mut(r.start, r.len()).copy_from(&lvl.to_dense());
        }
        out
    }

    /// `Σ_k L_k* L_k`, a level-0 fan map.
    pub fn gram(&self) -> Result<FanMap> {
        let mut acc = self.levels[0].adjoint().compose(&self.levels[0])?;
        for lvl in &self.levels[1..] {
            acc = acc.add(&lvl.adjoint().compose(lvl)?)?;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.gram()?.norm().sqrt())
    }
}

/// `C_N(η) = [η^{(0)}, …, η^{(N)}]ᵀ`; requires `‖η‖ < 1`.
pub fn cauchy_kernel(eta: &DiscPoint, truncation: usize) -> Result<KernelColumn> {
    eta.require_strict()?;
    let fock = TruncatedFock::induced(eta.corr(), eta.representation(), truncation)?;
    Ok(KernelColumn { fock, levels: eta.eta_powers(truncation)? })
}

/// `K_N(η)` with level blocks `(I_{E^{⊗k}} ⊗ Δ_*(η)) η^{(k)}`.
pub fn poisson_kernel(eta: &DiscPoint, truncation: usize) -> Result<KernelColumn> {
    poisson_kernel_mutated(eta, truncation, Mutation::None)
}

pub fn poisson_kernel_mutated(eta: &DiscPoint, truncation: usize, mutation: Mutation) -> Result<KernelColumn> {
    let fock = TruncatedFock::induced(eta.corr(), eta.representation(), truncation)?;
    let powers = eta.eta_powers(truncation)?;
    let levels = powers
        .iter()
        .enumerate()
        .map(|(k, p)| match mutation {
            Mutation::DropDefectInKernel => Ok(p.clone()),
            _ => eta.defect_star().ampliate_compose(k, p),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelColumn { fock, levels })
}

/// `‖K_N*K_N + η^{(N+1)*}η^{(N+1)} − I_H‖`, exact at every truncation.
pub fn telescoping_residual(eta: &DiscPoint, kernel: &KernelColumn) -> Result<f64> {
    let n = kernel.truncation();
    let top = eta.eta_power(n + 1)?;
    let lhs = kernel.gram()?.add(&top.adjoint().compose(&top)?)?;
    let id = FanMap::identity(eta.corr(), eta.widths(), 0);
    Ok(linalg::residual_norm(&lhs.sub(&id)?.to_dense()))
}

/// Observed residuals of the reproducing identities, with the certified bound
/// for the first one.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproducingResiduals {
    /// `‖X̂(η*) − K_N*(X ⊗ I)K_N‖`.
    pub reproducing: f64,
    /// `c_X ‖η‖^{N+1−deg X}/(1 − ‖η‖) + 1e-9`.
    pub reproducing_bound: f64,
    /// `max_ξ ‖(T_ξ* ⊗ I)K − K η̂*(ξ)*‖` on levels `≤ N − 1`, over basis `ξ ∈ E`.
    pub eigenvector: f64,
    /// `‖K X̂(η*)* − (X* ⊗ I)K‖` on levels `≤ N − deg X`.
    pub adjoint_intertwining: f64,
}

pub fn reproducing_residuals(x: &FockPolynomial, eta: &DiscPoint, truncation: usize) -> Result<ReproducingResiduals> {
    eta.require_strict()?;
    if x.degree() > truncation {
        return Err(HardyError::TruncationTooSmall { level: x.degree(), truncation });
    }
    let kernel = poisson_kernel(eta, truncation)?;
    let fock = kernel.fock().clone();
    let k = kernel.to_dense();
    let hat = eta.fourier_eval(x)?;

    let compressed = k.adjoint() * x.apply(&fock, &k)?;
    let reproducing = linalg::residual_norm(&(&hat - compressed));
    let r = eta.norm();
    let reproducing_bound =
        x.coefficient_norm_sum() * r.powi((truncation + 1 - x.degree()) as i32) / (1.0 - r) + 1e-9;

    let eigenvector = eigenvector_residual(eta, &kernel)?;

    let rows = fock.level_range(truncation - x.degree()).end;
    let lhs = &k * hat.adjoint();
    let rhs = x.apply_adjoint(&fock, &k)?;
    let adjoint_intertwining = linalg::residual_norm(&(lhs - rhs).rows(0, rows).into_owned());

    Ok(ReproducingResiduals { reproducing, reproducing_bound, eigenvector, adjoint_intertwining })
}

/// `max_ξ ‖(T_ξ* ⊗ I)K − K η̂*(ξ)*‖` on levels `≤ N − 1`, over basis `ξ ∈ E`.
/// Holds on the closed disc.
pub fn eigenvector_residual(eta: &DiscPoint, kernel: &KernelColumn) -> Result<f64> {
    let fock = kernel.fock();
    let truncation = kernel.truncation();
    let mut worst: f64 = 0.0;
    if truncation == 0 {
        return Ok(worst);
    }
    let k = kernel.to_dense();
    let rows = fock.level_range(truncation).start;
    for xi in CorrElement::basis(eta.corr(), 1) {
        let lhs = fock.apply_creation_adjoint(&xi, &k)?;
        let rhs = &k * eta.covariant_eval(&xi)?.adjoint();
        let diff = (lhs - rhs).rows(0, rows).into_owned();
        worst = worst.max(linalg::residual_norm(&diff));
    }
    Ok(worst)
}

/// `Σ_{k≤N} η^{(k)*}(I_k ⊗ a)ζ^{(k)}` against the Neumann sum `Σ_{k≤N} θ^k(a)`
/// with `θ(b) = η*(I_E ⊗ b)ζ`. Returns the first sum and the gap between them.
pub fn cauchy_gram(eta: &DiscPoint, zeta: &DiscPoint, a: &CMatrix, truncation: usize) -> Result<(CMatrix, f64)> {
    eta.require_strict()?;
    zeta.require_strict()?;
    if eta.corr() != zeta.corr() || eta.representation() != zeta.representation() {
        return Err(HardyError::CorrespondenceMismatch);
    }
    let (a_fan, miss) = FanMap::from_dense(eta.corr(), eta.widths(), 0, 0, a)?;
    if miss > 1e-10 * linalg::max_abs(a).max(1.0) {
        return Err(HardyError::NotInCommutant { residual: miss });
    }
    let pe = eta.eta_powers(truncation)?;
    let pz = zeta.eta_powers(truncation)?;
    let mut direct = FanMap::zero(eta.corr(), eta.widths(), 0, 0);
    for k in 0..=truncation {
        direct = direct.add(&pe[k].adjoint().compose(&a_fan.ampliate_compose(k, &pz[k])?)?)?;
    }
    let mut term = a_fan.clone();
    let mut neumann = a_fan.clone();
    for _ in 0..truncation {
        term = eta.fan().adjoint().compose(&term.ampliate_compose(1, zeta.fan())?)?;
        neumann = neumann.add(&term)?;
    }
    let gap = linalg::residual_norm(&direct.sub(&neumann)?.to_dense());
    Ok((direct.to_dense(), gap))
}

/// `‖η^{(n+1)*}η^{(n+1)} − η^{(n)*}η^{(n)}‖` must be negative semidefinite;
/// returns the largest eigenvalue of the increments (≤ 0 up to rounding).
pub fn defect_monotonicity(eta: &DiscPoint, n: usize) -> Result<f64> {
    let powers = eta.eta_powers(n)?;
    let mut worst = f64::NEG_INFINITY;
    for w in powers.windows(2) {
        let inc = w[1].adjoint().compose(&w[1])?.sub(&w[0].adjoint().compose(&w[0])?)?;
        let (values, _) = linalg::hermitian_eigen(&inc.to_dense());
        if let Some(&top) = values.last() {
            worst = worst.max(top);
        }
    }
    Ok(worst)
}

/// Dense `σ(a)` for `a ∈ M` through the point's representation.
pub fn sigma(eta: &DiscPoint, a: &AlgebraElement) -> Result<CMatrix> {
    eta.representation().sigma_matrix(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, real};

    fn free_point(d: usize, coords: &[f64]) -> DiscPoint {
        let corr = Correspondence::free(d);
        let rep = Representation::standard(corr.algebra());
        let m = CMatrix::from_column_slice(coords.len(), 1, &coords.iter().map(|&x| real(x)).collect::<Vec<_>>());
        DiscPoint::new(&corr, &rep, m).unwrap()
    }

    #[test]
    fn disc_point_examples() {
        let corr = Correspondence::free(2);
        let rep = Representation::standard(corr.algebra());
        let z = DiscPoint::zero(&corr, &rep).unwrap();
        assert_eq!(z.defect_star().to_dense(), linalg::identity(1));

        let p = free_point(2, &[0.5, 0.5]);
        assert!((p.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((p.defect_star().block(0)[(0, 0)].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(p.is_strict());

        let far = CMatrix::from_column_slice(2, 1, &[real(1.0), real(0.5)]);
        assert!(matches!(DiscPoint::new(&corr, &rep, far), Err(HardyError::OutsideClosedDisc { .. })));
    }

    #[test]
    fn graph_point_must_respect_blocks() {
        let g = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let rep = Representation::standard(g.algebra());
        // H = ℂ², E ⊗ H = ℂ³ (one coordinate per edge). Edge 2 has range 1, so
        // only the vertex-1 component of h may feed its coordinate.
        let mut m = linalg::zeros(3, 2);
        m[(2, 0)] = real(0.5);
        assert!(matches!(DiscPoint::new(&g, &rep, m.clone()), Err(HardyError::NotIntertwining { .. })));
        m[(2, 0)] = real(0.0);
        m[(2, 1)] = real(0.5);
        assert!(DiscPoint::new(&g, &rep, m).is_ok());
    }

    #[test]
    fn powers_examples() {
        let p = free_point(1, &[0.5]);
        assert_eq!(p.eta_power(0).unwrap().to_dense(), linalg::identity(1));
        assert!((p.eta_power(3).unwrap().block(0)[(0, 0)].re - 0.125).abs() < 1e-15);

        let q = free_point(2, &[0.5, 0.5]);
        let p2 = q.eta_power(2).unwrap().to_dense();
        assert_eq!(p2.shape(), (4, 1));
        for v in p2.iter() {
            assert!((v.re - 0.25).abs() < 1e-15);
        }
        assert!((linalg::operator_norm(&p2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kernels_for_scalar_point() {
        let p = free_point(1, &[0.5]);
        let c = cauchy_kernel(&p, 3).unwrap().to_dense();
        let expected = [1.0, 0.5, 0.25, 0.125];
        for (i, e) in expected.iter().enumerate() {
            assert!((c[(i, 0)].re - e).abs() < 1e-15);
        }
        assert!(linalg::operator_norm(&c).unwrap() <= 2.0);
        let k = poisson_kernel(&p, 3).unwrap();
        let g = k.gram().unwrap().block(0)[(0, 0)];
        assert!((g.re - 0.99609375).abs() < 1e-15);
    }

    #[test]
    fn coisometric_point_has_degenerate_kernel() {
        let s = 0.5f64.sqrt();
        let p = free_point(2, &[s, s]);
        assert!(!p.is_strict());
        assert!(matches!(cauchy_kernel(&p, 2), Err(HardyError::NotStrictContraction { .. })));
        for n in [1, 3, 5] {
            let k = poisson_kernel(&p, n).unwrap();
            assert!(k.gram().unwrap().max_abs() < 1e-12);
            assert!(telescoping_residual(&p, &k).unwrap() < 1e-12);
        }
    }

    #[test]
    fn covariant_and_fourier_examples() {
        let q = free_point(2, &[0.5, 0.5]);
        let e1 = CorrElement::unit(q.corr(), 1, 0, 0, 0);
        assert!((q.covariant_eval(&e1).unwrap()[(0, 0)].re - 0.5).abs() < 1e-15);
        let unit = CorrElement::from_algebra(q.corr(), &AlgebraElement::identity(q.corr().algebra())).unwrap();
        assert_eq!(q.covariant_eval(&unit).unwrap(), linalg::identity(1));

        let p = free_point(1, &[0.5]);
        let x = FockPolynomial::scalar(p.corr(), &[real(1.0), real(2.0)]).unwrap();
        assert!((p.fourier_eval(&x).unwrap()[(0, 0)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fourier_eval_of_matrix_point_is_adjoint() {
        let corr = Correspondence::free(1);
        let rep = Representation::new(corr.algebra(), vec![2]).unwrap();
        let t = CMatrix::from_row_slice(2, 2, &[c64(0.1, 0.2), c64(0.3, 0.0), c64(-0.2, 0.1), c64(0.0, -0.4)]);
        // η* = T, so η = T*.
        let p = DiscPoint::new(&corr, &rep, t.adjoint()).unwrap();
        let x = FockPolynomial::scalar(&corr, &[real(0.0), real(1.0)]).unwrap();
        assert!(linalg::max_abs(&(p.fourier_eval(&x).unwrap() - &t)) < 1e-15);
    }

    #[test]
    fn cauchy_gram_scalar_series() {
        let p = free_point(1, &[0.5]);
        let (g, gap) = cauchy_gram(&p, &p, &linalg::identity(1), 60).unwrap();
        assert!((g[(0, 0)].re - 4.0 / 3.0).abs() < 1e-14);
        assert!(gap < 1e-14);
    }
}
