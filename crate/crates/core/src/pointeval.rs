//! Left point evaluations `Φ_X^ξ(a) = ⟨C(ξ), φ_∞(a) X 1⟩` at points `ξ` of the
//! open unit ball of `E`.
//!
//! `C(ξ) = (1, ξ, ξ^{⊗2}, …)` and `K(ξ) = φ_∞(Δ_*)C(ξ)` with
//! `Δ_* = (I − ⟨ξ, ξ⟩)^{1/2} ∈ M` live in the Fock space itself, stored as flat
//! columns of [`TruncatedFock::new`].

use crate::algebra::AlgebraElement;
use crate::corr::CorrElement;
use crate::error::{HardyError, Result};
use crate::fock::{FockPolynomial, TruncatedFock};
use crate::linalg::{self, CMatrix};

#[derive(Clone, Debug)]
pub struct LeftEvalContext {
    xi: CorrElement,
    truncation: usize,
    fock: TruncatedFock,
    powers: Vec<CorrElement>,
    defect_star: AlgebraElement,
    cauchy: CMatrix,
    kernel: CMatrix,
}

impl LeftEvalContext {
    pub fn new(xi: &CorrElement, truncation: usize) -> Result<Self> {
        if xi.level() != 1 {
            return Err(HardyError::LevelMismatch { left: xi.level(), right: 1 });
        }
        let norm = xi.norm();
        if norm >= 1.0 {
            return Err(HardyError::NotInOpenBall { norm });
        }
        let corr = xi.corr();
        let alg = corr.algebra();
        let powers = (0..=truncation).map(|k| xi.tensor_power(k)).collect::<Result<Vec<_>>>()?;
        let defect_star = AlgebraElement::identity(alg).sub(&xi.inner_product(xi)?)?.positive_sqrt()?;
        let fock = TruncatedFock::new(corr, truncation);
        let mut cauchy = linalg::zeros(fock.dim(), 1);
        for (k, p) in powers.iter().enumerate() {
            let start = fock.level_range(k).start;
            for (i, v) in p.to_flat().into_iter().enumerate() {
                cauchy[(start + i, 0)] = v;
            }
        }
        let kernel = fock.apply_phi(&defect_star, &cauchy)?;
        Ok(Self { xi: xi.clone(), truncation, fock, powers, defect_star, cauchy, kernel })
    }

    pub fn xi(&self) -> &CorrElement {
        &self.xi
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn fock(&self) -> &TruncatedFock {
        &self.fock
    }

    /// `ξ^{⊗k}`, `k ≤ N`.
    pub fn power(&self, k: usize) -> &CorrElement {
        &self.powers[k]
    }

    pub fn defect_star(&self) -> &AlgebraElement {
        &self.defect_star
    }

    /// `C_N(ξ)` as a flat column.
    pub fn cauchy(&self) -> &CMatrix {
        &self.cauchy
    }

    /// `K_N(ξ) = φ_∞(Δ_*)C_N(ξ)` as a flat column.
    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    /// Largest eigenvalue of `⟨C_N(ξ), C_N(ξ)⟩ − (1 − ‖ξ‖)^{−2} I`; nonpositive.
    pub fn cauchy_bound_excess(&self) -> Result<f64> {
        let gram = fock_inner(&self.fock, &self.cauchy, &self.cauchy)?;
        let bound = (1.0 - self.xi.norm()).powi(-2);
        let mut worst = f64::NEG_INFINITY;
        for b in gram.blocks() {
            let (values, _) = linalg::hermitian_eigen(b);
            if let Some(&top) = values.last() {
                worst = worst.max(top - bound);
            }
        }
        Ok(worst)
    }
}

/// `⟨x, y⟩ = Σ_k ⟨x_k, y_k⟩ ∈ M` for single flat columns of `F_N(E)`.
pub fn fock_inner(fock: &TruncatedFock, x: &CMatrix, y: &CMatrix) -> Result<AlgebraElement> {
    let corr = fock.corr();
    let mut acc = AlgebraElement::zero(corr.algebra());
    for k in 0..=fock.truncation() {
        let xk = fock.level_element(x, 0, k)?;
        let yk = fock.level_element(y, 0, k)?;
        acc = acc.add(&xk.inner_product(&yk)?)?;
    }
    Ok(acc)
}

/// `Φ_X^ξ(a) = Σ_{k ≤ deg X} ⟨ξ^{⊗k}, φ_k(a) ξ_k⟩`, where `ξ_k` are the
/// coefficients of `X`.
pub fn left_point_eval(x: &FockPolynomial, ctx: &LeftEvalContext, a: &AlgebraElement) -> Result<AlgebraElement> {
    if x.corr() != ctx.xi.corr() {
        return Err(HardyError::CorrespondenceMismatch);
    }
    if x.degree() > ctx.truncation {
        return Err(HardyError::TruncationTooSmall { level: x.degree(), truncation: ctx.truncation });
    }
    let mut acc = AlgebraElement::zero(x.corr().algebra());
    for (k, coeff) in x.coefficients().iter().enumerate() {
        acc = acc.add(&ctx.powers[k].inner_product(&coeff.left_action(a)?)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiResiduals {
    /// Zeroth gauge coefficient of `Y = Σ_{k≤N} T_ξ*^k (φ_∞(a)X − φ_∞(Φ_X^ξ(a)))`:
    /// the larger of `‖(Y1)_0‖` and the level-preserving blocks of `Y` on
    /// levels `≤ N − deg X`.
    pub gauge: f64,
    /// `c_X ‖ξ‖^{N+1−deg X} + 1e-10`.
    pub gauge_bound: f64,
    /// `X* φ_∞(a*) C(ξ) = φ_∞(Φ_X^ξ(a)*) C(ξ)` and
    /// `X* K(ξ) = φ_∞(Φ_X^ξ(Δ_*)* Δ_*^{−1}) K(ξ)` on levels `≤ N − deg X`.
    pub eigen: f64,
    /// `‖Φ_{XZ}^ξ(a) − Φ_Z^ξ(Φ_X^ξ(a))‖`.
    pub antihomomorphism: f64,
}

pub fn phi_property_residuals(
    x: &FockPolynomial,
    z: &FockPolynomial,
    ctx: &LeftEvalContext,
    a: &AlgebraElement,
) -> Result<PhiResiduals> {
    let n = ctx.truncation;
    if x.degree() + z.degree() > n {
        return Err(HardyError::TruncationTooSmall { level: x.degree() + z.degree(), truncation: n });
    }
    let fock = &ctx.fock;
    let phi_x = left_point_eval(x, ctx, a)?;

    // Gauge coefficient of Y.
    let (xm, _) = x.materialize(fock)?;
    let mut diff = fock.apply_phi(a, &xm)? - fock.phi_inf(&phi_x)?;
    let mut y = diff.clone();
    for _ in 0..n {
        diff = fock.apply_creation_adjoint(&ctx.xi, &diff)?;
        y += &diff;
    }
    let vac = fock.vacuum()?;
    let y1 = &y * &vac;
    let mut gauge = fock.level_element(&y1, 0, 0)?.norm();
    for j in 0..=n - x.degree() {
        let r = fock.level_range(j);
        let block = y.view((r.start, r.start), (r.len(), r.len())).into_owned();
        gauge = gauge.max(linalg::residual_norm(&block));
    }
    let gauge_bound =
        x.coefficient_norm_sum() * ctx.xi.norm().powi((n + 1 - x.degree()) as i32) + 1e-10;

    // Eigen-relations below the edge.
    let rows = fock.level_range(n - x.degree()).end;
    let lhs = x.apply_adjoint(fock, &fock.apply_phi(&a.adjoint(), &ctx.cauchy)?)?;
    let rhs = fock.apply_phi(&phi_x.adjoint(), &ctx.cauchy)?;
    let mut eigen = module_gap(fock, &(lhs - rhs), rows)?;
    let ds_inv = inverse(&ctx.defect_star)?;
    let phi_ds = left_point_eval(x, ctx, &ctx.defect_star)?;
    let lhs = x.apply_adjoint(fock, &ctx.kernel)?;
    let rhs = fock.apply_phi(&phi_ds.adjoint().mul(&ds_inv)?, &ctx.kernel)?;
    eigen = eigen.max(module_gap(fock, &(lhs - rhs), rows)?);

    let xz = x.multiply(z)?;
    let composed = left_point_eval(z, ctx, &phi_x)?;
    let antihomomorphism = left_point_eval(&xz, ctx, a)?.sub(&composed)?.norm();

    Ok(PhiResiduals { gauge, gauge_bound, eigen, antihomomorphism })
}

/// Largest module norm over the levels of a flat column lying in the first `rows`.
fn module_gap(fock: &TruncatedFock, v: &CMatrix, rows: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=fock.truncation() {
        if fock.level_range(k).end > rows {
            break;
        }
        worst = worst.max(fock.level_element(v, 0, k)?.norm());
    }
    Ok(worst)
}

fn inverse(a: &AlgebraElement) -> Result<AlgebraElement> {
    let blocks = a
        .blocks()
        .iter()
        .map(|b| {
            b.clone()
                .try_inverse()
                .ok_or_else(|| HardyError::InvalidStructure("singular defect operator".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraElement::new(a.algebra(), blocks)
}

/// For `X` whose evaluation vanishes on every matrix unit, the largest
/// `‖Φ_{ZX}^ξ(a)‖` and `‖Φ_{XZ}^ξ(a)‖` over the given `Z` and matrix units `a`.
/// Returns `None` when `Φ_X^ξ` does not vanish to `1e-12`.
pub fn kernel_ideal_residual(
    x: &FockPolynomial,
    others: &[FockPolynomial],
    ctx: &LeftEvalContext,
) -> Result<Option<f64>> {
    let units = x.corr().algebra().matrix_units();
    for a in &units {
        if left_point_eval(x, ctx, a)?.max_abs() > 1e-12 {
            return Ok(None);
        }
    }
    let mut worst: f64 = 0.0;
    for z in others {
        let zx = z.multiply(x)?;
        let xz = x.multiply(z)?;
        for a in &units {
            worst = worst.max(left_point_eval(&zx, ctx, a)?.max_abs());
            worst = worst.max(left_point_eval(&xz, ctx, a)?.max_abs());
        }
    }
    Ok(Some(worst))
}
