//! The characteristic operator `Θ_η` of a strict disc point and the defect
//! identity `I = K(η)K(η)* + Θ_ηΘ_η*`.
//!
//! With `𝒟 = E ⊗_σ H` and `𝒟_* = H`, level `j` of `F(E) ⊗ 𝒟` is level `j + 1`
//! of `F(E) ⊗_σ H`. Every block
//! `Θ_{i,j} = I_{E^{⊗j}} ⊗ θ_{i−j}` then commutes with the left action of `M`, so
//! the whole operator is stored as [`FanMap`]s. The column `θ` is
//! `θ_0 = −η*` and `θ_q = (I_{E^{⊗q}} ⊗ Δ_*)(I_E ⊗ η^{(q−1)})Δ` for `q ≥ 1`.

use crate::error::{HardyError, Result};
use crate::fock::{FanMap, TruncatedFock};
use crate::linalg::{self, CMatrix};
use crate::mutation::Mutation;
use crate::poisson::{self, DiscPoint};

/// Largest vertex fan the defect identity is evaluated on.
pub const DEFECT_FAN_BUDGET: usize = 400;

#[derive(Clone, Debug)]
pub struct CharacteristicOperator {
    eta: DiscPoint,
    truncation: usize,
    column: Vec<FanMap>,
}

impl CharacteristicOperator {
    pub fn new(eta: &DiscPoint, truncation: usize) -> Result<Self> {
        Self::with_mutation(eta, truncation, Mutation::None)
    }

    pub fn with_mutation(eta: &DiscPoint, truncation: usize, mutation: Mutation) -> Result<Self> {
        eta.require_strict()?;
        let sign = if mutation == Mutation::FlipThetaDiagonal { 1.0 } else { -1.0 };
        let mut column = Vec::with_capacity(truncation + 1);
        column.push(eta.fan().adjoint().scale(linalg::real(sign)));
        if truncation >= 1 {
            let powers = eta.eta_powers(truncation - 1)?;
            for q in 1..=truncation {
                let inner = powers[q - 1].ampliate_compose(1, eta.defect())?;
                column.push(eta.defect_star().ampliate_compose(q, &inner)?);
            }
        }
        Ok(Self { eta: eta.clone(), truncation, column })
    }

    pub fn eta(&self) -> &DiscPoint {
        &self.eta
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `θ_0, …, θ_N`, with `θ_q` mapping level 1 to level `q`.
    pub fn column(&self) -> &[FanMap] {
        &self.column
    }

    /// `Θ_{i,j}` as a map from level `j + 1` to level `i`; `None` above the diagonal.
    pub fn block(&self, i: usize, j: usize) -> Option<FanMap> {
        (i >= j && i <= self.truncation).then(|| self.column[i - j].ampliate(j))
    }

    /// The vertex-`u` matrix of the truncated operator, rows over levels
    /// `0..=N`, columns over the domain levels `0..=N`.
    pub fn vertex_matrix(&self, u: usize) -> CMatrix {
        let n = self.truncation;
        let rows: Vec<usize> = (0..=n).map(|i| self.column[i].block(u).nrows()).collect();
        let cols: Vec<usize> = (0..=n).map(|j| self.column[0].ampliate(j).block(u).ncols()).collect();
        let mut out = linalg::zeros(rows.iter().sum(), cols.iter().sum());
        let mut r0 = 0;
        for (i, &nr) in rows.iter().enumerate() {
            let mut c0 = 0;
            for (j, &nc) in cols.iter().enumerate().take(i + 1) {
                let b = self.block(i, j).expect("lower triangle");
                out.view_mut((r0, c0), (nr, nc)).copy_from(b.block(u));
                c0 += nc;
            }
            r0 += nr;
        }
        out
    }

    /// `‖Θ_N‖`, the largest vertex-matrix norm.
    pub fn norm(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for u in 0..self.eta.corr().num_blocks() {
            worst = worst.max(linalg::operator_norm(&self.vertex_matrix(u))?);
        }
        Ok(worst)
    }

    /// Dense `Θ_N` from levels `1..=N+1` of `F(E) ⊗_σ H` to levels `0..=N`.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let (dom, cod) = self.spaces()?;
        let h = dom.level_dim(0);
        let mut out = linalg::zeros(cod.dim(), dom.dim() - h);
        for i in 0..=self.truncation {
            let r = cod.level_range(i);
            for j in 0..=i {
                let c = dom.level_range(j + 1);
                let b = self.block(i, j).expect("lower triangle").to_dense();
                out.view_mut((r.start, c.start - h), (r.len(), c.len())).copy_from(&b);
            }
        }
        Ok(out)
    }

    fn spaces(&self) -> Result<(TruncatedFock, TruncatedFock)> {
        let corr = self.eta.corr();
        let rep = self.eta.representation();
        Ok((
            TruncatedFock::induced(corr, rep, self.truncation + 1)?,
            TruncatedFock::induced(corr, rep, self.truncation)?,
        ))
    }

    /// Residuals of `Θ(T_ξ ⊗ I_𝒟) = (T_ξ ⊗ I_{𝒟_*})Θ` on domain levels `≤ N − 1`
    /// and of `Θ(φ_∞(a) ⊗ I_𝒟) = (φ_∞(a) ⊗ I_{𝒟_*})Θ`, over basis `ξ` and
    /// matrix units `a`.
    pub fn module_residuals(&self) -> Result<ModuleResiduals> {
        let (dom, cod) = self.spaces()?;
        let theta = self.to_dense()?;
        let h = dom.level_dim(0);
        let inner = dom.dim() - h;
        let below_edge = dom.level_range(self.truncation).end - h;
        let corr = self.eta.corr();

        let mut creation: f64 = 0.0;
        if self.truncation >= 1 {
            for xi in crate::corr::CorrElement::basis(corr, 1) {
                let t_dom = dom.creation_operator(&xi)?.view((h, h), (inner, inner)).into_owned();
                let t_cod = cod.creation_operator(&xi)?;
                let diff = (&theta * t_dom - t_cod * &theta).columns(0, below_edge).into_owned();
                creation = creation.max(linalg::residual_norm(&diff));
            }
        }
        let mut left_action: f64 = 0.0;
        for a in corr.algebra().matrix_units() {
            let p_dom = dom.phi_inf(&a)?.view((h, h), (inner, inner)).into_owned();
            let p_cod = cod.phi_inf(&a)?;
            left_action = left_action.max(linalg::residual_norm(&(&theta * p_dom - p_cod * &theta)));
        }
        Ok(ModuleResiduals { creation, left_action })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModuleResiduals {
    pub creation: f64,
    pub left_action: f64,
}

/// `θ_η` evaluated term by term on flat vectors, independently of the fan-map
/// build, together with its largest gap to column zero of
/// [`CharacteristicOperator`].
#[derive(Clone, Debug)]
pub struct ThetaColumn {
    /// Dense maps from level 1 to level `i`.
    pub levels: Vec<CMatrix>,
    pub consistency: f64,
}

pub fn theta_zero_column(eta: &DiscPoint, truncation: usize) -> Result<ThetaColumn> {
    eta.require_strict()?;
    let mut levels = Vec::with_capacity(truncation + 1);
    levels.push(-eta.matrix().adjoint());
    let delta = eta.defect().to_dense();
    for i in 1..=truncation {
        let mut y = delta.clone();
        for t in 1..i {
            y = eta.fan().apply_ampliated(t, &y)?;
        }
        levels.push(eta.defect_star().apply_ampliated(i, &y)?);
    }
    let theta = CharacteristicOperator::new(eta, truncation)?;
    let consistency = levels
        .iter()
        .zip(theta.column())
        .map(|(a, b)| linalg::max_abs(&(a - b.to_dense())))
        .fold(0.0, f64::max);
    Ok(ThetaColumn { levels, consistency })
}

/// Largest truncation `≤ requested` whose vertex fans stay within
/// [`DEFECT_FAN_BUDGET`].
pub fn defect_truncation_cap(eta: &DiscPoint, requested: usize) -> usize {
    let corr = eta.corr();
    let mut n = 0;
    while n < requested {
        let next = crate::fock::level_geometry(corr, eta.widths(), n + 1);
        if next.fan_dims.iter().any(|&f| f > DEFECT_FAN_BUDGET) {
            break;
        }
        n += 1;
    }
    n
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectIdentity {
    /// `max_{k,l ≤ N} ‖δ_{kl} I − (KK*)_{k,l} − (ΘΘ*)_{k,l}‖`.
    pub residual: f64,
    pub worst_block: (usize, usize),
    pub truncation: usize,
}

/// The defect identity, block by block, at truncation `N`. Both sides are
/// complete at every truncation because `Θ` is lower triangular.
pub fn defect_identity_residual(eta: &DiscPoint, truncation: usize, mutation: Mutation) -> Result<DefectIdentity> {
    let theta = CharacteristicOperator::with_mutation(eta, truncation, mutation)?;
    let kernel = poisson::poisson_kernel(eta, truncation)?;
    let corr = eta.corr();
    let widths = eta.widths();
    let mut residual: f64 = 0.0;
    let mut worst_block = (0, 0);
    for k in 0..=truncation {
        for l in 0..=k {
            let mut r = kernel.level(k).compose(&kernel.level(l).adjoint())?;
            for m in 0..=l {
                let prod = theta.column()[k - m].compose(&theta.column()[l - m].adjoint())?;
                r = r.add(&prod.ampliate(m))?;
            }
            if k == l {
                r = FanMap::identity(corr, widths, k).sub(&r)?;
            }
            let norm = r.norm();
            if norm > residual {
                residual = norm;
                worst_block = (k, l);
            }
        }
    }
    Ok(DefectIdentity { residual, worst_block, truncation })
}

/// Fails with [`HardyError::Internal`] when the stored column and the
/// term-by-term series disagree beyond `1e-12`.
pub fn check_theta_consistency(eta: &DiscPoint, truncation: usize) -> Result<f64> {
    let col = theta_zero_column(eta, truncation)?;
    if col.consistency > 1e-12 {
        return Err(HardyError::Internal(format!(
            "θ column disagrees with the block build by {:.3e}",
            col.consistency
        )));
    }
    Ok(col.consistency)
}
