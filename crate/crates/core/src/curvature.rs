//! The curvature `κ(η)` of a closed-disc point over a factor `M = M_n(ℂ)`.
//!
//! The trace on `M` is the unnormalized `Tr`. With `σ` of multiplicity `m`,
//! `σ(M)' = I_n ⊗ M_m` and `tr_{σ(M)'}(I_n ⊗ y) = Tr y`. The same convention
//! gives the trace on `(φ_k(M) ⊗ I_H)'`, which is [`FanMap::trace`].
//!
//! Over a factor, `E` is `μ` copies of the standard bimodule, `E ⊗_M X ≅ X^μ`
//! through the slot units `e_s`, and `Ṽ : E ⊗ (F(E) ⊗ H) → F(E) ⊗ H` is the
//! row `[T_{e_1} ⊗ I, …, T_{e_μ} ⊗ I]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{MultiMatrixAlgebra, Representation};
use crate::corr::{CorrElement, Correspondence};
use crate::error::{HardyError, Result};
use crate::fock::{self, FanMap, TruncatedFock};
use crate::linalg::{self, CMatrix, C64};
use crate::poisson::{self, DiscPoint};

/// `P_η^p(a)` for `a ∈ σ(M)'` given densely.
pub fn cp_map_apply(eta: &DiscPoint, a: &CMatrix, power: usize) -> Result<CMatrix> {
    let mut x = commutant_element(eta, a)?;
    for _ in 0..power {
        x = eta.cp_map(&x)?;
    }
    Ok(x.to_dense())
}

fn commutant_element(eta: &DiscPoint, a: &CMatrix) -> Result<FanMap> {
    let (fan, miss) = FanMap::from_dense(eta.corr(), eta.widths(), 0, 0, a)?;
    if miss > 1e-10 * linalg::max_abs(a).max(1.0) {
        return Err(HardyError::NotInCommutant { residual: miss });
    }
    Ok(fan)
}

/// `tr_{(φ_k(M) ⊗ I_H)'}(x)` for a dense operator on level `k` of
/// `F(E) ⊗_σ H` (level 0 is `σ(M)'`).
pub fn commutant_trace(corr: &Correspondence, rep: &Representation, level: usize, x: &CMatrix) -> Result<f64> {
    let (fan, miss) = FanMap::from_dense(corr, rep.multiplicities(), level, level, x)?;
    if miss > 1e-10 * linalg::max_abs(x).max(1.0) {
        return Err(HardyError::NotInCommutant { residual: miss });
    }
    Ok(fan.trace()?.re)
}

fn require_factor(corr: &Correspondence) -> Result<()> {
    if corr.num_blocks() != 1 {
        return Err(HardyError::MultiBlockUnsupported);
    }
    Ok(())
}

/// `dim_l E = tr_{(φ(M) ⊗ I)'}(I_{E⊗H}) / tr_{σ(M)'}(I_H)` for the standard
/// representation.
pub fn dim_left(corr: &Correspondence) -> Result<f64> {
    dim_left_level(corr, 1)
}

/// `dim_l E^{⊗k}`, computed the same way on level `k`.
pub fn dim_left_level(corr: &Correspondence, k: usize) -> Result<f64> {
    require_factor(corr)?;
    let widths = [1];
    let top = FanMap::identity(corr, &widths, k).trace()?.re;
    let base = FanMap::identity(corr, &widths, 0).trace()?.re;
    Ok(top / base)
}

#[derive(Clone, Debug)]
pub struct CurvatureContext {
    eta: DiscPoint,
    truncation: usize,
    d: f64,
}

impl CurvatureContext {
    pub fn new(eta: &DiscPoint, truncation: usize) -> Result<Self> {
        require_factor(eta.corr())?;
        Ok(Self { eta: eta.clone(), truncation, d: dim_left(eta.corr())? })
    }

    pub fn eta(&self) -> &DiscPoint {
        &self.eta
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `dim_σ H = tr_{σ(M)'}(I_H)`.
    pub fn dim_sigma(&self) -> f64 {
        self.eta.widths()[0] as f64
    }

    fn require_d_at_least_one(&self) -> Result<()> {
        if self.d < 1.0 {
            return Err(HardyError::DLessThanOne { d: self.d });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaEstimate {
    /// `r_N = tr(I − P^{N+1}(I)) / Σ_{k≤N} d^k` for `N = 0, …`.
    pub ratios: Vec<f64>,
    /// `tr(K_N*K_N) / d^N`.
    pub tail_ratios: Vec<f64>,
    /// `max_N |tr(I − P^{N+1}(I)) − Σ_{k≤N} tr(K_k*K_k)|`.
    pub numerator_gap: f64,
    /// `max_k |tr_{σ(M)'}(K_k*K_k) − tr_{(φ_k(M)⊗I)'}(K_kK_k*)|`.
    pub trace_swap_gap: f64,
    /// Last ratio of the window.
    pub kappa: f64,
    pub monotone: bool,
}

pub fn kappa_estimate(ctx: &CurvatureContext) -> Result<KappaEstimate> {
    ctx.require_d_at_least_one()?;
    let eta = &ctx.eta;
    let n = ctx.truncation;
    let kernel = poisson::poisson_kernel(eta, n)?;
    let identity = FanMap::identity(eta.corr(), eta.widths(), 0);
    let total = identity.trace()?.re;

    let mut iterate = identity.clone();
    let mut ratios = Vec::with_capacity(n + 1);
    let mut tail_ratios = Vec::with_capacity(n + 1);
    let (mut numerator_gap, mut trace_swap_gap): (f64, f64) = (0.0, 0.0);
    let (mut poisson_sum, mut denom) = (0.0, 0.0);
    for k in 0..=n {
        iterate = eta.cp_map(&iterate)?;
        let level = kernel.level(k);
        let piece = level.adjoint().compose(level)?.trace()?.re;
        let swapped = level.compose(&level.adjoint())?.trace()?.re;
        trace_swap_gap = trace_swap_gap.max((piece - swapped).abs());
        poisson_sum += piece;
        denom += ctx.d.powi(k as i32);
        let defining = total - iterate.trace()?.re;
        numerator_gap = numerator_gap.max((defining - poisson_sum).abs());
        ratios.push(defining / denom);
        tail_ratios.push(piece / ctx.d.powi(k as i32));
    }
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let kappa = *ratios.last().expect("at least one ratio");
    Ok(KappaEstimate { ratios, tail_ratios, numerator_gap, trace_swap_gap, kappa, monotone })
}

/// `(1 − d) · t`, the curvature when `d < 1` and `t = tr(K*K)`.
pub fn small_d_formula(d: f64, kernel_trace: f64) -> Result<f64> {
    if d >= 1.0 {
        return Err(HardyError::DNotLessThanOne { d });
    }
    Ok((1.0 - d) * kernel_trace)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallDCurvature {
    pub kappa: f64,
    /// `tr(K_N*K_N)` for `N = 0, …`; nondecreasing.
    pub kernel_traces: Vec<f64>,
    /// `tr(η^{(N+1)*}η^{(N+1)})`, the part of `tr(K*K)` beyond the truncation.
    pub tail: f64,
}

/// `κ(η) = (1 − d) tr(K_N*K_N)`. Over a factor of finite type the only
/// correspondence with `d < 1` is the zero correspondence.
pub fn kappa_formula_small_d(ctx: &CurvatureContext) -> Result<SmallDCurvature> {
    if ctx.d >= 1.0 {
        return Err(HardyError::DNotLessThanOne { d: ctx.d });
    }
    if !ctx.eta.corr().is_zero() {
        return Err(HardyError::NotInstantiable);
    }
    let kernel = poisson::poisson_kernel(&ctx.eta, ctx.truncation)?;
    let mut kernel_traces = Vec::with_capacity(ctx.truncation + 1);
    let mut acc = 0.0;
    for lvl in kernel.levels() {
        acc += lvl.adjoint().compose(lvl)?.trace()?.re;
        kernel_traces.push(acc);
    }
    let top = ctx.eta.eta_power(ctx.truncation + 1)?;
    let tail = top.adjoint().compose(&top)?.trace()?.re;
    Ok(SmallDCurvature { kappa: small_d_formula(ctx.d, acc)?, kernel_traces, tail })
}

/// `F_N(E) ⊗_σ H` with the row `Ṽ` from `(F_{N−1}(E) ⊗ H)^μ` onto levels `1..=N`.
struct ShiftFrame {
    fock: TruncatedFock,
    /// Nonzero entries `(row, column, value)` of each `T_{e_s} ⊗ I`.
    slots: Vec<Vec<(usize, usize, C64)>>,
}

impl ShiftFrame {
    fn new(eta: &DiscPoint, truncation: usize) -> Result<Self> {
        let corr = eta.corr();
        let fock = TruncatedFock::induced(corr, eta.representation(), truncation)?;
        let n = corr.block_size(0);
        let mu = corr.mult()[0][0];
        let mut slots = Vec::with_capacity(mu);
        for s in 0..mu {
            let mut blocks = vec![linalg::zeros(n, n); mu];
            blocks[s] = linalg::identity(n);
            let t = fock.creation_operator(&CorrElement::new(corr, 1, blocks)?)?;
            let mut entries = Vec::new();
            for c in 0..t.ncols() {
                for (r, &v) in t.column(c).iter().enumerate() {
                    if v != linalg::ZERO {
                        entries.push((r, c, v));
                    }
                }
            }
            slots.push(entries);
        }
        Ok(Self { fock, slots })
    }

    /// `Φ_V(X) = Ṽ(I_E ⊗ X)Ṽ* = Σ_s T_{e_s} X T_{e_s}*`.
    fn phi_v(&self, x: &CMatrix) -> CMatrix {
        let mut out = linalg::zeros(x.nrows(), x.ncols());
        for entries in &self.slots {
            for &(r1, c1, v1) in entries {
                for &(r2, c2, v2) in entries {
                    out[(r1, r2)] += v1 * x[(c1, c2)] * v2.conj();
                }
            }
        }
        out
    }

    /// Frobenius bound on `max_k ‖Ṽ(I_E ⊗ P_k) − P_{k+1}Ṽ‖` over `k < N`:
    /// the entries of `Ṽ` that do not raise the level by exactly one.
    fn shift_residual(&self) -> f64 {
        let mut acc: f64 = 0.0;
        for entries in &self.slots {
            for &(r, c, v) in entries {
                if self.fock.level_of(r) != self.fock.level_of(c) + 1 {
                    acc += v.norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// `Σ_{k≤m} d^{−k} tr(δ_V(Y)_{k,k})` and the diagonal traces of `Y`.
    fn weighted_defect_trace(&self, ctx: &CurvatureContext, y: &CMatrix, m: usize) -> Result<f64> {
        let delta = y - self.phi_v(y);
        let mut acc = 0.0;
        for k in 0..=m {
            acc += self.level_trace(ctx, &delta, k)? / ctx.d.powi(k as i32);
        }
        Ok(acc)
    }

    fn level_trace(&self, ctx: &CurvatureContext, x: &CMatrix, k: usize) -> Result<f64> {
        let r = self.fock.level_range(k);
        let block = x.view((r.start, r.start), (r.len(), r.len())).into_owned();
        commutant_trace(ctx.eta.corr(), ctx.eta.representation(), k, &block)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOperatorValue {
    /// `tr(δ_V[K K*] N)` over levels `≤ window`.
    pub value: f64,
    pub window: usize,
    /// `tr(K_window* K_window) / d^window`.
    pub tail_ratio: f64,
    pub shift_residual: f64,
}

pub fn curvature_operator(ctx: &CurvatureContext) -> Result<CurvatureOperatorValue> {
    ctx.require_d_at_least_one()?;
    let n = ctx.truncation;
    if n == 0 {
        return Err(HardyError::HeadroomExceeded { window: 0, truncation: 0 });
    }
    let frame = ShiftFrame::new(&ctx.eta, n)?;
    let kernel = poisson::poisson_kernel(&ctx.eta, n)?.to_dense();
    let kk = &kernel * kernel.adjoint();
    let window = n - 1;
    let value = frame.weighted_defect_trace(ctx, &kk, window)?;
    let top = poisson::poisson_kernel(&ctx.eta, window)?;
    let lvl = top.level(window);
    let tail_ratio = lvl.adjoint().compose(lvl)?.trace()?.re / ctx.d.powi(window as i32);
    Ok(CurvatureOperatorValue { value, window, tail_ratio, shift_residual: frame.shift_residual() })
}

/// Random positive `Y = GG*` with `G` in `(φ_∞(M) ⊗ I_H)'` on `F_N(E) ⊗ H`.
pub fn random_commutant_positive(eta: &DiscPoint, truncation: usize, seed: u64) -> Result<CMatrix> {
    require_factor(eta.corr())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fock = TruncatedFock::induced(eta.corr(), eta.representation(), truncation)?;
    let mut g = linalg::zeros(fock.dim(), fock.dim());
    for l in 0..=truncation {
        for k in 0..=truncation {
            let block = FanMap::random(eta.corr(), eta.widths(), k, l, &mut rng).to_dense();
            let (rl, rk) = (fock.level_range(l), fock.level_range(k));
            g.view_mut((rl.start, rk.start), (rl.len(), rk.len())).copy_from(&block);
        }
    }
    let scale = linalg::real(1.0 / (fock.dim() as f64));
    Ok(&g * g.adjoint() * scale)
}

/// `|tr(P_m Y P_m)/d^m − tr(δ_V(Y) Σ_{k≤m} d^{−k}P_k)|` for `Y` in the
/// commutant of `φ_∞(M) ⊗ I_H` on `F_N(E) ⊗ H`, `m < N`.
pub fn popescu_identity_residual(ctx: &CurvatureContext, y: &CMatrix, m: usize) -> Result<f64> {
    let n = ctx.truncation;
    if m >= n {
        return Err(HardyError::HeadroomExceeded { window: m, truncation: n });
    }
    Ok(popescu_residuals_upto(ctx, y, m + 1)?[m])
}

/// [`popescu_identity_residual`] for every window `m < N`.
pub fn popescu_identity_residuals(ctx: &CurvatureContext, y: &CMatrix) -> Result<Vec<f64>> {
    popescu_residuals_upto(ctx, y, ctx.truncation)
}

fn popescu_residuals_upto(ctx: &CurvatureContext, y: &CMatrix, windows: usize) -> Result<Vec<f64>> {
    ctx.require_d_at_least_one()?;
    let n = ctx.truncation;
    let frame = ShiftFrame::new(&ctx.eta, n)?;
    if y.shape() != (frame.fock.dim(), frame.fock.dim()) {
        return Err(HardyError::ShapeMismatch {
            expected: format!("{0}x{0}", frame.fock.dim()),
            actual: format!("{}x{}", y.nrows(), y.ncols()),
        });
    }
    let mut miss: f64 = 0.0;
    for a in ctx.eta.corr().algebra().matrix_units() {
        let py = frame.fock.apply_phi(&a, y)?;
        let yp = frame.fock.apply_phi(&a.adjoint(), &y.adjoint())?.adjoint();
        miss = miss.max(linalg::residual_norm(&(py - yp)));
    }
    if miss > 1e-10 * linalg::max_abs(y).max(1.0) {
        return Err(HardyError::NotInCommutant { residual: miss });
    }
    let delta = y - frame.phi_v(y);
    let mut rhs = 0.0;
    let mut out = Vec::with_capacity(windows);
    for m in 0..windows {
        let weight = ctx.d.powi(m as i32);
        rhs += frame.level_trace(ctx, &delta, m)? / weight;
        let lhs = frame.level_trace(ctx, y, m)? / weight;
        out.push((lhs - rhs).abs());
    }
    Ok(out)
}

/// Residuals of the four trace identities for a factor correspondence:
/// dimension multiplicativity, the trace swap, ampliation, and the dimension
/// of `E ⊗_σ H`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundCalcResiduals {
    pub multiplicative: f64,
    pub trace_swap: f64,
    pub ampliation: f64,
    pub dimension: f64,
}

/// Checks on `E` (and `F`, sharing the algebra) with `σ` of multiplicity `m`.
pub fn fund_calc_residuals(e: &Correspondence, f: &Correspondence, multiplicity: usize, seed: u64) -> Result<FundCalcResiduals> {
    require_factor(e)?;
    require_factor(f)?;
    if e.algebra() != f.algebra() {
        return Err(HardyError::AlgebraMismatch);
    }
    let (de, df) = (dim_left(e)?, dim_left(f)?);

    // E ⊗ F sits inside (E ⊕ F)^{⊗2} as the words whose first letter is from E
    // and second from F; its left dimension is the trace of that projection.
    let (me, mf) = (e.mult()[0][0], f.mult()[0][0]);
    let sum = Correspondence::new(e.algebra(), vec![vec![me + mf]])?;
    let mut ef_count = 0;
    for idx in 0..sum.level(2).len() {
        let slots: Vec<usize> = sum.path_edges(2, idx).iter().map(|&t| sum.edges()[t].slot).collect();
        if slots[0] < me && slots[1] >= me {
            ef_count += 1;
        }
    }
    let d_ef = ef_count as f64 * sum.block_size(0) as f64 / sum.block_size(0) as f64;
    let mut multiplicative = (d_ef - de * df).abs();
    for k in 1..=3 {
        multiplicative = multiplicative.max((dim_left_level(e, k)? - de.powi(k as i32)).abs());
    }

    let rep = Representation::new(e.algebra(), vec![multiplicity])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let widths = rep.multiplicities();
    let eta = FanMap::random(e, widths, 0, 1, &mut rng).to_dense();
    let zeta = FanMap::random(e, widths, 0, 1, &mut rng).to_dense();
    let lhs = commutant_trace(e, &rep, 0, &(zeta.adjoint() * &eta))?;
    let rhs = commutant_trace(e, &rep, 1, &(&eta * zeta.adjoint()))?;
    let trace_swap = (lhs - rhs).abs();

    let g = FanMap::random(e, widths, 0, 0, &mut rng);
    let x = g.compose(&g.adjoint())?;
    let lifted = x.ampliate(1).to_dense();
    let ampliation =
        (commutant_trace(e, &rep, 1, &lifted)? - commutant_trace(e, &rep, 0, &x.to_dense())? * de).abs();

    let dim_h = commutant_trace(e, &rep, 0, &linalg::identity(rep.dim()))?;
    let dim_eh = commutant_trace(e, &rep, 1, &linalg::identity(fock::level_geometry(e, widths, 1).dim))?;
    let dimension = (dim_eh - de * dim_h).abs();

    Ok(FundCalcResiduals { multiplicative, trace_swap, ampliation, dimension })
}

/// `M = ℂ`, `E = ℂ^d`, `H = F_depth(ℂ^d)` and `η = [T_1*; …; T_d*]` built from
/// the truncated creation operators, a coisometric-on-levels point whose
/// defining ratios equal 1 for `N < depth + 1`.
pub fn compressed_shift_point(d: usize, depth: usize) -> Result<DiscPoint> {
    let corr = Correspondence::free(d);
    let inner = TruncatedFock::new(&corr, depth);
    let h = inner.dim();
    let rep = Representation::new(&MultiMatrixAlgebra::scalars(), vec![h])?;
    let mut eta = linalg::zeros(d * h, h);
    for i in 0..d {
        let t = inner.creation_operator(&CorrElement::unit(&corr, 1, i, 0, 0))?;
        eta.rows_mut(i * h, h).copy_from(&t.adjoint());
    }
    DiscPoint::new(&corr, &rep, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    fn scalar(eta: f64) -> DiscPoint {
        let corr = Correspondence::free(1);
        let rep = Representation::standard(corr.algebra());
        DiscPoint::new(&corr, &rep, CMatrix::from_element(1, 1, real(eta))).unwrap()
    }

    #[test]
    fn cp_powers_and_unitality() {
        let p = cp_map_apply(&scalar(0.5), &linalg::identity(1), 3).unwrap();
        assert!((p[(0, 0)].re - 0.015625).abs() < 1e-15);
        let corr = Correspondence::free(2);
        let rep = Representation::standard(corr.algebra());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let eta = DiscPoint::new(&corr, &rep, CMatrix::from_column_slice(2, 1, &[real(s), real(s)])).unwrap();
        assert!((cp_map_apply(&eta, &linalg::identity(1), 1).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn traces_and_dimensions() {
        let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let e = Correspondence::new(&m2, vec![vec![1]]).unwrap();
        let rep = Representation::new(&m2, vec![3]).unwrap();
        let mut y = linalg::zeros(3, 3);
        y[(0, 0)] = linalg::ONE;
        let x = linalg::kron(&linalg::identity(2), &y);
        assert_eq!(commutant_trace(&e, &rep, 0, &x).unwrap(), 1.0);
        assert_eq!(dim_left(&Correspondence::free(2)).unwrap(), 2.0);
        assert_eq!(dim_left_level(&Correspondence::free(3), 2).unwrap(), 9.0);
        assert_eq!(dim_left(&e).unwrap(), 1.0);
        let graph = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(dim_left(&graph), Err(HardyError::MultiBlockUnsupported));
    }

    #[test]
    fn scalar_ratios() {
        let ctx = CurvatureContext::new(&scalar(0.5), 6).unwrap();
        let est = kappa_estimate(&ctx).unwrap();
        for (n, r) in est.ratios.iter().enumerate() {
            let expected = (1.0 - 0.25f64.powi(n as i32 + 1)) / (n as f64 + 1.0);
            assert!((r - expected).abs() < 1e-12);
        }
        assert!(est.numerator_gap < 1e-12 && est.monotone);
    }

    #[test]
    fn compressed_shift_has_unit_curvature() {
        let eta = compressed_shift_point(2, 3).unwrap();
        let ctx = CurvatureContext::new(&eta, 4).unwrap();
        let est = kappa_estimate(&ctx).unwrap();
        for r in &est.ratios[..4] {
            assert!((r - 1.0).abs() < 1e-12, "{:?}", est.ratios);
        }
        let op = curvature_operator(&ctx).unwrap();
        assert_eq!(op.window, 3);
        assert!((op.value - 1.0).abs() < 1e-9 && op.shift_residual == 0.0, "{op:?}");
    }

    #[test]
    fn zero_point_operator_value_is_dimension() {
        let corr = Correspondence::free(2);
        let rep = Representation::new(corr.algebra(), vec![3]).unwrap();
        let eta = DiscPoint::zero(&corr, &rep).unwrap();
        let ctx = CurvatureContext::new(&eta, 1).unwrap();
        let op = curvature_operator(&ctx).unwrap();
        assert_eq!(op.window, 0);
        assert!((op.value - 3.0).abs() < 1e-12);
        let deeper = curvature_operator(&CurvatureContext::new(&eta, 3).unwrap()).unwrap();
        assert!(deeper.value.abs() < 1e-12);
        assert!((kappa_estimate(&ctx).unwrap().ratios[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn popescu_identity_on_random_positive() {
        let corr = Correspondence::free(2);
        let rep = Representation::new(corr.algebra(), vec![2]).unwrap();
        let eta = DiscPoint::random(&corr, &rep, 3, 0.7).unwrap();
        let ctx = CurvatureContext::new(&eta, 3).unwrap();
        let y = random_commutant_positive(&eta, 3, 11).unwrap();
        for m in 0..3 {
            assert!(popescu_identity_residual(&ctx, &y, m).unwrap() < 1e-9);
        }
        assert!(matches!(popescu_identity_residual(&ctx, &y, 3), Err(HardyError::HeadroomExceeded { .. })));
    }

    #[test]
    fn small_d_paths() {
        assert_eq!(small_d_formula(0.5, 4.0).unwrap(), 2.0);
        assert!(small_d_formula(1.0, 4.0).is_err());
        let zero = Correspondence::zero(&MultiMatrixAlgebra::scalars());
        let rep = Representation::new(zero.algebra(), vec![4]).unwrap();
        let eta = DiscPoint::zero(&zero, &rep).unwrap();
        let ctx = CurvatureContext::new(&eta, 3).unwrap();
        assert_eq!(ctx.d(), 0.0);
        let k = kappa_formula_small_d(&ctx).unwrap();
        assert!((k.kappa - 4.0).abs() < 1e-12);
        assert!(matches!(kappa_estimate(&ctx), Err(HardyError::DLessThanOne { .. })));
    }

    #[test]
    fn fund_calc_identities() {
        let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let e = Correspondence::new(&m2, vec![vec![2]]).unwrap();
        let f = Correspondence::new(&m2, vec![vec![3]]).unwrap();
        let r = fund_calc_residuals(&e, &f, 3, 5).unwrap();
        assert!(r.multiplicative < 1e-9 && r.trace_swap < 1e-10 && r.ampliation < 1e-9 && r.dimension < 1e-9, "{r:?}");
    }
}
