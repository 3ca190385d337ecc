//! Named checks over fixtures, and the bundled quick/full verification suites.

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, MultiMatrixAlgebra, Representation};
use crate::charfun::{self, CharacteristicOperator};
use crate::corr::{CorrElement, Correspondence};
use crate::curvature::{self, CurvatureContext};
use crate::dual::{self, DualCorrespondence, DualityResiduals};
use crate::error::{HardyError, Result};
use crate::fock::{FanMap, FockPolynomial, TruncatedFock};
use crate::linalg::{self, c64};
use crate::mutation::Mutation;
use crate::pointeval::{self, LeftEvalContext, PhiResiduals};
use crate::poisson::{self, DiscPoint};
use crate::report::{CheckRecord, Environment, Report};

/// Largest `dim F_N(E) ⊗ H` for checks that form dense operators.
pub const DENSE_BUDGET: usize = 400;
/// Largest truncation for the duality checks.
pub const DUALITY_MAX_TRUNCATION: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Telescoping,
    KernelIsometry,
    PowerOrders,
    DefectMonotonicity,
    CauchyBound,
    Eigenvector,
    Reproducing,
    AdjointIntertwining,
    FourierMultiplicative,
    CauchyGram,
    DualityIsometry,
    DualityCommutation,
    CauchyViaDual,
    DefectIdentity,
    ThetaNorm,
    ThetaColumn,
    ThetaModule,
    LeftEvalAntihomomorphism,
    LeftEvalGauge,
    LeftEvalEigen,
    CurvatureNumerator,
    CurvatureOperator,
    Popescu,
    FundCalc,
}

impl Check {
    pub const ALL: [Check; 24] = [
        Check::Telescoping,
        Check::KernelIsometry,
        Check::PowerOrders,
        Check::DefectMonotonicity,
        Check::CauchyBound,
        Check::Eigenvector,
        Check::Reproducing,
        Check::AdjointIntertwining,
        Check::FourierMultiplicative,
        Check::CauchyGram,
        Check::DualityIsometry,
        Check::DualityCommutation,
        Check::CauchyViaDual,
        Check::DefectIdentity,
        Check::ThetaNorm,
        Check::ThetaColumn,
        Check::ThetaModule,
        Check::LeftEvalAntihomomorphism,
        Check::LeftEvalGauge,
        Check::LeftEvalEigen,
        Check::CurvatureNumerator,
        Check::CurvatureOperator,
        Check::Popescu,
        Check::FundCalc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Telescoping => "telescoping",
            Check::KernelIsometry => "kernel_isometry",
            Check::PowerOrders => "power_orders",
            Check::DefectMonotonicity => "defect_monotonicity",
            Check::CauchyBound => "cauchy_bound",
            Check::Eigenvector => "eigenvector",
            Check::Reproducing => "reproducing",
            Check::AdjointIntertwining => "adjoint_intertwining",
            Check::FourierMultiplicative => "fourier_multiplicative",
            Check::CauchyGram => "cauchy_gram",
            Check::DualityIsometry => "duality_isometry",
            Check::DualityCommutation => "duality_commutation",
            Check::CauchyViaDual => "cauchy_via_dual",
            Check::DefectIdentity => "defect_identity",
            Check::ThetaNorm => "theta_norm",
            Check::ThetaColumn => "theta_column",
            Check::ThetaModule => "theta_module",
            Check::LeftEvalAntihomomorphism => "left_eval_antihomomorphism",
            Check::LeftEvalGauge => "left_eval_gauge",
            Check::LeftEvalEigen => "left_eval_eigen",
            Check::CurvatureNumerator => "curvature_numerator",
            Check::CurvatureOperator => "curvature_operator",
            Check::Popescu => "popescu",
            Check::FundCalc => "fund_calc",
        }
    }

    /// The identity the check verifies.
    pub fn anchor(self) -> &'static str {
        match self {
            Check::Telescoping => "telescoping identity K_N*K_N + η^(N+1)*η^(N+1) = I",
            Check::KernelIsometry => "Poisson kernel is an isometry up to ‖η‖^(2N+2)",
            Check::PowerOrders => "both recursions for η^(n) agree",
            Check::DefectMonotonicity => "η^(n)*η^(n) decreases in n",
            Check::CauchyBound => "Cauchy kernel norm at most 1/(1-‖η‖)",
            Check::Eigenvector => "Poisson kernel is a joint eigenvector of the creation adjoints",
            Check::Reproducing => "Poisson reproducing formula X̂(η*) = K*(X⊗I)K",
            Check::AdjointIntertwining => "K X̂(η*)* = (X*⊗I)K below the truncation edge",
            Check::FourierMultiplicative => "Fourier transform is multiplicative",
            Check::CauchyGram => "Cauchy kernel Gram equals the Neumann series",
            Check::DualityIsometry => "U is unitary on every level",
            Check::DualityCommutation => "U carries the dual Fock operators onto the commutant",
            Check::CauchyViaDual => "Cauchy kernel through the dual: ρ(T_η^n)ι_H = η^(n)",
            Check::DefectIdentity => "defect identity KK* + ΘΘ* = I, exact at truncation",
            Check::ThetaNorm => "characteristic operator is a contraction",
            Check::ThetaColumn => "closed form of the first column of Θ",
            Check::ThetaModule => "Θ intertwines creations and the left action",
            Check::LeftEvalAntihomomorphism => "left point evaluation reverses products",
            Check::LeftEvalGauge => "left point evaluation has vanishing gauge coefficient",
            Check::LeftEvalEigen => "Cauchy and Poisson columns are eigenvectors of X*",
            Check::CurvatureNumerator => "curvature numerator equals the Poisson trace sum",
            Check::CurvatureOperator => "curvature operator trace matches tr(K_m*K_m)/d^m",
            Check::Popescu => "weighted defect trace identity",
            Check::FundCalc => "left dimension and trace calculus",
        }
    }

    /// Absolute slack added to the certified bound (which is zero for exact identities).
    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::PowerOrders | Check::DefectMonotonicity | Check::CauchyBound | Check::CauchyGram => 1e-12,
            Check::ThetaColumn => 1e-12,
            Check::FourierMultiplicative | Check::LeftEvalAntihomomorphism => 1e-11,
            Check::Reproducing | Check::ThetaNorm | Check::DualityIsometry | Check::DualityCommutation => 1e-9,
            Check::Popescu | Check::FundCalc => 1e-9,
            Check::CurvatureOperator => 1e-8,
            _ => 1e-10,
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// A disc point at a truncation, with the polynomials and ball point the
/// checks draw on.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub label: String,
    pub eta: DiscPoint,
    pub truncation: usize,
    pub seed: u64,
    /// Drawn from the seed when empty.
    pub polynomials: Vec<FockPolynomial>,
    /// Drawn from the seed (norm 1/2) when absent.
    pub left_point: Option<CorrElement>,
    /// Argument `a` of the left point evaluation; a seeded non-self-adjoint element when absent.
    pub left_argument: Option<AlgebraElement>,
}

impl Fixture {
    pub fn new(label: impl Into<String>, eta: DiscPoint, truncation: usize, seed: u64) -> Self {
        Self {
            label: label.into(),
            eta,
            truncation,
            seed,
            polynomials: Vec::new(),
            left_point: None,
            left_argument: None,
        }
    }

    pub fn random(
        label: impl Into<String>,
        corr: &Correspondence,
        rep: &Representation,
        norm: f64,
        truncation: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(Self::new(label, DiscPoint::random(corr, rep, seed, norm)?, truncation, seed))
    }

    pub fn environment(&self) -> Environment {
        let corr = self.eta.corr();
        let rep = self.eta.representation();
        let fock_dim = TruncatedFock::induced(corr, rep, self.truncation).map(|f| f.dim()).unwrap_or(0);
        Environment {
            label: self.label.clone(),
            seed: self.seed,
            truncation: self.truncation,
            eta_norm: Some(self.eta.norm()),
            left_dimension: curvature::dim_left(corr).ok(),
            algebra: corr.algebra().block_sizes().to_vec(),
            representation: rep.multiplicities().to_vec(),
            dim_h: rep.dim(),
            fock_dim,
        }
    }

    fn polynomials(&self, max_degree: usize, count: usize, salt: u64) -> Vec<FockPolynomial> {
        if !self.polynomials.is_empty() {
            return self.polynomials.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt);
        (0..count).map(|_| FockPolynomial::random(self.eta.corr(), max_degree, &mut rng)).collect()
    }

    /// The declared left point, or a seeded one of norm 0.5.
    pub fn effective_left_point(&self) -> CorrElement {
        if let Some(xi) = &self.left_point {
            return xi.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_0001);
        let xi = CorrElement::random(self.eta.corr(), 1, &mut rng);
        let n = xi.norm();
        if n == 0.0 {
            xi
        } else {
            xi.scale(linalg::real(0.5 / n))
        }
    }

    pub fn effective_left_argument(&self) -> AlgebraElement {
        if let Some(a) = &self.left_argument {
            return a.clone();
        }
        random_algebra_element(self.eta.corr().algebra(), self.seed ^ 0x5eed_0002)
    }
}

/// A seeded element with independent complex Gaussian entries in every block.
pub fn random_algebra_element(algebra: &MultiMatrixAlgebra, seed: u64) -> AlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = algebra
        .block_sizes()
        .iter()
        .map(|&n| {
            linalg::CMatrix::from_fn(n, n, |_, _| {
                c64(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            })
        })
        .collect();
    AlgebraElement::new(algebra, blocks).expect("block sizes match")
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub tolerance_scale: f64,
    pub mutation: Mutation,
    pub overrides: BTreeMap<Check, f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tolerance_scale: 1.0, mutation: Mutation::None, overrides: BTreeMap::new() }
    }
}

impl RunOptions {
    pub fn tolerance(&self, check: Check) -> f64 {
        self.overrides.get(&check).copied().unwrap_or_else(|| check.default_tolerance()) * self.tolerance_scale
    }
}

type DualEntry = Rc<Result<(DualCorrespondence, DualityResiduals)>>;

/// Dual correspondences depend only on `(E, σ, N)`; fixtures that share
/// them can share one cache.
#[derive(Default)]
pub struct DualCache {
    entries: RefCell<HashMap<String, DualEntry>>,
}

impl DualCache {
    fn get(&self, corr: &Correspondence, rep: &Representation, n: usize) -> DualEntry {
        let key = format!("{:?}|{:?}|{:?}|{n}", corr.algebra().block_sizes(), corr.mult(), rep.multiplicities());
        if let Some(hit) = self.entries.borrow().get(&key) {
            return hit.clone();
        }
        let built = DualCorrespondence::new(corr, rep, n).and_then(|d| {
            let r = dual::duality_residuals(&d)?;
            Ok((d, r))
        });
        let entry = Rc::new(built);
        self.entries.borrow_mut().insert(key, entry.clone());
        entry
    }
}

/// Runs checks against one fixture, sharing expensive intermediate objects.
pub struct Runner<'a> {
    fixture: &'a Fixture,
    options: &'a RunOptions,
    duals: &'a DualCache,
    phi: OnceCell<Result<(PhiResiduals, usize)>>,
}

fn dense_cap(eta: &DiscPoint, requested: usize, extra_levels: usize) -> usize {
    let corr = eta.corr();
    let rep = eta.representation();
    let mut n = 0;
    while n < requested {
        match TruncatedFock::induced(corr, rep, n + 1 + extra_levels) {
            Ok(f) if f.dim() <= DENSE_BUDGET => n += 1,
            _ => break,
        }
    }
    n
}

fn is_precondition(err: &HardyError) -> bool {
    matches!(
        err,
        HardyError::NotStrictContraction { .. }
            | HardyError::MultiBlockUnsupported
            | HardyError::FaithfulnessRequired
            | HardyError::DLessThanOne { .. }
            | HardyError::NotInOpenBall { .. }
            | HardyError::HeadroomExceeded { .. }
            | HardyError::TruncationTooSmall { .. }
    )
}

impl<'a> Runner<'a> {
    pub fn with_cache(fixture: &'a Fixture, options: &'a RunOptions, duals: &'a DualCache) -> Self {
        Self { fixture, options, duals, phi: OnceCell::new() }
    }

    pub fn run(&self, check: Check) -> CheckRecord {
        match self.measure(check) {
            Ok(record) => record,
            Err(e) if is_precondition(&e) => CheckRecord::skipped(check.name(), check.anchor(), e.to_string()),
            Err(e) => CheckRecord::measured(check.name(), check.anchor(), f64::INFINITY, self.options.tolerance(check))
                .with_detail("error", e.to_string()),
        }
    }

    fn record(&self, check: Check, residual: f64, certified: f64) -> CheckRecord {
        CheckRecord::measured(check.name(), check.anchor(), residual, certified + self.options.tolerance(check))
    }

    fn dual(&self) -> DualEntry {
        let eta = &self.fixture.eta;
        let n = self.fixture.truncation.min(DUALITY_MAX_TRUNCATION).min(dense_cap(eta, self.fixture.truncation, 0));
        self.duals.get(eta.corr(), eta.representation(), n)
    }

    fn phi(&self) -> Result<(PhiResiduals, usize)> {
        self.phi
            .get_or_init(|| {
                let fx = self.fixture;
                let corr = fx.eta.corr();
                let mut cap = 0;
                while cap < fx.truncation && TruncatedFock::new(corr, cap + 1).dim() <= DENSE_BUDGET {
                    cap += 1;
                }
                let ctx = LeftEvalContext::new(&fx.effective_left_point(), cap)?;
                let polys = fx.polynomials(cap / 2, 2, 0x5eed_0006);
                let (x, z) = (&polys[0], polys.get(1).unwrap_or(&polys[0]));
                Ok((pointeval::phi_property_residuals(x, z, &ctx, &fx.effective_left_argument())?, cap))
            })
            .clone()
    }

    fn measure(&self, check: Check) -> Result<CheckRecord> {
        let fx = self.fixture;
        let eta = &fx.eta;
        let n = fx.truncation;
        let r = eta.norm();
        Ok(match check {
            Check::Telescoping => {
                let kernel = poisson::poisson_kernel_mutated(eta, n, self.options.mutation)?;
                self.record(check, poisson::telescoping_residual(eta, &kernel)?, 0.0)
            }
            Check::KernelIsometry => {
                let gram = poisson::poisson_kernel(eta, n)?.gram()?;
                let id = FanMap::identity(eta.corr(), eta.widths(), 0);
                let gap = linalg::residual_norm(&gram.sub(&id)?.to_dense());
                self.record(check, gap, r.powi(2 * (n as i32 + 1)))
            }
            Check::PowerOrders => self.record(check, eta.eta_powers_with_gap(n)?.1, 0.0),
            Check::DefectMonotonicity => self.record(check, poisson::defect_monotonicity(eta, n)?.max(0.0), 0.0),
            Check::CauchyBound => {
                let c = poisson::cauchy_kernel(eta, n)?.norm()?;
                self.record(check, c, 1.0 / (1.0 - r))
            }
            Check::Eigenvector => {
                let kernel = poisson::poisson_kernel(eta, n)?;
                self.record(check, poisson::eigenvector_residual(eta, &kernel)?, 0.0)
            }
            Check::Reproducing | Check::AdjointIntertwining => {
                let polys = fx.polynomials(n.min(3), 3, 0x5eed_0003);
                let mut worst: Option<(f64, f64, f64)> = None;
                let mut adjoint: f64 = 0.0;
                for x in polys.iter().filter(|x| x.degree() <= n) {
                    let res = poisson::reproducing_residuals(x, eta, n)?;
                    let certified = res.reproducing_bound - 1e-9;
                    let ratio = res.reproducing / (certified + 1e-9);
                    if worst.is_none_or(|w| ratio > w.0) {
                        worst = Some((ratio, res.reproducing, certified));
                    }
                    adjoint = adjoint.max(res.adjoint_intertwining);
                }
                let Some((_, residual, certified)) = worst else {
                    return Err(HardyError::TruncationTooSmall { level: polys[0].degree(), truncation: n });
                };
                if check == Check::Reproducing {
                    self.record(check, residual, certified)
                } else {
                    self.record(check, adjoint, 0.0)
                }
            }
            Check::FourierMultiplicative => {
                let polys = fx.polynomials(n.min(3), 2, 0x5eed_0004);
                let mut worst: f64 = 0.0;
                for x in &polys {
                    for z in &polys {
                        let prod = eta.fourier_eval(&x.multiply(z)?)?;
                        let split = eta.fourier_eval(x)? * eta.fourier_eval(z)?;
                        worst = worst.max(linalg::residual_norm(&(prod - split)));
                    }
                }
                self.record(check, worst, 0.0)
            }
            Check::CauchyGram => {
                let mut rng = ChaCha8Rng::seed_from_u64(fx.seed ^ 0x5eed_0005);
                let a = FanMap::random(eta.corr(), eta.widths(), 0, 0, &mut rng).to_dense();
                let (_, gap) = poisson::cauchy_gram(eta, eta, &a, n)?;
                self.record(check, gap, 0.0)
            }
            Check::DualityIsometry | Check::DualityCommutation => {
                let entry = self.dual();
                let (d, res) = entry.as_ref().as_ref().map_err(Clone::clone)?;
                let residual = if check == Check::DualityIsometry {
                    res.isometry
                } else {
                    res.commutation.max(res.left_action)
                };
                self.record(check, residual, 0.0)
                    .with_detail("truncation", d.truncation())
                    .with_detail("dual_dim", d.dim())
            }
            Check::CauchyViaDual => {
                eta.require_strict()?;
                let entry = self.dual();
                let (d, _) = entry.as_ref().as_ref().map_err(Clone::clone)?;
                let k = dual::cauchy_via_dual(eta, d)?;
                let residual = k.cauchy_residual.max(k.poisson_residual).max(k.coordinate_residual);
                self.record(check, residual, 0.0).with_detail("truncation", d.truncation())
            }
            Check::DefectIdentity => {
                eta.require_strict()?;
                let cap = charfun::defect_truncation_cap(eta, n);
                let id = charfun::defect_identity_residual(eta, cap, self.options.mutation)?;
                self.record(check, id.residual, 0.0)
                    .with_detail("truncation", id.truncation)
                    .with_detail("worst_block", vec![id.worst_block.0, id.worst_block.1])
            }
            Check::ThetaNorm => {
                let cap = charfun::defect_truncation_cap(eta, n).min(dense_cap(eta, n, 1));
                let theta = CharacteristicOperator::with_mutation(eta, cap, self.options.mutation)?;
                self.record(check, theta.norm()?, 1.0).with_detail("truncation", cap)
            }
            Check::ThetaColumn => {
                let cap = charfun::defect_truncation_cap(eta, n);
                let col = charfun::theta_zero_column(eta, cap)?;
                self.record(check, col.consistency, 0.0).with_detail("truncation", cap)
            }
            Check::ThetaModule => {
                let cap = dense_cap(eta, n, 1);
                let theta = CharacteristicOperator::with_mutation(eta, cap, self.options.mutation)?;
                let m = theta.module_residuals()?;
                self.record(check, m.creation.max(m.left_action), 0.0).with_detail("truncation", cap)
            }
            Check::LeftEvalAntihomomorphism | Check::LeftEvalGauge | Check::LeftEvalEigen => {
                let (res, cap) = self.phi()?;
                let record = match check {
                    Check::LeftEvalAntihomomorphism => self.record(check, res.antihomomorphism, 0.0),
                    Check::LeftEvalGauge => self.record(check, res.gauge, res.gauge_bound - 1e-10),
                    _ => self.record(check, res.eigen, 0.0),
                };
                record.with_detail("truncation", cap)
            }
            Check::CurvatureNumerator => {
                let ctx = CurvatureContext::new(eta, n)?;
                let k = curvature::kappa_estimate(&ctx)?;
                let scale = ctx.dim_sigma().max(1.0);
                self.record(check, k.numerator_gap.max(k.trace_swap_gap) / scale, 0.0)
                    .with_detail("ratios", k.ratios)
                    .with_detail("tail_ratios", k.tail_ratios)
                    .with_detail("kappa", k.kappa)
                    .with_detail("monotone", k.monotone)
                    .with_detail("d", ctx.d())
            }
            Check::CurvatureOperator => {
                let cap = dense_cap(eta, n, 0);
                let ctx = CurvatureContext::new(eta, cap)?;
                let v = curvature::curvature_operator(&ctx)?;
                let residual = (v.value - v.tail_ratio).abs().max(v.shift_residual);
                self.record(check, residual, 0.0)
                    .with_detail("value", v.value)
                    .with_detail("window", v.window)
                    .with_detail("tail_ratio", v.tail_ratio)
            }
            Check::Popescu => {
                let cap = dense_cap(eta, n, 0);
                let ctx = CurvatureContext::new(eta, cap)?;
                let y = curvature::random_commutant_positive(eta, cap, fx.seed ^ 0x5eed_0007)?;
                if cap == 0 {
                    return Err(HardyError::HeadroomExceeded { window: 0, truncation: 0 });
                }
                let worst = curvature::popescu_identity_residuals(&ctx, &y)?.into_iter().fold(0.0, f64::max);
                self.record(check, worst, 0.0).with_detail("truncation", cap)
            }
            Check::FundCalc => {
                let e = eta.corr();
                let alg = e.algebra();
                if alg.num_blocks() != 1 {
                    return Err(HardyError::MultiBlockUnsupported);
                }
                let f = Correspondence::new(alg, vec![vec![e.mult()[0][0] + 1]])?;
                let m = eta.representation().multiplicity(0);
                let res = curvature::fund_calc_residuals(e, &f, m, fx.seed)?;
                let residual = res.multiplicative.max(res.trace_swap).max(res.ampliation).max(res.dimension);
                self.record(check, residual, 0.0)
            }
        })
    }
}

/// Runs `checks` in order against a fixture.
pub fn run_fixture(fixture: &Fixture, checks: &[Check], options: &RunOptions) -> Report {
    run_fixture_with_cache(fixture, checks, options, &DualCache::default())
}

pub fn run_fixture_with_cache(fixture: &Fixture, checks: &[Check], options: &RunOptions, duals: &DualCache) -> Report {
    let start = Instant::now();
    let mut report = Report::new();
    report.environments.push(fixture.environment());
    let runner = Runner::with_cache(fixture, options, duals);
    for &check in checks {
        let t = Instant::now();
        let mut record = runner.run(check);
        record.name = format!("{}/{}", fixture.label, record.name);
        report.push(record, t.elapsed().as_secs_f64() * 1e3);
    }
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteLevel {
    Quick,
    Full,
}

/// Correspondence and representation families of the bundled suites.
pub fn fixture_families() -> Vec<(&'static str, Correspondence, Representation)> {
    let graph = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).expect("valid graph");
    let m2 = MultiMatrixAlgebra::full_matrix(2).expect("nonzero size");
    let m2_corr = Correspondence::new(&m2, vec![vec![2]]).expect("valid multiplicity");
    let rep = |c: &Correspondence, m: Vec<usize>| Representation::new(c.algebra(), m).expect("valid multiplicities");
    vec![
        ("free1", Correspondence::free(1), rep(&Correspondence::free(1), vec![1])),
        ("free2", Correspondence::free(2), rep(&Correspondence::free(2), vec![1])),
        ("free2_m2", Correspondence::free(2), rep(&Correspondence::free(2), vec![2])),
        ("free3", Correspondence::free(3), rep(&Correspondence::free(3), vec![1])),
        ("graph", graph.clone(), rep(&graph, vec![1, 1])),
        ("graph_m21", graph.clone(), rep(&graph, vec![2, 1])),
        ("matrix2", m2_corr.clone(), rep(&m2_corr, vec![2])),
    ]
}

pub const SUITE_NORMS: [f64; 4] = [0.0, 0.3, 0.8, 1.0];

impl SuiteLevel {
    pub fn default_truncation(self) -> usize {
        match self {
            SuiteLevel::Quick => 4,
            SuiteLevel::Full => 8,
        }
    }
}

/// Bundled fixtures: every family at every norm in [`SUITE_NORMS`], at
/// truncation 4 (quick) or 8 (full) unless overridden.
pub fn suite_fixtures(level: SuiteLevel, seed: u64, truncation: Option<usize>) -> Result<Vec<Fixture>> {
    let n = truncation.unwrap_or(level.default_truncation());
    let mut out = Vec::new();
    for (i, (name, corr, rep)) in fixture_families().into_iter().enumerate() {
        for (j, &norm) in SUITE_NORMS.iter().enumerate() {
            let s = seed.wrapping_add((i * SUITE_NORMS.len() + j) as u64);
            out.push(Fixture::random(format!("{name}@{norm}"), &corr, &rep, norm, n, s)?);
        }
    }
    Ok(out)
}

/// The checks the bundled suites run on each fixture.
pub fn suite_checks(level: SuiteLevel) -> Vec<Check> {
    let mut checks = Check::ALL.to_vec();
    if level == SuiteLevel::Quick {
        checks.retain(|c| !matches!(c, Check::DualityIsometry | Check::DualityCommutation | Check::CauchyViaDual));
    }
    checks
}

/// Runs the bundled suite.
pub fn verify_suite(level: SuiteLevel, seed: u64, truncation: Option<usize>, options: &RunOptions) -> Result<Report> {
    let start = Instant::now();
    let checks = suite_checks(level);
    let mut report = Report::new();
    let duals = DualCache::default();
    for fixture in suite_fixtures(level, seed, truncation)? {
        report.extend(run_fixture_with_cache(&fixture, &checks, options, &duals));
    }
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn names_round_trip() {
        for c in Check::ALL {
            assert_eq!(Check::from_name(c.name()), Some(c));
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.name()));
        }
    }

    #[test]
    fn scalar_fixture_passes_everything_applicable() {
        let corr = Correspondence::free(1);
        let rep = Representation::standard(corr.algebra());
        let eta = DiscPoint::new(&corr, &rep, linalg::CMatrix::from_element(1, 1, linalg::real(0.5))).unwrap();
        let fx = Fixture::new("scalar", eta, 4, 1);
        let report = run_fixture(&fx, &Check::ALL, &RunOptions::default());
        for c in &report.checks {
            assert!(c.status != Status::Fail, "{c:?}");
        }
    }

    #[test]
    fn mutations_are_caught() {
        let corr = Correspondence::free(2);
        let rep = Representation::standard(corr.algebra());
        let fx = Fixture::random("free2", &corr, &rep, 0.8, 3, 11).unwrap();
        let flip = RunOptions { mutation: Mutation::FlipThetaDiagonal, ..RunOptions::default() };
        let drop = RunOptions { mutation: Mutation::DropDefectInKernel, ..RunOptions::default() };
        let r = run_fixture(&fx, &[Check::DefectIdentity, Check::Telescoping], &flip);
        assert_eq!(r.checks[0].status, Status::Fail);
        assert_eq!(r.checks[1].status, Status::Pass);
        let r = run_fixture(&fx, &[Check::DefectIdentity, Check::Telescoping], &drop);
        assert_eq!(r.checks[0].status, Status::Pass);
        assert_eq!(r.checks[1].status, Status::Fail);
    }

    #[test]
    fn closed_disc_points_skip_strict_checks() {
        let corr = Correspondence::free(2);
        let rep = Representation::standard(corr.algebra());
        let fx = Fixture::random("edge", &corr, &rep, 1.0, 3, 5).unwrap();
        let r = run_fixture(&fx, &[Check::Telescoping, Check::Reproducing, Check::Eigenvector], &RunOptions::default());
        let s: Vec<_> = r.checks.iter().map(|c| c.status).collect();
        assert_eq!(s, vec![Status::Pass, Status::Skipped, Status::Pass]);
    }
}
