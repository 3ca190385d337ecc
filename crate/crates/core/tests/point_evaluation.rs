use hardy_core::algebra::{AlgebraElement, MultiMatrixAlgebra};
use hardy_core::corr::{CorrElement, Correspondence};
use hardy_core::fock::FockPolynomial;
use hardy_core::linalg::{self, c64, real};
use hardy_core::pointeval::{self, LeftEvalContext};
use hardy_core::suite::random_algebra_element;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn m2() -> Correspondence {
    Correspondence::new(&MultiMatrixAlgebra::full_matrix(2).unwrap(), vec![vec![2]]).unwrap()
}

fn ball_point(corr: &Correspondence, seed: u64, r: f64) -> CorrElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = CorrElement::random(corr, 1, &mut rng);
    xi.scale(real(r / xi.norm()))
}

/// With a non-self-adjoint `a`, the Cauchy column satisfies
/// `X*φ_∞(a*)C = φ_∞(Φ(a)*)C`, while `X*φ_∞(a)C` differs.
#[test]
fn eigen_relation_needs_the_adjoint_of_a() {
    let corr = m2();
    let alg = corr.algebra().clone();
    let xi = ball_point(&corr, 3, 0.6);
    let ctx = LeftEvalContext::new(&xi, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = FockPolynomial::random(&corr, 2, &mut rng);
    let a = AlgebraElement::matrix_unit(&alg, 0, 0, 1).scale(c64(1.0, 2.0));
    let phi = pointeval::left_point_eval(&x, &ctx, &a).unwrap();
    let fock = ctx.fock();
    let rows = fock.level_range(5 - x.degree()).end;
    let rhs = fock.apply_phi(&phi.adjoint(), ctx.cauchy()).unwrap();
    let good = x.apply_adjoint(fock, &fock.apply_phi(&a.adjoint(), ctx.cauchy()).unwrap()).unwrap() - &rhs;
    let bad = x.apply_adjoint(fock, &fock.apply_phi(&a, ctx.cauchy()).unwrap()).unwrap() - &rhs;
    assert!(linalg::max_abs(&good.rows(0, rows).into_owned()) < 1e-12);
    assert!(linalg::max_abs(&bad.rows(0, rows).into_owned()) > 1e-3);
}

/// `Φ_X^ξ(a) = Σ_k ⟨ξ^{⊗k}, φ_k(a)ξ_k⟩` computed directly from tensor powers.
#[test]
fn evaluation_matches_explicit_inner_products() {
    let corr = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap();
    let xi = ball_point(&corr, 8, 0.4);
    let ctx = LeftEvalContext::new(&xi, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = FockPolynomial::random(&corr, 3, &mut rng);
    let a = random_algebra_element(corr.algebra(), 10);
    let mut oracle = AlgebraElement::zero(corr.algebra());
    let mut power = CorrElement::from_algebra(&corr, &AlgebraElement::identity(corr.algebra())).unwrap();
    for k in 0..=3 {
        oracle = oracle.add(&power.inner_product(&x.coefficient(k).left_action(&a).unwrap()).unwrap()).unwrap();
        power = power.tensor(&xi).unwrap();
    }
    let got = pointeval::left_point_eval(&x, &ctx, &a).unwrap();
    assert!(got.sub(&oracle).unwrap().max_abs() < 1e-12);
}

#[test]
fn cauchy_column_respects_its_norm_bound() {
    let corr = Correspondence::free(3);
    let ctx = LeftEvalContext::new(&ball_point(&corr, 1, 0.9), 6).unwrap();
    assert!(ctx.cauchy_bound_excess().unwrap() <= 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evaluation_properties(seed in any::<u64>(), r in 0.0f64..0.95, which in 0usize..3) {
        let corr = match which {
            0 => Correspondence::free(2),
            1 => Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap(),
            _ => m2(),
        };
        let xi = ball_point(&corr, seed, r);
        let ctx = LeftEvalContext::new(&xi, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let x = FockPolynomial::random(&corr, 2, &mut rng);
        let z = FockPolynomial::random(&corr, 2, &mut rng);
        let a = random_algebra_element(corr.algebra(), seed ^ 6);
        let res = pointeval::phi_property_residuals(&x, &z, &ctx, &a).unwrap();
        prop_assert!(res.antihomomorphism < 1e-11, "{res:?}");
        prop_assert!(res.eigen < 1e-10, "{res:?}");
        prop_assert!(res.gauge <= res.gauge_bound, "{res:?}");
        // Linear in a.
        let b = random_algebra_element(corr.algebra(), seed ^ 7);
        let lhs = pointeval::left_point_eval(&x, &ctx, &a.add(&b).unwrap()).unwrap();
        let rhs = pointeval::left_point_eval(&x, &ctx, &a).unwrap()
            .add(&pointeval::left_point_eval(&x, &ctx, &b).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-11);
    }
}
