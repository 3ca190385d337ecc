mod common;

use hardy_core::corr::CorrElement;
use hardy_core::fock::{FockPolynomial, TruncatedFock};
use hardy_core::linalg;
use hardy_core::suite::random_algebra_element;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_products_are_positive_and_module_linear(fam in 0usize..6, seed in any::<u64>(), level in 0usize..4) {
        let (corr, _) = common::family(fam);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = CorrElement::random(&corr, level, &mut rng);
        let zeta = CorrElement::random(&corr, level, &mut rng);
        let b = random_algebra_element(corr.algebra(), seed ^ 7);
        let gram = xi.inner_product(&xi).unwrap();
        for block in gram.blocks() {
            prop_assert!(linalg::hermitian_eigen(block).0[0] > -1e-12);
        }
        // ⟨ξ, ζb⟩ = ⟨ξ, ζ⟩b and ⟨ζ, ξ⟩ = ⟨ξ, ζ⟩*.
        let lhs = xi.inner_product(&zeta.right_action(&b).unwrap()).unwrap();
        let rhs = xi.inner_product(&zeta).unwrap().mul(&b).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-11);
        let swap = zeta.inner_product(&xi).unwrap().sub(&xi.inner_product(&zeta).unwrap().adjoint()).unwrap();
        prop_assert!(swap.max_abs() < 1e-12);
    }

    #[test]
    fn tensor_products_associate_and_balance(fam in 0usize..6, seed in any::<u64>()) {
        let (corr, _) = common::family(fam);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (
            CorrElement::random(&corr, 1, &mut rng),
            CorrElement::random(&corr, 2, &mut rng),
            CorrElement::random(&corr, 1, &mut rng),
        );
        let left = x.tensor(&y).unwrap().tensor(&z).unwrap();
        let right = x.tensor(&y.tensor(&z).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().norm() < 1e-11);
        // ξa ⊗ ζ = ξ ⊗ φ(a)ζ.
        let a = random_algebra_element(corr.algebra(), seed ^ 9);
        let lhs = x.right_action(&a).unwrap().tensor(&z).unwrap();
        let rhs = x.tensor(&z.left_action(&a).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() < 1e-11);
        // ⟨ξ ⊗ ζ, ξ ⊗ ζ⟩ = ⟨ζ, φ(⟨ξ, ξ⟩)ζ⟩.
        let xz = x.tensor(&z).unwrap();
        let inner = z.inner_product(&z.left_action(&x.inner_product(&x).unwrap()).unwrap()).unwrap();
        prop_assert!(xz.inner_product(&xz).unwrap().sub(&inner).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn creation_adjoint_relation(fam in 0usize..6, seed in any::<u64>()) {
        let (corr, _) = common::family(fam);
        let fock = TruncatedFock::new(&corr, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = CorrElement::random(&corr, 1, &mut rng);
        let zeta = CorrElement::random(&corr, 1, &mut rng);
        let t_xi = fock.creation_operator(&xi).unwrap();
        let t_zeta = fock.creation_operator(&zeta).unwrap();
        let phi = fock.phi_inf(&xi.inner_product(&zeta).unwrap()).unwrap();
        // T_ξ*T_ζ = φ_∞(⟨ξ, ζ⟩) below the top level.
        let rows = fock.level_range(2).end;
        let diff = (t_xi.adjoint() * t_zeta - phi).view((0, 0), (rows, rows)).into_owned();
        prop_assert!(linalg::max_abs(&diff) < 1e-11);
        // φ_∞(a)T_ξ = T_{φ(a)ξ}.
        let a = random_algebra_element(corr.algebra(), seed ^ 11);
        let lhs = fock.phi_inf(&a).unwrap() * &t_xi;
        let rhs = fock.creation_operator(&xi.left_action(&a).unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(lhs - rhs)) < 1e-11);
    }

    #[test]
    fn polynomial_products_associate_and_materialize(fam in 0usize..6, seed in any::<u64>()) {
        let (corr, _) = common::family(fam);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = FockPolynomial::random(&corr, 1, &mut rng);
        let y = FockPolynomial::random(&corr, 2, &mut rng);
        let z = FockPolynomial::random(&corr, 1, &mut rng);
        let l = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        for k in 0..=l.degree() {
            prop_assert!(l.coefficient(k).sub(&r.coefficient(k)).unwrap().norm() < 1e-10);
        }
        let fock = TruncatedFock::new(&corr, 4);
        let (mx, _) = x.materialize(&fock).unwrap();
        let (my, _) = y.materialize(&fock).unwrap();
        let (mxy, _) = x.multiply(&y).unwrap().materialize(&fock).unwrap();
        prop_assert!(linalg::max_abs(&(mxy - mx * my)) < 1e-10);
    }
}

#[test]
fn unit_polynomial_materializes_to_identity() {
    let (corr, _) = common::family(4);
    let fock = TruncatedFock::new(&corr, 3);
    let (m, truncated) = FockPolynomial::unit(&corr).materialize(&fock).unwrap();
    assert!(!truncated);
    assert!(linalg::max_abs(&(m - linalg::identity(fock.dim()))) < 1e-15);
}
