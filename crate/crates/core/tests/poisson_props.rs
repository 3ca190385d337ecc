mod common;

use hardy_core::fock::{FanMap, FockPolynomial};
use hardy_core::linalg::{self, c64, real};
use hardy_core::poisson;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn telescoping_holds_on_the_closed_disc(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..=1.0, n in 0usize..6) {
        let eta = common::point(fam, seed, norm);
        let k = poisson::poisson_kernel(&eta, n).unwrap();
        prop_assert!(poisson::telescoping_residual(&eta, &k).unwrap() < 1e-12);
    }

    #[test]
    fn kernel_is_a_contraction_converging_to_an_isometry(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..0.95, n in 0usize..6) {
        let eta = common::point(fam, seed, norm);
        let gram = poisson::poisson_kernel(&eta, n).unwrap().gram().unwrap();
        let id = FanMap::identity(eta.corr(), eta.widths(), 0);
        let defect = id.sub(&gram).unwrap().to_dense();
        let (values, _) = linalg::hermitian_eigen(&defect);
        prop_assert!(values[0] > -1e-12);
        prop_assert!(*values.last().unwrap() <= norm.powi(2 * (n as i32 + 1)) + 1e-12);
    }

    #[test]
    fn recursions_agree(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..=1.0) {
        let eta = common::point(fam, seed, norm);
        let (_, gap) = eta.eta_powers_with_gap(5).unwrap();
        prop_assert!(gap < 1e-13);
    }

    #[test]
    fn defects_decrease(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..=1.0) {
        let eta = common::point(fam, seed, norm);
        prop_assert!(poisson::defect_monotonicity(&eta, 5).unwrap() < 1e-13);
    }

    #[test]
    fn fourier_transform_is_a_unital_homomorphism(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..=1.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let eta = common::point(fam, seed, norm);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let x = FockPolynomial::random(eta.corr(), 2, &mut rng);
        let z = FockPolynomial::random(eta.corr(), 2, &mut rng);
        let (hx, hz) = (eta.fourier_eval(&x).unwrap(), eta.fourier_eval(&z).unwrap());
        let prod = eta.fourier_eval(&x.multiply(&z).unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(prod - &hx * &hz)) < 1e-11);
        let c = c64(re, im);
        let lin = eta.fourier_eval(&x.add(&z.scale(c)).unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(lin - (&hx + &hz * c))) < 1e-12);
        let one = eta.fourier_eval(&FockPolynomial::unit(eta.corr())).unwrap();
        prop_assert!(linalg::max_abs(&(one - linalg::identity(eta.representation().dim()))) < 1e-15);
    }

    #[test]
    fn reproducing_within_certified_tail(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..0.9, deg in 0usize..4) {
        let eta = common::point(fam, seed, norm);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let x = FockPolynomial::random(eta.corr(), deg, &mut rng);
        let r = poisson::reproducing_residuals(&x, &eta, 5).unwrap();
        prop_assert!(r.reproducing <= r.reproducing_bound);
        prop_assert!(r.eigenvector < 1e-12);
        prop_assert!(r.adjoint_intertwining < 1e-11);
    }

    #[test]
    fn cauchy_gram_is_a_neumann_series(fam in 0usize..6, seed in any::<u64>(), norm in 0.0f64..0.95) {
        let eta = common::point(fam, seed, norm);
        let zeta = common::point(fam, seed.wrapping_add(1), norm);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let a = FanMap::random(eta.corr(), eta.widths(), 0, 0, &mut rng).to_dense();
        let (_, gap) = poisson::cauchy_gram(&eta, &zeta, &a, 5).unwrap();
        prop_assert!(gap < 1e-12);
    }
}

/// For `η = r` on `ℂ`, `K_N = √(1 − r²)(1, r, r², …, r^N)`.
#[test]
fn scalar_kernel_closed_form() {
    let r = 0.6f64;
    let eta = common::scalar_point(r);
    let k = poisson::poisson_kernel(&eta, 7).unwrap().to_dense();
    let ds = (1.0 - r * r).sqrt();
    for i in 0..=7 {
        assert!((k[(i, 0)] - real(ds * r.powi(i as i32))).norm() < 1e-15);
    }
    let c = poisson::cauchy_kernel(&eta, 50).unwrap().norm().unwrap();
    assert!((c - 1.0 / (1.0 - r * r).sqrt()).abs() < 1e-9);
}

#[test]
fn points_outside_the_closed_disc_are_rejected() {
    let (c, r) = common::family(1);
    assert!(matches!(
        hardy_core::poisson::DiscPoint::random(&c, &r, 1, 1.2),
        Err(hardy_core::HardyError::OutsideClosedDisc { .. })
    ));
}
