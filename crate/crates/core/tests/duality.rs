mod common;

use hardy_core::algebra::Representation;
use hardy_core::corr::Correspondence;
use hardy_core::dual::{self, DualCorrespondence};
use hardy_core::fock::TruncatedFock;
use hardy_core::poisson::DiscPoint;
use hardy_core::HardyError;

/// `dim E^σ = Σ_edges m_range · m_source`.
fn expected_dim(corr: &Correspondence, rep: &Representation) -> usize {
    corr.edges().iter().map(|e| rep.multiplicity(e.range) * rep.multiplicity(e.source)).sum()
}

#[test]
fn dual_dimensions_and_levels() {
    for fam in 0..6 {
        let (corr, rep) = common::family(fam);
        let d = DualCorrespondence::new(&corr, &rep, 2).unwrap();
        assert_eq!(d.dim(), expected_dim(&corr, &rep), "family {fam}");
        let fock = TruncatedFock::induced(&corr, &rep, 2).unwrap();
        for k in 0..=2 {
            assert_eq!(d.word_dim(k), fock.level_dim(k), "family {fam} level {k}");
        }
        let r = dual::duality_residuals(&d).unwrap();
        assert!(r.isometry < 1e-10 && r.commutation < 1e-10 && r.left_action < 1e-10, "{r:?}");
    }
}

#[test]
fn cauchy_kernel_through_the_dual() {
    for fam in 0..6 {
        let (corr, rep) = common::family(fam);
        let d = DualCorrespondence::new(&corr, &rep, 3).unwrap();
        for (i, &norm) in [0.0, 0.4, 0.9].iter().enumerate() {
            let eta = DiscPoint::random(&corr, &rep, 40 + i as u64, norm).unwrap();
            let k = dual::cauchy_via_dual(&eta, &d).unwrap();
            assert!(k.cauchy_residual < 1e-10 && k.poisson_residual < 1e-10 && k.coordinate_residual < 1e-10);
        }
    }
}

#[test]
fn unfaithful_representations_have_no_level_unitary() {
    let corr = Correspondence::graph(vec![vec![1, 1], vec![1, 0]]).unwrap();
    let rep = Representation::new(corr.algebra(), vec![1, 0]).unwrap();
    let d = DualCorrespondence::new(&corr, &rep, 2).unwrap();
    assert_eq!(d.dim(), 1);
    assert!(matches!(d.level_unitary(1), Err(HardyError::FaithfulnessRequired)));
}
