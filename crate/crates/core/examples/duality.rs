//! The dual correspondence of a representation, the Fourier unitary and the
//! Cauchy kernel seen through it.

use hardy_core::algebra::{MultiMatrixAlgebra, Representation};
use hardy_core::corr::Correspondence;
use hardy_core::dual::{self, DualCorrespondence};
use hardy_core::poisson::DiscPoint;

fn main() -> hardy_core::Result<()> {
    let m2 = MultiMatrixAlgebra::full_matrix(2)?;
    let corr = Correspondence::new(&m2, vec![vec![2]])?;
    let rep = Representation::new(corr.algebra(), vec![2])?;
    let d = DualCorrespondence::new(&corr, &rep, 3)?;
    println!("dim E^σ = {}, basis residual {:.2e}", d.dim(), d.basis_residual());
    for k in 0..=3 {
        println!("level {k}: {} words", d.word_dim(k));
    }

    let r = dual::duality_residuals(&d)?;
    println!("isometry {:.2e}, commutation {:.2e}, left action {:.2e}", r.isometry, r.commutation, r.left_action);

    let eta = DiscPoint::random(&corr, &rep, 17, 0.6)?;
    let k = dual::cauchy_via_dual(&eta, &d)?;
    println!(
        "Cauchy through U: {:.2e}, Poisson through U: {:.2e}, coordinates {:.2e}",
        k.cauchy_residual, k.poisson_residual, k.coordinate_residual
    );
    Ok(())
}
