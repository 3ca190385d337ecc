//! Characteristic operator of a graph point and the defect identity
//! `KK* + ΘΘ* = I`, exact at every truncation.

use hardy_core::algebra::Representation;
use hardy_core::charfun::{self, CharacteristicOperator};
use hardy_core::corr::Correspondence;
use hardy_core::mutation::Mutation;
use hardy_core::poisson::DiscPoint;

fn main() -> hardy_core::Result<()> {
    let corr = Correspondence::graph(vec![vec![1, 1], vec![1, 0]])?;
    let rep = Representation::new(corr.algebra(), vec![2, 1])?;
    let eta = DiscPoint::random(&corr, &rep, 3, 0.8)?;

    for n in 1..=4 {
        let ok = charfun::defect_identity_residual(&eta, n, Mutation::None)?;
        let broken = charfun::defect_identity_residual(&eta, n, Mutation::FlipThetaDiagonal)?;
        println!("N = {n}: residual {:.2e}, with flipped diagonal {:.3}", ok.residual, broken.residual);
    }

    let theta = CharacteristicOperator::new(&eta, 3)?;
    let m = theta.module_residuals()?;
    println!("‖Θ‖ = {:.6}", theta.norm()?);
    println!("module residuals: creation {:.2e}, left action {:.2e}", m.creation, m.left_action);
    println!("first column consistency {:.2e}", charfun::check_theta_consistency(&eta, 3)?);
    Ok(())
}
