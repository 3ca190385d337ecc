//! Poisson kernel of a random point for two free variables: the telescoping
//! identity, the joint eigenvector relation and the reproducing formula.

use hardy_core::algebra::Representation;
use hardy_core::corr::Correspondence;
use hardy_core::fock::FockPolynomial;
use hardy_core::poisson::{self, DiscPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardy_core::Result<()> {
    let corr = Correspondence::free(2);
    let rep = Representation::new(corr.algebra(), vec![2])?;
    let eta = DiscPoint::random(&corr, &rep, 5, 0.7)?;
    println!("‖η‖ = {:.3}", eta.norm());

    for n in [2, 4, 8] {
        let k = poisson::poisson_kernel(&eta, n)?;
        println!(
            "N = {n}: telescoping {:.2e}, eigenvector {:.2e}, ‖K_N‖ = {:.6}",
            poisson::telescoping_residual(&eta, &k)?,
            poisson::eigenvector_residual(&eta, &k)?,
            k.norm()?
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = FockPolynomial::random(&corr, 2, &mut rng);
    println!("X̂(η*) =\n{}", eta.fourier_eval(&x)?);
    for n in [2, 4, 8, 12] {
        let r = poisson::reproducing_residuals(&x, &eta, n)?;
        println!("N = {n:>2}: ‖X̂(η*) − K*(X⊗I)K‖ = {:.3e} (bound {:.3e})", r.reproducing, r.reproducing_bound);
    }
    Ok(())
}
