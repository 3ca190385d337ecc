//! Point evaluation at a point of the open unit ball of `E` for a matrix
//! coefficient algebra, where the adjoint of `a` matters.

use hardy_core::algebra::{AlgebraElement, MultiMatrixAlgebra};
use hardy_core::corr::{CorrElement, Correspondence};
use hardy_core::fock::FockPolynomial;
use hardy_core::linalg::{c64, CMatrix};
use hardy_core::pointeval::{self, LeftEvalContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hardy_core::Result<()> {
    let m2 = MultiMatrixAlgebra::full_matrix(2)?;
    let corr = Correspondence::new(&m2, vec![vec![2]])?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xi = CorrElement::random(&corr, 1, &mut rng);
    let xi = xi.scale(c64(0.5 / xi.norm(), 0.0));
    let ctx = LeftEvalContext::new(&xi, 6)?;
    println!("‖ξ‖ = {:.3}, Cauchy bound excess {:.2e}", xi.norm(), ctx.cauchy_bound_excess()?);

    let x = FockPolynomial::random(&corr, 2, &mut rng);
    let z = FockPolynomial::random(&corr, 1, &mut rng);
    let a = AlgebraElement::new(&m2, vec![CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 2.0), c64(0.0, 0.0), c64(0.0, 0.0)])])?;

    let v = pointeval::left_point_eval(&x, &ctx, &a)?;
    println!("Φ_X(a) =\n{}", v.blocks()[0]);

    let r = pointeval::phi_property_residuals(&x, &z, &ctx, &a)?;
    println!(
        "antihomomorphism {:.2e}, gauge {:.2e} (bound {:.2e}), eigen {:.2e}",
        r.antihomomorphism, r.gauge, r.gauge_bound, r.eigen
    );
    Ok(())
}
