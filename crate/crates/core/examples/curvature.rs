//! Curvature ratios and the curvature operator, compared across a scalar
//! point, a free point and a compressed shift.

use hardy_core::algebra::Representation;
use hardy_core::corr::Correspondence;
use hardy_core::curvature::{self, CurvatureContext};
use hardy_core::poisson::DiscPoint;

fn report(label: &str, eta: &DiscPoint, n: usize) -> hardy_core::Result<()> {
    let ctx = CurvatureContext::new(eta, n)?;
    let k = curvature::kappa_estimate(&ctx)?;
    let op = curvature::curvature_operator(&ctx)?;
    let ratios: Vec<String> = k.ratios.iter().map(|r| format!("{r:.4}")).collect();
    println!("{label} (d = {}): r_N = [{}]", ctx.d(), ratios.join(", "));
    println!("    operator {:.6}, numerator gap {:.1e}, monotone {}", op.value, k.numerator_gap, k.monotone);
    let y = curvature::random_commutant_positive(eta, n, 1)?;
    let worst = curvature::popescu_identity_residuals(&ctx, &y)?.into_iter().fold(0.0, f64::max);
    println!("    weighted defect trace identity {worst:.1e}");
    Ok(())
}

fn main() -> hardy_core::Result<()> {
    let one = Correspondence::free(1);
    let rep = Representation::standard(one.algebra());
    let scalar = DiscPoint::new(&one, &rep, hardy_core::linalg::CMatrix::from_element(1, 1, hardy_core::linalg::real(0.9)))?;
    report("scalar 0.9", &scalar, 6)?;

    let two = Correspondence::free(2);
    let rep2 = Representation::new(two.algebra(), vec![2])?;
    report("free, ‖η‖ = 0.8", &DiscPoint::random(&two, &rep2, 2, 0.8)?, 6)?;
    report("compressed shift", &curvature::compressed_shift_point(2, 3)?, 6)?;

    println!("(1 − d)·tr at d = 0.5, tr = 4: {}", curvature::small_d_formula(0.5, 4.0)?);
    Ok(())
}
