//! Laplace coefficients at the 4:2:1 ratio and the resonant coefficients of
//! both models.

use reslab::laplace::*;
use reslab::ModelKind;

fn main() -> anyhow::Result<()> {
    let alpha = resonant_alpha();
    println!("alpha = 4^(-1/3) = {alpha:.12}");
    for s in [0.5, 1.5] {
        for k in 0..4 {
            let series = laplace_b(s, k, alpha)?;
            let quad = laplace_b_quadrature(s, k, alpha, 4096);
            println!("b_{s}^({k}) = {series:.15}  (quadrature {:.1e} off)", (series - quad).abs());
        }
    }
    let a = coeff_a(alpha)?;
    let fixed = coeff_b(alpha, ModelKind::FixedCenter)?;
    let full = coeff_b(alpha, ModelKind::FullProblem)?;
    println!("2A = {:.6}", 2.0 * a);
    println!("2B fixed centre = {:.6}, full problem = {:.6}", 2.0 * fixed, 2.0 * full);
    println!("B difference = {:.12} (cube root of 2 = {:.12})", fixed - full, 2f64.cbrt());
    Ok(())
}
