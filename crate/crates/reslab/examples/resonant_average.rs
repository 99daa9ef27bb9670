//! Closed-form resonant Hamiltonian against a brute-force average of the
//! perturbation over the fast angle.

use reslab::hamiltonian::{oracle_comparison, AVERAGE_NODES};
use reslab::{MassConfig, ModelKind};

fn main() -> anyhow::Result<()> {
    for model in [ModelKind::FixedCenter, ModelKind::FullProblem] {
        let mc = MassConfig::galilean(model);
        println!("{} model", model.as_str());
        let mut prev: Option<f64> = None;
        for e in [0.02, 0.01, 0.005] {
            let r = oracle_comparison(&mc, e, AVERAGE_NODES)?;
            let ratio = prev.map(|p| format!("{:.3}", p / r.abs_err)).unwrap_or_else(|| "-".into());
            println!("  e={e:<6} closed {:+.10e} average {:+.10e} |diff| {:.3e} ratio {ratio}", r.closed_form, r.oracle, r.abs_err);
            prev = Some(r.abs_err);
        }
    }
    Ok(())
}
