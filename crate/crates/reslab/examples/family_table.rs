//! The sixteen collinear families with their stability verdicts.
//!
//! Usage: `family_table [mu] [e2]`

use reslab::families::{family_table, qbar};
use reslab::{MassConfig, ModelKind};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-5);
    let e2: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.01);
    let mc = MassConfig::galilean(ModelKind::FixedCenter).with_mu(mu);
    println!("Qbar = {:+.4}", qbar(&mc)?);
    println!("{:<7} {:>4} {:<13} {:>10} {:>10} {:>10}", "family", "det", "verdict", "e1", "e2", "e3");
    for row in family_table(&mc, e2, 1.0, mu)? {
        match (&row.equilibrium, &row.report) {
            (Some(eq), Some(rep)) => println!(
                "{:<7} {:>+4} {:<13} {:>10.6} {:>10.6} {:>10.6}",
                row.label.to_string(),
                rep.hessian_det_sign,
                format!("{:?}", rep.verdict),
                eq.e[0],
                eq.e[1],
                eq.e[2]
            ),
            _ => println!("{:<7} {:>4} Infeasible", row.label.to_string(), ""),
        }
    }
    Ok(())
}
