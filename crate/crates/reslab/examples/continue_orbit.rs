//! Continue the stable and one unstable family to periodic orbits of the
//! full three-satellite flow and print their Floquet multipliers.

use reslab::continuation::*;
use reslab::families::{solve_equilibrium, FamilyLabel};
use reslab::{MassConfig, ModelKind};

fn main() -> anyhow::Result<()> {
    let mc = MassConfig::galilean(ModelKind::FixedCenter);
    for label in ["--++", "++++"] {
        let label: FamilyLabel = label.parse()?;
        let eq = solve_equilibrium(label, &mc, 0.01, 1.0)?.feasible().ok_or_else(|| anyhow::anyhow!("{label} infeasible"))?;
        let orbit = newton_continue(&PeriodicOrbitSeed::from_equilibrium(&eq)?, &ShootingOptions::default())?;
        println!("{label}: period {:.9}, residual {:.2e} after {} iterations", orbit.period, orbit.residual, orbit.iterations);
        for m in &orbit.multipliers {
            println!("  |m| = {:.12}  arg = {:+.6e}", m.norm(), m.arg());
        }
        println!("  reciprocal-pair defect {:.1e}, det {:.12}", reciprocal_defect(&orbit.multipliers), orbit.determinant());
    }
    Ok(())
}
