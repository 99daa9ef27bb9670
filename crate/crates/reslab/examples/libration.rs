//! Integrate a small displacement of the continued stable orbit and report
//! libration of the critical arguments and conservation.
//!
//! Usage: `libration [periods] [dbar]`

use reslab::continuation::*;
use reslab::families::{solve_equilibrium, FamilyLabel};
use reslab::frequency::libration_report;
use reslab::integrator::*;
use reslab::{MassConfig, ModelKind};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let periods: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let dbar: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-3);
    let mc = MassConfig::galilean(ModelKind::FixedCenter);
    let label = FamilyLabel::stable();
    let eq = solve_equilibrium(label, &mc, 0.01, 1.0)?.feasible().ok_or_else(|| anyhow::anyhow!("stable family infeasible"))?;
    let orbit = newton_continue(&PeriodicOrbitSeed::from_equilibrium(&eq)?, &ShootingOptions::default())?;
    let x0 = displaced_state(&orbit, dbar)?;
    let traj = integrate(&x0, &mc, Scheme::WisdomHolman, orbit.period / 128.0, 128 * periods, 128)?;
    let cons = conservation_report(&traj);
    let lib = libration_report(&traj, label)?;
    for a in &lib.arguments {
        println!("{:<8} centre {:+.4} mean {:+.6} max excursion {:.3e} {:?}", a.name, a.center, a.mean, a.max_excursion, a.motion);
    }
    println!("mean-motion ratio deviation {:.2e}", lib.ratio_deviation);
    println!("energy: max {:.2e}, trend {:.2e} per period", cons.max_rel_energy, cons.energy_trend);
    println!("angular momentum: max {:.2e}", cons.max_rel_momentum);
    Ok(())
}
