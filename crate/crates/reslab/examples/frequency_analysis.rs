//! NAFF libration frequencies against the Floquet and linear predictions,
//! then a Diophantine check of the measured vector.

use reslab::continuation::*;
use reslab::families::{coupled_linearization, normal_frequencies, solve_equilibrium, FamilyLabel};
use reslab::frequency::{diophantine_check, libration_frequencies, DiophantineParams};
use reslab::integrator::{integrate, Scheme};
use reslab::{MassConfig, ModelKind};

fn main() -> anyhow::Result<()> {
    let mc = MassConfig::galilean(ModelKind::FixedCenter);
    let eq = solve_equilibrium(FamilyLabel::stable(), &mc, 0.01, 1.0)?
        .feasible()
        .ok_or_else(|| anyhow::anyhow!("stable family infeasible"))?;
    let orbit = newton_continue(&PeriodicOrbitSeed::from_equilibrium(&eq)?, &ShootingOptions::default())?;
    let traj = integrate(&displaced_state(&orbit, 1e-3)?, &mc, Scheme::WisdomHolman, orbit.period / 128.0, 128 * 20_000, 128)?;
    let naff = libration_frequencies(&traj, 4)?;
    let mut floquet: Vec<f64> = orbit.multipliers.iter().map(|m| m.arg() / orbit.period).filter(|w| *w > 0.0).collect();
    floquet.sort_by(|a, b| a.total_cmp(b));
    let linear = normal_frequencies(&coupled_linearization(&eq)?.eigenvalues);
    println!("{:>12} {:>12} {:>12}", "naff", "floquet", "linear");
    for k in 0..naff.len() {
        let get = |v: &[f64]| v.get(k).map(|x| format!("{x:12.5e}")).unwrap_or_default();
        println!("{:12.5e} {} {}", naff[k], get(&floquet), get(&linear));
    }
    let dp = DiophantineParams { gamma: 1e-12, tau: 3.5, kmax: 20 };
    let d = diophantine_check(&naff, &[], &dp)?;
    println!("Diophantine: pass {} margin {:.3e} worst k {:?}", d.pass, d.margin, d.worst_k);
    Ok(())
}
