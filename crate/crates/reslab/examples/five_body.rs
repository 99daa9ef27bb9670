//! Intermediate orbit of the four-satellite problem: inner periodic orbit
//! plus a circular outer body, then a displaced run over 1e4 inner periods.

use reslab::five_body::*;
use reslab::ModelKind;

fn main() -> anyhow::Result<()> {
    let cfg = FiveBodyConfig::galilean(ModelKind::FixedCenter);
    println!("semi-major axes {:?}", cfg.semi_major_axes()?);
    println!("kappa {:.6}, classical outer precession {:.4e}", callisto_kappa(&cfg)?, callisto_normal_frequency(&cfg)?);
    let r = verify_elliptic_2torus(&cfg, &TorusOptions::default())?;
    println!("measured precession {:.4e}", r.measured_g4_rate);
    println!("e4 {:.3e} -> [{:.3e}, {:.3e}], within factor 2: {}", r.e4_initial, r.e4_min, r.e4_max, r.e4_band);
    println!("inner arguments librating: {}", r.libration.all_librating);
    println!("mean motions n3 {:.6} n4 {:.6}, Diophantine margin {:.3}", r.frequencies[0], r.frequencies[1], r.diophantine.margin);
    println!("Herman residual {:.1e}, max relative energy error {:.1e}", r.herman_residual, r.max_rel_energy);
    Ok(())
}
