// Cation/anion pair on the unit interval: each species keeps its own mass
// while the free energy decreases.
//
// ```text
// cargo run --example two_species
// ```

use pnp::harness::find_case;
use pnp::{CflPolicy, Simulation};

/// Advances the second pair case to `t_final` on `n` cells and returns the
/// per-species masses before and after plus the energy history.
pub fn run_example(n: usize, t_final: f64) -> pnp::Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let case = find_case("paper-1d-pair-case2").expect("builtin case");
    let (domain, states) = case.setup.build(&[n])?;
    let mut sim = Simulation::new(domain, states, CflPolicy::Strict)?;
    let before = sim.masses();
    let mut energies = vec![sim.energy().free_energy];
    let k = 0.9 * sim.step_bound();
    sim.advance_to(t_final, k, |s, _| {
        energies.push(s.energy().free_energy);
        Ok(())
    })?;
    let after = sim.masses();
    println!("{}: {} steps of k = {k:.3e}", case.name, sim.steps());
    println!("masses {before:.12?} -> {after:.12?}");
    println!("F {:.6} -> {:.6}", energies[0], energies[energies.len() - 1]);
    Ok((before, after, energies))
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    run_example(50, 1.0)?;
    Ok(())
}
