// Runs the single- and two-species interval problems to steady state and
// prints the limiting free energy of each initial profile.
//
// ```text
// cargo run --release --example steady_state_energy [cells]
// ```

use pnp::harness::builtin_cases;
use pnp::{CflPolicy, Simulation, SteadyTolerances};

pub fn run_example(cells: usize) -> pnp::Result<Vec<(String, f64, f64)>> {
    let mut out = Vec::new();
    for case in builtin_cases().into_iter().filter(|c| c.dimension() == 1) {
        let (domain, states) = case.setup.build(&[cells])?;
        let mut sim = Simulation::new(domain, states, CflPolicy::Strict)?;
        let k = 0.9 * sim.step_bound();
        let report = sim.run_to_steady(k, 50.0, &SteadyTolerances::default(), |_, _| Ok(()))?;
        let converged = report.is_some_and(|r| r.converged);
        println!(
            "{:<22} t = {:>8.4}  F = {:.6}  (steady: {converged}, expected {:?})",
            case.name,
            sim.time(),
            sim.energy().free_energy,
            case.expected_energy
        );
        out.push((case.name, sim.time(), sim.energy().free_energy));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    let cells = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(160);
    run_example(cells)?;
    Ok(())
}
