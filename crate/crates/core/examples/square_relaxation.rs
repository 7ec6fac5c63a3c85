// Relaxation on the unit square with charge leaving through two edges.
// Prints the free energy and the distance from the Boltzmann form as the
// state approaches equilibrium.
//
// ```text
// cargo run --release --example square_relaxation
// ```

use pnp::harness::find_case;
use pnp::{CflPolicy, Simulation};

/// Returns `(t, F, g-flatness)` samples.
pub fn run_example(n: usize, t_final: f64, samples: usize) -> pnp::Result<Vec<(f64, f64, f64)>> {
    let case = find_case("paper-2d-case2").expect("builtin case");
    let (domain, states) = case.setup.build(&[n, n])?;
    let mut sim = Simulation::new(domain, states, CflPolicy::Strict)?;
    let k = 0.9 * sim.step_bound();
    let mut out = Vec::with_capacity(samples + 1);
    let sample = |s: &Simulation| (s.time(), s.energy().free_energy, s.domain().g_flatness(s.states(), s.psi()));
    out.push(sample(&sim));
    for i in 1..=samples {
        sim.advance_to(t_final * i as f64 / samples as f64, k, |_, _| Ok(()))?;
        out.push(sample(&sim));
    }
    println!("{:>8} {:>12} {:>12}", "t", "F", "g-flatness");
    for (t, f, g) in &out {
        println!("{t:>8.3} {f:>12.6} {g:>12.3e}");
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    run_example(20, 2.0, 10)?;
    Ok(())
}
