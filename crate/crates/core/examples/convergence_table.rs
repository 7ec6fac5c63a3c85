// Grid-refinement table for a builtin case: l∞ errors of c and ψ against a
// fine reference solution, with observed orders.
//
// ```text
// cargo run --release --example convergence_table [case-name]
// ```

use pnp::harness::{find_case, run_convergence_study, ConvergenceRow};

pub fn run_example(name: &str, h_list: Option<&[f64]>) -> pnp::Result<Vec<ConvergenceRow>> {
    let case = find_case(name).ok_or_else(|| pnp::PnpError::Config(format!("unknown case {name}")))?;
    let hs = h_list.map(<[f64]>::to_vec).unwrap_or_else(|| case.h_list.clone());
    let rows = run_convergence_study(&case, &hs, case.h_ref, case.t_final)?;
    println!("{} at t = {} (reference h = {})", case.name, case.t_final, case.h_ref);
    println!("{:>9} {:>12} {:>8} {:>12} {:>8}", "h", "error c", "order", "error psi", "order");
    let fmt = |o: Option<f64>| o.map_or("-".to_string(), |v| format!("{v:.4}"));
    for r in &rows {
        println!(
            "{:>9} {:>12.5e} {:>8} {:>12.5e} {:>8}",
            r.h,
            r.error_c,
            fmt(r.order_c),
            r.error_psi,
            fmt(r.order_psi)
        );
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "paper-1d-case1".into());
    run_example(&name, None)?;
    Ok(())
}
