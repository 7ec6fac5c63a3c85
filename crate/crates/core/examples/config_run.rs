// Drives a run from a JSON configuration, the same path the `pnp run`
// command takes, and lists the files it writes.
//
// ```text
// cargo run --example config_run [out-dir]
// ```

use std::path::Path;

use pnp::{parse_config, run, RunRecord};

const CONFIG: &str = r#"{
    "grid": { "dimension": 1, "extents": [0.0, 1.0], "n": 40 },
    "species": [
        { "name": "c", "charge": 1.0,
          "initial": { "kind": "step", "at": 0.5, "left": 0.0, "right": 2.0 } }
    ],
    "boundary": { "sigma_a": -1.0, "sigma_b": 0.0 },
    "time": { "t_final": 0.2, "k": "auto" },
    "cfl": { "policy": "strict", "safety": 0.9 },
    "output": { "snapshot_every": 500 }
}"#;

pub fn run_example(out: &Path) -> pnp::Result<RunRecord> {
    let config = parse_config(CONFIG)?;
    let record = run(&config, Some(out))?;
    let mut files: Vec<String> = std::fs::read_dir(out)?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.sort();
    println!(
        "{:?} after {} steps, F = {:.6}; wrote {}",
        record.termination,
        record.rows.len() - 1,
        record.final_energy().unwrap_or(f64::NAN),
        files.join(", ")
    );
    Ok(record)
}

#[allow(dead_code)]
fn main() -> pnp::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "pnp-example-out".into());
    run_example(Path::new(&out))?;
    Ok(())
}
