//! A small sweep written to CSV, then summarised from the dataset.
//!
//! `cargo run --release --example parameter_sweep [out_dir]`

use fcdn::harness::{emit_results, run_experiment, ExperimentConfig, Format, System};
use fcdn::Algorithm;

fn main() -> fcdn::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep_out".into());
    let mut cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/geant_grid.toml"))?;
    cfg.trials = 3;
    cfg.grids.t = vec![900.0];
    let ds = run_experiment(&cfg)?;
    emit_results(&ds, &cfg, &out, Format::Csv)?;
    println!("{} rows written to {out}", ds.rows.len());

    println!("mean backhaul (Gb/s) at K_o = 2");
    println!("{:<6} {:>4} {:>9} {:>9} {:>9}", "algo", "K_e", "unicast", "tau=1", "dns K_d=4");
    for algo in Algorithm::ALL {
        for &k_e in &cfg.grids.k_e {
            let mean = |system: System, tau: Option<f64>, k_d: Option<usize>| {
                let v: Vec<f64> = ds
                    .rows_for(system)
                    .filter(|r| r.key.algorithm == algo && r.key.k_o == 2 && r.key.k_e == k_e)
                    .filter(|r| r.key.tau == tau && r.key.k_d == k_d)
                    .map(|r| r.metrics.backhaul_gbps)
                    .collect();
                v.iter().sum::<f64>() / v.len() as f64
            };
            println!(
                "{:<6} {k_e:>4} {:>9.1} {:>9.1} {:>9.1}",
                algo.name(),
                mean(System::FcdnUnicast, None, None),
                mean(System::FcdnMulticast, Some(1.0), None),
                mean(System::CdnDns, None, Some(4))
            );
        }
    }
    Ok(())
}
