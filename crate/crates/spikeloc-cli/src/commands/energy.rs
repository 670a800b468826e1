use std::path::PathBuf;

use clap::Args as ClapArgs;
use spikeloc::data::Split;
use spikeloc::energy::{energy_report, EnergyTable, RateAttach, REFERENCE_TTFS_ENERGY_RATIO};
use spikeloc::error::Result;

use super::{load_config, load_model, load_split};

#[derive(ClapArgs)]
pub struct Args {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    timesteps: Option<usize>,
    /// Scale SNN FLOPs by the layer's own output spikes instead of its
    /// input spikes.
    #[arg(long)]
    attach_output: bool,
}

pub fn run(args: Args) -> Result<()> {
    let mut cfg = load_config(
        args.config.as_deref(),
        args.seed,
        args.scheme.as_deref(),
        args.timesteps,
    )?;
    let (ckpt, model) = load_model(&args.checkpoint)?;
    cfg.timesteps = ckpt.spec.t;
    println!("{}", cfg.audit_line());
    let scheme = cfg.scheme_with_params();
    let (_, val_set) = load_split(&args.manifest, Some(Split::Val))?;

    let attach = if args.attach_output {
        RateAttach::Output
    } else {
        RateAttach::Input
    };
    let report = energy_report(
        &model,
        &val_set,
        &scheme,
        ckpt.spec.t,
        cfg.encode_seed(),
        attach,
    )?;

    let table = EnergyTable::default();
    println!(
        "energy table: E_MAC={} pJ E_AC={} pJ",
        table.e_mac, table.e_ac
    );
    for row in &report.rows {
        println!(
            "{:<12} FLOPs_ANN {:>10.0}  Rs {:>7.4}  FLOPs_SNN {:>12.1}  E_ANN {:>12.1} pJ  E_SNN {:>12.1} pJ",
            row.name, row.flops_ann, row.rate, row.flops_snn, row.e_ann_pj, row.e_snn_pj
        );
    }
    println!(
        "totals: E_ANN {:.6} mJ  E_SNN {:.6} mJ  ratio {:.2} (reference TTFS ratio for context: {REFERENCE_TTFS_ENERGY_RATIO})",
        report.e_ann_mj(),
        report.e_snn_mj(),
        report.ratio
    );

    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("energy.csv"), report.to_csv())?;
    std::fs::write(args.out.join("spike_rates.svg"), report.to_svg())?;
    println!(
        "wrote {}/energy.csv and spike_rates.svg",
        args.out.display()
    );
    Ok(())
}
