//! Minimal library-level training run:
//! `cargo run --example train_scale -- [epochs] [lr] [train_count]`.

use spikeloc::data::{generate, GenParams, Split};
use spikeloc::net::{train, NetworkSpec, TrainConfig, TrainSample};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let epochs: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let lr: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5e-3);
    let n_train: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(2000);

    let params = GenParams {
        train_count: n_train,
        val_count: 400,
        ..GenParams::default()
    };
    let t0 = std::time::Instant::now();
    let samples = generate(&params).unwrap();
    let train_set: Vec<TrainSample> = samples
        .iter()
        .filter(|s| s.split == Split::Train)
        .map(|s| s.to_train_sample())
        .collect();
    let val_set: Vec<TrainSample> = samples
        .iter()
        .filter(|s| s.split == Split::Val)
        .map(|s| s.to_train_sample())
        .collect();
    eprintln!(
        "dataset: {} train / {} val in {:.1}s",
        train_set.len(),
        val_set.len(),
        t0.elapsed().as_secs_f64()
    );

    let cfg = TrainConfig {
        epochs,
        lr,
        ..TrainConfig::default()
    };
    let spec = NetworkSpec::snn_tiny((1, 32, 32), cfg.t);
    let t1 = std::time::Instant::now();
    let out = train(spec, &train_set, &val_set, &cfg).unwrap();
    for log in &out.logs {
        eprintln!(
            "epoch {:>3}  loss {:.4}  val mIoU {:.2}%  [{:.1}s]",
            log.epoch,
            log.train_loss,
            log.val_miou,
            t1.elapsed().as_secs_f64()
        );
    }
    eprintln!(
        "best epoch {} val mIoU {:.2}%",
        out.best_epoch, out.best_val_miou
    );
}
