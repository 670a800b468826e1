//! End-to-end CLI tests: every subcommand, exit codes, and output files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spikeloc")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    let base = "[dataset]\nimage_size=16\ntrain_count=8\nval_count=2\n\n[encode]\nscheme=rate\ntimesteps=3\n\n[train]\nepochs=2\nbatch_size=4\nlr=0.005\n\n[seeds]\nseed=7\n";
    std::fs::write(&path, format!("{base}{extra}")).unwrap();
    path
}

fn gen_dataset(dir: &Path, cfg: &Path) -> PathBuf {
    let data_dir = dir.join("data");
    let out = run(&[
        "dataset",
        "gen",
        "--out",
        data_dir.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    data_dir.join("manifest.txt")
}

fn white_pgm(dir: &Path, name: &str, h: usize, w: usize) -> PathBuf {
    let path = dir.join(name);
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    bytes.extend(std::iter::repeat_n(255u8, h * w));
    std::fs::write(&path, bytes).unwrap();
    path
}

#[test]
fn dataset_gen_is_deterministic_and_guarded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let m1 = gen_dataset(&tmp.path().join("a"), &cfg);
    let m2 = gen_dataset(&tmp.path().join("b"), &cfg);
    assert_eq!(std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());

    // Existing dataset without --force is a data error (exit 3).
    let out = run(&[
        "dataset",
        "gen",
        "--out",
        tmp.path().join("a/data").to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));

    let inspect = run(&["dataset", "inspect", "--manifest", m1.to_str().unwrap()]);
    assert!(inspect.status.success());
    let text = stdout_of(&inspect);
    assert!(text.contains("10 samples (8 train / 2 val)"), "{text}");
    assert!(text.contains("manifest hash"), "{text}");
}

#[test]
fn dataset_inspect_handles_empty_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = tmp.path().join("manifest.txt");
    std::fs::write(
        &manifest,
        "spikeloc-manifest v1\nimage_size=16\ntrain_count=0\nval_count=0\ntexture_amp=0.12\nmodality=static\nevent_frames=12\nseed=1\nrecords=0\n---\n",
    )
    .unwrap();
    let out = run(&[
        "dataset",
        "inspect",
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("0 samples"));
}

#[test]
fn encode_rate_on_white_image_is_dense() {
    let tmp = tempfile::tempdir().unwrap();
    let img = white_pgm(tmp.path(), "white.pgm", 8, 8);
    let out_path = tmp.path().join("white.spkt");
    let out = run(&[
        "encode",
        "--input",
        img.to_str().unwrap(),
        "--scheme",
        "rate",
        "--timesteps",
        "8",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let tensor = spikeloc::tensor::SpikeTensor::read_file(&out_path).unwrap();
    assert_eq!(tensor.count_ones(), 8 * 64);
    assert!(stdout_of(&out).contains("spikes=512"));
}

#[test]
fn encode_ttfs_spikes_at_most_once_per_pixel() {
    let tmp = tempfile::tempdir().unwrap();
    // Gradient image: every 8-bit level somewhere.
    let path = tmp.path().join("ramp.pgm");
    let mut bytes = b"P5\n16 16\n255\n".to_vec();
    bytes.extend((0..256).map(|i| i as u8));
    std::fs::write(&path, bytes).unwrap();
    let out_path = tmp.path().join("ramp.spkt");
    let out = run(&[
        "encode",
        "--input",
        path.to_str().unwrap(),
        "--scheme",
        "ttfs",
        "--timesteps",
        "6",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let tensor = spikeloc::tensor::SpikeTensor::read_file(&out_path).unwrap();
    assert!(tensor.count_ones() <= 256);
}

#[test]
fn encode_event_slice_bounded_by_event_count() {
    let tmp = tempfile::tempdir().unwrap();
    let events: Vec<spikeloc::events::DvsEvent> = (0..50)
        .map(|i| spikeloc::events::DvsEvent {
            timestamp_us: i * 137,
            x: (i % 16) as u16,
            y: (i % 7) as u16,
            polarity: (i % 2) as u8,
        })
        .collect();
    let stream = spikeloc::events::EventStream::new(16, 16, events).unwrap();
    let evts = tmp.path().join("in.evts");
    stream.write_file(&evts).unwrap();
    let out_path = tmp.path().join("sliced.spkt");
    let out = run(&[
        "encode",
        "--input",
        evts.to_str().unwrap(),
        "--scheme",
        "event-slice",
        "--timesteps",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let tensor = spikeloc::tensor::SpikeTensor::read_file(&out_path).unwrap();
    assert!(tensor.count_ones() <= 50);
    assert_eq!(tensor.dims(), (4, 2, 16, 16));
}

#[test]
fn encode_rejects_unknown_scheme() {
    let tmp = tempfile::tempdir().unwrap();
    let img = white_pgm(tmp.path(), "x.pgm", 8, 8);
    let out = run(&[
        "encode",
        "--input",
        img.to_str().unwrap(),
        "--scheme",
        "morse",
        "--timesteps",
        "4",
        "--out",
        tmp.path().join("x.spkt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown coding scheme"));
}

#[test]
fn train_zero_epochs_writes_initial_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let manifest = gen_dataset(tmp.path(), &cfg);
    let cfg0 = write_config(&tmp.path().join("."), "[train]\nepochs=0\n");
    let out_dir = tmp.path().join("run0");
    let out = run(&[
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg0.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(out_dir.join("best.ckpt").exists());
    let log = std::fs::read_to_string(out_dir.join("log.csv")).unwrap();
    assert_eq!(log, "epoch,train_loss,val_miou\n");
}

#[test]
fn train_eval_energy_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let manifest = gen_dataset(tmp.path(), &cfg);

    // Two identical training runs produce identical checkpoints.
    let run_a = tmp.path().join("runa");
    let run_b = tmp.path().join("runb");
    for dir in [&run_a, &run_b] {
        let out = run(&[
            "train",
            "--manifest",
            manifest.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    let ckpt_a = std::fs::read(run_a.join("best.ckpt")).unwrap();
    let ckpt_b = std::fs::read(run_b.join("best.ckpt")).unwrap();
    assert_eq!(ckpt_a, ckpt_b);
    let log = std::fs::read_to_string(run_a.join("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 3); // header + 2 epochs

    // Sweep evaluation: 25 corruption cells, RAD recomputable.
    let eval_dir = tmp.path().join("eval");
    let ckpt = run_a.join("best.ckpt");
    let out = run(&[
        "eval",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--sweep",
        "--out",
        eval_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(eval_dir.join("eval.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect(); // header
    assert_eq!(rows.len(), 26); // clean + 5 corruptions x 5 severities
    let clean: f64 = rows[0].split(',').nth(2).unwrap().parse().unwrap();
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        let miou: f64 = fields[2].parse().unwrap();
        let rad: f64 = fields[3].parse().unwrap();
        let expect = (clean - miou) / clean * 100.0;
        assert!((rad - expect).abs() < 1e-9, "row {row}");
    }
    assert!(eval_dir.join("summary.json").exists());

    // Event corruption on a static pipeline is rejected with guidance.
    let out = run(&[
        "eval",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--corruption",
        "hot_pixels",
        "--severity",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("event streams"),
        "{}",
        stderr_of(&out)
    );

    // Energy report: CSV plus an SVG with one bar per block.
    let energy_dir = tmp.path().join("energy");
    let out = run(&[
        "energy",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        energy_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("E_MAC=4.6"), "{text}");
    assert!(text.contains("E_AC=0.9"), "{text}");
    let svg = std::fs::read_to_string(energy_dir.join("spike_rates.svg")).unwrap();
    // snn-tiny blocks: input, conv1, sew1, conv2.
    assert_eq!(svg.matches("<rect").count(), 4, "{svg}");
    let csv = std::fs::read_to_string(energy_dir.join("energy.csv")).unwrap();
    assert!(csv.lines().count() >= 7); // header + 5 layers + totals
}

#[test]
fn corrupt_command_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let img = white_pgm(tmp.path(), "w.pgm", 16, 16);
    let out_img = tmp.path().join("g.pgm");
    let out = run(&[
        "corrupt",
        "--input",
        img.to_str().unwrap(),
        "--corruption",
        "gaussian",
        "--severity",
        "3",
        "--out",
        out_img.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let corrupted = spikeloc::data::read_pgm(&out_img).unwrap();
    assert_eq!(corrupted.height(), 16);

    // Event corruption on a spike tensor file.
    let tensor = spikeloc::tensor::SpikeTensor::zeros(4, 2, 16, 16);
    let spkt = tmp.path().join("e.spkt");
    tensor.write_file(&spkt).unwrap();
    let out_spkt = tmp.path().join("hot.spkt");
    let out = run(&[
        "corrupt",
        "--input",
        spkt.to_str().unwrap(),
        "--corruption",
        "hot_pixels",
        "--severity",
        "1",
        "--out",
        out_spkt.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let hot = spikeloc::tensor::SpikeTensor::read_file(&out_spkt).unwrap();
    let expected_pixels = (0.03 * 256.0_f64).round() as u64;
    assert_eq!(hot.count_ones(), expected_pixels * 4 * 2);

    // Severity outside 1..=5 is rejected by the parser.
    let out = run(&[
        "corrupt",
        "--input",
        img.to_str().unwrap(),
        "--corruption",
        "gaussian",
        "--severity",
        "6",
        "--out",
        tmp.path().join("x.pgm").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_manifest_is_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "dataset",
        "inspect",
        "--manifest",
        tmp.path().join("nope.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
}

#[test]
fn events_pipeline_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("ev.cfg");
    std::fs::write(
        &cfg_path,
        "[dataset]\nimage_size=16\ntrain_count=6\nval_count=2\nmodality=events\nevent_frames=6\n\n[encode]\nscheme=event-slice\ntimesteps=3\n\n[train]\nepochs=1\nbatch_size=2\n\n[seeds]\nseed=5\n",
    )
    .unwrap();
    let data_dir = tmp.path().join("data");
    let out = run(&[
        "dataset",
        "gen",
        "--out",
        data_dir.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let manifest = data_dir.join("manifest.txt");

    let run_dir = tmp.path().join("run");
    let out = run(&[
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    // Event corruptions are the valid family on this pipeline.
    let out = run(&[
        "eval",
        "--checkpoint",
        run_dir.join("best.ckpt").to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
        "--corruption",
        "background_activity",
        "--severity",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("background_activity"));

    // Static corruptions are rejected with an explanation.
    let out = run(&[
        "eval",
        "--checkpoint",
        run_dir.join("best.ckpt").to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
        "--corruption",
        "gaussian",
        "--severity",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("event-based"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn trainable_coding_uses_checkpoint_encoder() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("tr.cfg");
    std::fs::write(
        &cfg_path,
        "[dataset]\nimage_size=16\ntrain_count=6\nval_count=2\n\n[encode]\nscheme=trainable\ntimesteps=3\n\n[train]\nepochs=1\nbatch_size=2\n\n[seeds]\nseed=3\n",
    )
    .unwrap();
    let data_dir = tmp.path().join("data");
    let out = run(&[
        "dataset",
        "gen",
        "--out",
        data_dir.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let manifest = data_dir.join("manifest.txt");

    let run_dir = tmp.path().join("run");
    let out = run(&[
        "train",
        "--manifest",
        manifest.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    // Encode a fresh image through the trained first layer.
    let img = white_pgm(tmp.path(), "probe.pgm", 16, 16);
    let spkt = tmp.path().join("probe.spkt");
    let out = run(&[
        "encode",
        "--input",
        img.to_str().unwrap(),
        "--scheme",
        "trainable",
        "--timesteps",
        "3",
        "--checkpoint",
        run_dir.join("best.ckpt").to_str().unwrap(),
        "--out",
        spkt.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let tensor = spikeloc::tensor::SpikeTensor::read_file(&spkt).unwrap();
    assert_eq!(tensor.dims(), (3, 32, 8, 8));
}
