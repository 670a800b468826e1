//! Analytic energy model: per-layer spike rates, SNN vs ANN FLOPs, and
//! 45nm CMOS energy totals.
//!
//! A spiking layer's FLOPs are the matching ANN layer's FLOPs scaled by
//! the spike rate of the activations it consumes (arriving spikes trigger
//! accumulates); ANN layers pay a full multiply-accumulate per FLOP while
//! SNN layers pay an accumulate only.

use crate::error::{Error, Result};
use crate::net::{LayerSpec, Model, ModelInput, TrainSample};

/// Reference ANN/SNN energy ratio for TTFS coding, printed in report
/// summaries as a context line; desk-scale runs are not expected to
/// reproduce it.
pub const REFERENCE_TTFS_ENERGY_RATIO: f64 = 126.6;

pub const PJ_PER_MJ: f64 = 1e9;

/// Energy per operation in a 45nm CMOS process (picojoules).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTable {
    pub e_mult: f64,
    pub e_add: f64,
    pub e_mac: f64,
    pub e_ac: f64,
}

impl Default for EnergyTable {
    fn default() -> Self {
        EnergyTable {
            e_mult: 3.7,
            e_add: 0.9,
            e_mac: 4.6,
            e_ac: 0.9,
        }
    }
}

impl EnergyTable {
    pub fn validate(&self) -> Result<()> {
        if (self.e_mac - (self.e_mult + self.e_add)).abs() > 1e-12 {
            return Err(Error::Config(
                "energy table requires E_MAC = E_MULT + E_ADD".into(),
            ));
        }
        Ok(())
    }
}

/// Spike rate: total spikes over all time-steps divided by neuron count.
/// May exceed 1 since the numerator sums over T.
pub fn spike_rate(spike_count: f64, neuron_count: usize) -> Result<f64> {
    if neuron_count == 0 {
        return Err(Error::Config(
            "spike rate undefined for zero neurons".into(),
        ));
    }
    Ok(spike_count / neuron_count as f64)
}

/// ANN FLOPs of one layer. `out_hw` is the number of output spatial
/// positions (O^2 for square maps). Layers without weighted synapses
/// contribute zero; composite blocks must be expanded first.
pub fn flops_ann(layer: &LayerSpec, out_hw: usize) -> Result<f64> {
    match layer {
        LayerSpec::Conv2d { c_in, c_out, k, .. } => Ok((k * k * out_hw * c_in * c_out) as f64),
        LayerSpec::Linear { c_in, c_out } => Ok((c_in * c_out) as f64),
        LayerSpec::Accumulator { c_in, outputs } => Ok((c_in * outputs) as f64),
        LayerSpec::Pool | LayerSpec::If { .. } | LayerSpec::Flatten => Ok(0.0),
        LayerSpec::SewBlock { .. } => Err(Error::Config(
            "SEW block FLOPs: expand into its convolutions first".into(),
        )),
    }
}

/// SNN FLOPs: the ANN count scaled by the attached spike rate.
pub fn flops_snn(flops_ann: f64, rate: f64) -> Result<f64> {
    if rate < 0.0 {
        return Err(Error::Config("spike rate must be non-negative".into()));
    }
    Ok(flops_ann * rate)
}

/// Which layer's activations drive Eq.-style SNN FLOP scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateAttach {
    /// Spikes arriving at the layer's input (default).
    #[default]
    Input,
    /// Spikes the layer's own unit emits.
    Output,
}

/// One weighted layer in the energy walk.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLayer {
    pub name: String,
    pub flops_ann: f64,
    /// Activation key whose rate scales the SNN FLOPs (input attach).
    pub input_key: String,
    /// Activation key of the unit's own spikes, when it has one.
    pub output_key: Option<String>,
}

/// Key for the dense image consumed by a trainable-coding encoder; it is
/// processed once like an ANN layer, so it scales at rate 1.
pub const DENSE_INPUT_KEY: &str = "__dense__";

/// Enumerates the weighted layers of a model with their FLOPs and the
/// activation keys feeding them. SEW blocks expand into their two convs.
pub fn energy_layers(model: &Model) -> Result<Vec<EnergyLayer>> {
    let shapes = model.spec.infer_shapes()?;
    let mut cur = if model.spec.image_encoder {
        DENSE_INPUT_KEY.to_string()
    } else {
        "input".to_string()
    };
    let mut out = Vec::new();
    for (i, layer) in model.spec.layers.iter().enumerate() {
        match layer {
            LayerSpec::Conv2d { .. } => {
                let out_hw = match shapes[i] {
                    crate::net::Shape::Map { h, w, .. } => h * w,
                    crate::net::Shape::Flat(_) => unreachable!("conv output is a map"),
                };
                let output_key = match model.spec.layers.get(i + 1) {
                    Some(LayerSpec::If { .. }) => Some(format!("l{}", i + 1)),
                    _ => None,
                };
                out.push(EnergyLayer {
                    name: format!("l{i}"),
                    flops_ann: flops_ann(layer, out_hw)?,
                    input_key: cur.clone(),
                    output_key,
                });
            }
            LayerSpec::If { .. } => cur = format!("l{i}"),
            LayerSpec::SewBlock { channels, k, .. } => {
                let hw = match shapes[i] {
                    crate::net::Shape::Map { h, w, .. } => h * w,
                    crate::net::Shape::Flat(_) => unreachable!("SEW output is a map"),
                };
                let conv_flops = (k * k * hw * channels * channels) as f64;
                out.push(EnergyLayer {
                    name: format!("l{i}.conv1"),
                    flops_ann: conv_flops,
                    input_key: cur.clone(),
                    output_key: Some(format!("l{i}.s1")),
                });
                out.push(EnergyLayer {
                    name: format!("l{i}.conv2"),
                    flops_ann: conv_flops,
                    input_key: format!("l{i}.s1"),
                    output_key: Some(format!("l{i}")),
                });
                cur = format!("l{i}");
            }
            LayerSpec::Pool => cur = format!("l{i}"),
            LayerSpec::Flatten => {}
            LayerSpec::Linear { .. } => {
                let output_key = match model.spec.layers.get(i + 1) {
                    Some(LayerSpec::If { .. }) => Some(format!("l{}", i + 1)),
                    _ => None,
                };
                out.push(EnergyLayer {
                    name: format!("l{i}"),
                    flops_ann: flops_ann(layer, 1)?,
                    input_key: cur.clone(),
                    output_key,
                });
            }
            LayerSpec::Accumulator { .. } => {
                out.push(EnergyLayer {
                    name: format!("l{i}"),
                    flops_ann: flops_ann(layer, 1)?,
                    input_key: cur.clone(),
                    output_key: None, // infinite threshold: never spikes
                });
            }
        }
    }
    Ok(out)
}

/// Per-activation spike totals, averaged per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStats {
    pub name: String,
    pub spike_count: f64,
    pub neuron_count: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpikeStats {
    pub layers: Vec<LayerStats>,
    pub samples: usize,
}

impl SpikeStats {
    pub fn rate(&self, key: &str) -> Result<f64> {
        if key == DENSE_INPUT_KEY {
            return Ok(1.0);
        }
        let layer = self
            .layers
            .iter()
            .find(|l| l.name == key)
            .ok_or_else(|| Error::Config(format!("no spike stats for activation '{key}'")))?;
        spike_rate(layer.spike_count, layer.neuron_count)
    }
}

/// Runs the model over an evaluation set and accumulates per-activation
/// spike counts (averaged per sample).
pub fn collect_spike_stats(
    model: &Model,
    samples: &[TrainSample],
    scheme: &crate::codec::CodingScheme,
    t: usize,
    encode_seed: u64,
) -> Result<SpikeStats> {
    if samples.is_empty() {
        return Ok(SpikeStats::default());
    }
    let per_sample =
        crate::parallel::map_indexed(samples.len(), |i| -> Result<Vec<(String, u64, usize)>> {
            let sample = &samples[i];
            let mut rng = crate::net::eval_stream(encode_seed, sample.id);
            let encoded = crate::net::encode_input(scheme, &sample.input, t, &mut rng)?;
            let out = match &encoded {
                crate::net::Encoded::Spikes { tensor, scale } => {
                    model.forward(ModelInput::Spikes(tensor), scale.as_deref())?
                }
                crate::net::Encoded::Image(img) => model.forward(ModelInput::Image(img), None)?,
            };
            Ok(out
                .activations
                .iter()
                .map(|a| {
                    (
                        a.name.clone(),
                        a.tensor.total(),
                        a.tensor.len() / a.tensor.t.max(1),
                    )
                })
                .collect())
        });

    let mut layers: Vec<LayerStats> = Vec::new();
    for r in per_sample {
        for (name, total, neurons) in r? {
            match layers.iter_mut().find(|l| l.name == name) {
                Some(l) => l.spike_count += total as f64,
                None => layers.push(LayerStats {
                    name,
                    spike_count: total as f64,
                    neuron_count: neurons,
                }),
            }
        }
    }
    for l in &mut layers {
        l.spike_count /= samples.len() as f64;
    }
    Ok(SpikeStats {
        layers,
        samples: samples.len(),
    })
}

/// Spike-generating blocks in network order with their mean rates, for
/// the rate bar chart.
pub fn block_rates(model: &Model, stats: &SpikeStats) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    if stats.layers.iter().any(|l| l.name == "input") {
        out.push(("input".to_string(), stats.rate("input")?));
    }
    let mut conv_no = 0usize;
    let mut sew_no = 0usize;
    for (i, layer) in model.spec.layers.iter().enumerate() {
        match layer {
            LayerSpec::If { .. } => {
                if i > 0
                    && matches!(
                        model.spec.layers[i - 1],
                        LayerSpec::Conv2d { .. } | LayerSpec::Linear { .. }
                    )
                {
                    conv_no += 1;
                    out.push((format!("conv{conv_no}"), stats.rate(&format!("l{i}"))?));
                }
            }
            LayerSpec::SewBlock { .. } => {
                sew_no += 1;
                out.push((format!("sew{sew_no}"), stats.rate(&format!("l{i}"))?));
            }
            _ => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub name: String,
    pub flops_ann: f64,
    pub rate: f64,
    pub flops_snn: f64,
    pub e_ann_pj: f64,
    pub e_snn_pj: f64,
}

/// Complete energy report for one model/dataset pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub rows: Vec<EnergyRow>,
    pub e_ann_pj: f64,
    pub e_snn_pj: f64,
    pub ratio: f64,
    pub blocks: Vec<(String, f64)>,
}

impl EnergyReport {
    pub fn e_ann_mj(&self) -> f64 {
        self.e_ann_pj / PJ_PER_MJ
    }

    pub fn e_snn_mj(&self) -> f64 {
        self.e_snn_pj / PJ_PER_MJ
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,flops_ann,rate,flops_snn,e_ann_pj,e_snn_pj\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:?},{:?},{:?},{:?},{:?}\n",
                r.name, r.flops_ann, r.rate, r.flops_snn, r.e_ann_pj, r.e_snn_pj
            ));
        }
        out.push_str(&format!(
            "total,{:?},,{:?},{:?},{:?}\n",
            self.rows.iter().map(|r| r.flops_ann).sum::<f64>(),
            self.rows.iter().map(|r| r.flops_snn).sum::<f64>(),
            self.e_ann_pj,
            self.e_snn_pj
        ));
        out.push_str(&format!("ratio_ann_over_snn,{:?},,,,\n", self.ratio));
        out
    }

    /// Bar chart of per-block spike rates as a standalone SVG document.
    pub fn to_svg(&self) -> String {
        let bar_w = 60.0;
        let gap = 24.0;
        let plot_h = 180.0;
        let margin = 40.0;
        let width = margin * 2.0 + self.blocks.len() as f64 * (bar_w + gap);
        let height = plot_h + 70.0;
        let max_rate = self.blocks.iter().map(|(_, r)| *r).fold(1e-9, f64::max);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
        );
        svg.push_str(&format!(
            "  <text x=\"{:.0}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">Spike rate per block (spikes/neuron over T)</text>\n",
            margin
        ));
        for (i, (name, rate)) in self.blocks.iter().enumerate() {
            let h = plot_h * rate / max_rate;
            let x = margin + i as f64 * (bar_w + gap);
            let y = 30.0 + plot_h - h;
            svg.push_str(&format!(
                "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w:.1}\" height=\"{h:.1}\" fill=\"#4477aa\"/>\n"
            ));
            svg.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{name}</text>\n",
                x + bar_w / 2.0,
                30.0 + plot_h + 16.0
            ));
            svg.push_str(&format!(
                "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{rate:.3}</text>\n",
                x + bar_w / 2.0,
                (y - 4.0).max(28.0)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Folds per-layer FLOPs and rates into total energy and the ANN/SNN ratio.
pub fn energy_totals(
    layers: &[EnergyLayer],
    stats: &SpikeStats,
    table: &EnergyTable,
    attach: RateAttach,
    blocks: Vec<(String, f64)>,
) -> Result<EnergyReport> {
    table.validate()?;
    if layers.is_empty() {
        return Err(Error::Config(
            "energy totals need at least one layer".into(),
        ));
    }
    let mut rows = Vec::with_capacity(layers.len());
    let mut e_ann = 0.0;
    let mut e_snn = 0.0;
    for layer in layers {
        let key = match attach {
            RateAttach::Input => &layer.input_key,
            // The accumulator never spikes; its cost is driven by arrivals
            // in either attach mode.
            RateAttach::Output => layer.output_key.as_ref().unwrap_or(&layer.input_key),
        };
        let rate = stats.rate(key)?;
        let f_snn = flops_snn(layer.flops_ann, rate)?;
        let row = EnergyRow {
            name: layer.name.clone(),
            flops_ann: layer.flops_ann,
            rate,
            flops_snn: f_snn,
            e_ann_pj: layer.flops_ann * table.e_mac,
            e_snn_pj: f_snn * table.e_ac,
        };
        e_ann += row.e_ann_pj;
        e_snn += row.e_snn_pj;
        rows.push(row);
    }
    let ratio = if e_snn > 0.0 {
        e_ann / e_snn
    } else {
        f64::INFINITY
    };
    Ok(EnergyReport {
        rows,
        e_ann_pj: e_ann,
        e_snn_pj: e_snn,
        ratio,
        blocks,
    })
}

/// Full pipeline: spike statistics, per-layer FLOPs, totals, block rates.
pub fn energy_report(
    model: &Model,
    samples: &[TrainSample],
    scheme: &crate::codec::CodingScheme,
    t: usize,
    encode_seed: u64,
    attach: RateAttach,
) -> Result<EnergyReport> {
    let stats = collect_spike_stats(model, samples, scheme, t, encode_seed)?;
    let layers = energy_layers(model)?;
    let blocks = block_rates(model, &stats)?;
    energy_totals(&layers, &stats, &EnergyTable::default(), attach, blocks)
}

/// Deterministic synthetic stats with every rate equal to `rate`.
pub fn uniform_stats(layers: &[EnergyLayer], rate: f64) -> SpikeStats {
    let mut names: Vec<String> = Vec::new();
    for l in layers {
        for key in [Some(&l.input_key), l.output_key.as_ref()]
            .into_iter()
            .flatten()
        {
            if key.as_str() != DENSE_INPUT_KEY && !names.contains(key) {
                names.push(key.clone());
            }
        }
    }
    SpikeStats {
        layers: names
            .into_iter()
            .map(|name| LayerStats {
                name,
                spike_count: rate * 100.0,
                neuron_count: 100,
            })
            .collect(),
        samples: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::NetworkSpec;
    use crate::rng::Rng;

    #[test]
    fn table_consistency() {
        let t = EnergyTable::default();
        assert_eq!(t.e_mult, 3.7);
        assert_eq!(t.e_add, 0.9);
        assert_eq!(t.e_mac, 4.6);
        assert_eq!(t.e_ac, 0.9);
        t.validate().unwrap();
        assert!(EnergyTable { e_mac: 5.0, ..t }.validate().is_err());
        assert_eq!(REFERENCE_TTFS_ENERGY_RATIO, 126.6);
    }

    #[test]
    fn spike_rate_examples() {
        assert!((spike_rate(12.0, 10).unwrap() - 1.2).abs() < 1e-15);
        assert_eq!(spike_rate(0.0, 64).unwrap(), 0.0);
        assert_eq!(spike_rate(8.0 * 50.0, 50).unwrap(), 8.0);
        assert!(spike_rate(1.0, 0).is_err());
    }

    #[test]
    fn flops_examples() {
        let conv = LayerSpec::Conv2d {
            c_in: 2,
            c_out: 4,
            k: 3,
            stride: 1,
            pad: 0,
        };
        assert_eq!(flops_ann(&conv, 64).unwrap(), 4608.0);
        let lin = LayerSpec::Linear {
            c_in: 128,
            c_out: 4,
        };
        assert_eq!(flops_ann(&lin, 1).unwrap(), 512.0);
        let degenerate = LayerSpec::Conv2d {
            c_in: 2,
            c_out: 0,
            k: 3,
            stride: 1,
            pad: 0,
        };
        assert_eq!(flops_ann(&degenerate, 64).unwrap(), 0.0);
        assert_eq!(flops_ann(&LayerSpec::Pool, 9).unwrap(), 0.0);
        assert!(flops_ann(
            &LayerSpec::SewBlock {
                channels: 4,
                k: 3,
                cfg: crate::neuron::IfConfig::default()
            },
            16
        )
        .is_err());
    }

    #[test]
    fn flops_snn_scaling() {
        assert_eq!(flops_snn(4608.0, 0.0).unwrap(), 0.0);
        assert_eq!(flops_snn(4608.0, 0.5).unwrap(), 2304.0);
        assert_eq!(flops_snn(4608.0, 1.0).unwrap(), 4608.0);
        assert!(flops_snn(1.0, -0.1).is_err());
    }

    #[test]
    fn formula_matches_mac_counting_loop() {
        // Count multiply-accumulates executed by a literal convolution loop.
        for (k, o, c_in, c_out) in [(1usize, 2usize, 1usize, 1usize), (3, 4, 2, 3), (2, 3, 4, 1)] {
            let mut macs = 0u64;
            for _co in 0..c_out {
                for _oy in 0..o {
                    for _ox in 0..o {
                        for _ci in 0..c_in {
                            for _ky in 0..k {
                                for _kx in 0..k {
                                    macs += 1;
                                }
                            }
                        }
                    }
                }
            }
            let layer = LayerSpec::Conv2d {
                c_in,
                c_out,
                k,
                stride: 1,
                pad: 0,
            };
            assert_eq!(flops_ann(&layer, o * o).unwrap(), macs as f64);
        }
    }

    #[test]
    fn single_conv_hand_example() {
        let layers = vec![EnergyLayer {
            name: "l0".into(),
            flops_ann: 4608.0,
            input_key: "input".into(),
            output_key: None,
        }];
        let stats = SpikeStats {
            layers: vec![LayerStats {
                name: "input".into(),
                spike_count: 50.0,
                neuron_count: 100,
            }],
            samples: 1,
        };
        let report = energy_totals(
            &layers,
            &stats,
            &EnergyTable::default(),
            RateAttach::Input,
            vec![],
        )
        .unwrap();
        assert!((report.e_ann_pj - 21196.8).abs() < 1e-9);
        assert!((report.e_snn_pj - 2073.6).abs() < 1e-9);
        assert!((report.ratio - 21196.8 / 2073.6).abs() < 1e-9);
    }

    #[test]
    fn rate_one_cancellation() {
        let spec = NetworkSpec::snn_tiny((1, 32, 32), 4);
        let model = crate::net::Model::init(spec, &mut Rng::new(3)).unwrap();
        let layers = energy_layers(&model).unwrap();
        let stats = uniform_stats(&layers, 1.0);
        let report = energy_totals(
            &layers,
            &stats,
            &EnergyTable::default(),
            RateAttach::Input,
            vec![],
        )
        .unwrap();
        assert!(
            (report.ratio - 4.6 / 0.9).abs() < 1e-12,
            "ratio {}",
            report.ratio
        );
    }

    #[test]
    fn snn_energy_monotone_in_rates() {
        let spec = NetworkSpec::snn_tiny((1, 32, 32), 4);
        let model = crate::net::Model::init(spec, &mut Rng::new(3)).unwrap();
        let layers = energy_layers(&model).unwrap();
        let low = energy_totals(
            &layers,
            &uniform_stats(&layers, 0.2),
            &EnergyTable::default(),
            RateAttach::Input,
            vec![],
        )
        .unwrap();
        let high = energy_totals(
            &layers,
            &uniform_stats(&layers, 0.7),
            &EnergyTable::default(),
            RateAttach::Input,
            vec![],
        )
        .unwrap();
        assert!(high.e_snn_pj > low.e_snn_pj);
        assert_eq!(high.e_ann_pj, low.e_ann_pj);
    }

    #[test]
    fn collect_stats_examples() {
        use crate::bbox::BBox;
        use crate::codec::CodingScheme;
        use crate::net::{LayerSpec, SampleInput, TrainSample};
        use crate::neuron::IfConfig;
        use crate::tensor::DenseImage;

        let t = 4usize;
        let spec = NetworkSpec {
            input: (1, 8, 8),
            t,
            layers: vec![
                LayerSpec::Conv2d {
                    c_in: 1,
                    c_out: 2,
                    k: 3,
                    stride: 2,
                    pad: 1,
                },
                LayerSpec::If {
                    cfg: IfConfig::default(),
                },
                LayerSpec::Flatten,
                LayerSpec::Accumulator {
                    c_in: 32,
                    outputs: 4,
                },
            ],
            image_encoder: false,
            delayed_input: false,
        };
        let model = crate::net::Model::init(spec, &mut Rng::new(5)).unwrap();
        let target = BBox::new(0.25, 0.25, 0.75, 0.75).unwrap();

        // All-zero inputs: every rate is 0.
        let dark: Vec<TrainSample> = (0..3)
            .map(|id| TrainSample {
                id,
                input: SampleInput::Image(DenseImage::constant(1, 8, 8, 0.0).unwrap()),
                target,
            })
            .collect();
        let stats = collect_spike_stats(&model, &dark, &CodingScheme::Rate, t, 1).unwrap();
        assert_eq!(stats.rate("input").unwrap(), 0.0);
        assert_eq!(stats.rate("l1").unwrap(), 0.0);

        // All-white inputs fire at every step: input rate equals T.
        let bright: Vec<TrainSample> = (0..3)
            .map(|id| TrainSample {
                id,
                input: SampleInput::Image(DenseImage::constant(1, 8, 8, 1.0).unwrap()),
                target,
            })
            .collect();
        let stats = collect_spike_stats(&model, &bright, &CodingScheme::Rate, t, 1).unwrap();
        assert_eq!(stats.rate("input").unwrap(), t as f64);

        // Rerun with the same inputs: identical statistics.
        let again = collect_spike_stats(&model, &bright, &CodingScheme::Rate, t, 1).unwrap();
        assert_eq!(stats, again);
    }

    #[test]
    fn energy_layer_walk_covers_sew() {
        let spec = NetworkSpec::snn_tiny((1, 32, 32), 4);
        let model = crate::net::Model::init(spec, &mut Rng::new(3)).unwrap();
        let layers = energy_layers(&model).unwrap();
        let names: Vec<&str> = layers.iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, vec!["l0", "l2.conv1", "l2.conv2", "l3", "l7"]);
        assert_eq!(layers[0].input_key, "input");
        assert_eq!(layers[1].input_key, "l1");
        assert_eq!(layers[2].input_key, "l2.s1");
        assert_eq!(layers[3].input_key, "l2");
        assert_eq!(layers[4].input_key, "l5");
    }
}
