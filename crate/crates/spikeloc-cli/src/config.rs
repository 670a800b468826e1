//! Run configuration: flat `[section]` / `key=value` files with a closed
//! key set. Unknown sections or keys are rejected so typos fail loudly
//! instead of silently falling back to defaults.

use spikeloc::codec::CodingScheme;
use spikeloc::data::{GenParams, Modality};
use spikeloc::error::{Error, Result};
use spikeloc::net::TrainConfig;

/// Everything a run needs; sections mirror the pipeline stages.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset: GenParams,
    pub network_preset: String,
    pub scheme: CodingScheme,
    pub timesteps: usize,
    pub tau: f64,
    pub dx: f64,
    pub dy: f64,
    pub delta_threshold: f64,
    pub epochs: u32,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub fresh_encode: bool,
    pub cosine_lr: bool,
    pub seed: u64,
    pub data_seed: Option<u64>,
    pub init_seed: Option<u64>,
    pub encode_seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: GenParams::default(),
            network_preset: "snn-tiny".into(),
            scheme: CodingScheme::Rate,
            timesteps: 4,
            tau: 1.0,
            dx: 2.0,
            dy: 2.0,
            delta_threshold: 0.1,
            epochs: 30,
            batch_size: 32,
            lr: 5e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            fresh_encode: true,
            cosine_lr: true,
            seed: 1,
            data_seed: None,
            init_seed: None,
            encode_seed: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("bad value '{value}' for key '{key}'")))
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.to_string();
                if !["dataset", "network", "encode", "train", "seeds"].contains(&section.as_str()) {
                    return Err(Error::Config(format!(
                        "unknown config section '[{section}]'"
                    )));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", ln + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                continue; // explicit blank keeps the default
            }
            cfg.set(&section, key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        match (section, key) {
            ("dataset", "image_size") => self.dataset.image_size = parse(key, value)?,
            ("dataset", "train_count") => self.dataset.train_count = parse(key, value)?,
            ("dataset", "val_count") => self.dataset.val_count = parse(key, value)?,
            ("dataset", "texture_amp") => self.dataset.texture_amp = parse(key, value)?,
            ("dataset", "modality") => self.dataset.modality = Modality::parse(value)?,
            ("dataset", "event_frames") => self.dataset.event_frames = parse(key, value)?,
            ("network", "preset") => self.network_preset = value.to_string(),
            ("encode", "scheme") => self.scheme = CodingScheme::parse(value)?,
            ("encode", "timesteps") => self.timesteps = parse(key, value)?,
            ("encode", "tau") => self.tau = parse(key, value)?,
            ("encode", "dx") => self.dx = parse(key, value)?,
            ("encode", "dy") => self.dy = parse(key, value)?,
            ("encode", "delta_threshold") => self.delta_threshold = parse(key, value)?,
            ("train", "epochs") => self.epochs = parse(key, value)?,
            ("train", "batch_size") => self.batch_size = parse(key, value)?,
            ("train", "lr") => self.lr = parse(key, value)?,
            ("train", "beta1") => self.beta1 = parse(key, value)?,
            ("train", "beta2") => self.beta2 = parse(key, value)?,
            ("train", "eps") => self.eps = parse(key, value)?,
            ("train", "fresh_encode") => self.fresh_encode = parse(key, value)?,
            ("train", "cosine_lr") => self.cosine_lr = parse(key, value)?,
            ("seeds", "seed") => self.seed = parse(key, value)?,
            ("seeds", "data_seed") => self.data_seed = Some(parse(key, value)?),
            ("seeds", "init_seed") => self.init_seed = Some(parse(key, value)?),
            ("seeds", "encode_seed") => self.encode_seed = Some(parse(key, value)?),
            _ => {
                return Err(Error::Config(format!(
                    "unknown config key '{key}' in section '[{section}]'"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.timesteps == 0 {
            return Err(Error::Config("timesteps must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return Err(Error::Config("lr must be finite and >= 0".into()));
        }
        self.dataset.validate()
    }

    /// Finalizes the scheme with its parameter knobs.
    pub fn scheme_with_params(&self) -> CodingScheme {
        match self.scheme {
            CodingScheme::Ttfs { .. } => CodingScheme::Ttfs { tau: self.tau },
            CodingScheme::Saccades { .. } => CodingScheme::Saccades {
                dx: self.dx,
                dy: self.dy,
                threshold: self.delta_threshold,
            },
            ref other => other.clone(),
        }
    }

    /// Named seeds: unset ones derive from the master seed.
    pub fn data_seed(&self) -> u64 {
        self.data_seed.unwrap_or(self.seed)
    }

    pub fn init_seed(&self) -> u64 {
        self.init_seed.unwrap_or(self.seed.wrapping_add(1))
    }

    pub fn encode_seed(&self) -> u64 {
        self.encode_seed.unwrap_or(self.seed.wrapping_add(2))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
            scheme: self.scheme_with_params(),
            t: self.timesteps,
            init_seed: self.init_seed(),
            encode_seed: self.encode_seed(),
            fresh_encode: self.fresh_encode,
            cosine_lr: self.cosine_lr,
        }
    }

    /// Single audit line with the effective configuration.
    pub fn audit_line(&self) -> String {
        format!(
            "config: scheme={} timesteps={} preset={} epochs={} batch_size={} lr={} \
             dataset={}x{}+{} texture_amp={} modality={} seed={} data_seed={} init_seed={} encode_seed={}",
            self.scheme_with_params().name(),
            self.timesteps,
            self.network_preset,
            self.epochs,
            self.batch_size,
            self.lr,
            self.dataset.image_size,
            self.dataset.train_count,
            self.dataset.val_count,
            self.dataset.texture_amp,
            self.dataset.modality.name(),
            self.seed,
            self.data_seed(),
            self.init_seed(),
            self.encode_seed(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::parse_str("").unwrap();
        assert_eq!(cfg.timesteps, 4);
        assert_eq!(cfg.dataset.train_count, 2000);
        assert_eq!(cfg.data_seed(), 1);
        assert_eq!(cfg.init_seed(), 2);
        assert_eq!(cfg.encode_seed(), 3);
    }

    #[test]
    fn parses_sections_and_overrides() {
        let text = "[dataset]\nimage_size=16\ntrain_count=8\nval_count=2\n\n[encode]\nscheme=ttfs\ntimesteps=6\ntau=2.0\n\n[seeds]\nseed=9\ninit_seed=42\n";
        let cfg = RunConfig::parse_str(text).unwrap();
        assert_eq!(cfg.dataset.image_size, 16);
        assert_eq!(cfg.timesteps, 6);
        assert_eq!(cfg.scheme_with_params(), CodingScheme::Ttfs { tau: 2.0 });
        assert_eq!(cfg.init_seed(), 42);
        assert_eq!(cfg.data_seed(), 9);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse_str("[train]\nlearning_rate=0.1\n").is_err());
        assert!(RunConfig::parse_str("[optimizer]\nlr=0.1\n").is_err());
        assert!(RunConfig::parse_str("[train]\nlr=fast\n").is_err());
    }

    #[test]
    fn blank_value_keeps_default() {
        let cfg = RunConfig::parse_str("[seeds]\ndata_seed=\nseed=5\n").unwrap();
        assert_eq!(cfg.data_seed(), 5);
    }
}
