//! Procedural localization datasets: textured backgrounds with one filled
//! shape per image, exact bounding-box labels, optional simulated event
//! streams, and a hashed on-disk manifest.

use std::path::{Path, PathBuf};

use crate::bbox::BBox;
use crate::codec::saccade_frames;
use crate::error::{Error, Result};
use crate::events::{DvsEvent, EventStream};
use crate::net::{SampleInput, TrainSample};
use crate::noise::fractal_noise;
use crate::rng::Rng;
use crate::tensor::DenseImage;

pub const MANIFEST_HEADER: &str = "spikeloc-manifest v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            other => Err(Error::Data(format!("unknown split '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Static,
    Events,
}

impl Modality {
    pub fn name(&self) -> &'static str {
        match self {
            Modality::Static => "static",
            Modality::Events => "events",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Modality::Static),
            "events" => Ok(Modality::Events),
            other => Err(Error::Data(format!("unknown modality '{other}'"))),
        }
    }
}

/// Generator parameters; (params, seed) fully determine the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub image_size: usize,
    pub train_count: usize,
    pub val_count: usize,
    pub texture_amp: f64,
    pub modality: Modality,
    /// Saccade frames for simulated event recordings.
    pub event_frames: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            image_size: 32,
            train_count: 2000,
            val_count: 400,
            texture_amp: 0.10,
            modality: Modality::Static,
            event_frames: 12,
            seed: 1,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.image_size < 16 {
            return Err(Error::Config("image size must be >= 16".into()));
        }
        if self.train_count + self.val_count == 0 {
            return Err(Error::Config(
                "dataset must contain at least one sample".into(),
            ));
        }
        if !(0.0..=0.5).contains(&self.texture_amp) {
            return Err(Error::Config(
                "texture amplitude must be in [0, 0.5]".into(),
            ));
        }
        if self.modality == Modality::Events && self.event_frames < 2 {
            return Err(Error::Config(
                "event generation needs >= 2 saccade frames".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Payload {
    Image(DenseImage),
    Events(EventStream),
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub id: u64,
    pub split: Split,
    pub payload: Payload,
    pub bbox: BBox,
}

impl Sample {
    pub fn to_train_sample(&self) -> TrainSample {
        let input = match &self.payload {
            Payload::Image(img) => SampleInput::Image(img.clone()),
            Payload::Events(ev) => SampleInput::Events(ev.clone()),
        };
        TrainSample {
            id: self.id,
            input,
            target: self.bbox,
        }
    }
}

/// Snaps to the 8-bit intensity grid so PGM round trips are lossless.
fn quantize8(v: f64) -> f64 {
    (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
}

/// Tight normalized bounding box of the set pixels (exclusive right/bottom
/// pixel edges).
pub fn bbox_from_mask(mask: &[bool], h: usize, w: usize) -> Result<BBox> {
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (w, h, 0usize, 0usize);
    let mut any = false;
    for y in 0..h {
        for x in 0..w {
            if mask[y * w + x] {
                any = true;
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    if !any {
        return Err(Error::Data("empty mask has no bounding box".into()));
    }
    BBox::new(
        min_x as f64 / w as f64,
        min_y as f64 / h as f64,
        (max_x + 1) as f64 / w as f64,
        (max_y + 1) as f64 / h as f64,
    )
}

/// Renders one static sample: textured background plus a filled shape.
pub fn gen_static_sample(rng: &mut Rng, params: &GenParams) -> Result<(DenseImage, BBox)> {
    params.validate()?;
    let n = params.image_size;
    let base = rng.next_range(0.10, 0.35);
    let texture = fractal_noise(n, n, 4, 2, rng);
    let mut img: Vec<f64> = texture
        .iter()
        .map(|&t| quantize8(base + params.texture_amp * (t - 0.5)))
        .collect();

    let intensity = quantize8(rng.next_range(0.65, 1.0));
    let mask = loop {
        let mask = render_shape(rng, n);
        if mask.iter().filter(|&&m| m).count() >= 4 {
            break mask;
        }
    };
    for (pixel, &m) in img.iter_mut().zip(&mask) {
        if m {
            *pixel = intensity;
        }
    }
    let bbox = bbox_from_mask(&mask, n, n)?;
    Ok((DenseImage::gray(n, n, img)?, bbox))
}

fn render_shape(rng: &mut Rng, n: usize) -> Vec<bool> {
    let mut mask = vec![false; n * n];
    match rng.next_below(3) {
        0 => {
            // Rectangle.
            let w = rng.next_below((n / 2 - n / 4 + 1) as u64) as usize + n / 4;
            let h = rng.next_below((n / 2 - n / 4 + 1) as u64) as usize + n / 4;
            let x0 = rng.next_below((n - w + 1) as u64) as usize;
            let y0 = rng.next_below((n - h + 1) as u64) as usize;
            for y in y0..y0 + h {
                for x in x0..x0 + w {
                    mask[y * n + x] = true;
                }
            }
        }
        1 => {
            // Ellipse.
            let rx = rng.next_range(n as f64 / 5.0, n as f64 / 4.0);
            let ry = rng.next_range(n as f64 / 5.0, n as f64 / 4.0);
            let cx = rng.next_range(rx, n as f64 - rx);
            let cy = rng.next_range(ry, n as f64 - ry);
            for y in 0..n {
                for x in 0..n {
                    let dx = (x as f64 + 0.5 - cx) / rx;
                    let dy = (y as f64 + 0.5 - cy) / ry;
                    if dx * dx + dy * dy <= 1.0 {
                        mask[y * n + x] = true;
                    }
                }
            }
        }
        _ => {
            // Triangle with a minimum-area retry.
            let span = n as f64 / 2.0;
            let ox = rng.next_range(0.0, n as f64 - span);
            let oy = rng.next_range(0.0, n as f64 - span);
            let mut pts = [(0.0, 0.0); 3];
            loop {
                for p in &mut pts {
                    *p = (
                        ox + rng.next_range(0.0, span),
                        oy + rng.next_range(0.0, span),
                    );
                }
                let area = ((pts[1].0 - pts[0].0) * (pts[2].1 - pts[0].1)
                    - (pts[2].0 - pts[0].0) * (pts[1].1 - pts[0].1))
                    .abs()
                    / 2.0;
                if area >= span * span / 6.0 {
                    break;
                }
            }
            let sign = |p: (f64, f64), a: (f64, f64), b: (f64, f64)| {
                (p.0 - b.0) * (a.1 - b.1) - (a.0 - b.0) * (p.1 - b.1)
            };
            for y in 0..n {
                for x in 0..n {
                    let p = (x as f64 + 0.5, y as f64 + 0.5);
                    let d1 = sign(p, pts[0], pts[1]);
                    let d2 = sign(p, pts[1], pts[2]);
                    let d3 = sign(p, pts[2], pts[0]);
                    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
                    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
                    if !(has_neg && has_pos) {
                        mask[y * n + x] = true;
                    }
                }
            }
        }
    }
    mask
}

/// Simulated pan-tilt recording of a static sample: saccade trajectory,
/// signed delta modulation, jittered timestamps (frames 1000 us apart,
/// +/- 100 us per event).
pub fn gen_event_sample(
    img: &DenseImage,
    rng: &mut Rng,
    params: &GenParams,
) -> Result<EventStream> {
    let frames = saccade_frames(img, params.event_frames, 2.0, 2.0);
    let (h, w) = (img.height(), img.width());
    let threshold = 0.1;
    let mut events: Vec<DvsEvent> = Vec::new();
    for step in 1..frames.len() {
        let base_ts = step as i64 * 1000;
        for y in 0..h {
            for x in 0..w {
                let d = frames[step][y * w + x] - frames[step - 1][y * w + x];
                if d.abs() > threshold {
                    let jitter = rng.next_range(-100.0, 100.0) as i64;
                    events.push(DvsEvent {
                        timestamp_us: (base_ts + jitter).max(0) as u32,
                        x: x as u16,
                        y: y as u16,
                        polarity: u8::from(d > 0.0),
                    });
                }
            }
        }
    }
    events.sort_by_key(|e| e.timestamp_us);
    EventStream::new(w as u16, h as u16, events)
}

/// Generates the full dataset; sample `k` uses stream `derive(seed, k)`.
pub fn generate(params: &GenParams) -> Result<Vec<Sample>> {
    params.validate()?;
    let total = params.train_count + params.val_count;
    let root = Rng::new(params.seed);
    let samples = crate::parallel::map_indexed(total, |i| -> Result<Sample> {
        let mut rng = root.derive(i as u64);
        let (img, bbox) = gen_static_sample(&mut rng, params)?;
        let split = if i < params.train_count {
            Split::Train
        } else {
            Split::Val
        };
        let payload = match params.modality {
            Modality::Static => Payload::Image(img),
            Modality::Events => Payload::Events(gen_event_sample(&img, &mut rng, params)?),
        };
        Ok(Sample {
            id: i as u64,
            split,
            payload,
            bbox,
        })
    });
    samples.into_iter().collect()
}

/// FNV-1a 64-bit hash, used for sample-file integrity records.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

const PGM_MAX: f64 = 255.0;

pub fn write_pgm(path: &Path, img: &DenseImage) -> Result<()> {
    if img.channels() != 1 {
        return Err(Error::Data(
            "PGM supports single-channel images only".into(),
        ));
    }
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| (v * PGM_MAX).round() as u8));
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_pgm(path: &Path) -> Result<DenseImage> {
    let bytes = std::fs::read(path)?;
    parse_pgm(&bytes).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn parse_pgm(bytes: &[u8]) -> Result<DenseImage> {
    let mut pos = 0usize;
    let mut token = || -> Result<String> {
        while pos < bytes.len() && (bytes[pos] as char).is_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !(bytes[pos] as char).is_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Data("PGM: truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::Data("PGM: expected P5 magic".into()));
    }
    let w: usize = token()?
        .parse()
        .map_err(|_| Error::Data("PGM: bad width".into()))?;
    let h: usize = token()?
        .parse()
        .map_err(|_| Error::Data("PGM: bad height".into()))?;
    let maxval: usize = token()?
        .parse()
        .map_err(|_| Error::Data("PGM: bad maxval".into()))?;
    if maxval != 255 {
        return Err(Error::Data("PGM: only maxval 255 supported".into()));
    }
    let data_start = pos + 1; // single whitespace after maxval
    if bytes.len() < data_start + w * h {
        return Err(Error::Data("PGM: truncated pixel data".into()));
    }
    let data: Vec<f64> = bytes[data_start..data_start + w * h]
        .iter()
        .map(|&b| b as f64 / PGM_MAX)
        .collect();
    DenseImage::gray(h, w, data)
}

fn format_params(params: &GenParams, total: usize) -> String {
    format!(
        "{MANIFEST_HEADER}\nimage_size={}\ntrain_count={}\nval_count={}\ntexture_amp={:?}\nmodality={}\nevent_frames={}\nseed={}\nrecords={}\n---\n",
        params.image_size,
        params.train_count,
        params.val_count,
        params.texture_amp,
        params.modality.name(),
        params.event_frames,
        params.seed,
        total
    )
}

/// Writes samples plus `manifest.txt` into `dir`; returns the manifest path.
pub fn save_dataset(dir: &Path, params: &GenParams, samples: &[Sample]) -> Result<PathBuf> {
    let sample_dir = dir.join("samples");
    std::fs::create_dir_all(&sample_dir)?;
    let mut manifest = format_params(params, samples.len());
    for sample in samples {
        let (rel, bytes) = match &sample.payload {
            Payload::Image(img) => {
                let rel = format!("samples/{:06}.pgm", sample.id);
                write_pgm(&dir.join(&rel), img)?;
                (rel.clone(), std::fs::read(dir.join(&rel))?)
            }
            Payload::Events(ev) => {
                let rel = format!("samples/{:06}.evts", sample.id);
                let bytes = ev.to_bytes();
                std::fs::write(dir.join(&rel), &bytes)?;
                (rel, bytes)
            }
        };
        let b = &sample.bbox;
        manifest.push_str(&format!(
            "{},{},{},{:?},{:?},{:?},{:?},{:016x}\n",
            sample.id,
            sample.split.name(),
            rel,
            b.x_min,
            b.y_min,
            b.x_max,
            b.y_max,
            fnv1a(&bytes)
        ));
    }
    let manifest_path = dir.join("manifest.txt");
    std::fs::write(&manifest_path, manifest)?;
    Ok(manifest_path)
}

fn parse_header_line(line: &str) -> Result<(&str, &str)> {
    line.split_once('=')
        .ok_or_else(|| Error::Data(format!("manifest: bad header line '{line}'")))
}

/// Loads a dataset back from its manifest, verifying per-sample hashes.
/// Samples come back ordered by id; `split` filters when given.
pub fn load_dataset(
    manifest_path: &Path,
    split: Option<Split>,
) -> Result<(GenParams, Vec<Sample>)> {
    let text = std::fs::read_to_string(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut lines = text.lines();
    if lines.next() != Some(MANIFEST_HEADER) {
        return Err(Error::Data("manifest: bad header".into()));
    }
    let mut params = GenParams::default();
    let mut records = 0usize;
    for line in lines.by_ref() {
        if line == "---" {
            break;
        }
        let (key, value) = parse_header_line(line)?;
        let bad = |k: &str| Error::Data(format!("manifest: bad value for {k}"));
        match key {
            "image_size" => params.image_size = value.parse().map_err(|_| bad(key))?,
            "train_count" => params.train_count = value.parse().map_err(|_| bad(key))?,
            "val_count" => params.val_count = value.parse().map_err(|_| bad(key))?,
            "texture_amp" => params.texture_amp = value.parse().map_err(|_| bad(key))?,
            "modality" => params.modality = Modality::parse(value)?,
            "event_frames" => params.event_frames = value.parse().map_err(|_| bad(key))?,
            "seed" => params.seed = value.parse().map_err(|_| bad(key))?,
            "records" => records = value.parse().map_err(|_| bad(key))?,
            other => {
                return Err(Error::Data(format!(
                    "manifest: unknown header key '{other}'"
                )))
            }
        }
    }
    let mut samples = Vec::with_capacity(records);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Data(format!("manifest: bad record '{line}'")));
        }
        let id: u64 = fields[0]
            .parse()
            .map_err(|_| Error::Data(format!("manifest: bad id '{}'", fields[0])))?;
        let fail = |what: &str| Error::Data(format!("manifest: sample {id}: {what}"));
        let rec_split = Split::parse(fields[1])?;
        let rel = fields[2];
        let coords: Vec<f64> = fields[3..7]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| fail("bad bbox"))?;
        let bbox = BBox::new(coords[0], coords[1], coords[2], coords[3])?;
        let expect_hash = u64::from_str_radix(fields[7], 16).map_err(|_| fail("bad hash"))?;
        let bytes = std::fs::read(dir.join(rel)).map_err(|_| fail("missing file"))?;
        if fnv1a(&bytes) != expect_hash {
            return Err(fail("hash mismatch (file corrupted)"));
        }
        if let Some(want) = split {
            if want != rec_split {
                continue;
            }
        }
        let payload = match params.modality {
            Modality::Static => {
                Payload::Image(parse_pgm(&bytes).map_err(|e| fail(&e.to_string()))?)
            }
            Modality::Events => {
                Payload::Events(EventStream::from_bytes(&bytes).map_err(|e| fail(&e.to_string()))?)
            }
        };
        samples.push(Sample {
            id,
            split: rec_split,
            payload,
            bbox,
        });
    }
    if split.is_none() && samples.len() != records {
        return Err(Error::Data(format!(
            "manifest: expected {records} records, found {}",
            samples.len()
        )));
    }
    samples.sort_by_key(|s| s.id);
    Ok((params, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_params() -> GenParams {
        GenParams {
            train_count: 8,
            val_count: 2,
            ..GenParams::default()
        }
    }

    #[test]
    fn labels_match_foreground_scan() {
        // Background tops out near 0.41 while objects start at 0.65, so a
        // brute-force scan of peak-intensity pixels recovers the label.
        let params = tiny_params();
        for seed in 0..20u64 {
            let mut rng = Rng::new(seed);
            let (img, bbox) = gen_static_sample(&mut rng, &params).unwrap();
            let n = params.image_size;
            let peak = img.data().iter().cloned().fold(0.0f64, f64::max);
            assert!(peak >= 0.65);
            let mask: Vec<bool> = img.data().iter().map(|&v| v == peak).collect();
            let scan = bbox_from_mask(&mask, n, n).unwrap();
            assert_eq!(scan, bbox, "seed {seed}");
        }
    }

    #[test]
    fn mask_bbox_hand_example() {
        // Rectangle at rows 10..20, cols 5..15 of a 32x32 image.
        let mut mask = vec![false; 32 * 32];
        for y in 10..20 {
            for x in 5..15 {
                mask[y * 32 + x] = true;
            }
        }
        let bbox = bbox_from_mask(&mask, 32, 32).unwrap();
        assert_eq!(
            bbox,
            BBox::new(5.0 / 32.0, 10.0 / 32.0, 15.0 / 32.0, 20.0 / 32.0).unwrap()
        );
    }

    #[test]
    fn zero_texture_background_constant() {
        let params = GenParams {
            texture_amp: 0.0,
            ..tiny_params()
        };
        let mut rng = Rng::new(3);
        let (img, bbox) = gen_static_sample(&mut rng, &params).unwrap();
        let peak = img.data().iter().cloned().fold(0.0f64, f64::max);
        let bg: Vec<f64> = img.data().iter().copied().filter(|&v| v != peak).collect();
        assert!(bg.windows(2).all(|w| w[0] == w[1]));
        assert!(bbox.area() > 0.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = tiny_params();
        let a = generate(&params).unwrap();
        let b = generate(&params).unwrap();
        assert_eq!(a.len(), 10);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.bbox, y.bbox);
            match (&x.payload, &y.payload) {
                (Payload::Image(ix), Payload::Image(iy)) => assert_eq!(ix, iy),
                _ => panic!("expected static payloads"),
            }
        }
    }

    #[test]
    fn constant_image_yields_no_events() {
        let img = DenseImage::constant(1, 32, 32, 0.5).unwrap();
        let mut rng = Rng::new(5);
        let ev = gen_event_sample(&img, &mut rng, &tiny_params()).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn moving_square_emits_on_and_off_events() {
        let mut data = vec![0.0; 1024];
        for y in 12..20 {
            for x in 12..20 {
                data[y * 32 + x] = 1.0;
            }
        }
        let img = DenseImage::gray(32, 32, data).unwrap();
        let mut rng = Rng::new(6);
        let ev = gen_event_sample(&img, &mut rng, &tiny_params()).unwrap();
        assert!(!ev.is_empty());
        let on = ev.events().iter().filter(|e| e.polarity == 1).count();
        let off = ev.events().iter().filter(|e| e.polarity == 0).count();
        assert!(on > 0 && off > 0);
        for e in ev.events() {
            assert!((e.x as usize) < 32 && (e.y as usize) < 32);
        }
    }

    #[test]
    fn dataset_round_trip_and_split_filter() {
        let dir = std::env::temp_dir().join(format!("spikeloc-data-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let params = tiny_params();
        let samples = generate(&params).unwrap();
        let manifest = save_dataset(&dir, &params, &samples).unwrap();

        let (loaded_params, loaded) = load_dataset(&manifest, None).unwrap();
        assert_eq!(loaded_params, params);
        assert_eq!(loaded.len(), samples.len());
        for (a, b) in samples.iter().zip(&loaded) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.bbox, b.bbox);
        }
        let (_, val_only) = load_dataset(&manifest, Some(Split::Val)).unwrap();
        assert_eq!(val_only.len(), 2);
        assert!(val_only.iter().all(|s| s.split == Split::Val));

        // Corrupting a sample file fails loudly, naming the id.
        let victim = dir.join("samples/000003.pgm");
        let mut bytes = std::fs::read(&victim).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0xff;
        std::fs::write(&victim, bytes).unwrap();
        let err = load_dataset(&manifest, None).unwrap_err();
        assert!(err.to_string().contains("sample 3"), "{err}");

        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn manifests_are_reproducible() {
        let dir_a = std::env::temp_dir().join(format!("spikeloc-man-a-{}", std::process::id()));
        let dir_b = std::env::temp_dir().join(format!("spikeloc-man-b-{}", std::process::id()));
        for d in [&dir_a, &dir_b] {
            let _ = std::fs::remove_dir_all(d);
        }
        let params = tiny_params();
        let m_a = save_dataset(&dir_a, &params, &generate(&params).unwrap()).unwrap();
        let m_b = save_dataset(&dir_b, &params, &generate(&params).unwrap()).unwrap();
        assert_eq!(std::fs::read(m_a).unwrap(), std::fs::read(m_b).unwrap());
        for d in [&dir_a, &dir_b] {
            std::fs::remove_dir_all(d).unwrap();
        }
    }

    #[test]
    fn pgm_round_trip() {
        let dir = std::env::temp_dir().join(format!("spikeloc-pgm-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut rng = Rng::new(2);
        let data: Vec<f64> = (0..64).map(|_| quantize8(rng.next_uniform())).collect();
        let img = DenseImage::gray(8, 8, data).unwrap();
        let path = dir.join("t.pgm");
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(img, back);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
