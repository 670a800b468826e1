//! Localization accuracy (IoU, mIoU) and corruption robustness scores
//! (relative accuracy drop and its severity mean).

use crate::bbox::BBox;
use crate::error::{Error, Result};

/// Reference mRAD of rate coding under Gaussian noise, printed in report
/// summaries as a context line; desk-scale runs are not expected to
/// reproduce it.
pub const REFERENCE_RATE_GAUSSIAN_MRAD: f64 = 0.87;

/// Intersection over union. Degenerate unions (two zero-area boxes) score 0.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let ix = (a.x_max.min(b.x_max) - a.x_min.max(b.x_min)).max(0.0);
    let iy = (a.y_max.min(b.y_max) - a.y_min.max(b.y_min)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Mean IoU over paired predictions and targets, in percent.
pub fn mean_iou(preds: &[BBox], targets: &[BBox]) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::Shape(format!(
            "mean_iou: {} predictions vs {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::Data("mean_iou of an empty set".into()));
    }
    let total: f64 = preds.iter().zip(targets).map(|(p, t)| iou(p, t)).sum();
    Ok(100.0 * total / preds.len() as f64)
}

/// Relative accuracy drop in percent of the clean score.
pub fn rad(miou_clean: f64, miou_corrupted: f64) -> Result<f64> {
    if miou_clean <= 0.0 {
        return Err(Error::Numeric(
            "RAD undefined for non-positive clean mIoU".into(),
        ));
    }
    Ok((miou_clean - miou_corrupted) / miou_clean * 100.0)
}

/// Mean relative accuracy drop over the five severity levels.
pub fn mrad(rads: &[f64]) -> Result<f64> {
    if rads.len() != 5 {
        return Err(Error::Shape(format!(
            "mRAD needs exactly 5 severities, got {}",
            rads.len()
        )));
    }
    Ok(rads.iter().sum::<f64>() / 5.0)
}

/// One corruption/severity cell of an evaluation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub corruption: String,
    pub severity: u8,
    pub miou: f64,
    pub rad: f64,
}

/// Clean score plus the full corruption sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub miou_clean: f64,
    pub cells: Vec<SweepCell>,
}

impl EvalReport {
    pub fn clean_only(miou_clean: f64) -> Self {
        EvalReport {
            miou_clean,
            cells: Vec::new(),
        }
    }

    /// Corruption names in first-appearance order.
    pub fn corruptions(&self) -> Vec<String> {
        let mut names = Vec::new();
        for cell in &self.cells {
            if !names.contains(&cell.corruption) {
                names.push(cell.corruption.clone());
            }
        }
        names
    }

    /// mRAD per corruption (requires all 5 severities present).
    pub fn mrads(&self) -> Result<Vec<(String, f64)>> {
        let mut out = Vec::new();
        for name in self.corruptions() {
            let rads: Vec<f64> = self
                .cells
                .iter()
                .filter(|c| c.corruption == name)
                .map(|c| c.rad)
                .collect();
            out.push((name, mrad(&rads)?));
        }
        Ok(out)
    }

    /// CSV with one row per corruption x severity.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("corruption,severity,miou,rad\n");
        out.push_str(&format!("clean,0,{:?},0.0\n", self.miou_clean));
        for cell in &self.cells {
            out.push_str(&format!(
                "{},{},{:?},{:?}\n",
                cell.corruption, cell.severity, cell.miou, cell.rad
            ));
        }
        out
    }

    /// Structured text summary (JSON).
    pub fn to_summary(&self) -> String {
        let mut out = String::from("{\n");
        out.push_str(&format!("  \"miou_clean\": {:?},\n", self.miou_clean));
        out.push_str("  \"corruptions\": {\n");
        let names = self.corruptions();
        for (ni, name) in names.iter().enumerate() {
            let cells: Vec<&SweepCell> = self
                .cells
                .iter()
                .filter(|c| &c.corruption == name)
                .collect();
            out.push_str(&format!("    \"{name}\": {{\n"));
            out.push_str("      \"miou\": [");
            out.push_str(
                &cells
                    .iter()
                    .map(|c| format!("{:?}", c.miou))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push_str("],\n      \"rad\": [");
            out.push_str(
                &cells
                    .iter()
                    .map(|c| format!("{:?}", c.rad))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            out.push_str("]");
            if cells.len() == 5 {
                let rads: Vec<f64> = cells.iter().map(|c| c.rad).collect();
                out.push_str(&format!(",\n      \"mrad\": {:?}", mrad(&rads).unwrap()));
            }
            out.push_str(&format!(
                "\n    }}{}\n",
                if ni + 1 < names.len() { "," } else { "" }
            ));
        }
        out.push_str("  },\n");
        out.push_str(&format!(
            "  \"reference_rate_gaussian_mrad\": {:?}\n",
            REFERENCE_RATE_GAUSSIAN_MRAD
        ));
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn bb(x0: f64, y0: f64, x1: f64, y1: f64) -> BBox {
        BBox::new(x0, y0, x1, y1).unwrap()
    }

    #[test]
    fn iou_identity_and_disjoint() {
        let a = bb(0.1, 0.1, 0.4, 0.4);
        assert_eq!(iou(&a, &a), 1.0);
        let b = bb(0.5, 0.5, 0.9, 0.9);
        assert_eq!(iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_hand_example() {
        // (0,0,2,2) vs (1,1,3,3) scaled into the unit square: IoU = 1/7.
        let a = bb(0.0, 0.0, 0.5, 0.5);
        let b = bb(0.25, 0.25, 0.75, 0.75);
        assert!((iou(&a, &b) - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn iou_zero_area_union() {
        let p = bb(0.3, 0.3, 0.3, 0.3);
        assert_eq!(iou(&p, &p), 0.0);
    }

    #[test]
    fn mean_iou_examples() {
        let a = bb(0.0, 0.0, 0.5, 0.5);
        assert_eq!(mean_iou(&[a, a], &[a, a]).unwrap(), 100.0);
        // IoUs {1.0, 0.5, 0.0} -> 50%.
        let half_overlap = bb(0.0, 0.25, 0.5, 0.75);
        let disjoint = bb(0.6, 0.6, 0.9, 0.9);
        let m = mean_iou(
            &[a, half_overlap, disjoint],
            &[a, bb(0.0, 0.0, 0.5, 0.5), a],
        )
        .unwrap();
        let i2 = iou(&half_overlap, &bb(0.0, 0.0, 0.5, 0.5));
        assert!((i2 - 1.0 / 3.0).abs() < 1e-12);
        // Arithmetic mean of the constructed IoUs {1, 1/3, 0}.
        assert!((m - 100.0 * (1.0 + 1.0 / 3.0) / 3.0).abs() < 1e-9);
    }

    #[test]
    fn mean_iou_permutation_invariant() {
        let boxes = [
            bb(0.0, 0.0, 0.4, 0.4),
            bb(0.2, 0.2, 0.8, 0.8),
            bb(0.1, 0.5, 0.3, 0.9),
        ];
        let targets = [
            bb(0.1, 0.0, 0.5, 0.4),
            bb(0.2, 0.3, 0.9, 0.8),
            bb(0.1, 0.5, 0.3, 0.8),
        ];
        let m1 = mean_iou(&boxes, &targets).unwrap();
        let perm = [2usize, 0, 1];
        let bp: Vec<BBox> = perm.iter().map(|&i| boxes[i]).collect();
        let tp: Vec<BBox> = perm.iter().map(|&i| targets[i]).collect();
        assert!((m1 - mean_iou(&bp, &tp).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mean_iou_error_paths() {
        let a = bb(0.0, 0.0, 0.5, 0.5);
        assert!(mean_iou(&[a], &[]).is_err());
        assert!(mean_iou(&[], &[]).is_err());
    }

    #[test]
    fn rad_examples() {
        assert!((rad(80.0, 76.0).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(rad(80.0, 80.0).unwrap(), 0.0);
        assert_eq!(rad(80.0, 0.0).unwrap(), 100.0);
        assert!(rad(0.0, 10.0).is_err());
    }

    #[test]
    fn mrad_examples() {
        assert!((mrad(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(mrad(&[0.0; 5]).unwrap(), 0.0);
        assert!(mrad(&[1.0; 4]).is_err());
    }

    #[test]
    fn reference_constant_pinned() {
        assert_eq!(REFERENCE_RATE_GAUSSIAN_MRAD, 0.87);
    }

    #[test]
    fn report_round_trip_shape() {
        let mut cells = Vec::new();
        for sev in 1..=5u8 {
            cells.push(SweepCell {
                corruption: "gaussian".into(),
                severity: sev,
                miou: 70.0 - sev as f64,
                rad: rad(70.0, 70.0 - sev as f64).unwrap(),
            });
        }
        let report = EvalReport {
            miou_clean: 70.0,
            cells,
        };
        let mrads = report.mrads().unwrap();
        assert_eq!(mrads.len(), 1);
        let expect = (1..=5)
            .map(|s| rad(70.0, 70.0 - s as f64).unwrap())
            .sum::<f64>()
            / 5.0;
        assert!((mrads[0].1 - expect).abs() < 1e-12);
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 1 + 1 + 5);
        assert!(report.to_summary().contains("\"gaussian\""));
    }

    proptest! {
        #[test]
        fn iou_bounded_and_symmetric(
            ax0 in 0.0..0.9f64, ay0 in 0.0..0.9f64, aw in 0.0..0.5f64, ah in 0.0..0.5f64,
            bx0 in 0.0..0.9f64, by0 in 0.0..0.9f64, bw in 0.0..0.5f64, bh in 0.0..0.5f64,
        ) {
            let a = bb(ax0, ay0, (ax0 + aw).min(1.0), (ay0 + ah).min(1.0));
            let b = bb(bx0, by0, (bx0 + bw).min(1.0), (by0 + bh).min(1.0));
            let v = iou(&a, &b);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!((v - iou(&b, &a)).abs() < 1e-15);
        }
    }
}
