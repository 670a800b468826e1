//! Distance-IoU loss: `1 - IoU + rho^2 / c^2`, where `rho` is the distance
//! between box centers and `c` the diagonal of the smallest enclosing box.
//!
//! Raw accumulator potentials decode to normalized corners through a
//! logistic squash; corners are folded (min, max) per axis so inverted
//! predictions still form valid geometry, in the loss and at evaluation.

use crate::bbox::BBox;
use crate::error::{Error, Result};

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Decodes raw potentials into a valid box: logistic then corner fold.
pub fn decode_box(raw: &[f64; 4]) -> BBox {
    BBox::from_unordered(
        logistic(raw[0]),
        logistic(raw[1]),
        logistic(raw[2]),
        logistic(raw[3]),
    )
    .expect("logistic output is always in (0,1)")
}

/// DIoU distance between ordered boxes `(x1, y1, x2, y2)` in arbitrary
/// units. Zero iff the boxes coincide.
pub fn diou(pred: (f64, f64, f64, f64), target: (f64, f64, f64, f64)) -> f64 {
    diou_with_grad(pred, target).0
}

/// DIoU plus its gradient with respect to the four predicted corners.
fn diou_with_grad(pred: (f64, f64, f64, f64), target: (f64, f64, f64, f64)) -> (f64, [f64; 4]) {
    let (x1, y1, x2, y2) = pred;
    let (gx1, gy1, gx2, gy2) = target;

    let iw_raw = x2.min(gx2) - x1.max(gx1);
    let ih_raw = y2.min(gy2) - y1.max(gy1);
    let iw = iw_raw.max(0.0);
    let ih = ih_raw.max(0.0);
    let inter = iw * ih;
    let area_p = (x2 - x1) * (y2 - y1);
    let area_g = (gx2 - gx1) * (gy2 - gy1);
    let union = area_p + area_g - inter;
    let iou = if union > 0.0 { inter / union } else { 0.0 };

    // d(inter)/d(corner): active only when the corner bounds the overlap.
    let d_iw = [
        if iw_raw > 0.0 && x1 >= gx1 { -1.0 } else { 0.0 },
        if iw_raw > 0.0 && x2 <= gx2 { 1.0 } else { 0.0 },
    ];
    let d_ih = [
        if ih_raw > 0.0 && y1 >= gy1 { -1.0 } else { 0.0 },
        if ih_raw > 0.0 && y2 <= gy2 { 1.0 } else { 0.0 },
    ];
    let d_inter = [ih * d_iw[0], iw * d_ih[0], ih * d_iw[1], iw * d_ih[1]]; // x1, y1, x2, y2
    let d_area = [-(y2 - y1), -(x2 - x1), y2 - y1, x2 - x1];
    let mut d_iou = [0.0; 4];
    if union > 0.0 {
        for i in 0..4 {
            let d_union = d_area[i] - d_inter[i];
            d_iou[i] = (d_inter[i] * union - inter * d_union) / (union * union);
        }
    }

    let pcx = (x1 + x2) / 2.0;
    let pcy = (y1 + y2) / 2.0;
    let gcx = (gx1 + gx2) / 2.0;
    let gcy = (gy1 + gy2) / 2.0;
    let rho2 = (pcx - gcx) * (pcx - gcx) + (pcy - gcy) * (pcy - gcy);
    let d_rho2 = [pcx - gcx, pcy - gcy, pcx - gcx, pcy - gcy];

    let ex1 = x1.min(gx1);
    let ex2 = x2.max(gx2);
    let ey1 = y1.min(gy1);
    let ey2 = y2.max(gy2);
    let c2 = (ex2 - ex1) * (ex2 - ex1) + (ey2 - ey1) * (ey2 - ey1);
    let d_c2 = [
        if x1 <= gx1 { -2.0 * (ex2 - ex1) } else { 0.0 },
        if y1 <= gy1 { -2.0 * (ey2 - ey1) } else { 0.0 },
        if x2 >= gx2 { 2.0 * (ex2 - ex1) } else { 0.0 },
        if y2 >= gy2 { 2.0 * (ey2 - ey1) } else { 0.0 },
    ];

    let penalty = if c2 > 0.0 { rho2 / c2 } else { 0.0 };
    let mut grad = [0.0; 4];
    for i in 0..4 {
        let d_pen = if c2 > 0.0 {
            (d_rho2[i] * c2 - rho2 * d_c2[i]) / (c2 * c2)
        } else {
            0.0
        };
        grad[i] = -d_iou[i] + d_pen;
    }
    (1.0 - iou + penalty, grad)
}

/// Loss and gradient with respect to the raw accumulator potentials.
/// Degenerate (zero-area) targets are rejected.
pub fn diou_loss_and_grad(raw: &[f64; 4], target: &BBox) -> Result<(f64, [f64; 4])> {
    if target.area() <= 0.0 {
        return Err(Error::Numeric("DIoU target box has zero area".into()));
    }
    let p: Vec<f64> = raw.iter().map(|&r| logistic(r)).collect();
    // Fold corners into ordered (min, max) per axis, remembering routing.
    let (x1, x2, x_swapped) = if p[0] <= p[2] {
        (p[0], p[2], false)
    } else {
        (p[2], p[0], true)
    };
    let (y1, y2, y_swapped) = if p[1] <= p[3] {
        (p[1], p[3], false)
    } else {
        (p[3], p[1], true)
    };

    let (loss, g_folded) = diou_with_grad(
        (x1, y1, x2, y2),
        (target.x_min, target.y_min, target.x_max, target.y_max),
    );

    // Unfold: route folded-corner gradients back to the producing outputs.
    let (g_p0, g_p2) = if x_swapped {
        (g_folded[2], g_folded[0])
    } else {
        (g_folded[0], g_folded[2])
    };
    let (g_p1, g_p3) = if y_swapped {
        (g_folded[3], g_folded[1])
    } else {
        (g_folded[1], g_folded[3])
    };
    let mut grad = [g_p0, g_p1, g_p2, g_p3];
    for (g, &pi) in grad.iter_mut().zip(&p) {
        *g *= pi * (1.0 - pi); // logistic chain
    }
    Ok((loss, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn identical_boxes_zero_loss() {
        let b = (0.2, 0.3, 0.6, 0.8);
        assert!(diou(b, b).abs() < 1e-15);
    }

    #[test]
    fn hand_example_61_over_63() {
        // IoU = 1/7, center distance^2 = 2, enclosing diagonal^2 = 18.
        let loss = diou((0.0, 0.0, 2.0, 2.0), (1.0, 1.0, 3.0, 3.0));
        assert!((loss - 61.0 / 63.0).abs() < 1e-12, "loss {loss}");
    }

    #[test]
    fn loss_bounded_on_random_pairs() {
        let mut rng = Rng::new(31);
        for _ in 0..10_000 {
            let mut b = |l: f64| {
                let x1 = rng.next_range(0.0, 0.9);
                let y1 = rng.next_range(0.0, 0.9);
                (
                    x1,
                    y1,
                    x1 + rng.next_range(0.01, l),
                    y1 + rng.next_range(0.01, l),
                )
            };
            let p = b(0.6);
            let g = b(0.6);
            let loss = diou(p, g);
            assert!((0.0..2.0).contains(&loss), "loss {loss}");
        }
    }

    #[test]
    fn degenerate_target_rejected() {
        let target = BBox::new(0.3, 0.3, 0.3, 0.6).unwrap();
        assert!(diou_loss_and_grad(&[0.0; 4], &target).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let target = BBox::new(0.25, 0.3, 0.7, 0.65).unwrap();
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let raw = [
                rng.next_range(-1.5, 1.5),
                rng.next_range(-1.5, 1.5),
                rng.next_range(-1.5, 1.5),
                rng.next_range(-1.5, 1.5),
            ];
            let (_, grad) = diou_loss_and_grad(&raw, &target).unwrap();
            let h = 1e-6;
            for i in 0..4 {
                let mut plus = raw;
                plus[i] += h;
                let mut minus = raw;
                minus[i] -= h;
                let fd = (diou_loss_and_grad(&plus, &target).unwrap().0
                    - diou_loss_and_grad(&minus, &target).unwrap().0)
                    / (2.0 * h);
                assert!(
                    (fd - grad[i]).abs() < 1e-5,
                    "coord {i}: fd {fd} analytic {}",
                    grad[i]
                );
            }
        }
    }

    #[test]
    fn decode_box_always_valid() {
        let mut rng = Rng::new(7);
        for _ in 0..1000 {
            let raw = [
                rng.next_range(-10.0, 10.0),
                rng.next_range(-10.0, 10.0),
                rng.next_range(-10.0, 10.0),
                rng.next_range(-10.0, 10.0),
            ];
            let b = decode_box(&raw);
            assert!(b.x_min <= b.x_max && b.y_min <= b.y_max);
        }
    }
}
