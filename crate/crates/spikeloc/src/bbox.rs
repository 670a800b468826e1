//! Normalized bounding boxes.

use crate::error::{Error, Result};

/// Axis-aligned box in normalized image fractions, corners
/// (x_min, y_min) upper-left and (x_max, y_max) bottom-right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let vals = [x_min, y_min, x_max, y_max];
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::Data(
                "bbox coordinates must be finite and in [0,1]".into(),
            ));
        }
        if x_min > x_max || y_min > y_max {
            return Err(Error::Data(
                "bbox requires x_min <= x_max and y_min <= y_max".into(),
            ));
        }
        Ok(BBox {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    /// Build from unordered corner coordinates by folding (min, max) per axis.
    pub fn from_unordered(x_a: f64, y_a: f64, x_b: f64, y_b: f64) -> Result<Self> {
        BBox::new(x_a.min(x_b), y_a.min(y_b), x_a.max(x_b), y_a.max(y_b))
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }
}
