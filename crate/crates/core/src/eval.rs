//! Fixing-performance metrics: force resolution, jig-frame displacement and
//! the push-distance success rule.

use alloc::string::String;

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub type Point2 = Vector2<f64>;

pub const DEFAULT_JIG_WIDTH_MM: f64 = 160.0;
pub const DEFAULT_PUSH_MM: f64 = 70.0;
pub const DEFAULT_SUCCESS_RATIO: f64 = 0.9;

/// Relative slack on the success threshold so that a value printed as
/// exactly the threshold is not rejected by the last bit of rounding.
const THRESHOLD_SLACK: f64 = 1e-12;

/// One force-plate reading (N), optionally timestamped (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub t: Option<f64>,
}

impl ForceSample {
    pub fn new(fx: f64, fy: f64, fz: f64) -> Self {
        Self {
            fx,
            fy,
            fz,
            t: None,
        }
    }

    pub fn at(self, t: f64) -> Self {
        Self { t: Some(t), ..self }
    }
}

/// Normal and shear magnitudes `(|fz|, |(fx, fy)|)`.
pub fn resolve_forces(s: &ForceSample) -> Result<(f64, f64)> {
    if !(s.fx.is_finite() && s.fy.is_finite() && s.fz.is_finite()) {
        return Err(Error::NonFiniteForce);
    }
    Ok((s.fz.abs(), libm::hypot(s.fx, s.fy)))
}

/// Independent maxima of the normal and shear magnitudes over a series.
pub fn peak_forces(series: &[ForceSample]) -> Result<(f64, f64)> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    series.iter().try_fold((0.0f64, 0.0f64), |(n, s), sample| {
        let (fn_, fs) = resolve_forces(sample)?;
        Ok((n.max(fn_), s.max(fs)))
    })
}

/// The four screw markers seen in one image, in pixels. `points[0]` marks
/// the +y screw and `points[1]` the +x screw; the other two follow around.
#[derive(Debug, Clone, PartialEq)]
pub struct JigFrameObservation {
    pub image_tag: String,
    pub points: [Point2; 4],
}

impl JigFrameObservation {
    pub fn new(image_tag: impl Into<String>, points: [[f64; 2]; 4]) -> Result<Self> {
        let obs = Self {
            image_tag: image_tag.into(),
            points: points.map(|[x, y]| Point2::new(x, y)),
        };
        obs.validate()?;
        Ok(obs)
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .points
            .iter()
            .any(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::InvalidObservation(alloc::format!(
                "'{}' has a non-finite point",
                self.image_tag
            )));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if self.points[i] == self.points[j] {
                    return Err(Error::InvalidObservation(alloc::format!(
                        "'{}': points {} and {} coincide",
                        self.image_tag,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn translated(&self, by: Point2) -> Self {
        Self {
            image_tag: self.image_tag.clone(),
            points: self.points.map(|p| p + by),
        }
    }
}

/// In-plane jig frame: axes relative to the marker centroid, plus the centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JigFrame {
    pub x_hat: Point2,
    pub y_hat: Point2,
    pub centroid: Point2,
}

pub fn jig_frame(obs: &JigFrameObservation) -> Result<JigFrame> {
    obs.validate()?;
    let [p1, p2, p3, p4] = obs.points;
    let centroid = (p1 + p2 + p3 + p4) / 4.0;
    let x_hat = p2 - centroid;
    let y_hat = p1 - centroid;
    if x_hat == Point2::zeros() || y_hat == Point2::zeros() {
        return Err(Error::InvalidObservation(alloc::format!(
            "'{}': a marker sits on the centroid",
            obs.image_tag
        )));
    }
    Ok(JigFrame {
        x_hat,
        y_hat,
        centroid,
    })
}

/// Distance between two jig frames from their relative axes, in pixels.
///
/// Because the axes are taken relative to the centroid this measures
/// rotation and deformation of the marker pattern, not its translation.
pub fn frame_distance(before: &JigFrameObservation, after: &JigFrameObservation) -> Result<f64> {
    let a = jig_frame(before)?;
    let b = jig_frame(after)?;
    let dx = b.x_hat - a.x_hat;
    let dy = b.y_hat - a.y_hat;
    Ok(libm::sqrt(dx.norm_squared() + dy.norm_squared()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    pub jig_width_px: f64,
    pub jig_width_mm: f64,
    pub push_mm: f64,
    pub success_ratio: f64,
}

impl DisplacementParams {
    pub fn new(jig_width_px: f64) -> Self {
        Self {
            jig_width_px,
            jig_width_mm: DEFAULT_JIG_WIDTH_MM,
            push_mm: DEFAULT_PUSH_MM,
            success_ratio: DEFAULT_SUCCESS_RATIO,
        }
    }

    pub fn threshold_mm(&self) -> f64 {
        self.success_ratio * self.push_mm
    }

    fn validate(&self) -> Result<()> {
        for w in [self.jig_width_px, self.jig_width_mm] {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWidth(w));
            }
        }
        if !(self.push_mm >= 0.0 && self.push_mm.is_finite())
            || !(self.success_ratio >= 0.0 && self.success_ratio.is_finite())
        {
            return Err(Error::InvalidObservation(alloc::format!(
                "push {} mm and ratio {} must be finite and non-negative",
                self.push_mm,
                self.success_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementResult {
    pub frame_distance_px: f64,
    pub centroid_translation_px: f64,
    pub mm_per_px: f64,
    pub centroid_translation_mm: f64,
    pub success: bool,
}

/// True when `displacement_mm` reaches the threshold (inclusive).
pub fn is_success(displacement_mm: f64, params: &DisplacementParams) -> bool {
    let threshold = params.threshold_mm();
    displacement_mm >= threshold - THRESHOLD_SLACK * threshold.abs()
}

/// Measures how far the jig moved between two images and classifies the trial.
pub fn displacement_report(
    before: &JigFrameObservation,
    after: &JigFrameObservation,
    params: &DisplacementParams,
) -> Result<DisplacementResult> {
    params.validate()?;
    let frame_distance_px = frame_distance(before, after)?;
    let moved = jig_frame(after)?.centroid - jig_frame(before)?.centroid;
    let centroid_translation_px = moved.norm();
    let mm_per_px = params.jig_width_mm / params.jig_width_px;
    let centroid_translation_mm = centroid_translation_px * mm_per_px;
    Ok(DisplacementResult {
        frame_distance_px,
        centroid_translation_px,
        mm_per_px,
        centroid_translation_mm,
        success: is_success(centroid_translation_mm, params),
    })
}
