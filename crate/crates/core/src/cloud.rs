//! Deterministic word-cloud layout and SVG rendering.
//!
//! Words are sized linearly by document frequency and placed largest first,
//! each walking an Archimedean spiral out from the canvas centre until its
//! bounding box fits without touching an earlier word. Glyph widths are
//! estimated as `char_aspect × font_size` per character, so no font metrics
//! are needed.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::TermStats;
use crate::round2;
use crate::svg::{num, SvgDocument};

/// Angle advanced per spiral step, in radians.
const ANGLE_STEP: f64 = 0.1;
/// Spiral radius gained per radian turned, in pixels.
const RADIUS_PER_RADIAN: f64 = 0.5;
/// Steps tried before a word is dropped.
pub const STEP_BUDGET: usize = 10_000;

const PALETTE: [&str; 6] = ["#1b4f72", "#943126", "#1e8449", "#7d3c98", "#b9770e", "#2e4053"];

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("no term statistics to lay out")]
    EmptyStats,
    #[error("minimum font size {min_font} does not fit a canvas {height} px tall")]
    ImpossibleConfig { min_font: f64, height: f64 },
    #[error("invalid cloud config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CloudConfig {
    pub max_words: usize,
    /// (width, height) in pixels.
    pub canvas: (f64, f64),
    /// (min, max) font size in points.
    pub font_range: (f64, f64),
    pub seed: u64,
    /// Estimated glyph width as a fraction of the font size.
    pub char_aspect: f64,
}

impl Default for CloudConfig {
    fn default() -> Self {
        CloudConfig {
            max_words: 100,
            canvas: (800.0, 600.0),
            font_range: (12.0, 64.0),
            seed: 42,
            char_aspect: 0.6,
        }
    }
}

impl CloudConfig {
    pub fn validate(&self) -> Result<(), CloudError> {
        let (w, h) = self.canvas;
        let (lo, hi) = self.font_range;
        let invalid = |msg: &str| Err(CloudError::InvalidConfig(msg.to_string()));
        if self.max_words == 0 {
            return invalid("max_words must be positive");
        }
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return invalid("canvas dimensions must be positive");
        }
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return invalid("font_range must satisfy 0 < min <= max");
        }
        if !(self.char_aspect.is_finite() && self.char_aspect > 0.0) {
            return invalid("char_aspect must be positive");
        }
        if lo > h {
            return Err(CloudError::ImpossibleConfig {
                min_font: lo,
                height: h,
            });
        }
        Ok(())
    }
}

/// Axis-aligned rectangle; `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    /// True when the interiors intersect; touching edges do not count.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    pub fn inside(&self, width: f64, height: f64) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.x + self.w <= width && self.y + self.h <= height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedWord {
    pub term: String,
    pub document_frequency: usize,
    pub font_size: f64,
    /// Centre of the bounding box; the text is drawn centred on it.
    pub anchor: (f64, f64),
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCloudLayout {
    pub config: CloudConfig,
    pub placed: Vec<PlacedWord>,
    /// Selected terms that found no free spot.
    pub dropped: Vec<String>,
}

fn font_size(df: usize, df_min: usize, df_max: usize, (lo, hi): (f64, f64)) -> f64 {
    if df_max == df_min {
        hi
    } else {
        lo + (df - df_min) as f64 / (df_max - df_min) as f64 * (hi - lo)
    }
}

/// Lays out the `max_words` most frequent terms (ties by term).
pub fn layout_cloud(stats: &[TermStats], config: &CloudConfig) -> Result<WordCloudLayout, CloudError> {
    if stats.is_empty() {
        return Err(CloudError::EmptyStats);
    }
    config.validate()?;

    let mut selected: Vec<&TermStats> = stats.iter().collect();
    selected.sort_by(|a, b| {
        b.document_frequency
            .cmp(&a.document_frequency)
            .then_with(|| a.term.cmp(&b.term))
    });
    selected.truncate(config.max_words);
    let df_max = selected.first().map_or(0, |s| s.document_frequency);
    let df_min = selected.last().map_or(0, |s| s.document_frequency);

    let (width, height) = config.canvas;
    let (cx0, cy0) = (width / 2.0, height / 2.0);
    let max_radius = cx0.hypot(cy0);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut placed: Vec<PlacedWord> = Vec::new();
    let mut dropped = Vec::new();
    let mut last_hit = 0usize;

    for stat in selected {
        let size = font_size(stat.document_frequency, df_min, df_max, config.font_range);
        let (w, h) = (config.char_aspect * size * stat.term.chars().count() as f64, size);
        // Drawn for every word so later words see the same stream whether or
        // not this one fits.
        let phase = rng.gen::<f64>() * TAU;

        let mut spot = None;
        if w <= width && h <= height {
            for step in 0..STEP_BUDGET {
                let theta = step as f64 * ANGLE_STEP;
                let r = RADIUS_PER_RADIAN * theta;
                if r > max_radius {
                    // Centre is off the canvas from here on.
                    break;
                }
                let cx = round2(cx0 + r * (theta + phase).cos());
                let cy = round2(cy0 + r * (theta + phase).sin());
                let bbox = Rect {
                    x: cx - w / 2.0,
                    y: cy - h / 2.0,
                    w,
                    h,
                };
                if !bbox.inside(width, height) {
                    continue;
                }
                if placed.get(last_hit).is_some_and(|p| p.bbox.overlaps(&bbox)) {
                    continue;
                }
                if let Some(hit) = placed.iter().position(|p| p.bbox.overlaps(&bbox)) {
                    last_hit = hit;
                    continue;
                }
                spot = Some(((cx, cy), bbox));
                break;
            }
        }

        match spot {
            Some((anchor, bbox)) => placed.push(PlacedWord {
                term: stat.term.clone(),
                document_frequency: stat.document_frequency,
                font_size: size,
                anchor,
                bbox,
            }),
            None => dropped.push(stat.term.clone()),
        }
    }

    Ok(WordCloudLayout {
        config: config.clone(),
        placed,
        dropped,
    })
}

/// SVG 1.1 document with one `<text>` per placed word, in placement order.
pub fn render_svg(layout: &WordCloudLayout) -> Vec<u8> {
    let (width, height) = layout.config.canvas;
    let mut doc = SvgDocument::new(width, height);
    doc.rect(0.0, 0.0, width, height, "#ffffff");
    for (i, word) in layout.placed.iter().enumerate() {
        doc.element(
            "text",
            &[
                ("x", num(word.anchor.0)),
                ("y", num(word.anchor.1)),
                ("font-family", "sans-serif".into()),
                ("font-size", num(word.font_size)),
                ("text-anchor", "middle".into()),
                ("dominant-baseline", "central".into()),
                ("fill", PALETTE[i % PALETTE.len()].into()),
            ],
            Some(&word.term),
        );
    }
    doc.finish()
}
