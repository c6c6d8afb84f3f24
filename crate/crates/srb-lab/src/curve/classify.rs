//! Orbit-segment classification and the counting checks built on it.
//!
//! An orbit window [0, n) is tiled left to right: long neutral windows
//! that spend almost all their time in the reference region become
//! blanks, neutral windows that do not are dissolved into unit fillers,
//! and the remaining free stretches greedily emit fixed-length color
//! windows where the matching start flag is set, with unit fillers
//! padding whatever is left. The tile sequence (starts and classes) is
//! the window's type; distinct types are what the counting bound caps.

use super::subdivide::AdmissibleFamily;
use super::RegularCurve;
use crate::dynamics::SurfaceMap;
use crate::error::{LabError, Result};
use crate::orbit::{long_neutral_segments, ParameterSet, Segment};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentClass {
    Blank,
    Color(usize),
    Filler,
}

impl SegmentClass {
    /// Stable integer code used in type vectors: colors map to their
    /// index, blank to -1, filler to -2.
    pub fn code(&self) -> i64 {
        match self {
            SegmentClass::Blank => -1,
            SegmentClass::Filler => -2,
            SegmentClass::Color(c) => *c as i64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedSegment {
    pub segment: Segment,
    pub class: SegmentClass,
}

/// A left-to-right tiling of [0, n) into classified segments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentClassification {
    pub n: usize,
    pub segments: Vec<ClassifiedSegment>,
}

pub type TypeVector = Vec<(usize, i64)>;

impl SegmentClassification {
    /// The (start, class-code) sequence identifying this tiling.
    pub fn type_vector(&self) -> TypeVector {
        self.segments.iter().map(|s| (s.segment.start, s.class.code())).collect()
    }

    pub fn total_len(&self, class_filter: impl Fn(&SegmentClass) -> bool) -> usize {
        self.segments
            .iter()
            .filter(|s| class_filter(&s.class))
            .map(|s| s.segment.len())
            .sum()
    }
}

/// Tile an orbit window. `sums` are the Birkhoff sums of the expansion
/// observable (length n + 1); `in_reference[i]` flags visits to the
/// reference region; `color_starts[c][i]` flags indices where color c's
/// window may begin; `window_lens[c]` is that window's fixed length.
///
/// Consistency demands distinct window lengths above 1 / gamma and a
/// neutral cap above 2 max(window) / gamma; violations are errors, not
/// silently adjusted.
pub fn classify_segments(
    sums: &[f64],
    alpha: f64,
    cap_len: usize,
    gamma: f64,
    in_reference: &[bool],
    color_starts: &[Vec<bool>],
    window_lens: &[usize],
) -> Result<SegmentClassification> {
    let n = sums.len().saturating_sub(1);
    if in_reference.len() != n {
        return Err(LabError::Config(format!(
            "reference flags: expected {n}, got {}",
            in_reference.len()
        )));
    }
    if color_starts.len() != window_lens.len() {
        return Err(LabError::Config("one start-flag row per color".into()));
    }
    if color_starts.iter().any(|row| row.len() != n) {
        return Err(LabError::Config("start-flag rows must have length n".into()));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LabError::Config("gamma must lie in (0, 1)".into()));
    }
    let mut seen = BTreeSet::new();
    for &w in window_lens {
        if !seen.insert(w) {
            return Err(LabError::InconsistentClassification(format!(
                "color window length {w} repeats"
            )));
        }
        if (w as f64) <= 1.0 / gamma {
            return Err(LabError::InconsistentClassification(format!(
                "color window {w} not above 1/gamma = {}",
                1.0 / gamma
            )));
        }
    }
    if let Some(&wmax) = window_lens.iter().max() {
        if (cap_len as f64) <= 2.0 * wmax as f64 / gamma {
            return Err(LabError::InconsistentClassification(format!(
                "neutral cap {cap_len} not above 2 max(window)/gamma = {}",
                2.0 * wmax as f64 / gamma
            )));
        }
    }

    // Long neutral windows, each either a blank or dissolved to fillers.
    let neutral = long_neutral_segments(sums, alpha, cap_len);
    let mut reserved: Vec<(Segment, bool)> = Vec::with_capacity(neutral.len());
    for seg in neutral {
        let visits = (seg.start..seg.end).filter(|&i| in_reference[i]).count();
        let dense = visits as f64 > (1.0 - gamma) * seg.len() as f64;
        reserved.push((seg, dense));
    }

    let mut segments = Vec::new();
    let mut res_idx = 0usize;
    let mut i = 0usize;
    while i < n {
        if res_idx < reserved.len() && reserved[res_idx].0.start == i {
            let (seg, dense) = reserved[res_idx];
            res_idx += 1;
            if dense {
                segments.push(ClassifiedSegment { segment: seg, class: SegmentClass::Blank });
                i = seg.end;
            } else {
                while i < seg.end {
                    segments.push(ClassifiedSegment {
                        segment: Segment { start: i, end: i + 1 },
                        class: SegmentClass::Filler,
                    });
                    i += 1;
                }
            }
            continue;
        }
        let limit = if res_idx < reserved.len() { reserved[res_idx].0.start } else { n };
        let mut emitted = false;
        for (c, starts) in color_starts.iter().enumerate() {
            let w = window_lens[c];
            if starts[i] && i + w <= limit {
                segments.push(ClassifiedSegment {
                    segment: Segment { start: i, end: i + w },
                    class: SegmentClass::Color(c),
                });
                i += w;
                emitted = true;
                break;
            }
        }
        if !emitted {
            segments.push(ClassifiedSegment {
                segment: Segment { start: i, end: i + 1 },
                class: SegmentClass::Filler,
            });
            i += 1;
        }
    }
    Ok(SegmentClassification { n, segments })
}

/// Occupancy targets for a tiling: blank time at least (1 - beta - 4
/// gamma) n, each color at most its share plus gamma n, fillers at most
/// 6 gamma n. Purely a report; desk-scale windows often miss these.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SizeBudgetReport {
    pub n: usize,
    pub blank_total: usize,
    pub blank_floor: f64,
    pub blank_ok: bool,
    pub color_totals: Vec<usize>,
    pub color_caps: Vec<f64>,
    pub colors_ok: bool,
    pub filler_total: usize,
    pub filler_cap: f64,
    pub filler_ok: bool,
    pub passed: bool,
}

pub fn size_budget_check(
    classification: &SegmentClassification,
    beta: f64,
    gamma: f64,
    shares: &[f64],
) -> SizeBudgetReport {
    let n = classification.n as f64;
    let blank_total = classification.total_len(|c| matches!(c, SegmentClass::Blank));
    let blank_floor = (1.0 - beta) * n - 4.0 * gamma * n;
    let blank_ok = blank_total as f64 >= blank_floor;
    let mut color_totals = Vec::with_capacity(shares.len());
    let mut color_caps = Vec::with_capacity(shares.len());
    let mut colors_ok = true;
    for (c, &share) in shares.iter().enumerate() {
        let total = classification.total_len(|cl| *cl == SegmentClass::Color(c));
        let cap = beta * share * n + gamma * n;
        colors_ok &= total as f64 <= cap;
        color_totals.push(total);
        color_caps.push(cap);
    }
    let filler_total = classification.total_len(|c| matches!(c, SegmentClass::Filler));
    let filler_cap = 6.0 * gamma * n;
    let filler_ok = filler_total as f64 <= filler_cap;
    SizeBudgetReport {
        n: classification.n,
        blank_total,
        blank_floor,
        blank_ok,
        color_totals,
        color_caps,
        colors_ok,
        filler_total,
        filler_cap,
        filler_ok,
        passed: blank_ok && colors_ok && filler_ok,
    }
}

/// Entropy of a two-valued distribution, in nats.
pub fn binary_entropy(t: f64) -> f64 {
    assert!(t > 0.0 && t < 1.0, "binary entropy needs t in (0, 1)");
    -t * t.ln() - (1.0 - t) * (1.0 - t).ln()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypeCountReport {
    pub n: usize,
    pub distinct: usize,
    /// exp(H(10 gamma) n).
    pub bound: f64,
    pub passed: bool,
}

/// Distinct tile types among the given windows, against the combinatorial
/// cap exp(H(10 gamma) n). Requires 10 gamma < 1/2 so the cap regime holds.
pub fn count_types(types: &[TypeVector], gamma: f64, n: usize) -> Result<TypeCountReport> {
    if !(10.0 * gamma < 0.5) {
        return Err(LabError::Config(format!(
            "type counting needs 10 gamma < 1/2, got gamma = {gamma}"
        )));
    }
    let distinct: BTreeSet<&TypeVector> = types.iter().collect();
    let bound = (binary_entropy(10.0 * gamma) * n as f64).exp();
    Ok(TypeCountReport {
        n,
        distinct: distinct.len(),
        bound,
        passed: distinct.len() as f64 <= bound,
    })
}

/// Per-color data entering the growth budgets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColorBudget {
    /// Fixed window length of this color.
    pub window: usize,
    /// Entropy rate charged inside the window.
    pub entropy: f64,
    /// Occupancy share of this color (used by the size budget).
    pub share: f64,
}

/// Growth-rate budget per segment class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KappaTable {
    pub lambda_hat: f64,
    /// Smoothness order r; the smoothing dividend is lambda_hat / (r - 1).
    pub order: usize,
    pub eta: f64,
    pub colors: Vec<ColorBudget>,
    /// Flat per-step rate charged to fillers.
    pub filler_constant: f64,
}

impl KappaTable {
    pub fn new(lambda_hat: f64, order: usize, eta: f64, colors: Vec<ColorBudget>) -> Self {
        KappaTable { lambda_hat, order, eta, colors, filler_constant: 2.0 }
    }

    /// Budgeted log-growth per step for a segment of the given class.
    pub fn rate(&self, class: &SegmentClass) -> f64 {
        let dividend = self.lambda_hat / (self.order as f64 - 1.0);
        match class {
            SegmentClass::Blank => dividend + self.eta,
            SegmentClass::Color(c) => self.colors[*c].entropy + dividend + 2.0 * self.eta,
            SegmentClass::Filler => self.filler_constant,
        }
    }
}

/// Growth of the piece partition across one classified segment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentGrowth {
    pub segment: Segment,
    pub class: SegmentClass,
    pub log_budget: f64,
    pub log_actual: f64,
    pub within: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypedFamilyBuild {
    pub family: AdmissibleFamily,
    pub per_segment: Vec<SegmentGrowth>,
    pub passed: bool,
}

/// Subdivide along one classified window, with checkpoints at time zero,
/// every segment boundary, and every `gap` steps inside a segment, and
/// compare each segment's partition growth against its class budget. The
/// time-zero partition (the cost of making the raw curve small) is the
/// baseline, not part of any segment's bill.
pub fn build_family_for_type(
    map: &SurfaceMap,
    curve: &RegularCurve,
    classification: &SegmentClassification,
    kappa: &KappaTable,
    eps: f64,
    eps_hat: f64,
    gap: usize,
    covered: Option<&ParameterSet>,
    verify: bool,
) -> Result<TypedFamilyBuild> {
    assert!(gap > 0);
    let mut marks = BTreeSet::new();
    marks.insert(0);
    for seg in &classification.segments {
        let mut t = seg.segment.start + gap;
        while t < seg.segment.end {
            marks.insert(t);
            t += gap;
        }
        marks.insert(seg.segment.end);
    }
    let marks: Vec<usize> = marks.into_iter().collect();
    let schedule = super::subdivide::SubdivisionSchedule {
        order: kappa.order,
        eps,
        eps_hat,
        marks,
        verify,
    };
    let family = super::subdivide::yomdin_subdivide(map, curve, &schedule, covered)?;

    let cardinality_at = |time: usize| -> f64 {
        let idx = family.marks.binary_search(&time).expect("segment boundary is a mark");
        family.pieces_at_mark[idx].max(1) as f64
    };
    let mut per_segment = Vec::with_capacity(classification.segments.len());
    let mut passed = true;
    for seg in &classification.segments {
        let log_actual =
            cardinality_at(seg.segment.end).ln() - cardinality_at(seg.segment.start).ln();
        let log_budget = kappa.rate(&seg.class) * seg.segment.len() as f64;
        let within = log_actual <= log_budget + 1e-12;
        passed &= within;
        per_segment.push(SegmentGrowth {
            segment: seg.segment,
            class: seg.class,
            log_budget,
            log_actual,
            within,
        });
    }
    Ok(TypedFamilyBuild { family, per_segment, passed })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpperBoundReport {
    pub n: usize,
    pub total_members: usize,
    pub ln_total: f64,
    /// n (beta h + lambda_hat / (r - 1) + 4 eta + H(10 gamma)).
    pub cap: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Counting ceiling: the families across all observed types cannot exceed
/// exp(n (beta h + lambda_hat / (r - 1) + 4 eta + H(10 gamma))).
#[allow(clippy::too_many_arguments)]
pub fn upper_bound_check(
    families: &[AdmissibleFamily],
    n: usize,
    beta: f64,
    entropy: f64,
    lambda_hat: f64,
    order: usize,
    eta: f64,
    gamma: f64,
) -> Result<UpperBoundReport> {
    if !(10.0 * gamma < 0.5) {
        return Err(LabError::Config(format!(
            "counting cap needs 10 gamma < 1/2, got gamma = {gamma}"
        )));
    }
    if order < 2 {
        return Err(LabError::OrderUnavailable { requested: order, available: 2 });
    }
    let total: usize = families.iter().map(|f| f.len()).sum();
    let ln_total = (total.max(1) as f64).ln();
    let cap = n as f64
        * (beta * entropy
            + lambda_hat / (order as f64 - 1.0)
            + 4.0 * eta
            + binary_entropy(10.0 * gamma));
    let margin = cap - ln_total;
    Ok(UpperBoundReport { n, total_members: total, ln_total, cap, margin, passed: margin >= -1e-12 })
}
