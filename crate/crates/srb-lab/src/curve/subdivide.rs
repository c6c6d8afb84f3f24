//! Bisection engine: push a curve through the map and keep every piece
//! admissibly small at a schedule of checkpoint times.
//!
//! A piece [a, b] carries sample germs of h -> f^t(sigma(s_i + (b - a) h)),
//! one per sample offset s_i = a + (b - a) i / K. On bisection, children
//! keep the parent germs whose sample point they share (coefficient j
//! rescales by exactly 2^-j) and rebuild the missing ones from time zero,
//! so errors never compound across generations. Past certificates are
//! inherited at half value: shrinking the domain by half scales order k by
//! 2^-k <= 1/2, so the halved bound stays valid.
//!
//! Invariant: member intervals are pairwise disjoint dyadic intervals in
//! ascending order, and their union covers the retained parameter set.

use super::{CrSize, RegularCurve};
use crate::dynamics::series::CurveJet;
use crate::dynamics::SurfaceMap;
use crate::error::{LabError, Result};
use crate::orbit::ParameterSet;
use serde::{Deserialize, Serialize};

/// Hard bound on bisection depth; 2^-60 is still exactly dyadic in f64.
pub const DEPTH_CAP: u32 = 60;

/// Germ speed floor inside the engine. Scale-aware: deep pieces have
/// genuinely tiny scaled speed, so only guard against exact degeneracy.
const ENGINE_SPEED_FLOOR: f64 = 1e-100;

/// Checkpoint schedule and smallness thresholds for one subdivision run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubdivisionSchedule {
    /// Smoothness order r (coordinate derivatives up to r, direction up to r - 1).
    pub order: usize,
    pub eps: f64,
    pub eps_hat: f64,
    /// Strictly increasing checkpoint times; the last one is the horizon.
    pub marks: Vec<usize>,
    /// Doubles the sample resolution per piece (3 -> 7 germs).
    pub verify: bool,
}

impl SubdivisionSchedule {
    /// Checkpoints every `gap` steps plus the horizon itself.
    pub fn every(gap: usize, n: usize, order: usize, eps: f64, eps_hat: f64) -> Self {
        assert!(gap > 0);
        let mut marks: Vec<usize> = (1..).map(|k| k * gap).take_while(|&t| t < n).collect();
        if n > 0 {
            marks.push(n);
        }
        SubdivisionSchedule { order, eps, eps_hat, marks, verify: false }
    }

    pub fn horizon(&self) -> usize {
        self.marks.last().copied().unwrap_or(0)
    }

    fn validate(&self) -> Result<()> {
        if self.order < 2 || self.order > crate::dynamics::MAX_JET_ORDER {
            return Err(LabError::OrderUnavailable {
                requested: self.order,
                available: crate::dynamics::MAX_JET_ORDER,
            });
        }
        if !(self.eps > 0.0) || !(self.eps_hat > 0.0) {
            return Err(LabError::Config("smallness thresholds must be positive".into()));
        }
        if self.marks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::Config("marks must be strictly increasing".into()));
        }
        // A mark at time 0 is allowed: it forces the initial partition to
        // be admissible before any dynamics, which typed builds use as
        // their counting baseline.
        Ok(())
    }

    /// Sample offsets per piece are i / K for i = 0..=K.
    fn sample_denominator(&self) -> usize {
        if self.verify { 6 } else { 2 }
    }
}

/// One leaf piece of the final partition.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FamilyMember {
    pub a: f64,
    pub b: f64,
    pub depth: usize,
}

impl FamilyMember {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Output of a subdivision run: the leaf partition with a certificate per
/// (member, mark) pair, flat in member-major order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibleFamily {
    /// Horizon (last mark), 0 for the trivial family.
    pub n: usize,
    pub marks: Vec<usize>,
    pub order: usize,
    pub eps: f64,
    pub eps_hat: f64,
    /// Leaves in ascending parameter order.
    pub members: Vec<FamilyMember>,
    /// len = members.len() * marks.len().
    pub certificates: Vec<CrSize>,
    /// Number of pieces certified at each mark (partition cardinality then).
    pub pieces_at_mark: Vec<usize>,
}

impl AdmissibleFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ln_cardinality(&self) -> f64 {
        (self.members.len().max(1) as f64).ln()
    }

    pub fn certificate(&self, member: usize, mark: usize) -> CrSize {
        self.certificates[member * self.marks.len() + mark]
    }

    /// Total parameter length retained by the leaves.
    pub fn covered_length(&self) -> f64 {
        self.members.iter().map(|m| m.width()).sum()
    }
}

struct Engine<'a> {
    map: &'a SurfaceMap,
    curve: &'a RegularCurve,
    schedule: &'a SubdivisionSchedule,
    covered: Option<&'a ParameterSet>,
    denom: usize,
    /// Set on first error so sibling subtrees stop instead of subdividing
    /// to the cap themselves; the left-most error still wins the report.
    abort: std::sync::atomic::AtomicBool,
}

struct Piece {
    a: f64,
    b: f64,
    depth: usize,
    /// Map steps already applied to the germs.
    time: usize,
    /// Sample germs, one per offset i / denom, i = 0..=denom.
    jets: Vec<CurveJet>,
    /// Certificates for marks already passed, inheritance-scaled.
    certs: Vec<CrSize>,
}

#[derive(Default)]
struct Output {
    members: Vec<FamilyMember>,
    certificates: Vec<CrSize>,
    pieces_at_mark: Vec<usize>,
}

impl Output {
    fn with_marks(marks: usize) -> Self {
        Output { members: Vec::new(), certificates: Vec::new(), pieces_at_mark: vec![0; marks] }
    }

    fn merge(mut self, right: Output) -> Output {
        self.members.extend(right.members);
        self.certificates.extend(right.certificates);
        for (a, b) in self.pieces_at_mark.iter_mut().zip(right.pieces_at_mark) {
            *a += b;
        }
        self
    }
}

impl<'a> Engine<'a> {
    fn initial_piece(&self) -> Piece {
        let jets = (0..=self.denom)
            .map(|i| {
                let s = i as f64 / self.denom as f64;
                self.curve.scaled_jet(s, 1.0, self.schedule.order)
            })
            .collect();
        Piece { a: 0.0, b: 1.0, depth: 0, time: 0, jets, certs: Vec::new() }
    }

    fn advance(&self, piece: &mut Piece, to_time: usize) {
        debug_assert!(piece.time <= to_time);
        while piece.time < to_time {
            for jet in piece.jets.iter_mut() {
                *jet = self.map.push_curve_jet(jet);
            }
            piece.time += 1;
        }
    }

    /// Sampled smooth size of the piece at its current time.
    fn measure(&self, piece: &Piece) -> Result<CrSize> {
        let r = self.schedule.order;
        let mut eps = 0.0f64;
        for (i, jet) in piece.jets.iter().enumerate() {
            let speed = jet.derivative_norm(1);
            if speed < ENGINE_SPEED_FLOOR {
                let s = piece.a + (piece.b - piece.a) * i as f64 / self.denom as f64;
                return Err(LabError::DegenerateCurve { s, speed });
            }
            for k in 1..=r {
                eps = eps.max(jet.derivative_norm(k));
            }
        }
        if eps > self.schedule.eps {
            // The piece will be bisected and this value discarded, so the
            // direction series (the expensive half) can be skipped.
            return Ok(CrSize { eps, eps_hat: f64::INFINITY });
        }
        let mut eps_hat = 0.0f64;
        for jet in &piece.jets {
            for d in jet.direction_derivatives(r - 1) {
                eps_hat = eps_hat.max(d.abs());
            }
        }
        Ok(CrSize { eps, eps_hat })
    }

    /// Fresh germ for sample i of the piece [a, b], replayed from time 0.
    fn rebuild_jet(&self, a: f64, b: f64, i: usize, time: usize) -> CurveJet {
        let s = a + (b - a) * i as f64 / self.denom as f64;
        let mut jet = self.curve.scaled_jet(s, b - a, self.schedule.order);
        for _ in 0..time {
            jet = self.map.push_curve_jet(&jet);
        }
        jet
    }

    /// Exact coefficient rescale for a domain halved around the same point.
    fn halve_jet(jet: &CurveJet) -> CurveJet {
        let mut out = jet.clone();
        let mut pw = 1.0f64;
        for j in 0..out.u.c.len() {
            out.u.c[j] *= pw;
            out.v.c[j] *= pw;
            pw *= 0.5;
        }
        out
    }

    /// Children of a piece: shared samples inherited, the rest rebuilt.
    /// Left child sample i sits at parent offset i / 2; right child at
    /// denom / 2 + i / 2. Even i is inherited, odd i rebuilt.
    fn bisect(&self, piece: &Piece) -> (Piece, Piece) {
        let m = 0.5 * (piece.a + piece.b);
        let half = self.denom / 2;
        let certs: Vec<CrSize> = piece.certs.iter().map(|c| c.scaled_half()).collect();
        let child = |a: f64, b: f64, base: usize| -> Piece {
            let jets = (0..=self.denom)
                .map(|i| {
                    if i % 2 == 0 {
                        Self::halve_jet(&piece.jets[base + i / 2])
                    } else {
                        self.rebuild_jet(a, b, i, piece.time)
                    }
                })
                .collect();
            Piece {
                a,
                b,
                depth: piece.depth + 1,
                time: piece.time,
                jets,
                certs: certs.clone(),
            }
        };
        (child(piece.a, m, 0), child(m, piece.b, half))
    }

    fn retained(&self, a: f64, b: f64) -> bool {
        self.covered.map_or(true, |set| set.intersects(a, b))
    }

    /// Drive a piece through the remaining marks, bisecting as needed.
    /// `pieces_at_mark[j]` counts pieces the moment they certify mark j,
    /// so it reports the partition cardinality at that time, not the
    /// number of eventual descendants.
    fn process(&self, mut piece: Piece, mark_idx: usize) -> Result<Output> {
        use std::sync::atomic::Ordering;
        let marks = &self.schedule.marks;
        if self.abort.load(Ordering::Relaxed) {
            // Another branch already failed; its error is propagating.
            return Ok(Output::with_marks(marks.len()));
        }
        let mut passed: Vec<usize> = Vec::new();
        let mut idx = mark_idx;
        loop {
            if idx == marks.len() {
                // All marks passed: the piece is a leaf.
                let mut out = Output::with_marks(marks.len());
                for &j in &passed {
                    out.pieces_at_mark[j] += 1;
                }
                out.members.push(FamilyMember { a: piece.a, b: piece.b, depth: piece.depth });
                out.certificates.extend(piece.certs);
                return Ok(out);
            }
            self.advance(&mut piece, marks[idx]);
            let size = match self.measure(&piece) {
                Ok(s) => s,
                Err(e) => {
                    self.abort.store(true, Ordering::Relaxed);
                    return Err(e);
                }
            };
            if size.within(self.schedule.eps, self.schedule.eps_hat) {
                piece.certs.push(size);
                passed.push(idx);
                idx += 1;
                continue;
            }
            if piece.depth >= DEPTH_CAP as usize {
                self.abort.store(true, Ordering::Relaxed);
                return Err(LabError::DepthCapExhausted {
                    lo: piece.a,
                    hi: piece.b,
                    time: marks[idx],
                    cap: DEPTH_CAP,
                });
            }
            let (left, right) = self.bisect(&piece);
            let keep_left = self.retained(left.a, left.b);
            let keep_right = self.retained(right.a, right.b);
            let run = |p: Piece, keep: bool| -> Result<Output> {
                if keep {
                    self.process(p, idx)
                } else {
                    Ok(Output::with_marks(marks.len()))
                }
            };
            let (lres, rres) =
                rayon::join(move || run(left, keep_left), move || run(right, keep_right));
            let mut out = lres?.merge(rres?);
            for &j in &passed {
                out.pieces_at_mark[j] += 1;
            }
            return Ok(out);
        }
    }
}

/// Run the bisection engine: subdivide `curve` so that every piece stays
/// (eps, eps_hat)-small at order r at every mark, restricted to pieces
/// meeting `covered` when given. Deterministic regardless of worker count.
pub fn yomdin_subdivide(
    map: &SurfaceMap,
    curve: &RegularCurve,
    schedule: &SubdivisionSchedule,
    covered: Option<&ParameterSet>,
) -> Result<AdmissibleFamily> {
    schedule.validate()?;
    let engine = Engine {
        map,
        curve,
        schedule,
        covered,
        denom: schedule.sample_denominator(),
        abort: std::sync::atomic::AtomicBool::new(false),
    };
    let out = if schedule.marks.is_empty() {
        // Horizon zero: the whole curve, no certificates to record.
        let mut out = Output::with_marks(0);
        out.members.push(FamilyMember { a: 0.0, b: 1.0, depth: 0 });
        out
    } else {
        engine.process(engine.initial_piece(), 0)?
    };
    Ok(AdmissibleFamily {
        n: schedule.horizon(),
        marks: schedule.marks.clone(),
        order: schedule.order,
        eps: schedule.eps,
        eps_hat: schedule.eps_hat,
        members: out.members,
        certificates: out.certificates,
        pieces_at_mark: out.pieces_at_mark,
    })
}

/// Admissible family over the whole curve with checkpoints every `gap`
/// steps up to horizon n. Horizon zero yields the trivial one-piece family.
pub fn admissible_family(
    map: &SurfaceMap,
    curve: &RegularCurve,
    n: usize,
    gap: usize,
    order: usize,
    eps: f64,
    eps_hat: f64,
    verify: bool,
) -> Result<AdmissibleFamily> {
    let mut schedule = SubdivisionSchedule::every(gap, n, order, eps, eps_hat);
    schedule.verify = verify;
    yomdin_subdivide(map, curve, &schedule, None)
}

/// Counting floor for a family covering an expanding parameter set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub n: usize,
    pub total_members: usize,
    pub ln_card: f64,
    /// 2 n ln(rho) + lambda_min n + ln(min curve speed).
    pub required: f64,
    pub margin: f64,
    pub covering_ok: bool,
    pub passed: bool,
}

/// Check that the families jointly cover the parameter set and that their
/// total cardinality meets the expansion floor: pieces admissibly small at
/// the horizon cannot be fewer than the stretched length demands.
pub fn lower_bound_check(
    families: &[AdmissibleFamily],
    curve: &RegularCurve,
    covered: &ParameterSet,
    rho: f64,
    lambda_min: f64,
) -> LowerBoundReport {
    assert!(!families.is_empty());
    let n = families[0].n;
    debug_assert!(families.iter().all(|f| f.n == n));
    let total: usize = families.iter().map(|f| f.len()).sum();

    let w = covered.delta_s / 2.0;
    let mut hit = vec![false; covered.members.len()];
    for family in families {
        // Members ascend; parameters ascend: two-pointer sweep.
        let mut k = 0usize;
        for member in &family.members {
            while k < covered.members.len() && covered.members[k] < member.a - w {
                k += 1;
            }
            let mut j = k;
            while j < covered.members.len() && covered.members[j] <= member.b + w {
                hit[j] = true;
                j += 1;
            }
        }
    }
    let covering_ok = hit.iter().all(|&h| h);

    let mut min_speed = f64::INFINITY;
    for i in 0..=1024 {
        min_speed = min_speed.min(curve.speed(i as f64 / 1024.0));
    }
    let required = 2.0 * n as f64 * rho.ln() + lambda_min * n as f64 + min_speed.ln();
    let ln_card = (total.max(1) as f64).ln();
    let margin = ln_card - required;
    LowerBoundReport {
        n,
        total_members: total,
        ln_card,
        required,
        margin,
        covering_ok,
        passed: covering_ok && margin >= -1e-12,
    }
}
