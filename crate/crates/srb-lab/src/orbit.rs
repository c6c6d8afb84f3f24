//! Orbit-level expansion bookkeeping.
//!
//! Everything here works on the sequence phi_i = phi(f-hat^i xi) and its
//! Birkhoff sums S_0 = 0, S_i = phi_0 + ... + phi_{i-1}. Two index games
//! matter downstream:
//!
//! * Pliss times: n with S_n - S_j >= lambda_min (n - j) for every j <= n,
//!   i.e. expansion holds from n back to every earlier time.
//! * alpha-neutral segments [t, t') with S_i - S_t <= alpha (i - t) for all
//!   i in (t, t']: windows where averaged expansion never beats alpha.
//!
//! Both reduce to running-extremum scans of the drift A_i = S_i - alpha i
//! (resp. B_i = S_i - lambda_min i), which keeps every operation linear.

use crate::dynamics::{ProjectivePoint, SurfaceMap};
use serde::{Deserialize, Serialize};

/// Expansion observable along a bundle orbit, with its Birkhoff sums.
#[derive(Clone, Debug)]
pub struct PhiSequence {
    /// phi_i for i = 0..n.
    pub phi: Vec<f64>,
    /// S_i for i = 0..=n; always one longer than `phi`.
    pub sums: Vec<f64>,
}

impl PhiSequence {
    pub fn from_values(phi: Vec<f64>) -> Self {
        let sums = birkhoff_sums(&phi);
        PhiSequence { phi, sums }
    }

    /// phi sampled along the orbit of xi0 under the bundle map.
    pub fn along_orbit(map: &SurfaceMap, xi0: ProjectivePoint, n: usize) -> Self {
        let mut phi = Vec::with_capacity(n);
        let mut xi = xi0;
        for _ in 0..n {
            phi.push(map.phi(xi));
            xi = map.projective_apply(xi);
        }
        PhiSequence::from_values(phi)
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Time average S_n / n.
    pub fn average(&self) -> f64 {
        if self.phi.is_empty() {
            0.0
        } else {
            self.sums[self.phi.len()] / self.phi.len() as f64
        }
    }
}

/// S_0 = 0, S_i = phi_0 + ... + phi_{i-1}.
pub fn birkhoff_sums(phi: &[f64]) -> Vec<f64> {
    let mut sums = Vec::with_capacity(phi.len() + 1);
    let mut acc = 0.0;
    sums.push(0.0);
    for p in phi {
        acc += p;
        sums.push(acc);
    }
    sums
}

/// Times n at which expansion at rate lambda_min holds back to every
/// earlier time. 0 qualifies vacuously. Single running-max scan of
/// B_i = S_i - lambda_min i; ties count as qualifying.
pub fn pliss_times(sums: &[f64], lambda_min: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (i, s) in sums.iter().enumerate() {
        let b = s - lambda_min * i as f64;
        if b >= best {
            out.push(i);
            best = b;
        }
    }
    out
}

/// Whether n is a Pliss time for the given sums, by definition.
pub fn is_pliss_time(sums: &[f64], lambda_min: f64, n: usize) -> bool {
    let bn = sums[n] - lambda_min * n as f64;
    (0..=n).all(|j| bn >= sums[j] - lambda_min * j as f64)
}

/// Whether [t, t') is alpha-neutral: S_i - S_t <= alpha (i - t) for every
/// i in (t, t']. Definitional scan, O(t' - t).
pub fn is_alpha_neutral(sums: &[f64], t: usize, t_prime: usize, alpha: f64) -> bool {
    assert!(t < t_prime && t_prime < sums.len(), "need 0 <= t < t' <= n");
    let at = sums[t] - alpha * t as f64;
    (t + 1..=t_prime).all(|i| sums[i] - alpha * i as f64 <= at)
}

/// Half-open index interval on the orbit. `start < end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }
}

/// Maximal alpha-neutral segments, in increasing order of start.
///
/// For each t let E(t) be the largest t' with [t, t') neutral: one past the
/// run of drift values A_i <= A_t, found with a next-strictly-greater scan
/// (monotone stack, linear total). [t, E(t)) is maximal exactly when no
/// earlier start reaches t; maximal segments are pairwise disjoint.
pub fn maximal_neutral_segments(sums: &[f64], alpha: f64) -> Vec<Segment> {
    let n = sums.len() - 1;
    let drift: Vec<f64> = sums
        .iter()
        .enumerate()
        .map(|(i, s)| s - alpha * i as f64)
        .collect();
    // reach[t] = E(t): default n, else (first i > t with A_i > A_t) - 1.
    let mut reach = vec![n; n + 1];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..=n {
        while let Some(&top) = stack.last() {
            if drift[top] < drift[i] {
                reach[top] = i - 1;
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    let mut out = Vec::new();
    let mut frontier = 0usize; // 1 + max reach over earlier starts
    for t in 0..n {
        if reach[t] > t && frontier <= t {
            out.push(Segment { start: t, end: reach[t] });
        }
        frontier = frontier.max(reach[t] + 1);
    }
    out
}

/// Maximal alpha-neutral segments of length at least min_len.
pub fn long_neutral_segments(sums: &[f64], alpha: f64, min_len: usize) -> Vec<Segment> {
    maximal_neutral_segments(sums, alpha)
        .into_iter()
        .filter(|seg| seg.len() >= min_len)
        .collect()
}

/// Fraction of orbit indices covered by maximal neutral segments of length
/// at least min_len.
pub fn neutral_mass(sums: &[f64], alpha: f64, min_len: usize) -> f64 {
    let n = sums.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let covered: usize = long_neutral_segments(sums, alpha, min_len)
        .iter()
        .map(Segment::len)
        .sum();
    covered as f64 / n as f64
}

/// Finite sample of curve parameters, each standing for the interval of
/// half-width `delta_s / 2` around it. Membership queries are interval
/// intersections, so the set fattens every member to resolution scale;
/// counting games against subdivided pieces stay honest at any depth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParameterSet {
    /// Sorted interval centers in [0, 1].
    pub members: Vec<f64>,
    /// Width of the interval each member represents.
    pub delta_s: f64,
}

impl ParameterSet {
    pub fn from_members(mut members: Vec<f64>, delta_s: f64) -> Self {
        assert!(delta_s > 0.0 && delta_s.is_finite());
        members.sort_by(|a, b| a.total_cmp(b));
        members.dedup();
        ParameterSet { members, delta_s }
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Lebesgue mass of the represented union of intervals (members are
    /// grid-disjoint by construction).
    pub fn mass(&self) -> f64 {
        self.members.len() as f64 * self.delta_s
    }

    /// Whether any member interval meets [a, b].
    pub fn intersects(&self, a: f64, b: f64) -> bool {
        debug_assert!(a <= b);
        let w = self.delta_s / 2.0;
        // First member with s >= a - w; it intersects iff s <= b + w.
        let lo = self.members.partition_point(|&s| s < a - w);
        lo < self.members.len() && self.members[lo] <= b + w
    }

    /// Members whose intervals meet [a, b].
    pub fn members_in(&self, a: f64, b: f64) -> &[f64] {
        debug_assert!(a <= b);
        let w = self.delta_s / 2.0;
        let lo = self.members.partition_point(|&s| s < a - w);
        let hi = self.members.partition_point(|&s| s <= b + w);
        &self.members[lo..hi]
    }
}

/// Parameters along a curve whose tangent orbit expands well at time n:
/// the time-n average of phi lands in [lambda_min, lambda_max], n is a
/// Pliss time at rate 0 (the sums never dip below any earlier value on
/// the way), and the base orbit does not return to its start within n
/// steps. Midpoint sampling at resolution 1 / grid.
pub fn sample_expanding_parameters(
    map: &crate::dynamics::SurfaceMap,
    curve: &crate::curve::RegularCurve,
    n: usize,
    lambda_min: f64,
    lambda_max: f64,
    grid: usize,
) -> crate::error::Result<ParameterSet> {
    assert!(n > 0 && grid > 0 && lambda_min <= lambda_max);
    use rayon::prelude::*;
    let flags: Vec<crate::error::Result<Option<f64>>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let s = (i as f64 + 0.5) / grid as f64;
            if curve.speed(s) < crate::curve::SPEED_FLOOR {
                return Err(crate::error::LabError::DegenerateCurve {
                    s,
                    speed: curve.speed(s),
                });
            }
            let xi = curve.bundle_point(s);
            let seq = PhiSequence::along_orbit(map, xi, n);
            let avg = seq.average();
            if !(lambda_min <= avg && avg <= lambda_max) {
                return Ok(None);
            }
            if !is_pliss_time(&seq.sums, 0.0, n) {
                return Ok(None);
            }
            // Reject near-periodic base orbits: they concentrate empirical
            // measures on atoms the pipeline must treat separately.
            let mut x = xi.point;
            let mut separated = true;
            for _ in 0..n {
                x = map.apply(x);
                if crate::dynamics::torus_dist(x, xi.point) < 1e-9 {
                    separated = false;
                    break;
                }
            }
            Ok(if separated { Some(s) } else { None })
        })
        .collect();
    let mut members = Vec::new();
    for flag in flags {
        if let Some(s) = flag? {
            members.push(s);
        }
    }
    // Already ascending; avoid re-sorting to keep this exactly the scan order.
    Ok(ParameterSet { members, delta_s: 1.0 / grid as f64 })
}

/// Smallest n in `n_range` (inclusive) whose expanding-parameter set has
/// mass above rho^n, together with that set.
pub fn find_good_time(
    map: &crate::dynamics::SurfaceMap,
    curve: &crate::curve::RegularCurve,
    n_range: (usize, usize),
    rho: f64,
    lambda_min: f64,
    lambda_max: f64,
    grid: usize,
) -> crate::error::Result<(usize, ParameterSet)> {
    assert!(n_range.0 >= 1 && n_range.0 <= n_range.1);
    assert!(rho > 0.0 && rho < 1.0);
    for n in n_range.0..=n_range.1 {
        let set = sample_expanding_parameters(map, curve, n, lambda_min, lambda_max, grid)?;
        if set.mass() > rho.powi(n as i32) {
            return Ok((n, set));
        }
    }
    Err(crate::error::LabError::HypothesisViolation(format!(
        "no time in [{}, {}] has expanding mass above rho^n",
        n_range.0, n_range.1
    )))
}
