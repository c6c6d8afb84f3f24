//! End-to-end certification: from a model description to a verdict.
//!
//! The run walks the whole chain: pick a probe curve, estimate a pilot
//! expansion rate, lock a rate band and a good time, cluster parameters by
//! their measure statistics, decompose the selected orbit's empirical
//! measure, scan for periodic obstructions, classify orbit windows, build
//! typed reparametrization families, and check the two-sided counting
//! bounds. Nothing is fabricated: each stage either produces its artifact,
//! records a soft failure, or stops with the hypothesis-failure verdict
//! when the model visibly lacks certifiable expansion at this scale (no
//! expanding directions, no good time in any band, non-stabilized
//! statistics, or a nonpositive exponent). Hard faults (bad configuration,
//! degenerate curves, I/O) propagate as errors instead of verdicts.
//!
//! Reports carry no timestamps, paths, or worker counts, so a run is
//! reproducible byte for byte from (config, seed) alone.

use crate::config::Config;
use crate::curve::classify::{
    build_family_for_type, classify_segments, count_types, size_budget_check, upper_bound_check,
    ColorBudget, KappaTable, SegmentClassification, SizeBudgetReport, TypeCountReport, TypeVector,
    UpperBoundReport,
};
use crate::curve::subdivide::{
    lower_bound_check, yomdin_subdivide, AdmissibleFamily, LowerBoundReport, SubdivisionSchedule,
};
use crate::curve::{select_transverse_curve, RegularCurve, TransverseReport};
use crate::dynamics::{torus_dist, SurfaceMap, SurfacePoint};
use crate::error::{LabError, Result};
use crate::measure::cluster::{cluster_parameters, ClusterResult};
use crate::measure::decompose::{
    check_item_c, check_item_d, decompose, ItemCReport, ItemDReport, MeasureDecomposition,
};
use crate::measure::dictionary::{DictionaryCoordinates, TestDictionary};
use crate::measure::periodic::{periodic_orbit_scan, PeriodicKind, PeriodicScan};
use crate::measure::{entropy_reference, lyapunov_of_measure, EmpiricalMeasure};
use crate::orbit::{ParameterSet, PhiSequence};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every invariant and soft check passed.
    Certified,
    /// The chain ran to the end but at least one soft check failed.
    SoftFailures,
    /// The model gave the chain nothing to certify; not an error.
    HypothesisFailed,
}

/// One comparison in the rate-entropy chain: holds when lhs <= rhs + tol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub holds: bool,
}

impl ChainLink {
    fn check(name: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        ChainLink { name: name.into(), lhs, rhs, tol, holds: lhs <= rhs + tol }
    }
}

/// The rate band that produced a good time: expansion floor rho and the
/// admissible average window around the pilot rate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BandChoice {
    pub k: u32,
    pub rho: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub delta: f64,
    pub num_cells: usize,
    pub selected_cell: usize,
    pub selected_count: usize,
    pub selected_mass: f64,
    pub pigeonhole_ok: bool,
}

impl ClusterSummary {
    fn from(result: &ClusterResult) -> Self {
        ClusterSummary {
            delta: result.delta,
            num_cells: result.num_cells,
            selected_cell: result.selected_cell,
            selected_count: result.selected.count(),
            selected_mass: result.selected.mass(),
            pigeonhole_ok: result.pigeonhole_ok,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub n: usize,
    pub alpha: f64,
    pub min_len: usize,
    pub beta: f64,
    pub neutral_segments: usize,
    pub neutral_mass: f64,
    pub stabilization_drift: f64,
    pub mu0_present: bool,
    pub mu1_present: bool,
}

impl DecompositionSummary {
    fn from(dec: &MeasureDecomposition) -> Self {
        DecompositionSummary {
            n: dec.n,
            alpha: dec.alpha,
            min_len: dec.min_len,
            beta: dec.beta,
            neutral_segments: dec.segments.len(),
            neutral_mass: dec.m0.integrate(|_| 1.0),
            stabilization_drift: dec.stabilization_drift,
            mu0_present: dec.mu0_hat.is_some(),
            mu1_present: dec.mu1_hat.is_some(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicSummary {
    pub max_period: usize,
    pub grid: usize,
    pub orbits: usize,
    pub repelling: usize,
    pub attracting: usize,
    pub saddles: usize,
    pub neutral: usize,
    pub degenerate_all_periodic: bool,
}

impl PeriodicSummary {
    fn from(scan: &PeriodicScan) -> Self {
        let count = |kind: PeriodicKind| scan.orbits.iter().filter(|o| o.kind == kind).count();
        PeriodicSummary {
            max_period: scan.max_period,
            grid: scan.grid,
            orbits: scan.orbits.len(),
            repelling: count(PeriodicKind::Repelling),
            attracting: count(PeriodicKind::Attracting),
            saddles: count(PeriodicKind::Saddle),
            neutral: count(PeriodicKind::Neutral),
            degenerate_all_periodic: scan.degenerate_all_periodic,
        }
    }
}

/// Metric ball holding nearly all of a conditional measure: the coloring
/// stage tests orbit points against it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceBall {
    pub center: SurfacePoint,
    pub radius: f64,
    pub mass_inside: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySummary {
    pub type_vector: TypeVector,
    pub params: usize,
    pub members: usize,
    pub ln_cardinality: f64,
    pub growth_ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    pub model: String,
    pub seed: u64,
    pub verify: bool,
    pub verdict: Verdict,
    /// Set exactly when the verdict is the hypothesis failure.
    pub reason: Option<String>,
    pub transverse: Option<TransverseReport>,
    pub pilot_rate: Option<f64>,
    pub band: Option<BandChoice>,
    pub good_time: Option<usize>,
    pub expanding_count: Option<usize>,
    pub expanding_mass: Option<f64>,
    pub cluster: Option<ClusterSummary>,
    pub s_star: Option<f64>,
    pub decomposition: Option<DecompositionSummary>,
    pub item_c: Option<ItemCReport>,
    pub item_d: Option<ItemDReport>,
    pub periodic: Option<PeriodicSummary>,
    pub lyapunov_mu1: Option<f64>,
    pub entropy_proxy: Option<f64>,
    pub entropy_from_reference: Option<bool>,
    pub reference_ball_neutral: Option<ReferenceBall>,
    pub reference_ball_expanding: Option<ReferenceBall>,
    pub chain: Vec<ChainLink>,
    pub type_count: Option<TypeCountReport>,
    pub families: Vec<FamilySummary>,
    pub size_budget: Option<SizeBudgetReport>,
    pub lower_bound: Option<LowerBoundReport>,
    pub upper_bound: Option<UpperBoundReport>,
    pub soft_failures: Vec<String>,
}

impl CertificateReport {
    fn new(model: String, seed: u64, verify: bool) -> Self {
        CertificateReport {
            model,
            seed,
            verify,
            verdict: Verdict::Certified,
            reason: None,
            transverse: None,
            pilot_rate: None,
            band: None,
            good_time: None,
            expanding_count: None,
            expanding_mass: None,
            cluster: None,
            s_star: None,
            decomposition: None,
            item_c: None,
            item_d: None,
            periodic: None,
            lyapunov_mu1: None,
            entropy_proxy: None,
            entropy_from_reference: None,
            reference_ball_neutral: None,
            reference_ball_expanding: None,
            chain: Vec::new(),
            type_count: None,
            families: Vec::new(),
            size_budget: None,
            lower_bound: None,
            upper_bound: None,
            soft_failures: Vec::new(),
        }
    }

    fn fail_hypotheses(mut self, reason: String) -> Self {
        self.verdict = Verdict::HypothesisFailed;
        self.reason = Some(reason);
        self
    }

    /// 0 when nothing failed or the hypotheses themselves failed (a valid
    /// negative result); 2 when only soft checks failed. Hard errors never
    /// reach a report.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::SoftFailures => 2,
            Verdict::Certified | Verdict::HypothesisFailed => 0,
        }
    }
}

/// Lower median: for an even count, the smaller of the two middle values.
fn lower_median(mut xs: Vec<f64>) -> f64 {
    debug_assert!(!xs.is_empty());
    xs.sort_by(f64::total_cmp);
    xs[(xs.len() - 1) / 2]
}

/// Smallest ball around the measure's heaviest atom holding more than
/// (1 - gamma^2) of its mass. None for an empty measure.
fn reference_ball(mu: &EmpiricalMeasure, gamma: f64) -> Option<ReferenceBall> {
    if mu.atoms.is_empty() {
        return None;
    }
    let mut center = mu.atoms[0].xi.point;
    let mut best = mu.atoms[0].weight;
    for atom in &mu.atoms[1..] {
        if atom.weight > best {
            best = atom.weight;
            center = atom.xi.point;
        }
    }
    let total: f64 = mu.atoms.iter().map(|a| a.weight).sum();
    let mut pairs: Vec<(f64, f64)> = mu
        .atoms
        .iter()
        .map(|a| (torus_dist(a.xi.point, center), a.weight))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let target = (1.0 - gamma * gamma) * total;
    let mut inside = 0.0;
    for (dist, weight) in pairs {
        inside += weight;
        if inside > target {
            return Some(ReferenceBall { center, radius: dist, mass_inside: inside });
        }
    }
    // Rounding can leave the target unreached by a hair; the whole support
    // then counts as inside.
    let radius = mu
        .atoms
        .iter()
        .map(|a| torus_dist(a.xi.point, center))
        .fold(0.0, f64::max);
    Some(ReferenceBall { center, radius, mass_inside: total })
}

fn ball_flags(
    map: &SurfaceMap,
    curve: &RegularCurve,
    s: f64,
    n: usize,
    ball: Option<&ReferenceBall>,
) -> Vec<bool> {
    let mut xi = curve.bundle_point(s);
    let mut flags = Vec::with_capacity(n);
    for _ in 0..n {
        flags.push(ball.is_some_and(|b| torus_dist(xi.point, b.center) <= b.radius));
        xi = map.projective_apply(xi);
    }
    flags
}

/// Run the whole certification chain for one configured model.
///
/// The seed feeds only the sampled positivity check on the expanding
/// conditional; every other stage is deterministic in the config.
pub fn run_certify(config: &Config, seed: u64, verify: bool) -> Result<CertificateReport> {
    let map = config.model.build()?;
    let constants = &config.constants;
    let sampling = &config.sampling;
    let pipe = &config.pipeline;
    let mut report = CertificateReport::new(format!("{map:?}"), seed, verify);

    // Probe curve: the straight line whose tangents see the most expansion.
    let (curve, best, _) =
        select_transverse_curve(&map, sampling.transverse_samples, sampling.transverse_horizon)?;
    report.transverse = Some(best.clone());
    if best.expanding_fraction <= 0.0 {
        return Ok(report.fail_hypotheses(
            "no probe direction sees forward expansion of tangent lines".into(),
        ));
    }

    // Pilot rate: lower median of the positive finite-horizon averages.
    let positives: Vec<f64> = (0..sampling.pilot_params)
        .map(|i| {
            let s = (i as f64 + 0.5) / sampling.pilot_params as f64;
            PhiSequence::along_orbit(&map, curve.bundle_point(s), sampling.pilot_horizon).average()
        })
        .filter(|avg| *avg > 0.0)
        .collect();
    if positives.is_empty() {
        return Ok(report.fail_hypotheses(format!(
            "all {} pilot averages over {} steps are nonpositive",
            sampling.pilot_params, sampling.pilot_horizon
        )));
    }
    let pilot = lower_median(positives);
    report.pilot_rate = Some(pilot);

    // Rate bands, tightest first: a band is won by the smallest time whose
    // expanding parameters carry mass above the floor rho^n.
    let (n_lo, n_hi) = (pipe.n_range[0], pipe.n_range[1]);
    let mut located: Option<(BandChoice, usize, ParameterSet)> = None;
    for k in (1..=config.schedules.k_max).rev() {
        let half = 0.5f64.powi(k as i32);
        let band = BandChoice {
            k,
            rho: 1.0 - half / 2.0,
            lambda_min: pilot * (1.0 - half),
            lambda_max: pilot * (1.0 + half),
        };
        match crate::orbit::find_good_time(
            &map,
            &curve,
            (n_lo, n_hi),
            band.rho,
            band.lambda_min,
            band.lambda_max,
            sampling.param_grid,
        ) {
            Ok((n, params)) => {
                located = Some((band, n, params));
                break;
            }
            Err(LabError::HypothesisViolation(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let Some((band, good_time, params)) = located else {
        return Ok(report.fail_hypotheses(format!(
            "no time in [{n_lo}, {n_hi}] collects expanding mass above the floor in any band"
        )));
    };
    report.band = Some(band);
    report.good_time = Some(good_time);
    report.expanding_count = Some(params.count());
    report.expanding_mass = Some(params.mass());

    // Cluster the expanding parameters by the dictionary coordinates of
    // their orbit measures at two horizons; keep the heaviest cell.
    let dict = TestDictionary::new();
    let coords: Vec<Vec<DictionaryCoordinates>> = params
        .members
        .iter()
        .map(|&s| {
            let short = EmpiricalMeasure::from_orbit(&map, curve.bundle_point(s), good_time);
            let long = EmpiricalMeasure::from_orbit(&map, curve.bundle_point(s), 2 * good_time);
            vec![dict.coordinates(&short), dict.coordinates(&long)]
        })
        .collect();
    let cluster = cluster_parameters(&params, &coords, &dict, config.schedules.delta_cluster)?;
    report.cluster = Some(ClusterSummary::from(&cluster));
    let selected = cluster.selected.clone();
    let s_star = selected.members[0];
    report.s_star = Some(s_star);

    // Decompose the selected orbit's empirical measure into neutral and
    // expanding conditionals. A non-stabilized grid means the statistics
    // are still moving at this orbit length: report it, do not crash.
    let xi_star = curve.bundle_point(s_star);
    let dec = match decompose(
        &map,
        xi_star,
        pipe.decompose_length,
        &constants.alpha_grid,
        &constants.l_grid,
        pipe.stabilization_tol,
    ) {
        Ok(dec) => dec,
        Err(LabError::NonStabilized { drift, tol }) => {
            return Ok(report.fail_hypotheses(format!(
                "neutral-mass table did not stabilize: drift {drift:.4} exceeds {tol:.4}"
            )));
        }
        Err(e) => return Err(e),
    };
    report.decomposition = Some(DecompositionSummary::from(&dec));

    let phi_bound = map.phi_sup_estimate((
        sampling.dilation_grid,
        sampling.dilation_grid,
        sampling.dilation_grid,
    ));
    let item_c = check_item_c(&dec, phi_bound);
    report.item_c = Some(item_c.clone());

    let empty = EmpiricalMeasure { atoms: Vec::new() };
    let mu1 = dec.mu1_hat.as_ref().unwrap_or(&empty);
    let item_d = check_item_d(&map, mu1, pipe.check_d_samples, pipe.check_d_horizon, seed);
    report.item_d = Some(item_d.clone());

    // Periodic obstructions, then the exponent of the expanding part.
    let scan = periodic_orbit_scan(&map, sampling.scan_period, sampling.scan_grid);
    report.periodic = Some(PeriodicSummary::from(&scan));
    if dec.mu1_hat.is_none() {
        return Ok(report.fail_hypotheses(
            "the decomposition has no expanding part; nothing carries a positive exponent".into(),
        ));
    }
    let lyapunov = match lyapunov_of_measure(&map, mu1, &scan) {
        Ok(value) => value,
        Err(LabError::HypothesisViolation(msg)) => {
            return Ok(report.fail_hypotheses(msg));
        }
        Err(e) => return Err(e),
    };
    report.lyapunov_mu1 = Some(lyapunov);

    let (entropy, from_reference) = match entropy_reference(&map) {
        Some(h) => (h, true),
        None => (lyapunov, false),
    };
    report.entropy_proxy = Some(entropy);
    report.entropy_from_reference = Some(from_reference);

    // Rate-entropy chain: the pilot rate, the entropy proxy, and the
    // exponent of the expanding conditional must agree up to the slack.
    let beta = dec.beta;
    let tol = pipe.tol_chain;
    report.chain = vec![
        ChainLink::check("rate_matches_pilot", (beta * lyapunov - pilot).abs(), 0.0, tol),
        ChainLink::check("pilot_below_entropy", pilot, beta * entropy, tol),
        ChainLink::check("entropy_below_rate", beta * entropy, beta * lyapunov, tol),
    ];

    // Reference balls for the coloring flags: where the neutral and the
    // expanding conditionals concentrate.
    let gamma = constants.gamma;
    let ball0 = dec.mu0_hat.as_ref().and_then(|mu| reference_ball(mu, gamma));
    let ball1 = reference_ball(mu1, gamma);
    report.reference_ball_neutral = ball0.clone();
    report.reference_ball_expanding = ball1.clone();

    // Classify every selected parameter's window at the good time and
    // group parameters by their type vector.
    let n1 = (1.0 / gamma).floor() as usize + 1;
    let cap_len = (2.0 * n1 as f64 / gamma).ceil() as usize + 1;
    let window_lens = vec![n1];
    let mut by_type: BTreeMap<TypeVector, (SegmentClassification, Vec<f64>)> = BTreeMap::new();
    let mut star_classification = None;
    for &s in &selected.members {
        let seq = PhiSequence::along_orbit(&map, curve.bundle_point(s), good_time);
        let in_reference = ball_flags(&map, &curve, s, good_time, ball0.as_ref());
        let color_starts = vec![ball_flags(&map, &curve, s, good_time, ball1.as_ref())];
        let classification = classify_segments(
            &seq.sums,
            dec.alpha,
            cap_len,
            gamma,
            &in_reference,
            &color_starts,
            &window_lens,
        )?;
        if s == s_star {
            star_classification = Some(classification.clone());
        }
        by_type
            .entry(classification.type_vector())
            .or_insert_with(|| (classification, Vec::new()))
            .1
            .push(s);
    }
    let star_classification = star_classification.expect("s_star is a selected member");

    let types: Vec<TypeVector> = by_type.keys().cloned().collect();
    let type_count = count_types(&types, gamma, good_time)?;
    report.type_count = Some(type_count.clone());

    // One admissible family per observed type, pruned to that type's
    // parameters, with per-segment growth checked against the class rates.
    let kappa = KappaTable::new(
        band.lambda_max,
        constants.order,
        constants.eta,
        vec![ColorBudget { window: n1, entropy, share: 1.0 }],
    );
    let mut families: Vec<AdmissibleFamily> = Vec::new();
    let mut growth_all_ok = true;
    for (type_vector, (classification, members)) in &by_type {
        let covered = ParameterSet::from_members(members.clone(), selected.delta_s);
        let build = build_family_for_type(
            &map,
            &curve,
            classification,
            &kappa,
            constants.eps(),
            constants.eps_hat,
            constants.mark_gap,
            Some(&covered),
            verify,
        )?;
        report.families.push(FamilySummary {
            type_vector: type_vector.clone(),
            params: members.len(),
            members: build.family.len(),
            ln_cardinality: build.family.ln_cardinality(),
            growth_ok: build.passed,
        });
        growth_all_ok &= build.passed;
        families.push(build.family);
    }

    let size_budget = size_budget_check(&star_classification, beta, gamma, &[1.0]);
    report.size_budget = Some(size_budget.clone());

    // The lower bound wants a family covering the whole expanding set, not
    // just the selected cell; build one over the full parameter set.
    let mut schedule = SubdivisionSchedule::every(
        constants.mark_gap,
        good_time,
        constants.order,
        constants.eps(),
        constants.eps_hat,
    );
    schedule.verify = verify;
    let full_family = yomdin_subdivide(&map, &curve, &schedule, Some(&params))?;
    let lower = lower_bound_check(
        std::slice::from_ref(&full_family),
        &curve,
        &params,
        band.rho,
        band.lambda_min,
    );
    report.lower_bound = Some(lower.clone());

    let upper = upper_bound_check(
        &families,
        good_time,
        beta,
        entropy,
        band.lambda_max,
        constants.order,
        constants.eta,
        gamma,
    )?;
    report.upper_bound = Some(upper.clone());

    let mut soft = Vec::new();
    if !cluster.pigeonhole_ok {
        soft.push("cluster: selected cell smaller than the pigeonhole floor".into());
    }
    if !item_c.passed {
        soft.push(format!(
            "neutral integrals: {} grid pairs leave the two-sided window",
            item_c.segment_violations.len().max(1)
        ));
    }
    if !item_d.passed {
        soft.push(format!(
            "expanding conditional: only {:.3} of sampled starts have positive averages",
            item_d.fraction_positive
        ));
    }
    if scan.degenerate_all_periodic {
        soft.push("periodic scan: every sampled point looks periodic".into());
    }
    for link in &report.chain {
        if !link.holds {
            soft.push(format!(
                "chain {}: {:.4} exceeds {:.4} + {:.4}",
                link.name, link.lhs, link.rhs, link.tol
            ));
        }
    }
    if !type_count.passed {
        soft.push(format!(
            "type count: {} distinct types exceed the ceiling {:.2}",
            type_count.distinct, type_count.bound
        ));
    }
    if !growth_all_ok {
        soft.push("typed families: some segment grew past its class budget".into());
    }
    if !size_budget.passed {
        soft.push(format!(
            "size budget: blanks {} (floor {:.2}), fillers {} (cap {:.2})",
            size_budget.blank_total,
            size_budget.blank_floor,
            size_budget.filler_total,
            size_budget.filler_cap
        ));
    }
    if !lower.passed {
        soft.push(format!(
            "lower bound: ln cardinality {:.3} misses the floor {:.3}",
            lower.ln_card, lower.required
        ));
    }
    if !upper.passed {
        soft.push(format!(
            "upper bound: ln total {:.3} exceeds the cap {:.3}",
            upper.ln_total, upper.cap
        ));
    }
    report.soft_failures = soft;
    report.verdict =
        if report.soft_failures.is_empty() { Verdict::Certified } else { Verdict::SoftFailures };
    Ok(report)
}
