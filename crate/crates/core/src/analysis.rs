//! Verification campaigns: the pluriphase contradiction, the `f1 > f2` grid
//! scan and finite-depth oscillation evidence along paired null sequences.
//!
//! Nothing here computes an accumulation point. Reports only carry certified
//! enclosures at finitely many radii and compare them with closed-form bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, SequenceFamily, SequenceSpec};
use crate::error::{Error, Result};
use crate::ifs::CantorDustParams;
use crate::interval::{down, IntervalValue};
use crate::volume::{scaling_denominator, Region, RegionKind, VolumeConfig, VolumeEngine, VolumeResult};

/// Three-valued outcome of comparing enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    CertifiedHolds,
    Inconclusive,
    CertifiedFails,
}

impl Verdict {
    /// Verdict for the claim `a > b`.
    pub fn greater(a: IntervalValue, b: IntervalValue) -> Verdict {
        if a.certainly_gt(&b) {
            Verdict::CertifiedHolds
        } else if a.hi() < b.lo() {
            Verdict::CertifiedFails
        } else {
            Verdict::Inconclusive
        }
    }

    /// Worst of two verdicts: any failure dominates, then any inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (CertifiedFails, _) | (_, CertifiedFails) => CertifiedFails,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => CertifiedHolds,
        }
    }
}

// ---------------------------------------------------------------------------
// Pluriphase polynomial

/// Coefficients of `q(eps) = a·eps² + b·eps + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolynomialSolution {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// True when `q(eps) < 0` for all small `eps > 0`, which contradicts
    /// `q(eps) = λ²(C_eps ∩ Γ) > 0`.
    pub contradiction: bool,
}

impl PolynomialSolution {
    pub fn eval(&self, eps: f64) -> f64 {
        (self.a * eps + self.b) * eps + self.c
    }

    /// `|q(eps/r) - 2r^-2 (q(eps) + 1.5π eps²)|`
    pub fn residual(&self, r: f64, eps: f64) -> f64 {
        let rhs = 2.0 / (r * r) * (self.eval(eps) + 1.5 * std::f64::consts::PI * eps * eps);
        (self.eval(eps / r) - rhs).abs()
    }
}

/// Solves `q(eps/r) = 2r^-2 (q(eps) + (3/2)π eps²)` for a quadratic `q` by
/// matching coefficients degree by degree.
pub fn pluriphase_polynomial_solve(r: f64) -> Result<PolynomialSolution> {
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::domain(format!("r must be > 1, got {r}")));
    }
    let w = 2.0 / (r * r);
    // Source term of degree k on the right-hand side.
    let source = [0.0, 0.0, 1.5 * std::f64::consts::PI];
    let mut coeffs = [0.0; 3];
    for (k, x) in coeffs.iter_mut().enumerate() {
        // x·r^-k = w·(x + s_k)
        let lhs = r.powi(-(k as i32)) - w;
        if lhs.abs() <= 1e-12 * w {
            return Err(Error::Degenerate(format!(
                "the degree-{k} matching equation is singular at r = {r}"
            )));
        }
        *x = w * source[k] / lhs;
    }
    let [c, b, a] = coeffs;
    let contradiction = c < 0.0 || (c == 0.0 && (b < 0.0 || (b == 0.0 && a < 0.0)));
    Ok(PolynomialSolution { a, b, c, contradiction })
}

// ---------------------------------------------------------------------------
// Recursion check

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RecursionVariant {
    /// `V(eps/r) = 2r^-2 (V(eps) + (3/2)π eps²)` on the cross region.
    Gamma,
    /// `P(eps/r) = 2r^-2 P(eps) + 8r^-2 (π/2) eps²` on the cross minus its centre.
    P,
}

impl RecursionVariant {
    fn region(self) -> RegionKind {
        match self {
            RecursionVariant::Gamma => RegionKind::GammaCross,
            RecursionVariant::P => RegionKind::GammaMinusCenter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecursionCheck {
    pub variant: RecursionVariant,
    pub r: f64,
    pub eps: f64,
    pub lhs: IntervalValue,
    pub rhs: IntervalValue,
    pub consistent: bool,
    /// `|mid(lhs) - mid(rhs)| / |mid(rhs)|`.
    pub relative_gap: f64,
    pub lhs_volume: VolumeResult,
    pub rhs_volume: VolumeResult,
}

/// Largest radius for which the recursion holds: `(r - 2) / (2r)`.
pub fn recursion_eps_limit(r: f64) -> f64 {
    (r - 2.0) / (2.0 * r)
}

pub fn pluriphase_recursion_check(
    params: &CantorDustParams,
    eps: f64,
    budget: f64,
    variant: RecursionVariant,
) -> Result<RecursionCheck> {
    pluriphase_recursion_check_with(params, eps, budget, variant, VolumeConfig::default())
}

pub fn pluriphase_recursion_check_with(
    params: &CantorDustParams,
    eps: f64,
    budget: f64,
    variant: RecursionVariant,
    config: VolumeConfig,
) -> Result<RecursionCheck> {
    let r = params.r();
    let limit = recursion_eps_limit(r);
    if !(eps > 0.0 && eps < limit) {
        return Err(Error::EpsOutOfRange { eps, lo: 0.0, hi: limit });
    }
    let engine = VolumeEngine::with_config(*params, config);
    let region = Region::new(variant.region(), r)?;
    let lhs_volume = engine.volume(eps / r, &region, budget)?;
    let rhs_volume = engine.volume(eps, &region, budget)?;

    let ri = IntervalValue::point(r);
    let w = 2.0 / ri.sqr();
    let e2 = IntervalValue::point(eps).sqr();
    let pi = IntervalValue::pi();
    let rhs = match variant {
        RecursionVariant::Gamma => w * (rhs_volume.enclosure + 1.5 * pi * e2),
        RecursionVariant::P => w * rhs_volume.enclosure + 8.0 / ri.sqr() * (pi / 2.0) * e2,
    };
    let lhs = lhs_volume.enclosure;
    Ok(RecursionCheck {
        variant,
        r,
        eps,
        lhs,
        rhs,
        consistent: lhs.overlaps(&rhs),
        relative_gap: (lhs.mid() - rhs.mid()).abs() / rhs.mid().abs(),
        lhs_volume,
        rhs_volume,
    })
}

// ---------------------------------------------------------------------------
// Grid scan

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Hardware floating point; every verdict is inconclusive.
    Fast,
    #[default]
    Certified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRecord {
    pub r: f64,
    pub f1: IntervalValue,
    pub f2: IntervalValue,
    /// `f1.lo - f2.hi`, rounded down.
    pub margin: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSummary {
    pub points: usize,
    pub holds: usize,
    pub inconclusive: usize,
    pub fails: usize,
    pub min_margin: f64,
    pub min_margin_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
    pub precision: Precision,
    pub records: Vec<ScanRecord>,
    pub summary: ScanSummary,
    pub verdict: Verdict,
}

/// Number of points of the grid `r_min + i·step <= r_max`.
pub fn grid_len(r_min: f64, r_max: f64, step: f64) -> usize {
    ((r_max - r_min) / step + 1e-9).floor() as usize + 1
}

/// `i`-th grid point, clamped so rounding never leaves the range.
pub fn grid_point(r_min: f64, r_max: f64, step: f64, i: usize) -> f64 {
    (r_min + i as f64 * step).min(r_max)
}

pub fn scan_record(r: f64, precision: Precision) -> Result<ScanRecord> {
    let (f1, f2, verdict) = match precision {
        Precision::Certified => {
            let f1 = bounds::f1(r)?;
            let f2 = bounds::f2(r)?;
            (f1, f2, Verdict::greater(f1, f2))
        }
        Precision::Fast => {
            let f1 = IntervalValue::point(bounds::f1_fast(r));
            let f2 = IntervalValue::point(bounds::f2_fast(r));
            (f1, f2, Verdict::Inconclusive)
        }
    };
    Ok(ScanRecord { r, f1, f2, margin: down(f1.lo() - f2.hi()), verdict })
}

/// Certified check of `f1(r) > f2(r)` on an arithmetic grid.
pub fn scan_inequality(r_min: f64, r_max: f64, step: f64) -> Result<ScanReport> {
    scan_inequality_with(r_min, r_max, step, Precision::Certified)
}

pub fn scan_inequality_with(
    r_min: f64,
    r_max: f64,
    step: f64,
    precision: Precision,
) -> Result<ScanReport> {
    if !(r_min.is_finite() && r_max.is_finite() && r_min > 2.0) {
        return Err(Error::domain(format!("scan range must lie in (2, ∞), got r_min = {r_min}")));
    }
    if r_max < r_min {
        return Err(Error::domain(format!("empty scan range [{r_min}, {r_max}]")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {step}")));
    }
    let n = grid_len(r_min, r_max, step);
    let records = (0..n)
        .into_par_iter()
        .map(|i| scan_record(grid_point(r_min, r_max, step, i), precision))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = ScanSummary {
        points: records.len(),
        holds: 0,
        inconclusive: 0,
        fails: 0,
        min_margin: f64::INFINITY,
        min_margin_r: f64::NAN,
    };
    let mut verdict = Verdict::CertifiedHolds;
    for rec in &records {
        match rec.verdict {
            Verdict::CertifiedHolds => summary.holds += 1,
            Verdict::Inconclusive => summary.inconclusive += 1,
            Verdict::CertifiedFails => summary.fails += 1,
        }
        verdict = verdict.combine(rec.verdict);
        if rec.margin < summary.min_margin {
            summary.min_margin = rec.margin;
            summary.min_margin_r = rec.r;
        }
    }
    Ok(ScanReport { r_min, r_max, step, precision, records, summary, verdict })
}

// ---------------------------------------------------------------------------
// Oscillation evidence

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyPair {
    /// `√(1/2)·r^-n` against `r^-n`, compared with the large-`r` bounds.
    Thm41,
    /// The two window-endpoint sequences, compared with `f1` and `f2`.
    Conj,
}

impl FamilyPair {
    pub fn families(self) -> (SequenceFamily, SequenceFamily) {
        match self {
            FamilyPair::Thm41 => (SequenceFamily::Thm41First, SequenceFamily::Thm41Second),
            FamilyPair::Conj => (SequenceFamily::ConjFirst, SequenceFamily::ConjSecond),
        }
    }

    /// `(lower bound for norm1, upper bound for norm2)`.
    pub fn bounds(self, r: f64) -> Result<(IntervalValue, IntervalValue)> {
        match self {
            FamilyPair::Thm41 => Ok((
                bounds::ratio_lower_bound_thm41(r)?,
                bounds::ratio_upper_bound_thm41(),
            )),
            FamilyPair::Conj => Ok((bounds::f1(r)?, bounds::f2(r)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationConfig {
    pub n_max: u32,
    /// Rows with `n` above this carry sequence values and bounds only.
    pub volume_depth: u32,
    /// Width budget for each normalized volume.
    pub budget: f64,
    pub volume: VolumeConfig,
}

impl OscillationConfig {
    pub fn new(n_max: u32, budget: f64) -> Self {
        Self { n_max, volume_depth: 2, budget, volume: VolumeConfig::default() }
    }
}

/// Normalized volume at one sequence point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledVolume {
    pub normalized: IntervalValue,
    pub budget_met: bool,
    pub cells_inside: u64,
    pub depth_reached: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationRow {
    pub n: u32,
    pub eps1: f64,
    pub eps2: f64,
    /// Whether each radius lies in the window where the component count is `4^n`.
    pub eps1_valid: bool,
    pub eps2_valid: bool,
    pub norm1: Option<SampledVolume>,
    pub norm2: Option<SampledVolume>,
    /// `norm1 > lower bound`; absent when not sampled or the radius is invalid.
    pub check1: Option<Verdict>,
    /// `norm2 < upper bound`.
    pub check2: Option<Verdict>,
}

impl OscillationRow {
    pub fn budget_met(&self) -> bool {
        self.norm1.map_or(true, |v| v.budget_met) && self.norm2.map_or(true, |v| v.budget_met)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub r: f64,
    pub family: FamilyPair,
    pub lower_bound: IntervalValue,
    pub upper_bound: IntervalValue,
    pub rows: Vec<OscillationRow>,
    /// `min norm1.lo - max norm2.hi` over sampled rows.
    pub gap: Option<f64>,
    pub verdict: Verdict,
}

fn sample(engine: &VolumeEngine, eps: f64, budget: f64) -> Result<SampledVolume> {
    let r = engine.params().r();
    let denom = scaling_denominator(r, eps);
    let region = Region::new(RegionKind::Plane, r)?;
    let vol = engine.volume(eps, &region, down(budget * denom.lo()))?;
    let normalized = vol.enclosure / denom;
    Ok(SampledVolume {
        normalized,
        budget_met: vol.budget_met && normalized.width() <= budget * (1.0 + 1e-9),
        cells_inside: vol.cells_inside,
        depth_reached: vol.depth_reached,
    })
}

pub fn oscillation_scan(
    params: &CantorDustParams,
    family: FamilyPair,
    n_max: u32,
    budget: f64,
) -> Result<OscillationReport> {
    oscillation_scan_with(params, family, OscillationConfig::new(n_max, budget))
}

pub fn oscillation_scan_with(
    params: &CantorDustParams,
    family: FamilyPair,
    config: OscillationConfig,
) -> Result<OscillationReport> {
    if config.n_max == 0 {
        return Err(Error::domain("n_max must be >= 1"));
    }
    if !(config.budget.is_finite() && config.budget > 0.0) {
        return Err(Error::Tolerance(config.budget));
    }
    let r = params.r();
    let (lower_bound, upper_bound) = family.bounds(r)?;
    let (fam1, fam2) = family.families();
    let spec1 = SequenceSpec::new(fam1, r)?;
    let spec2 = SequenceSpec::new(fam2, r)?;
    let engine = VolumeEngine::with_config(*params, config.volume);

    let rows = (1..=config.n_max)
        .into_par_iter()
        .map(|n| -> Result<OscillationRow> {
            let eps1 = bounds::sequence_eps(spec1, n)?;
            let eps2 = bounds::sequence_eps(spec2, n)?;
            let eps1_valid = bounds::eps_in_valid_range(r, n, eps1)?;
            let eps2_valid = bounds::eps_in_valid_range(r, n, eps2)?;
            let sampled = n <= config.volume_depth;
            let norm1 = if sampled { Some(sample(&engine, eps1, config.budget)?) } else { None };
            let norm2 = if sampled { Some(sample(&engine, eps2, config.budget)?) } else { None };
            let check1 = norm1
                .filter(|_| eps1_valid)
                .map(|v| Verdict::greater(v.normalized, lower_bound));
            let check2 = norm2
                .filter(|_| eps2_valid)
                .map(|v| Verdict::greater(upper_bound, v.normalized));
            Ok(OscillationRow { n, eps1, eps2, eps1_valid, eps2_valid, norm1, norm2, check1, check2 })
        })
        .collect::<Result<Vec<_>>>()?;

    let lowest1 = rows.iter().filter_map(|row| row.norm1).map(|v| v.normalized.lo()).reduce(f64::min);
    let highest2 = rows.iter().filter_map(|row| row.norm2).map(|v| v.normalized.hi()).reduce(f64::max);
    let gap = lowest1.zip(highest2).map(|(a, b)| down(a - b));

    let mut verdict = if gap.is_some_and(|g| g > 0.0) {
        Verdict::CertifiedHolds
    } else {
        Verdict::Inconclusive
    };
    for row in &rows {
        for check in [row.check1, row.check2] {
            match check {
                Some(v) => verdict = verdict.combine(v),
                None if row.norm1.is_some() => verdict = verdict.combine(Verdict::Inconclusive),
                None => {}
            }
        }
    }
    Ok(OscillationReport { r, family, lower_bound, upper_bound, rows, gap, verdict })
}
