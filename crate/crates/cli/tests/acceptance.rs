//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. All tolerances are fixed below.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use common::*;
use dustlab_core::analysis::{
    oscillation_scan, pluriphase_polynomial_solve, pluriphase_recursion_check, FamilyPair, RecursionVariant,
};
use dustlab_core::bounds::{self, ratio_lower_bound_thm41, ratio_upper_bound_thm41};
use dustlab_core::distance::DistanceOracle;
use dustlab_core::volume::{decompose_volume, volume, Region, RegionKind};
use dustlab_core::CantorDustParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Threshold reproduction.
const THRESHOLD_MAX_WIDTH: f64 = 1e-3;
const THRESHOLD_RANGE: (f64, f64) = (29.3, 29.5);
const THRESHOLD_TIME: Duration = Duration::from_secs(1);
// Separation at formula level.
const SEPARATION_RS: [f64; 5] = [30.0, 40.0, 60.0, 100.0, 1000.0];
const SEPARATION_TIME: Duration = Duration::from_secs(1);
// Grid scan.
const SCAN_POINTS: usize = 280_000;
const SCAN_TIME: Duration = Duration::from_secs(60);
// Polynomial solution.
const POLY_RS: [f64; 4] = [2.5, 3.0, 10.0, 30.0];
const POLY_TOL: f64 = 1e-12;
const POLY_TIME: Duration = Duration::from_secs(1);
// Recursion.
const RECURSION_R: f64 = 3.0;
const RECURSION_EPS: f64 = 0.05;
const RECURSION_BUDGET: f64 = 1e-4;
const RECURSION_REL_TOL: f64 = 1e-2;
const RECURSION_TIME: Duration = Duration::from_secs(300);
// Oscillation.
const OSC_R: f64 = 100.0;
const OSC_N: u32 = 2;
const OSC_BUDGET: f64 = 0.02;
const OSC_MIN_GAP: f64 = 0.1;
const OSC_MAX_WIDTH: f64 = 0.05;
const OSC_LOWER_SLACK: f64 = 0.05;
const OSC_TIME: Duration = Duration::from_secs(600);
// Distance oracle.
const ORACLE_RS: [f64; 4] = [2.5, 3.0, 5.0, 30.0];
const ORACLE_POINTS: usize = 100;
const ORACLE_DEPTH: u32 = 8;
const ORACLE_TOL: f64 = 1e-9;
const ORACLE_SEED: u64 = 0x5eed_0007;
const ORACLE_TIME: Duration = Duration::from_secs(30);
// Volume engine against Monte Carlo.
const MC_CASES: [(f64, f64); 3] = [(3.0, 0.05), (5.0, 0.1), (30.0, 1.0 / 30.0)];
const MC_BUDGET: f64 = 1e-4;
const MC_SAMPLES: usize = 10_000_000;
const MC_SIGMAS: f64 = 3.0;
const MC_SEED: u64 = 0x5eed_0008;
const MC_TIME: Duration = Duration::from_secs(600);
// Green sandwich.
const GREEN_R: f64 = 30.0;
const GREEN_N: u32 = 1;
const GREEN_BUDGET: f64 = 1e-5;
const GREEN_TIME: Duration = Duration::from_secs(300);
// Closed forms at r = 3, from a 40-digit evaluation.
const F1_AT_3: f64 = 6.250_539_657_695_618;
const F2_AT_3: f64 = 6.152_827_484_463_288;
const F_MAX_WIDTH: f64 = 1e-6;
const F_TIME: Duration = Duration::from_secs(1);

type Check = Result<String, String>;

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match out {
        Ok(msg) if elapsed <= limit => Ok(format!("{msg}; {:.2?} (limit {:?})", elapsed, limit)),
        Ok(msg) => Err(format!("{msg}; took {:.2?}, limit {:?}", elapsed, limit)),
        Err(msg) => Err(format!("{msg}; {:.2?}", elapsed)),
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn threshold() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dustlab(&["bounds", "--what", "threshold"], dir.path());
    ensure(out.status.success(), format!("exit status {:?}", out.status.code()))?;
    let text = String::from_utf8_lossy(&out.stdout);
    let (lo, hi) = parse_interval(&text).ok_or("no enclosure printed")?;
    ensure(hi - lo <= THRESHOLD_MAX_WIDTH, format!("width {} too large", hi - lo))?;
    ensure(
        lo >= THRESHOLD_RANGE.0 && hi <= THRESHOLD_RANGE.1,
        format!("[{lo}, {hi}] not inside {THRESHOLD_RANGE:?}"),
    )?;
    Ok(format!("[{lo}, {hi}]"))
}

fn separation() -> Check {
    let top = ratio_upper_bound_thm41();
    let mut worst = f64::INFINITY;
    for r in SEPARATION_RS {
        let b = ratio_lower_bound_thm41(r).map_err(|e| e.to_string())?;
        ensure(b.lo() > top.hi(), format!("r = {r}: {b} vs {top}"))?;
        worst = worst.min(b.lo() - top.hi());
    }
    Ok(format!("smallest separation {worst:.6}"))
}

fn scan() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dustlab(
        &["scan", "--r-min", "2.0001", "--r-max", "30", "--step", "1e-4", "--out", "out"],
        dir.path(),
    );
    ensure(out.status.code() == Some(0), format!("exit status {:?}", out.status.code()))?;
    let csv = std::fs::read_to_string(dir.path().join("out/scan.csv")).map_err(|e| e.to_string())?;
    let mut lines = csv.lines();
    ensure(lines.next() == Some("r,f1_lo,f1_hi,f2_lo,f2_hi,margin,verdict"), "bad CSV header")?;
    let rows: Vec<&str> = lines.collect();
    ensure(rows.len() == SCAN_POINTS, format!("{} rows", rows.len()))?;
    ensure(rows.iter().all(|l| l.ends_with(",CertifiedHolds")), "a row is not CertifiedHolds")?;
    Ok(format!("{} points, exit 0", rows.len()))
}

fn polynomial() -> Check {
    for r in POLY_RS {
        let s = pluriphase_polynomial_solve(r).map_err(|e| e.to_string())?;
        ensure(
            (s.a + 3.0 * PI).abs() <= POLY_TOL && s.b.abs() <= POLY_TOL && s.c.abs() <= POLY_TOL,
            format!("r = {r}: {s:?}"),
        )?;
        ensure(s.contradiction, format!("r = {r}: contradiction flag unset"))?;
    }
    Ok("(a, b, c) = (-3π, 0, 0) with contradiction for all r".into())
}

fn recursion() -> Check {
    let params = CantorDustParams::new(RECURSION_R).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for variant in [RecursionVariant::Gamma, RecursionVariant::P] {
        let c = pluriphase_recursion_check(&params, RECURSION_EPS, RECURSION_BUDGET, variant)
            .map_err(|e| e.to_string())?;
        ensure(c.consistent, format!("{variant:?}: {} and {} do not overlap", c.lhs, c.rhs))?;
        ensure(
            c.relative_gap <= RECURSION_REL_TOL,
            format!("{variant:?}: relative midpoint gap {:e}", c.relative_gap),
        )?;
        parts.push(format!("{variant:?} gap {:.1e}", c.relative_gap));
    }
    Ok(parts.join(", "))
}

fn oscillation() -> Check {
    let params = CantorDustParams::new(OSC_R).map_err(|e| e.to_string())?;
    let rep = oscillation_scan(&params, FamilyPair::Thm41, OSC_N, OSC_BUDGET).map_err(|e| e.to_string())?;
    let bound = ratio_lower_bound_thm41(OSC_R).map_err(|e| e.to_string())?;
    let top = ratio_upper_bound_thm41();
    ensure(rep.rows.len() == OSC_N as usize, "missing rows")?;
    let mut lowest1 = f64::INFINITY;
    let mut highest2 = f64::NEG_INFINITY;
    for row in &rep.rows {
        let n1 = row.norm1.ok_or("row without volume")?.normalized;
        let n2 = row.norm2.ok_or("row without volume")?.normalized;
        ensure(n1.width() <= OSC_MAX_WIDTH && n2.width() <= OSC_MAX_WIDTH, format!("n = {}: widths too large", row.n))?;
        ensure(n2.hi() < top.lo(), format!("n = {}: norm2 {n2} not below 5 + π", row.n))?;
        ensure(n1.lo() > bound.lo() - OSC_LOWER_SLACK, format!("n = {}: norm1 {n1} below bound {bound}", row.n))?;
        lowest1 = lowest1.min(n1.lo());
        highest2 = highest2.max(n2.hi());
    }
    let gap = lowest1 - highest2;
    ensure(gap >= OSC_MIN_GAP, format!("gap {gap}"))?;
    Ok(format!("gap {gap:.4}, norm1 >= {lowest1:.4}, norm2 <= {highest2:.4}"))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let mut total = 0;
    for r in ORACLE_RS {
        let corners = level_corners(r, ORACLE_DEPTH);
        let diag = SQRT_2 * r.powi(-(ORACLE_DEPTH as i32));
        let oracle = DistanceOracle::new(CantorDustParams::new(r).map_err(|e| e.to_string())?);
        for _ in 0..ORACLE_POINTS {
            let p = [rng.random_range(-0.5..1.5), rng.random_range(-0.5..1.5)];
            let brute = corners
                .iter()
                .map(|c| (p[0] - c[0]).hypot(p[1] - c[1]))
                .fold(f64::INFINITY, f64::min);
            let d = oracle.distance(p, ORACLE_TOL).map_err(|e| e.to_string())?;
            // hypot carries one rounding; allow two ulps around the brute force.
            let ulps = 2.0 * f64::EPSILON * brute;
            ensure(d.lower <= brute + ulps, format!("r = {r}, p = {p:?}: lower {} > brute {brute}", d.lower))?;
            ensure(
                brute - diag <= d.lower + ORACLE_TOL,
                format!("r = {r}, p = {p:?}: brute {brute} - diag {diag} > lower {}", d.lower),
            )?;
            ensure(d.width() <= ORACLE_TOL, "width above tolerance")?;
            total += 1;
        }
    }
    Ok(format!("{total} points"))
}

fn monte_carlo() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let mut parts = Vec::new();
    for (r, eps) in MC_CASES {
        let params = CantorDustParams::new(r).map_err(|e| e.to_string())?;
        let region = Region::new(RegionKind::Plane, r).map_err(|e| e.to_string())?;
        let v = volume(&params, eps, &region, MC_BUDGET).map_err(|e| e.to_string())?;
        ensure(v.budget_met, format!("r = {r}: budget not met"))?;
        let side = 1.0 + 2.0 * eps;
        let hits = (0..MC_SAMPLES)
            .filter(|_| {
                let p = [rng.random::<f64>() * side - eps, rng.random::<f64>() * side - eps];
                product_distance(p, r) <= eps
            })
            .count();
        let frac = hits as f64 / MC_SAMPLES as f64;
        let estimate = side * side * frac;
        let se = side * side * (frac * (1.0 - frac) / MC_SAMPLES as f64).sqrt();
        let e = v.enclosure;
        let miss = if e.contains(estimate) { 0.0 } else { (e.lo() - estimate).max(estimate - e.hi()) };
        ensure(
            miss <= MC_SIGMAS * se,
            format!("r = {r}, eps = {eps}: {e} vs {estimate} ± {se:.2e}"),
        )?;
        parts.push(format!("r = {r}: {:.2} SE", miss / se));
    }
    Ok(parts.join(", "))
}

fn green_sandwich() -> Check {
    let params = CantorDustParams::new(GREEN_R).map_err(|e| e.to_string())?;
    let spec1 = bounds::SequenceSpec::new(bounds::SequenceFamily::Thm41First, GREEN_R).map_err(|e| e.to_string())?;
    let spec2 = bounds::SequenceSpec::new(bounds::SequenceFamily::Thm41Second, GREEN_R).map_err(|e| e.to_string())?;
    let lower = bounds::green_lower_bound_thm41_enclosure(GREEN_R, GREEN_N).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (k, spec) in [spec1, spec2].into_iter().enumerate() {
        let eps = bounds::sequence_eps(spec, GREEN_N).map_err(|e| e.to_string())?;
        let dec = decompose_volume(&params, GREEN_N, eps, GREEN_BUDGET).map_err(|e| e.to_string())?;
        let hull = bounds::green_upper_convex_hull_at(GREEN_R, GREEN_N, eps).map_err(|e| e.to_string())?;
        ensure(dec.green.lo() < hull.hi(), format!("eps{}: green {} not below hull {hull}", k + 1, dec.green))?;
        if k == 0 {
            ensure(dec.green.hi() > lower.lo(), format!("eps1: green {} not above {lower}", dec.green))?;
        }
        parts.push(format!("green(eps{}) = {}", k + 1, dec.green));
    }
    Ok(format!("{}; lower {:.6}", parts.join(", "), lower.mid()))
}

fn closed_forms() -> Check {
    let f1 = bounds::f1(3.0).map_err(|e| e.to_string())?;
    let f2 = bounds::f2(3.0).map_err(|e| e.to_string())?;
    ensure(f1.contains(F1_AT_3), format!("f1(3) = {f1} misses {F1_AT_3}"))?;
    ensure(f2.contains(F2_AT_3), format!("f2(3) = {f2} misses {F2_AT_3}"))?;
    ensure(f1.width() <= F_MAX_WIDTH && f2.width() <= F_MAX_WIDTH, "enclosures too wide")?;
    Ok(format!("f1(3) = {f1}, f2(3) = {f2}"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("threshold root enclosure", THRESHOLD_TIME, threshold),
        ("large-r bound separation", SEPARATION_TIME, separation),
        ("f1 > f2 grid scan", SCAN_TIME, scan),
        ("pluriphase polynomial contradiction", POLY_TIME, polynomial),
        ("pluriphase recursion", RECURSION_TIME, recursion),
        ("oscillation separation at r = 100", OSC_TIME, oscillation),
        ("distance oracle equivalence", ORACLE_TIME, oracle_equivalence),
        ("volume engine against Monte Carlo", MC_TIME, monte_carlo),
        ("green sandwich at r = 30", GREEN_TIME, green_sandwich),
        ("f1(3) and f2(3) reference values", F_TIME, closed_forms),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        match timed(limit, check) {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
