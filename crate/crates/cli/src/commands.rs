use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use dustlab_core::analysis::{
    oscillation_scan_with, pluriphase_polynomial_solve, pluriphase_recursion_check_with,
    scan_inequality_with, FamilyPair, OscillationConfig, Precision, RecursionVariant, Verdict,
};
use dustlab_core::bounds::{self, SequenceFamily, SequenceSpec};
use dustlab_core::distance::{CellClass, OracleConfig};
use dustlab_core::ifs::construction_step;
use dustlab_core::volume::{scaling_denominator, Region, RegionKind, VolumeConfig, VolumeEngine};
use dustlab_core::{CantorDustParams, Error, IntervalValue};

use crate::args::*;
use crate::report::{self, sha256_hex, verdict_name, RunConfig};
use crate::svg;

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum Failure {
    /// Invalid arguments; exit 64.
    Usage(String),
    /// The computation could not complete; exit 1.
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Tolerance(_) | Error::EpsOutOfRange { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(format!("csv: {e}"))
    }
}

pub type Outcome = Result<Verdict, Failure>;

fn engine_config(e: &EngineArgs) -> VolumeConfig {
    VolumeConfig {
        max_depth: e.max_depth,
        oracle: OracleConfig { node_cap: e.node_cap, ..OracleConfig::default() },
    }
}

fn region_kind(r: RegionArg) -> RegionKind {
    match r {
        RegionArg::Plane => RegionKind::Plane,
        RegionArg::UnitSquare => RegionKind::UnitSquare,
        RegionArg::GammaCross => RegionKind::GammaCross,
        RegionArg::GammaMinusCenter => RegionKind::GammaMinusCenter,
    }
}

fn written(path: &Path) {
    println!("wrote {}", path.display());
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CsvRow {
    r: f64,
    f1_lo: f64,
    f1_hi: f64,
    f2_lo: f64,
    f2_hi: f64,
    margin: f64,
    verdict: &'static str,
}

/// Evenly thinned copy of at most `max` points, always keeping the last one.
fn thin<T: Copy>(items: &[T], max: usize) -> Vec<T> {
    if items.len() <= max {
        return items.to_vec();
    }
    let stride = items.len().div_ceil(max);
    let mut out: Vec<T> = items.iter().step_by(stride).copied().collect();
    if (items.len() - 1) % stride != 0 {
        out.push(items[items.len() - 1]);
    }
    out
}

pub fn scan(args: &ScanArgs) -> Outcome {
    let precision = match args.precision {
        PrecisionArg::Fast => Precision::Fast,
        PrecisionArg::Certified => Precision::Certified,
    };
    let report = scan_inequality_with(args.r_min, args.r_max, args.step, precision)?;
    let below_margin = report
        .records
        .iter()
        .filter(|rec| rec.verdict == Verdict::CertifiedHolds && rec.margin < args.margin)
        .count();
    let verdict = if below_margin > 0 {
        report.verdict.combine(Verdict::Inconclusive)
    } else {
        report.verdict
    };
    let s = &report.summary;
    println!(
        "scan r in [{}, {}] step {}: {} points, {} hold, {} inconclusive, {} fail",
        args.r_min, args.r_max, args.step, s.points, s.holds, s.inconclusive, s.fails
    );
    println!("smallest margin f1.lo - f2.hi = {:e} at r = {}", s.min_margin, s.min_margin_r);
    if below_margin > 0 {
        println!("{below_margin} certified points have margin below {}", args.margin);
    }
    println!("verdict: {}", verdict_name(verdict));

    let config = RunConfig::new("scan", precision_name(precision), args);
    let mut artifacts = serde_json::Map::new();
    if args.format.contains(&Format::Csv) {
        let mut w = csv::Writer::from_writer(Vec::new());
        for rec in &report.records {
            w.serialize(CsvRow {
                r: rec.r,
                f1_lo: rec.f1.lo(),
                f1_hi: rec.f1.hi(),
                f2_lo: rec.f2.lo(),
                f2_hi: rec.f2.hi(),
                margin: rec.margin,
                verdict: verdict_name(rec.verdict),
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
        artifacts.insert("scan.csv".into(), json!({ "sha256": sha256_hex(&bytes) }));
        written(&report::write(&args.out, "scan.csv", &bytes)?);
    }
    if args.format.contains(&Format::Svg) {
        let sample = thin(&report.records, 2000);
        let doc = svg::line_plot(
            "f1 (blue) and f2 (red)",
            "r",
            "value",
            &[
                svg::Series { name: "f1", color: "blue", points: sample.iter().map(|x| (x.r, x.f1.mid())).collect() },
                svg::Series { name: "f2", color: "red", points: sample.iter().map(|x| (x.r, x.f2.mid())).collect() },
            ],
            &config,
        );
        artifacts.insert("fig8.svg".into(), json!({ "sha256": sha256_hex(doc.as_bytes()) }));
        written(&report::write(&args.out, "fig8.svg", doc.as_bytes())?);
    }
    if args.format.contains(&Format::Json) {
        let summary = json!({
            "points": s.points,
            "holds": s.holds,
            "inconclusive": s.inconclusive,
            "fails": s.fails,
            "min_margin": s.min_margin,
            "min_margin_r": s.min_margin_r,
            "below_margin": below_margin,
            "r_min": report.r_min,
            "r_max": report.r_max,
            "step": report.step,
        });
        let bytes = report::report_json(&config, &report.records, summary, verdict, Some(artifacts.into()));
        written(&report::write(&args.out, "scan.json", &bytes)?);
    }
    Ok(verdict)
}

fn precision_name(p: Precision) -> &'static str {
    match p {
        Precision::Fast => "fast",
        Precision::Certified => "certified",
    }
}

// ---------------------------------------------------------------------------

pub fn volume(args: &VolumeArgs) -> Outcome {
    let params = CantorDustParams::new(args.r)?;
    let region = Region::new(region_kind(args.region), args.r)?;
    let engine = VolumeEngine::with_config(params, engine_config(&args.engine));
    let result = engine.volume(args.eps, &region, args.budget)?;
    let normalized = args
        .normalized
        .then(|| result.enclosure / scaling_denominator(args.r, args.eps));
    println!("area enclosure: {}", result.enclosure);
    println!("width {:e} (budget {:e}), depth {}", result.enclosure.width(), args.budget, result.depth_reached);
    if let Some(n) = normalized {
        println!("normalized: {n}");
    }
    let verdict = if result.budget_met {
        Verdict::CertifiedHolds
    } else {
        println!("budget not met before the depth cap");
        Verdict::Inconclusive
    };
    let config = RunConfig::new("volume", "certified", args);
    let summary = json!({
        "enclosure": result.enclosure,
        "width": result.enclosure.width(),
        "budget_met": result.budget_met,
        "normalized": normalized,
    });
    let bytes = report::report_json(&config, [result], summary, verdict, None);
    written(&report::write(&args.out, "volume.json", &bytes)?);
    Ok(verdict)
}

// ---------------------------------------------------------------------------

fn opt_interval(v: Option<IntervalValue>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn oscillate(args: &OscillateArgs) -> Outcome {
    let params = CantorDustParams::new(args.r)?;
    let family = match args.family {
        FamilyArg::Thm41 => FamilyPair::Thm41,
        FamilyArg::Conj => FamilyPair::Conj,
    };
    let config = OscillationConfig {
        n_max: args.n,
        volume_depth: args.volume_depth,
        budget: args.budget,
        volume: engine_config(&args.engine),
    };
    let rep = oscillation_scan_with(&params, family, config)?;
    println!("r = {}, lower bound {} , upper bound {}", rep.r, rep.lower_bound, rep.upper_bound);
    println!("n  eps1  eps2  norm1  norm2  check1  check2");
    for row in &rep.rows {
        let check = |c: Option<Verdict>| c.map_or("n/a", verdict_name);
        println!(
            "{}  {:e}{}  {:e}{}  {}  {}  {}  {}",
            row.n,
            row.eps1,
            if row.eps1_valid { "" } else { " (outside window)" },
            row.eps2,
            if row.eps2_valid { "" } else { " (outside window)" },
            opt_interval(row.norm1.map(|v| v.normalized)),
            opt_interval(row.norm2.map(|v| v.normalized)),
            check(row.check1),
            check(row.check2),
        );
        if !row.budget_met() {
            println!("   row {}: budget not met", row.n);
        }
    }
    match rep.gap {
        Some(g) => println!("gap min norm1.lo - max norm2.hi = {g}"),
        None => println!("no sampled rows"),
    }
    println!("verdict: {}", verdict_name(rep.verdict));
    let run = RunConfig::new("oscillate", "certified", args);
    let summary = json!({
        "r": rep.r,
        "family": rep.family,
        "lower_bound": rep.lower_bound,
        "upper_bound": rep.upper_bound,
        "gap": rep.gap,
        "rows_budget_unmet": rep.rows.iter().filter(|r| !r.budget_met()).count(),
    });
    let bytes = report::report_json(&run, &rep.rows, summary, rep.verdict, None);
    written(&report::write(&args.out, "oscillation.json", &bytes)?);
    Ok(rep.verdict)
}

// ---------------------------------------------------------------------------

pub fn pluriphase(args: &PluriphaseArgs) -> Outcome {
    let params = CantorDustParams::new(args.r)?;
    let poly = pluriphase_polynomial_solve(args.r)?;
    let pi = std::f64::consts::PI;
    println!(
        "q(eps) = a eps^2 + b eps + c with a = {} (= {}π), b = {}, c = {}",
        poly.a,
        poly.a / pi,
        poly.b,
        poly.c
    );
    println!("contradiction = {}", poly.contradiction);
    let variants: &[RecursionVariant] = match args.variant {
        VariantArg::Gamma => &[RecursionVariant::Gamma],
        VariantArg::P => &[RecursionVariant::P],
        VariantArg::Both => &[RecursionVariant::Gamma, RecursionVariant::P],
    };
    let mut checks = Vec::new();
    let mut verdict = if poly.contradiction { Verdict::CertifiedHolds } else { Verdict::CertifiedFails };
    for &v in variants {
        let c = pluriphase_recursion_check_with(&params, args.eps, args.budget, v, engine_config(&args.engine))?;
        println!(
            "{:?} recursion: lhs {} rhs {} -> {}",
            v,
            c.lhs,
            c.rhs,
            if c.consistent { "consistent" } else { "INCONSISTENT" }
        );
        verdict = verdict.combine(if c.consistent { Verdict::CertifiedHolds } else { Verdict::CertifiedFails });
        if !(c.lhs_volume.budget_met && c.rhs_volume.budget_met) {
            println!("  budget not met before the depth cap");
            verdict = verdict.combine(Verdict::Inconclusive);
        }
        checks.push(c);
    }
    println!("verdict: {}", verdict_name(verdict));
    let run = RunConfig::new("pluriphase", "certified", args);
    let summary = json!({
        "contradiction": poly.contradiction,
        "recursion_consistent": checks.iter().all(|c| c.consistent),
    });
    let records = json!({ "polynomial": poly, "recursion": checks });
    let bytes = report::report_json(&run, records, summary, verdict, None);
    written(&report::write(&args.out, "pluriphase.json", &bytes)?);
    Ok(verdict)
}

// ---------------------------------------------------------------------------

pub fn bounds(args: &BoundsArgs) -> Outcome {
    let (r, n) = (args.r, args.n);
    let want = |k: BoundKind| args.what == k || args.what == BoundKind::All;
    let mut out = serde_json::Map::new();
    let mut put = |key: &str, value: serde_json::Value, line: String| {
        println!("{key}: {line}");
        out.insert(key.to_string(), value);
    };
    if want(BoundKind::Threshold) {
        let t = bounds::threshold_root();
        put("threshold", json!(t), format!("{t} (width {:e})", t.width()));
    }
    if want(BoundKind::Thm41) {
        let lower = bounds::ratio_lower_bound_thm41(r)?;
        let upper = bounds::ratio_upper_bound_thm41();
        let sep = lower.certainly_gt(&upper);
        put(
            "thm41",
            json!({ "r": r, "lower": lower, "upper": upper, "separated": sep }),
            format!("lower bound at r = {r}: {lower}; upper bound 5 + pi: {upper}; separated: {sep}"),
        );
    }
    if want(BoundKind::F1) {
        let v = bounds::f1(r)?;
        put("f1", json!({ "r": r, "value": v }), format!("f1({r}) = {v}"));
    }
    if want(BoundKind::F2) {
        let v = bounds::f2(r)?;
        put("f2", json!({ "r": r, "value": v }), format!("f2({r}) = {v}"));
    }
    if want(BoundKind::Window) {
        let (lo, hi) = bounds::valid_eps_range(r, n)?;
        put(
            "window",
            json!({ "r": r, "n": n, "lo": lo, "hi": hi }),
            format!("eps window for r = {r}, n = {n}: [{lo}, {hi}]"),
        );
    }
    if want(BoundKind::Sequences) {
        let mut seq = serde_json::Map::new();
        let mut lines = Vec::new();
        for family in [
            SequenceFamily::Thm41First,
            SequenceFamily::Thm41Second,
            SequenceFamily::ConjFirst,
            SequenceFamily::ConjSecond,
        ] {
            let eps = bounds::sequence_eps(SequenceSpec::new(family, r)?, n)?;
            let valid = bounds::eps_in_valid_range(r, n, eps)?;
            seq.insert(format!("{family:?}"), json!({ "eps": eps, "in_window": valid }));
            lines.push(format!("{family:?} = {eps}{}", if valid { "" } else { " (outside window)" }));
        }
        put("sequences", seq.into(), lines.join(", "));
    }
    if want(BoundKind::H) {
        let h = bounds::h_distance_enclosure(r, n)?;
        put("h", json!({ "r": r, "n": n, "value": h }), format!("h({r}, {n}) = {h}"));
    }
    if want(BoundKind::Green) {
        let t1 = SequenceSpec::new(SequenceFamily::Thm41First, r)?;
        let t2 = SequenceSpec::new(SequenceFamily::Thm41Second, r)?;
        let lower = bounds::green_lower_bound_thm41(r, n).ok();
        let upper1 = bounds::green_upper_convex_hull(t1, n)?;
        let upper2 = bounds::green_upper_convex_hull(t2, n)?;
        put(
            "green",
            json!({ "r": r, "n": n, "lower_eps1": lower, "hull_eps1": upper1, "hull_eps2": upper2 }),
            format!(
                "lower at eps1: {}; convex hull at eps1: {upper1}; at eps2: {upper2}",
                lower.map_or_else(|| "needs r >= 30".to_string(), |v| v.to_string())
            ),
        );
    }
    if let Some(dir) = &args.out {
        let run = RunConfig::new("bounds", "certified", args);
        let bytes = report::report_json(&run, out, json!({}), Verdict::CertifiedHolds, None);
        written(&report::write(dir, "bounds.json", &bytes)?);
    }
    Ok(Verdict::CertifiedHolds)
}

// ---------------------------------------------------------------------------

const LEVEL_COLORS: [&str; 6] = ["#d0d0d0", "#9ecae1", "#6baed6", "#3182bd", "#08519c", "#08306b"];
const MAX_RENDER_LEVEL: u32 = 8;

pub fn render(args: &RenderArgs) -> Outcome {
    let params = CantorDustParams::new(args.r)?;
    if args.n > MAX_RENDER_LEVEL {
        return Err(Failure::Usage(format!("--n is limited to {MAX_RENDER_LEVEL} for rendering")));
    }
    let system = params.system();
    let run = RunConfig::new("render", "certified", args);
    let mut rects = Vec::new();
    let (doc, summary) = match args.eps {
        None => {
            for level in 0..=args.n {
                let fill = LEVEL_COLORS[(level as usize).min(LEVEL_COLORS.len() - 1)];
                for sq in construction_step(&system, level as usize)? {
                    rects.push(svg::Rect { x: sq.origin[0], y: sq.origin[1], side: sq.side, fill, opacity: 1.0 });
                }
            }
            let count = 4usize.pow(args.n);
            let side = args.r.powi(-(args.n as i32));
            let title = format!("construction step {} of C^r, r = {}", args.n, args.r);
            (svg::squares(&title, &rects, -0.05, 1.05, &run), format!("{count} squares of side {side}"))
        }
        Some(eps) => {
            if args.depth > 12 {
                return Err(Failure::Usage("--depth is limited to 12 for rendering".into()));
            }
            let region = Region::new(region_kind(args.region), args.r)?;
            let engine = VolumeEngine::new(params);
            let leaves = engine.classify_to_depth(eps, &region, args.depth)?;
            let (mut inside, mut outside, mut uncertain) = (0, 0, 0);
            for leaf in &leaves {
                let fill = match leaf.class {
                    CellClass::Inside => {
                        inside += 1;
                        "#2ca02c"
                    }
                    CellClass::Outside => {
                        outside += 1;
                        "#f2f2f2"
                    }
                    CellClass::Uncertain => {
                        uncertain += 1;
                        "#ff7f0e"
                    }
                };
                let c = leaf.cell;
                rects.push(svg::Rect { x: c.origin[0], y: c.origin[1], side: c.side, fill, opacity: 1.0 });
            }
            for sq in construction_step(&system, args.n as usize)? {
                rects.push(svg::Rect { x: sq.origin[0], y: sq.origin[1], side: sq.side, fill: "#000000", opacity: 0.6 });
            }
            let pad = eps + 0.05;
            let title = format!("cells of C^r_eps, r = {}, eps = {eps}", args.r);
            (
                svg::squares(&title, &rects, -pad, 1.0 + pad, &run),
                format!("{inside} inside, {outside} outside, {uncertain} uncertain cells"),
            )
        }
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&args.out, doc.as_bytes())?;
    println!("{summary}");
    written(&args.out);
    Ok(Verdict::CertifiedHolds)
}
