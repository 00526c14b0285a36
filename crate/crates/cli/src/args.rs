use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "dustlab", version, about = "Certified parallel-set areas of planar Cantor dusts")]
pub struct Cli {
    /// Worker threads (default: logical CPU count).
    #[arg(long, global = true, env = "DUSTLAB_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check f1(r) > f2(r) on an arithmetic grid of r.
    Scan(ScanArgs),
    /// Enclose the area of the eps-parallel set within a region.
    Volume(VolumeArgs),
    /// Sample normalized volumes along a pair of null sequences.
    Oscillate(OscillateArgs),
    /// Solve the pluriphase functional equation and test the recursion numerically.
    Pluriphase(PluriphaseArgs),
    /// Print closed-form bounds.
    Bounds(BoundsArgs),
    /// Draw construction squares or a quadtree cell map as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionArg {
    Fast,
    Certified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Options shared by every command that runs the quadtree engine.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EngineArgs {
    /// Quadtree depth cap.
    #[arg(long, default_value_t = 40, env = "DUSTLAB_MAX_DEPTH")]
    pub max_depth: u32,
    /// Node cap for each distance query.
    #[arg(long, default_value_t = 1_000_000, env = "DUSTLAB_NODE_CAP")]
    pub node_cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 2.0001, env = "DUSTLAB_R_MIN")]
    pub r_min: f64,
    #[arg(long, default_value_t = 30.0, env = "DUSTLAB_R_MAX")]
    pub r_max: f64,
    #[arg(long, default_value_t = 1e-4, env = "DUSTLAB_STEP")]
    pub step: f64,
    /// Certified points whose margin f1.lo - f2.hi falls below this value are
    /// reported and make the run inconclusive.
    #[arg(long, default_value_t = 0.0, env = "DUSTLAB_MARGIN")]
    pub margin: f64,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Certified, env = "DUSTLAB_PRECISION")]
    pub precision: PrecisionArg,
    /// Output directory.
    #[arg(long, default_value = ".", env = "DUSTLAB_OUT")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Format::Csv, Format::Json, Format::Svg], env = "DUSTLAB_FORMAT")]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionArg {
    Plane,
    UnitSquare,
    GammaCross,
    GammaMinusCenter,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VolumeArgs {
    #[arg(long, env = "DUSTLAB_R")]
    pub r: f64,
    #[arg(long, env = "DUSTLAB_EPS")]
    pub eps: f64,
    /// Width budget for the area enclosure.
    #[arg(long, default_value_t = 1e-4, env = "DUSTLAB_BUDGET")]
    pub budget: f64,
    #[arg(long, value_enum, default_value_t = RegionArg::Plane, env = "DUSTLAB_REGION")]
    pub region: RegionArg,
    /// Also report the normalized volume `area / eps^(2 - D)`.
    #[arg(long, env = "DUSTLAB_NORMALIZED")]
    pub normalized: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value = ".", env = "DUSTLAB_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Thm41,
    Conj,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OscillateArgs {
    #[arg(long, env = "DUSTLAB_R")]
    pub r: f64,
    #[arg(long, value_enum, default_value_t = FamilyArg::Thm41, env = "DUSTLAB_FAMILY")]
    pub family: FamilyArg,
    /// Largest sequence index.
    #[arg(long, default_value_t = 2, env = "DUSTLAB_N")]
    pub n: u32,
    /// Rows above this index carry sequence values and bounds only.
    #[arg(long, default_value_t = 2, env = "DUSTLAB_VOLUME_DEPTH")]
    pub volume_depth: u32,
    /// Width budget for each normalized volume.
    #[arg(long, default_value_t = 0.02, env = "DUSTLAB_BUDGET")]
    pub budget: f64,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value = ".", env = "DUSTLAB_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Gamma,
    P,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PluriphaseArgs {
    #[arg(long, env = "DUSTLAB_R")]
    pub r: f64,
    #[arg(long, default_value_t = 0.05, env = "DUSTLAB_EPS")]
    pub eps: f64,
    #[arg(long, default_value_t = 1e-4, env = "DUSTLAB_BUDGET")]
    pub budget: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Both, env = "DUSTLAB_VARIANT")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value = ".", env = "DUSTLAB_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Threshold,
    Thm41,
    F1,
    F2,
    Window,
    Sequences,
    H,
    Green,
    All,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_enum, default_value_t = BoundKind::All, env = "DUSTLAB_WHAT")]
    pub what: BoundKind,
    #[arg(long, default_value_t = 30.0, env = "DUSTLAB_R")]
    pub r: f64,
    #[arg(long, default_value_t = 1, env = "DUSTLAB_N")]
    pub n: u32,
    /// Optional output directory for bounds.json.
    #[arg(long, env = "DUSTLAB_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RenderArgs {
    #[arg(long, env = "DUSTLAB_R")]
    pub r: f64,
    /// Construction level to draw.
    #[arg(long, default_value_t = 2, env = "DUSTLAB_N")]
    pub n: u32,
    /// Draw the quadtree cell map of C_eps instead of construction squares.
    #[arg(long, env = "DUSTLAB_EPS")]
    pub eps: Option<f64>,
    /// Quadtree depth for the cell map.
    #[arg(long, default_value_t = 7, env = "DUSTLAB_DEPTH")]
    pub depth: u32,
    #[arg(long, value_enum, default_value_t = RegionArg::Plane, env = "DUSTLAB_REGION")]
    pub region: RegionArg,
    /// Output SVG file.
    #[arg(long, default_value = "render.svg", env = "DUSTLAB_OUT")]
    pub out: PathBuf,
}
