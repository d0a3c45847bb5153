use std::path::Path;

use harnack_core::eac::{build_ball_chain, eac_estimate, eac_harnack_bound, eac_hull_bound, BallChain, ChainCheck, EacConfig, EacEstimate};
use harnack_core::exact::ball_harnack_from_center;
use harnack_core::geometry::hull_clearance;
use harnack_core::separation::{chain_bound, set_harnack_bound, set_separation, PairBoundVariant, SeparationQuery, SeparationResult};
use harnack_core::{Domain, HarnackError, HullKind, Point, PointSet};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{Command, HopArgs, HullArg, HullArgs, SetArgs, SetCommand, VariantArg};
use crate::format::{format_number, number, to_json};
use crate::input::{load_domain, load_set, parse_pair, parse_point};
use crate::plot::{render_svg, Artifact};
use crate::report::{sandwich, SandwichOptions, UpperEntry};
use crate::{Cli, CliError};

/// Lattice step used when `--grid` is absent: `diam(D) / GRID_DIVISIONS`.
pub const GRID_DIVISIONS: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub exit: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit: 0 }
    }
}

pub fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Ball { dim, radius, rho } => {
            let v = ball_harnack_from_center(dim, radius, rho)?;
            Ok(Output::ok(format!("{}\n", format_number(v))))
        }
        Command::Sandwich { domain, pair, hops, grid, samples } => cmd_sandwich(&domain, &pair, hops, grid, samples),
        Command::Set { command } => match command {
            SetCommand::Eac { common, hull, chain } => cmd_set_eac(&common, &hull, chain),
            SetCommand::Sep { common, hops } => cmd_set_sep(&common, &hops),
            SetCommand::Bound { common, hops, hull } => cmd_set_bound(&common, &hops, &hull),
        },
        Command::Plot { domain, out, artifacts } => cmd_plot(&domain, &out, &artifacts),
    }
}

fn json_out(value: &impl Serialize) -> Result<String, CliError> {
    to_json(value).map_err(|e| CliError::Input(format!("cannot serialize report: {e}")))
}

fn grid_step(domain: &Domain, grid: Option<f64>) -> Result<f64, CliError> {
    let h = grid.unwrap_or(domain.diameter() / GRID_DIVISIONS);
    if !(h.is_finite() && h > 0.0) {
        return Err(CliError::Input(format!("grid step must be positive, got {h}")));
    }
    Ok(h)
}

fn with_fallback_note(err: HarnackError, hull: Option<String>) -> CliError {
    match err {
        HarnackError::GridDimensionUnsupported { dim } => {
            let head = format!("grid solvers support d <= 3 (domain has d = {dim})");
            CliError::Unsupported(match hull {
                Some(h) => format!("{head}; {h}"),
                None => format!("{head}; hull bounds need no grid: use `set eac --hull convex|segmental|star`"),
            })
        }
        e => CliError::Core(e),
    }
}

fn cmd_sandwich(domain_path: &Path, pair: &str, hops: usize, grid: Option<f64>, samples: usize) -> Result<Output, CliError> {
    let (domain, id) = load_domain(domain_path)?;
    let (x, y) = parse_pair(pair)?;
    domain.require_interior(&x)?;
    domain.require_interior(&y)?;
    let opts = SandwichOptions { hops, grid_step: grid_step(&domain, grid)?, witness_samples: samples };
    let report = sandwich(&domain, &id, &x, &y, &opts).map_err(|e| with_fallback_note(e, None))?;
    let exit = if report.verdict.consistent { 0 } else { 1 };
    Ok(Output { stdout: json_out(&report)?, exit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullReport {
    pub kind: HullKind,
    pub resolution: f64,
    pub clearance: f64,
    pub convex_certified: bool,
    /// `diam S / clearance`, `inf` when the hull is not certified inside.
    #[serde(with = "harnack_core::serde_num")]
    pub bound: f64,
}

fn hull_kind(args: &HullArgs) -> Result<Option<HullKind>, CliError> {
    let kind = match (args.hull, &args.star_center) {
        (None, None) => return Ok(None),
        (None, Some(_)) => return Err(CliError::Input("--star-center needs --hull star".into())),
        (Some(HullArg::Convex), _) => HullKind::Convex,
        (Some(HullArg::Segmental), _) => HullKind::Segmental,
        (Some(HullArg::Star), Some(z)) => HullKind::Star(parse_point(z)?),
        (Some(HullArg::Star), None) => return Err(CliError::Input("--hull star needs --star-center".into())),
    };
    Ok(Some(kind))
}

fn hull_report(domain: &Domain, set: &PointSet, args: &HullArgs) -> Result<Option<HullReport>, CliError> {
    let Some(kind) = hull_kind(args)? else { return Ok(None) };
    let resolution = 1e-3 * domain.diameter();
    let h = hull_clearance(domain, set, &kind, resolution)?;
    let bound = eac_hull_bound(domain, set, &kind, resolution)?;
    Ok(Some(HullReport { kind, resolution, clearance: h.clearance, convex_certified: h.convex_certified, bound }))
}

fn describe_hull(h: &Option<HullReport>) -> Option<String> {
    h.as_ref().map(|h| format!("hull bound on eac: {}", format_number(h.bound)))
}

/// Estimate-derived bound pair, or why it is unavailable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EacBound {
    pub sharp: UpperEntry,
    pub rounded: UpperEntry,
}

fn eac_bound(value: f64, dim: usize) -> EacBound {
    let params = json!({ "eac": number(value), "dim": dim });
    match eac_harnack_bound(value, dim) {
        Ok((s, r)) => EacBound {
            sharp: UpperEntry::from_result(Ok(s), params.clone()),
            rounded: UpperEntry::from_result(Ok(r), params),
        },
        Err(e) => EacBound {
            sharp: UpperEntry::inapplicable(e.to_string(), params.clone()),
            rounded: UpperEntry::inapplicable(e.to_string(), params),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub budget: f64,
    pub x: Point,
    pub y: Point,
    pub chain: BallChain,
    pub check: ChainCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetEacReport {
    pub domain_id: String,
    pub dim: usize,
    pub set: PointSet,
    pub estimate: EacEstimate,
    pub harnack_bound: EacBound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<HullReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_chain: Option<ChainReport>,
}

/// Pair attaining the estimate, or the single point twice.
fn worst_pair(set: &PointSet, estimate: &EacEstimate) -> (Point, Point) {
    let mut best: Option<&harnack_core::eac::PairEstimate> = None;
    for p in &estimate.per_pair {
        if best.map_or(true, |b| p.ratio > b.ratio) {
            best = Some(p);
        }
    }
    match best {
        Some(p) => (p.x.clone(), p.y.clone()),
        None => (set.points[0].clone(), set.points[0].clone()),
    }
}

fn load_common(common: &SetArgs) -> Result<(Domain, String, PointSet, f64), CliError> {
    let (domain, id) = load_domain(&common.domain)?;
    let set = load_set(&common.set)?;
    set.check_interior(&domain)?;
    let h = grid_step(&domain, common.grid)?;
    Ok((domain, id, set, h))
}

fn cmd_set_eac(common: &SetArgs, hull: &HullArgs, chain: Option<f64>) -> Result<Output, CliError> {
    let (domain, id, set, h) = load_common(common)?;
    let hull = hull_report(&domain, &set, hull)?;
    let estimate = eac_estimate(&domain, &set, &EacConfig::new(h)).map_err(|e| with_fallback_note(e, describe_hull(&hull)))?;
    let ball_chain = match chain {
        Some(budget) => {
            let (x, y) = worst_pair(&set, &estimate);
            let chain = build_ball_chain(&domain, &x, &y, budget, &estimate)?;
            let check = chain.check(&domain, budget);
            Some(ChainReport { budget, x, y, chain, check })
        }
        None => None,
    };
    let report = SetEacReport {
        domain_id: id,
        dim: domain.dim(),
        harnack_bound: eac_bound(estimate.value, domain.dim()),
        set,
        estimate,
        hull,
        ball_chain,
    };
    Ok(Output::ok(json_out(&report)?))
}

fn variant(v: VariantArg) -> PairBoundVariant {
    match v {
        VariantArg::Stated => PairBoundVariant::Stated,
        VariantArg::ProofSharp => PairBoundVariant::ProofSharp,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetChainBound {
    pub target: Point,
    pub bound: UpperEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationBounds {
    pub result: SeparationResult,
    /// Bound over the whole set from the hop-limited separation.
    pub set_bound: UpperEntry,
    pub variant: PairBoundVariant,
    /// Product of pair bounds along each witness chain.
    pub chain_bounds: Vec<TargetChainBound>,
}

fn separation_bounds(domain: &Domain, set: &PointSet, h: f64, hops: &HopArgs) -> Result<SeparationBounds, HarnackError> {
    let start = match &hops.start {
        Some(s) => parse_point(s).map_err(|e| HarnackError::InvalidArgument(e.to_string()))?,
        None => set.points[0].clone(),
    };
    domain.require_interior(&start)?;
    let query = SeparationQuery::new(start, set.clone(), hops.hops, h);
    let result = set_separation(domain, &query)?;
    let params = json!({ "q": number(result.value), "hops": hops.hops, "dim": domain.dim() });
    let set_bound = UpperEntry::from_result(set_harnack_bound(&result, hops.hops, domain.dim()), params);
    let v = variant(hops.variant);
    let chain_bounds = result
        .per_target
        .iter()
        .map(|t| {
            let params = json!({ "hops": hops.hops, "links": t.polyline.len().saturating_sub(1) });
            let bound = if t.polyline.is_empty() {
                UpperEntry::inapplicable("no admissible chain within the hop budget".into(), params)
            } else {
                UpperEntry::from_result(chain_bound(domain, &t.polyline, v), params)
            };
            TargetChainBound { target: t.target.clone(), bound }
        })
        .collect();
    Ok(SeparationBounds { result, set_bound, variant: v, chain_bounds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetSepReport {
    pub domain_id: String,
    pub dim: usize,
    pub set: PointSet,
    pub separation: SeparationBounds,
}

fn start_error(e: HarnackError) -> CliError {
    match e {
        HarnackError::InvalidArgument(msg) => CliError::Input(msg),
        e => with_fallback_note(e, None),
    }
}

fn cmd_set_sep(common: &SetArgs, hops: &HopArgs) -> Result<Output, CliError> {
    let (domain, id, set, h) = load_common(common)?;
    let separation = separation_bounds(&domain, &set, h, hops).map_err(start_error)?;
    let report = SetSepReport { domain_id: id, dim: domain.dim(), set, separation };
    Ok(Output::ok(json_out(&report)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EacSummary {
    #[serde(with = "harnack_core::serde_num")]
    pub value: f64,
    pub certified_upper: bool,
    pub parameters: harnack_core::eac::EacParameters,
    pub harnack_bound: EacBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetBoundReport {
    pub domain_id: String,
    pub dim: usize,
    pub set: PointSet,
    pub eac: EacSummary,
    pub separation: SeparationBounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<HullReport>,
}

fn cmd_set_bound(common: &SetArgs, hops: &HopArgs, hull: &HullArgs) -> Result<Output, CliError> {
    let (domain, id, set, h) = load_common(common)?;
    let hull = hull_report(&domain, &set, hull)?;
    let estimate = eac_estimate(&domain, &set, &EacConfig::new(h)).map_err(|e| with_fallback_note(e, describe_hull(&hull)))?;
    let separation = separation_bounds(&domain, &set, h, hops).map_err(start_error)?;
    let report = SetBoundReport {
        domain_id: id,
        dim: domain.dim(),
        eac: EacSummary {
            value: estimate.value,
            certified_upper: estimate.certified_upper,
            harnack_bound: eac_bound(estimate.value, domain.dim()),
            parameters: estimate.parameters,
        },
        set,
        separation,
        hull,
    };
    Ok(Output::ok(json_out(&report)?))
}

fn cmd_plot(domain_path: &Path, out: &Path, artifacts: &[std::path::PathBuf]) -> Result<Output, CliError> {
    let (domain, _) = load_domain(domain_path)?;
    if domain.dim() != 2 {
        return Err(CliError::Input("plotting is 2-D only".into()));
    }
    let mut parsed = Vec::with_capacity(artifacts.len());
    for path in artifacts {
        let bad = |msg: String| CliError::Input(format!("invalid artifact {}: {msg}", path.display()));
        let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        let a = Artifact::from_json(&value).map_err(bad)?;
        if a.is_empty() {
            return Err(bad("no point sets, polylines or ball chains found".into()));
        }
        parsed.push(a);
    }
    let svg = render_svg(&domain, &parsed)?;
    std::fs::write(out, svg).map_err(|e| CliError::Input(format!("cannot write {}: {e}", out.display())))?;
    Ok(Output::ok(String::new()))
}
