//! Two-point bound sandwich: every lower and upper method on one pair.

use std::collections::BTreeMap;

use harnack_core::eac::{eac_estimate, eac_harnack_bound, EacConfig};
use harnack_core::exact::{disk_exact_certificate, enclosing_ball_lower_bound, poisson_witness_lower_bound, LowerBoundCertificate};
use harnack_core::separation::{
    chain_bound, pair_bound_from_q, pair_separation, set_harnack_bound, set_separation, PairBoundVariant,
    SeparationQuery,
};
use harnack_core::{Domain, Point, PointSet, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::format::number;

/// Absolute slack of the consistency checks.
pub const CONSISTENCY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    Pair { x: Point, y: Point },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperStatus {
    Ok,
    Inapplicable,
}

/// One upper-bound method: a finite value, or the reason it does not apply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperEntry {
    pub status: UpperStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub parameters: Value,
}

impl UpperEntry {
    pub fn from_result(result: Result<f64>, parameters: Value) -> Self {
        match result {
            Ok(v) if v.is_finite() => Self { status: UpperStatus::Ok, value: Some(v), reason: None, parameters },
            Ok(_) => Self::inapplicable("bound is infinite".into(), parameters),
            Err(e) => Self::inapplicable(e.to_string(), parameters),
        }
    }

    pub fn inapplicable(reason: String, parameters: Value) -> Self {
        Self { status: UpperStatus::Inapplicable, value: None, reason: Some(reason), parameters }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub consistent: bool,
    pub min_upper: Option<f64>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub domain_id: String,
    pub dim: usize,
    pub query: Query,
    /// Best of `lowers`.
    pub lower: LowerBoundCertificate,
    pub lowers: Vec<LowerBoundCertificate>,
    pub uppers: BTreeMap<String, UpperEntry>,
    pub exact: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichOptions {
    pub hops: usize,
    pub grid_step: f64,
    pub witness_samples: usize,
}

fn variant_name(v: PairBoundVariant) -> &'static str {
    match v {
        PairBoundVariant::Stated => "stated",
        PairBoundVariant::ProofSharp => "proof_sharp",
    }
}

pub fn sandwich(domain: &Domain, domain_id: &str, x: &Point, y: &Point, opts: &SandwichOptions) -> Result<BoundReport> {
    domain.require_interior(x)?;
    domain.require_interior(y)?;
    let dim = domain.dim();

    let mut lowers = vec![
        enclosing_ball_lower_bound(domain, x, y)?,
        poisson_witness_lower_bound(domain, x, y, opts.witness_samples)?,
    ];
    if x == y {
        for l in &mut lowers {
            l.value = 1.0;
        }
    }
    let lower = lowers.iter().fold(lowers[0].clone(), |best, l| if l.value > best.value { l.clone() } else { best });
    let exact = if x == y { Some(1.0) } else { disk_exact_certificate(domain, x, y)?.map(|c| c.value) };

    let mut uppers = BTreeMap::new();
    let q = pair_separation(domain, x, y)?;
    for variant in [PairBoundVariant::Stated, PairBoundVariant::ProofSharp] {
        uppers.insert(
            format!("pair_{}", variant_name(variant)),
            UpperEntry::from_result(pair_bound_from_q(q, dim, variant), json!({ "q": q })),
        );
    }

    let config = EacConfig::new(opts.grid_step);
    let estimate = eac_estimate(domain, &PointSet::new(vec![x.clone(), y.clone()]), &config)?;
    let eac_params = json!({
        "eac": number(estimate.value),
        "estimator": estimate.parameters,
    });
    match eac_harnack_bound(estimate.value, dim) {
        Ok((sharp, rounded)) => {
            uppers.insert("eac_sharp".into(), UpperEntry::from_result(Ok(sharp), eac_params.clone()));
            uppers.insert("eac_rounded".into(), UpperEntry::from_result(Ok(rounded), eac_params));
        }
        Err(e) => {
            uppers.insert("eac_sharp".into(), UpperEntry::inapplicable(e.to_string(), eac_params.clone()));
            uppers.insert("eac_rounded".into(), UpperEntry::inapplicable(e.to_string(), eac_params));
        }
    }

    let query = SeparationQuery::new(x.clone(), PointSet::new(vec![y.clone()]), opts.hops, opts.grid_step);
    let sep = set_separation(domain, &query)?;
    let polyline = sep.per_target[0].polyline.clone();
    let sep_params = json!({
        "q": number(sep.value),
        "solver": sep.parameters,
    });
    uppers.insert("set_separation".into(), UpperEntry::from_result(set_harnack_bound(&sep, opts.hops, dim), sep_params));
    for variant in [PairBoundVariant::Stated, PairBoundVariant::ProofSharp] {
        let params = json!({ "hops": opts.hops, "polyline": polyline });
        let entry = if polyline.is_empty() {
            UpperEntry::inapplicable("no admissible chain within the hop budget".into(), params)
        } else {
            UpperEntry::from_result(chain_bound(domain, &polyline, variant), params)
        };
        uppers.insert(format!("chain_{}", variant_name(variant)), entry);
    }

    let verdict = judge(lower.value, &uppers, exact);
    Ok(BoundReport {
        domain_id: domain_id.to_string(),
        dim,
        query: Query::Pair { x: x.clone(), y: y.clone() },
        lower,
        lowers,
        uppers,
        exact,
        verdict,
    })
}

/// Checks `lower <= every applicable upper` and `exact ∈ [lower, min upper]`.
pub fn judge(lower: f64, uppers: &BTreeMap<String, UpperEntry>, exact: Option<f64>) -> Verdict {
    let mut violations = Vec::new();
    let mut min_upper: Option<f64> = None;
    for (name, entry) in uppers {
        if let (UpperStatus::Ok, Some(u)) = (entry.status, entry.value) {
            if lower > u + CONSISTENCY_SLACK {
                violations.push(format!("lower {lower} exceeds {name} {u}"));
            }
            min_upper = Some(min_upper.map_or(u, |m: f64| m.min(u)));
        }
    }
    if let Some(e) = exact {
        if e < lower - CONSISTENCY_SLACK {
            violations.push(format!("exact {e} below lower {lower}"));
        }
        if let Some(m) = min_upper {
            if e > m + CONSISTENCY_SLACK {
                violations.push(format!("exact {e} above min upper {m}"));
            }
        }
    }
    Verdict { consistent: violations.is_empty(), min_upper, violations }
}
