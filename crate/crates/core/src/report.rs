//! JSON reports shared by the command line and the C interface.

use crate::continent::Continent;
use crate::error::{Error, Result};
use crate::isosig::parse_taut_isosig;
use crate::linkspace::{grow_ball, LinkSpace, Reconstruction, RectangleSignature};
use crate::order::{CuspName, OrderOracle};
use crate::structure::{check_taut, classify_tetrahedra, edge_neighbourhood_report, run_checks, Colour, StructureChecks, TetKind, Veering};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;
use std::time::Instant;

/// Envelope printed by every command.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input: Vec<String>,
    pub pass: bool,
    pub results: Value,
    pub timing_ms: f64,
    pub stats: Value,
}

impl Report {
    pub fn new(command: &str, input: Vec<String>, pass: bool, results: Value, start: Instant, stats: Value) -> Report {
        Report {
            command: command.to_string(),
            input,
            pass,
            results,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
            stats,
        }
    }

    pub fn failure(command: &str, input: Vec<String>, err: &Error, start: Instant) -> Report {
        Report::new(command, input, false, error_json(err), start, Value::Null)
    }
}

pub fn error_json(err: &Error) -> Value {
    json!({ "error": error_kind(err), "message": err.to_string(), "exit_code": exit_code(err) })
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::MalformedSignature(_) => "MalformedSignature",
        Error::AngleLengthMismatch { .. } => "AngleLengthMismatch",
        Error::InvalidGluing(_) => "InvalidGluing",
        Error::NotTaut(_) => "NotTaut",
        Error::NotTransverse { .. } => "NotTransverse",
        Error::NotVeering(_) => "NotVeering",
        Error::BadTetIndex(_) => "BadTetIndex",
        Error::NotAMouth => "NotAMouth",
        Error::NotConvex => "NotConvex",
        Error::FaceNotOnBoundary => "FaceNotOnBoundary",
        Error::ForkedRiverHasNoComplexity => "ForkedRiverHasNoComplexity",
        Error::EdgeNotInContinent => "EdgeNotInContinent",
        Error::DepthExhausted(_) => "DepthExhausted",
        Error::InsufficientContinent => "InsufficientContinent",
        Error::BadCuspName(_) => "BadCuspName",
        Error::Internal(_) => "Internal",
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::MalformedSignature(_) | Error::AngleLengthMismatch { .. } | Error::InvalidGluing(_) | Error::BadCuspName(_) => 2,
        Error::DepthExhausted(_) => 3,
        Error::InsufficientContinent => 4,
        _ => 1,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EdgeReport {
    pub colour: Option<Colour>,
    pub degree: usize,
    pub pi_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub signature: String,
    pub tet_count: usize,
    pub edges: Vec<EdgeReport>,
    pub tet_kinds: Vec<TetKind>,
    pub checks: StructureChecks,
    pub edge_neighbourhood: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
}

impl CheckReport {
    pub fn passes(&self) -> bool {
        self.checks.taut && self.checks.transverse && self.checks.veering && self.edge_neighbourhood
    }
}

/// Parses and checks one signature. Parse failures are returned as errors;
/// failed structure checks are part of the report.
pub fn check_signature(sig: &str) -> Result<CheckReport> {
    let (tri, pi) = parse_taut_isosig(sig)?;
    let cert = check_taut(&tri, &pi);
    let (checks, res) = run_checks(&tri, &pi);
    let mut rep = CheckReport {
        signature: sig.to_string(),
        tet_count: tri.tet_count(),
        edges: cert
            .edges
            .iter()
            .map(|e| EdgeReport { colour: None, degree: e.degree, pi_count: e.pi_count })
            .collect(),
        tet_kinds: Vec::new(),
        checks,
        edge_neighbourhood: false,
        error: None,
    };
    match res {
        Ok(v) => {
            for (i, e) in rep.edges.iter_mut().enumerate() {
                e.colour = Some(v.colour[i]);
            }
            rep.tet_kinds = classify_tetrahedra(&v);
            rep.edge_neighbourhood = edge_neighbourhood_report(&v).iter().all(|r| r.passes());
        }
        Err(e) => rep.error = Some(error_json(&e)),
    }
    Ok(rep)
}

/// Census records: the first whitespace-separated token of each non-blank line.
pub fn census_records(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.split_whitespace().next())
        .map(str::to_string)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub parse_errors: usize,
    pub records_per_second: f64,
}

/// Checks records in parallel. Each line of the result is one record's
/// report as JSON.
pub fn check_batch(records: &[String]) -> (Vec<Value>, BatchSummary) {
    let start = Instant::now();
    let out: Vec<(Value, Option<bool>)> = records
        .par_iter()
        .map(|sig| match check_signature(sig) {
            Ok(r) => {
                let p = r.passes();
                (serde_json::to_value(&r).expect("report serialises"), Some(p))
            }
            Err(e) => (json!({ "signature": sig, "error": error_json(&e) }), None),
        })
        .collect();
    let secs = start.elapsed().as_secs_f64().max(1e-9);
    let passed = out.iter().filter(|x| x.1 == Some(true)).count();
    let parse_errors = out.iter().filter(|x| x.1.is_none()).count();
    let summary = BatchSummary {
        records: records.len(),
        passed,
        failed: records.len() - passed,
        parse_errors,
        records_per_second: records.len() as f64 / secs,
    };
    (out.into_iter().map(|x| x.0).collect(), summary)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderResult {
    pub sign: i8,
    pub cusps: [usize; 3],
    pub witness_tets: usize,
    pub witness_coast: usize,
}

pub fn order_names(v: Arc<Veering>, names: [&str; 3], cap: usize) -> Result<OrderResult> {
    let parsed: Vec<CuspName> = names.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let mut o = OrderOracle::new(v, cap)?;
    let sign = o.order(&parsed[0], &parsed[1], &parsed[2])?;
    let cusps = [o.cusp(&parsed[0])?, o.cusp(&parsed[1])?, o.cusp(&parsed[2])?];
    Ok(OrderResult { sign, cusps, witness_tets: o.c.tet_count(), witness_coast: o.c.coast().len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripResult {
    pub pass: bool,
    pub radius: usize,
    pub continent_tets: usize,
    pub reconstruction: Reconstruction,
}

/// Largest radius tried when none is given.
pub const AUTO_RADIUS_LIMIT: usize = 6;

/// Rebuilds the triangulation from the rectangles of a ball of lifted
/// tetrahedra. Without a radius, grows the ball until it suffices.
pub fn roundtrip(v: Arc<Veering>, radius: Option<usize>, cap: usize) -> Result<RoundtripResult> {
    let radii: Vec<usize> = match radius {
        Some(r) => vec![r],
        None => (1..=AUTO_RADIUS_LIMIT).collect(),
    };
    let mut last = Error::InsufficientContinent;
    for r in radii {
        let mut c = Continent::initial(v.clone(), 0)?;
        let tets = if r == 0 { Vec::new() } else { grow_ball(&mut c, r, cap)? };
        let mut ls = LinkSpace::new(c, cap);
        match ls.reconstruct(&tets, cap) {
            Ok(rec) => {
                let pass = rec.isomorphic && rec.colours_match;
                return Ok(RoundtripResult { pass, radius: r, continent_tets: ls.c.tet_count(), reconstruction: rec });
            }
            Err(Error::InsufficientContinent) => last = Error::InsufficientContinent,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// A rectangle with each bounding leaf expanded to its branch-line prefix.
pub fn rectangle_json(ls: &mut LinkSpace, r: &RectangleSignature) -> Value {
    let leaves: Vec<Value> = r
        .leaves
        .iter()
        .map(|(name, h)| {
            let p = ls.prefix(h.line).clone();
            json!({
                "name": name,
                "cusp": h.cusp,
                "which": h.which,
                "line": h.line,
                "steps": p.steps.iter().map(|s| [s.edge.0, s.edge.1]).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut v = serde_json::to_value(r).expect("signature serialises");
    v["leaves"] = Value::Array(leaves);
    v
}
