//! File formats: JSON for states, matrices, maps, criterion reports and
//! distillation traces, plus the CSV view of a trace.
//!
//! Complex data is stored as an array of `[re, im]` pairs in row-major
//! order. Floats are written in the shortest form that parses back to the
//! identical bits (serde_json uses Ryū), so a write/read cycle is exact.
//!
//! * state: `{"dims": [dA, dB], "data": [[re, im], …]}`
//! * matrix: `{"rows": r, "cols": c, "data": [[re, im], …]}`
//! * map: `{"in_dim": n, "out_dim": k, "data": [[re, im], …]}` (the Choi
//!   matrix, row-major on C^n ⊗ C^k)
//! * criterion report: `{"criterion", "satisfied", "borderline",
//!   "min_eigenvalue", "witness"?}` — for entropic criteria the
//!   `min_eigenvalue` field carries the conditional entropy, the decisive
//!   scalar of that test
//! * trace: `{"dim", "initial_fidelity", "outcome", "filter"?,
//!   "handoff_round"?, "rounds": […]}`; the CSV view has the fixed header
//!   `round,alpha_in,alpha_out,fidelity_out,p_success,expected_pairs`.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::criteria::CriterionReport;
use crate::distill::DistillationTrace;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::maps::OperatorMap;
use crate::states::BipartiteState;

fn complex_pairs(data: &[Complex64]) -> Value {
    Value::Array(data.iter().map(|z| json!([z.re, z.im])).collect())
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, what: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| Error::Malformed(format!("{what}: missing \"{key}\"")))
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Malformed(format!("{what}: top level must be a JSON object")))
}

fn as_dim(v: &Value, what: &str, key: &str) -> Result<usize> {
    v.as_u64()
        .map(|d| d as usize)
        .ok_or_else(|| Error::Malformed(format!("{what}: \"{key}\" must be a nonnegative integer")))
}

fn pairs_to_complex(v: &Value, what: &str) -> Result<Vec<Complex64>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Malformed(format!("{what}: \"data\" must be an array")))?;
    let mut out = Vec::with_capacity(rows.len());
    for (k, pair) in rows.iter().enumerate() {
        let parts = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Malformed(format!("{what}: entry {k} is not an [re, im] pair")))?;
        let re = parts[0]
            .as_f64()
            .ok_or_else(|| Error::Malformed(format!("{what}: entry {k} has a non-numeric part")))?;
        let im = parts[1]
            .as_f64()
            .ok_or_else(|| Error::Malformed(format!("{what}: entry {k} has a non-numeric part")))?;
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn parse(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

/// Serialize a bipartite state (compact one-line JSON).
pub fn state_to_json(s: &BipartiteState) -> String {
    json!({
        "dims": [s.dim_a(), s.dim_b()],
        "data": complex_pairs(s.rho().data()),
    })
    .to_string()
}

/// Parse and fully validate a bipartite state.
pub fn state_from_json(text: &str) -> Result<BipartiteState> {
    let what = "state";
    let value = parse(text, what)?;
    let obj = as_object(&value, what)?;
    let dims = field(obj, "dims", what)?
        .as_array()
        .filter(|d| d.len() == 2)
        .ok_or_else(|| Error::Malformed(format!("{what}: \"dims\" must be [dim_a, dim_b]")))?;
    let dim_a = as_dim(&dims[0], what, "dims[0]")?;
    let dim_b = as_dim(&dims[1], what, "dims[1]")?;
    let data = pairs_to_complex(field(obj, "data", what)?, what)?;
    let d = dim_a * dim_b;
    let rho = ComplexMatrix::from_vec(d, d, data)?;
    BipartiteState::new(dim_a, dim_b, rho)
}

/// Serialize a raw matrix (compact one-line JSON).
pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "data": complex_pairs(m.data()),
    })
    .to_string()
}

/// Parse a raw matrix.
pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let what = "matrix";
    let value = parse(text, what)?;
    let obj = as_object(&value, what)?;
    let rows = as_dim(field(obj, "rows", what)?, what, "rows")?;
    let cols = as_dim(field(obj, "cols", what)?, what, "cols")?;
    let data = pairs_to_complex(field(obj, "data", what)?, what)?;
    ComplexMatrix::from_vec(rows, cols, data)
}

/// Serialize an operator map as its Choi matrix (compact one-line JSON).
pub fn map_to_json(m: &OperatorMap) -> String {
    json!({
        "in_dim": m.in_dim(),
        "out_dim": m.out_dim(),
        "data": complex_pairs(m.choi().data()),
    })
    .to_string()
}

/// Parse an operator map from its Choi matrix.
pub fn map_from_json(text: &str) -> Result<OperatorMap> {
    let what = "map";
    let value = parse(text, what)?;
    let obj = as_object(&value, what)?;
    let in_dim = as_dim(field(obj, "in_dim", what)?, what, "in_dim")?;
    let out_dim = as_dim(field(obj, "out_dim", what)?, what, "out_dim")?;
    let data = pairs_to_complex(field(obj, "data", what)?, what)?;
    let d = in_dim * out_dim;
    let choi = ComplexMatrix::from_vec(d, d, data)?;
    OperatorMap::from_choi(in_dim, out_dim, choi)
}

fn report_to_value(r: &CriterionReport) -> Value {
    let mut obj = Map::new();
    obj.insert("criterion".into(), json!(r.criterion.label()));
    obj.insert("satisfied".into(), json!(r.satisfied));
    obj.insert("borderline".into(), json!(r.borderline));
    obj.insert("min_eigenvalue".into(), json!(r.min_value()));
    if let Some(w) = &r.witness_vector {
        obj.insert("witness".into(), complex_pairs(w));
    }
    Value::Object(obj)
}

/// Serialize a batch of criterion reports as a pretty-printed JSON array.
pub fn reports_to_json(reports: &[CriterionReport]) -> String {
    let array = Value::Array(reports.iter().map(report_to_value).collect());
    serde_json::to_string_pretty(&array).expect("report values are plain JSON")
}

/// Serialize a distillation trace as pretty-printed JSON.
pub fn trace_to_json(t: &DistillationTrace) -> String {
    let mut obj = Map::new();
    obj.insert("dim".into(), json!(t.dim));
    obj.insert("initial_fidelity".into(), json!(t.initial_fidelity));
    obj.insert(
        "outcome".into(),
        serde_json::to_value(t.outcome).expect("plain enum"),
    );
    if let Some(f) = &t.filter {
        obj.insert(
            "filter".into(),
            json!({
                "matrix": {
                    "rows": f.operator.matrix().rows(),
                    "cols": f.operator.matrix().cols(),
                    "data": complex_pairs(f.operator.matrix().data()),
                },
                "success_probability": f.success_probability,
            }),
        );
    }
    if let Some(h) = t.handoff_round {
        obj.insert("handoff_round".into(), json!(h));
    }
    obj.insert(
        "rounds".into(),
        serde_json::to_value(&t.rounds).expect("plain records"),
    );
    serde_json::to_string_pretty(&Value::Object(obj)).expect("plain JSON")
}

/// Serialize the per-round table of a trace as CSV with the fixed header
/// `round,alpha_in,alpha_out,fidelity_out,p_success,expected_pairs`.
pub fn trace_to_csv(t: &DistillationTrace) -> String {
    let mut out = String::from("round,alpha_in,alpha_out,fidelity_out,p_success,expected_pairs\n");
    for r in &t.rounds {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.round, r.alpha_in, r.alpha_out, r.fidelity_out, r.p_success, r.expected_pairs
        ));
    }
    out
}
