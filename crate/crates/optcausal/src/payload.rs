//! Payload files: the tests that node payload keys refer to.
//!
//! Quantum and classical payload files are JSON objects mapping a key to a
//! test. A test is an array of events (one per outcome), a single event
//! (a one-outcome test), or a named family `{"basis": .., "dims": [in, out]}`
//! with `basis` one of `computational`, `fourier` (quantum only) or
//! `trivial`.
//!
//! Quantum events are `{"kraus": [M, ..]}`, `{"state": M}` (a preparation)
//! or `{"effect": M}` (an observation). Matrices are arrays of rows whose
//! entries are real numbers or `[re, im]` pairs.
//!
//! Classical events are `{"stochastic": M}` (rows index outputs, columns
//! index inputs), `{"pvec": [..]}` (a preparation) or `{"ceffect": [..]}`
//! (an observation).
//!
//! Table payload files have the shape
//! `{"tables": [{"choices": {"O": "x"}, "axes": [["P", 2], ["O", 2]],
//! "probabilities": [..]}], "effect_spaces": {"S": {"states": [..],
//! "effects": [..]}}}` with probabilities listed row-major.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use optcausal_core::circuit::NodeId;
use optcausal_core::classical::{self, CEffect, CState, SubstochasticMatrix};
use optcausal_core::engine::{
    Axis, ClassicalBackend, JointDistribution, QuantumBackend, Table, TableBackend, TableEffectSpace,
};
use optcausal_core::linalg::CMatrix;
use optcausal_core::quantum::library::{self, Basis};
use optcausal_core::quantum::{KrausMap, QEffect, QState};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct PayloadError(pub String);

fn perr(context: &str, message: impl std::fmt::Display) -> PayloadError {
    PayloadError(format!("{context}: {message}"))
}

fn parse_root(text: &str) -> Result<serde_json::Map<String, Value>, PayloadError> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(PayloadError("payload file must be a JSON object".into())),
        Err(e) => Err(PayloadError(format!("invalid JSON: {e}"))),
    }
}

fn number(context: &str, v: &Value) -> Result<f64, PayloadError> {
    v.as_f64().ok_or_else(|| perr(context, format!("expected a number, found {v}")))
}

fn complex(context: &str, v: &Value) -> Result<Complex64, PayloadError> {
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            Ok(Complex64::new(number(context, &pair[0])?, number(context, &pair[1])?))
        }
        _ => Ok(Complex64::new(number(context, v)?, 0.0)),
    }
}

fn rows<T>(
    context: &str,
    v: &Value,
    entry: impl Fn(&str, &Value) -> Result<T, PayloadError>,
) -> Result<(usize, usize, Vec<T>), PayloadError> {
    let rows = v.as_array().ok_or_else(|| perr(context, "expected an array of rows"))?;
    let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 {
        return Err(perr(context, "matrix must be non-empty"));
    }
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| perr(context, format!("row {i} is not an array")))?;
        if r.len() != ncols {
            return Err(perr(context, format!("row {i} has {} entries, expected {ncols}", r.len())));
        }
        for x in r {
            data.push(entry(context, x)?);
        }
    }
    Ok((rows.len(), ncols, data))
}

fn complex_matrix(context: &str, v: &Value) -> Result<CMatrix, PayloadError> {
    let (r, c, data) = rows(context, v, complex)?;
    Ok(CMatrix::from_row_slice(r, c, &data))
}

fn real_matrix(context: &str, v: &Value) -> Result<DMatrix<f64>, PayloadError> {
    let (r, c, data) = rows(context, v, number)?;
    Ok(DMatrix::from_row_slice(r, c, &data))
}

fn real_vector(context: &str, v: &Value) -> Result<Vec<f64>, PayloadError> {
    v.as_array()
        .ok_or_else(|| perr(context, "expected an array of numbers"))?
        .iter()
        .map(|x| number(context, x))
        .collect()
}

fn single_key<'a>(context: &str, v: &'a Value, allowed: &[&str]) -> Result<(&'a str, &'a Value), PayloadError> {
    let obj = v.as_object().ok_or_else(|| perr(context, "event must be an object"))?;
    if obj.len() != 1 {
        return Err(perr(context, format!("event must have exactly one of {allowed:?}")));
    }
    let (k, v) = obj.iter().next().expect("one entry");
    if !allowed.contains(&k.as_str()) {
        return Err(perr(context, format!("unknown event kind {k:?}, expected one of {allowed:?}")));
    }
    Ok((k.as_str(), v))
}

fn quantum_event(context: &str, v: &Value) -> Result<KrausMap, PayloadError> {
    let (kind, body) = single_key(context, v, &["kraus", "state", "effect"])?;
    match kind {
        "kraus" => {
            let ops = body
                .as_array()
                .ok_or_else(|| perr(context, "kraus expects an array of matrices"))?
                .iter()
                .map(|m| complex_matrix(context, m))
                .collect::<Result<Vec<_>, _>>()?;
            let (out_dim, in_dim) =
                ops.first().map(|m| m.shape()).ok_or_else(|| perr(context, "kraus list is empty"))?;
            KrausMap::new(in_dim, out_dim, ops).map_err(|e| perr(context, e))
        }
        "state" => {
            Ok(KrausMap::from_state(&QState::new(complex_matrix(context, body)?).map_err(|e| perr(context, e))?))
        }
        _ => Ok(KrausMap::from_effect(&QEffect::new(complex_matrix(context, body)?).map_err(|e| perr(context, e))?)),
    }
}

fn classical_event(context: &str, v: &Value) -> Result<SubstochasticMatrix, PayloadError> {
    let (kind, body) = single_key(context, v, &["stochastic", "pvec", "ceffect"])?;
    match kind {
        "stochastic" => SubstochasticMatrix::new(real_matrix(context, body)?).map_err(|e| perr(context, e)),
        "pvec" => Ok(SubstochasticMatrix::from_state(
            &CState::new(real_vector(context, body)?).map_err(|e| perr(context, e))?,
        )),
        _ => Ok(SubstochasticMatrix::from_effect(
            &CEffect::new(real_vector(context, body)?).map_err(|e| perr(context, e))?,
        )),
    }
}

fn family(context: &str, v: &Value) -> Result<Option<(String, usize, usize)>, PayloadError> {
    let Some(obj) = v.as_object() else { return Ok(None) };
    let Some(basis) = obj.get("basis") else { return Ok(None) };
    let basis = basis.as_str().ok_or_else(|| perr(context, "basis must be a string"))?;
    let dims = obj
        .get("dims")
        .and_then(Value::as_array)
        .filter(|d| d.len() == 2)
        .ok_or_else(|| perr(context, "a basis family needs dims: [in, out]"))?;
    let dim = |x: &Value| {
        x.as_u64().filter(|&d| d > 0).map(|d| d as usize).ok_or_else(|| perr(context, "dims must be positive integers"))
    };
    if obj.len() != 2 {
        return Err(perr(context, "a basis family takes only basis and dims"));
    }
    Ok(Some((basis.to_string(), dim(&dims[0])?, dim(&dims[1])?)))
}

fn test_events<T>(
    key: &str,
    v: &Value,
    event: impl Fn(&str, &Value) -> Result<T, PayloadError>,
) -> Result<Vec<T>, PayloadError> {
    match v {
        Value::Array(items) if items.is_empty() => Err(perr(&format!("payload {key}"), "test has no events")),
        Value::Array(items) => {
            items.iter().enumerate().map(|(j, e)| event(&format!("payload {key}, event {j}"), e)).collect()
        }
        _ => Ok(vec![event(&format!("payload {key}"), v)?]),
    }
}

pub fn parse_quantum_payloads(text: &str) -> Result<QuantumBackend, PayloadError> {
    let mut backend = QuantumBackend::new();
    for (key, v) in parse_root(text)? {
        let context = format!("payload {key}");
        let test = match family(&context, &v)? {
            Some((basis, d_in, d_out)) => match basis.as_str() {
                "computational" => library::basis_test(d_in, d_out, Basis::Computational),
                "fourier" => library::basis_test(d_in, d_out, Basis::Fourier),
                "trivial" => library::trivial_test(d_in, d_out),
                other => return Err(perr(&context, format!("unknown basis {other:?}"))),
            },
            None => test_events(&key, &v, quantum_event)?,
        };
        backend.insert(key, test);
    }
    Ok(backend)
}

pub fn parse_classical_payloads(text: &str) -> Result<ClassicalBackend, PayloadError> {
    let mut backend = ClassicalBackend::new();
    for (key, v) in parse_root(text)? {
        let context = format!("payload {key}");
        let test = match family(&context, &v)? {
            Some((basis, n_in, n_out)) => match basis.as_str() {
                "computational" => classical::basis_test(n_in, n_out),
                "trivial" => classical::trivial_test(n_in, n_out),
                other => return Err(perr(&context, format!("unknown classical basis {other:?}"))),
            },
            None => test_events(&key, &v, classical_event)?,
        };
        backend.insert(key, test);
    }
    Ok(backend)
}

/// Serialized form of a table payload file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub tables: Vec<TableDoc>,
    #[serde(default)]
    pub effect_spaces: BTreeMap<String, EffectSpaceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    #[serde(default)]
    pub choices: BTreeMap<String, String>,
    pub axes: Vec<(String, usize)>,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectSpaceDoc {
    pub states: Vec<Vec<f64>>,
    pub effects: Vec<Vec<f64>>,
}

pub fn parse_table_payloads(text: &str) -> Result<TableBackend, PayloadError> {
    let file: TableFile = serde_json::from_str(text).map_err(|e| PayloadError(format!("invalid table file: {e}")))?;
    let mut tables = Vec::with_capacity(file.tables.len());
    for (i, t) in file.tables.into_iter().enumerate() {
        let axes = t.axes.into_iter().map(|(n, k)| Axis::new(n, k)).collect();
        let distribution = JointDistribution::new(axes, t.probabilities).map_err(|e| perr(&format!("table {i}"), e))?;
        let choices = t.choices.into_iter().map(|(n, l)| (NodeId::new(n), l)).collect();
        tables.push(Table { choices, distribution });
    }
    let mut backend = TableBackend::new(tables).map_err(|e| PayloadError(e.to_string()))?;
    for (system, space) in file.effect_spaces {
        backend = backend
            .with_effect_space(system, TableEffectSpace { states: space.states, effects: space.effects })
            .map_err(|e| PayloadError(e.to_string()))?;
    }
    Ok(backend)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantum_events_of_every_kind() {
        let b = parse_quantum_payloads(
            r#"{
                "rho": {"state": [[1, 0], [0, 0]]},
                "z": [{"effect": [[1, 0], [0, 0]]}, {"effect": [[0, 0], [0, 1]]}],
                "y": {"kraus": [[[0, [0, -1]], [[0, 1], 0]]]},
                "x": {"basis": "fourier", "dims": [2, 1]}
            }"#,
        )
        .unwrap();
        assert_eq!(b.get("z").unwrap().len(), 2);
        assert_eq!(b.get("rho").unwrap()[0].in_dim(), 1);
        assert!(b.get("y").unwrap()[0].is_deterministic());
        assert_eq!(b.get("x").unwrap().len(), 2);
    }

    #[test]
    fn quantum_errors_name_the_payload() {
        let e = parse_quantum_payloads(r#"{"bad": [{"state": [[2, 0], [0, 0]]}]}"#).unwrap_err();
        assert!(e.0.starts_with("payload bad, event 0:"), "{e}");
        assert!(parse_quantum_payloads(r#"{"bad": {"foo": 1}}"#).is_err());
        assert!(parse_quantum_payloads(r#"{"bad": []}"#).is_err());
        assert!(parse_quantum_payloads(r#"[1]"#).is_err());
        assert!(parse_quantum_payloads(r#"{"bad": {"state": [[1, 0], [0]]}}"#).is_err());
    }

    #[test]
    fn classical_events() {
        let b = parse_classical_payloads(
            r#"{
                "p": {"pvec": [0.25, 0.75]},
                "flip": {"stochastic": [[0, 1], [1, 0]]},
                "read": [{"ceffect": [1, 0]}, {"ceffect": [0, 1]}],
                "c": {"basis": "computational", "dims": [2, 1]}
            }"#,
        )
        .unwrap();
        assert_eq!(b.get("p").unwrap()[0].out_size(), 2);
        assert!(b.get("flip").unwrap()[0].is_deterministic());
        assert_eq!(b.get("c").unwrap().len(), 2);
        assert!(parse_classical_payloads(r#"{"x": {"basis": "fourier", "dims": [2, 1]}}"#).is_err());
    }

    #[test]
    fn tables_round_trip_through_serde() {
        let text = r#"{"tables": [{"choices": {"O": "z"}, "axes": [["P", 2], ["O", 1]], "probabilities": [0.5, 0.5]}],
                       "effect_spaces": {"S": {"states": [[1, 0]], "effects": [[1, 0], [1, 1]]}}}"#;
        let b = parse_table_payloads(text).unwrap();
        assert_eq!(b.tables().len(), 1);
        let file: TableFile = serde_json::from_str(text).unwrap();
        let again: TableFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(file, again);
        assert!(parse_table_payloads(r#"{"tables": [{"axes": [["P", 2]], "probabilities": [0.5, 0.4]}]}"#).is_err());
    }
}
