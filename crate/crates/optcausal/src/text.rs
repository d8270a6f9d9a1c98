//! Line-oriented circuit description format.
//!
//! ```text
//! # a qubit prepared, transformed and measured
//! system A 2
//! node P outputs=[A] outcomes=1 payload=rho
//! node T inputs=[A] outputs=[A] payload=id
//! node O inputs=[A] outcomes=2 payload=z
//! wire A P.0 -> T.0
//! wire A T.0 -> O.0
//! ```
//!
//! `system <label> <descriptor>` registers a system; the trivial system `I`
//! is always present. `node <id>` takes optional `inputs=[..]`,
//! `outputs=[..]` (comma separated, no spaces), `outcomes=<k>` (default 1)
//! and `payload=<key>` (default: the node id). `wire <system> <src>.<port>
//! -> <dst>.<port>` connects an output port to an input port; either end
//! may be `boundary` in a circuit declared `open`. Wires are numbered in
//! file order. `#` starts a comment.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use optcausal_core::circuit::{Circuit, CircuitBuilder, Endpoint, PortRef, TestNode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

fn parse_list(line: usize, value: &str) -> Result<Vec<String>, FormatError> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("expected a bracketed list, found {value:?}")))?;
    Ok(inner.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
}

fn parse_endpoint(line: usize, token: &str) -> Result<Endpoint, FormatError> {
    if token == "boundary" {
        return Ok(Endpoint::Boundary);
    }
    let (node, port) = token
        .rsplit_once('.')
        .ok_or_else(|| err(line, format!("expected <node>.<port> or boundary, found {token:?}")))?;
    let port = port.parse::<usize>().map_err(|_| err(line, format!("invalid port number in {token:?}")))?;
    if node.is_empty() {
        return Err(err(line, format!("missing node id in {token:?}")));
    }
    Ok(Endpoint::Port(PortRef::new(node, port)))
}

fn parse_node(line: usize, tokens: &[&str]) -> Result<TestNode, FormatError> {
    let id = tokens.first().ok_or_else(|| err(line, "node needs an id"))?;
    let mut node = TestNode::new(*id, &[], &[], 1, id);
    for t in &tokens[1..] {
        let (key, value) = t.split_once('=').ok_or_else(|| err(line, format!("expected key=value, found {t:?}")))?;
        match key {
            "inputs" => node.inputs = parse_list(line, value)?,
            "outputs" => node.outputs = parse_list(line, value)?,
            "outcomes" => {
                node.outcomes = value.parse().map_err(|_| err(line, format!("invalid outcome count {value:?}")))?
            }
            "payload" if !value.is_empty() => node.payload = value.to_string(),
            _ => return Err(err(line, format!("unknown node attribute {t:?}"))),
        }
    }
    Ok(node)
}

/// Parse a circuit description. Structural problems such as cycles or
/// dangling ports are left to validation; only syntax errors, duplicate
/// ids and duplicate systems fail here.
pub fn parse_circuit(text: &str) -> Result<Circuit, FormatError> {
    let mut builder = CircuitBuilder::new();
    let mut open = false;
    let mut seen_nodes = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "system" => {
                let [_, label, descriptor] = tokens[..] else {
                    return Err(err(line, "expected: system <label> <descriptor>"));
                };
                builder = builder.system(label, descriptor).map_err(|e| err(line, e.to_string()))?;
            }
            "node" => {
                let node = parse_node(line, &tokens[1..])?;
                if !seen_nodes.insert(node.id.clone()) {
                    return Err(err(line, format!("duplicate node {}", node.id)));
                }
                builder = builder.node(node);
            }
            "wire" => {
                let [_, system, src, "->", dst] = tokens[..] else {
                    return Err(err(line, "expected: wire <system> <node>.<port> -> <node>.<port>"));
                };
                builder = builder.wire_between(system, parse_endpoint(line, src)?, parse_endpoint(line, dst)?);
            }
            "open" if tokens.len() == 1 => {
                open = true;
            }
            other => return Err(err(line, format!("unknown directive {other:?}"))),
        }
    }
    if open {
        builder = builder.open();
    }
    builder.build().map_err(|e| err(0, e.to_string()))
}

/// Render a circuit in the format read by [`parse_circuit`].
pub fn write_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    if !circuit.is_closed() {
        out.push_str("open\n");
    }
    for s in circuit.systems().iter().filter(|s| s.label != "I") {
        let _ = writeln!(out, "system {} {}", s.label, s.descriptor);
    }
    for n in circuit.nodes() {
        let _ = write!(out, "node {}", n.id);
        if !n.inputs.is_empty() {
            let _ = write!(out, " inputs=[{}]", n.inputs.join(","));
        }
        if !n.outputs.is_empty() {
            let _ = write!(out, " outputs=[{}]", n.outputs.join(","));
        }
        let _ = writeln!(out, " outcomes={} payload={}", n.outcomes, n.payload);
    }
    for w in circuit.wires() {
        let _ = writeln!(out, "wire {} {} -> {}", w.system, w.source, w.target);
    }
    out
}
