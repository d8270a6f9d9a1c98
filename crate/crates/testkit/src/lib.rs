//! Seeded generators of random circuits and brute-force reference
//! evaluations used by the test suites.
//!
//! The oracles here deliberately avoid the engine's contraction path: they
//! pick nodes in reverse-lexicographic ready order, place a node's input
//! legs first instead of last, build explicit permutation and Kronecker
//! matrices, and compose a full map for every outcome tuple separately.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use optcausal_core::circuit::{Circuit, CircuitBuilder, Endpoint, TestNode};
use optcausal_core::classical::{self, c_compose_par, c_compose_seq, SubstochasticMatrix};
use optcausal_core::engine::{ClassicalBackend, JointDistribution, QuantumBackend};
use optcausal_core::quantum::{self, library, KrausMap};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Bound on the product of open-wire dimensions at every cut of the
/// generation order.
pub const FRONTIER_CAP: usize = 64;
/// Bound on the number of joint outcome tuples.
pub const OUTCOME_CAP: usize = 128;
pub const MAX_NODES: usize = 6;

/// A `(node, port)` wire end.
pub type PortEnd = (String, usize);

/// The structure of a random circuit, before payloads are attached.
#[derive(Debug, Clone)]
pub struct Shape {
    pub systems: Vec<(String, usize)>,
    /// `(id, input systems, output systems, outcomes)` in generation order.
    pub nodes: Vec<(String, Vec<String>, Vec<String>, usize)>,
    /// `(system, source, target)`
    pub wires: Vec<(String, PortEnd, PortEnd)>,
}

impl Shape {
    pub fn dim(&self, system: &str) -> usize {
        self.systems.iter().find(|(s, _)| s == system).map(|(_, d)| *d).unwrap_or(1)
    }

    pub fn port_dims(&self, node: usize) -> (usize, usize) {
        let (_, ins, outs, _) = &self.nodes[node];
        (ins.iter().map(|s| self.dim(s)).product(), outs.iter().map(|s| self.dim(s)).product())
    }

    pub fn build(&self) -> Circuit {
        let mut b = CircuitBuilder::new();
        for (s, d) in &self.systems {
            b = b.system(s, &d.to_string()).expect("fresh system");
        }
        for (id, ins, outs, k) in &self.nodes {
            let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
            let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
            b = b.node(TestNode::new(id.as_str(), &ins, &outs, *k, id));
        }
        for (s, (src, sp), (dst, dp)) in &self.wires {
            b = b.wire(s, (src, *sp), (dst, *dp));
        }
        b.build().expect("generated circuit is well formed")
    }
}

/// A closed random DAG of 2 to 6 nodes over the given systems, with at
/// most two inputs and two outputs per node except the final observation,
/// which absorbs every open wire.
pub fn random_shape(rng: &mut ChaCha8Rng, systems: &[(&str, usize)]) -> Shape {
    let n = rng.gen_range(2..=MAX_NODES);
    let mut open: Vec<(String, usize, String, usize)> = Vec::new();
    let mut nodes = Vec::new();
    let mut wires = Vec::new();
    let mut outcome_product = 1;
    for k in 0..n {
        let id = format!("n{k}");
        let last = k + 1 == n;
        let take = if last { open.len() } else { rng.gen_range(0..=open.len().min(2)) };
        let mut inputs = Vec::new();
        for port in 0..take {
            let i = rng.gen_range(0..open.len());
            let (src, sp, sys, _) = open.remove(i);
            wires.push((sys.clone(), (src, sp), (id.clone(), port)));
            inputs.push(sys);
        }
        let mut outputs = Vec::new();
        if !last {
            let want = rng.gen_range(0..=2usize).max(usize::from(inputs.is_empty()));
            let mut frontier: usize = open.iter().map(|o| o.3).product();
            for _ in 0..want {
                let (sys, d) = systems[rng.gen_range(0..systems.len())];
                if frontier * d <= FRONTIER_CAP {
                    frontier *= d;
                    outputs.push(sys.to_string());
                }
            }
            for (port, sys) in outputs.iter().enumerate() {
                let d = systems.iter().find(|(s, _)| s == sys).unwrap().1;
                open.push((id.clone(), port, sys.clone(), d));
            }
        }
        let mut outcomes = rng.gen_range(1..=3);
        if outcome_product * outcomes > OUTCOME_CAP {
            outcomes = 1;
        }
        outcome_product *= outcomes;
        nodes.push((id, inputs, outputs, outcomes));
    }
    Shape { systems: systems.iter().map(|(s, d)| (s.to_string(), *d)).collect(), nodes, wires }
}

/// Random closed quantum circuit on qubits and qutrits whose tests are
/// random complete instruments and whose preparations are deterministic.
pub fn random_quantum_circuit(rng: &mut ChaCha8Rng) -> (Circuit, QuantumBackend) {
    let shape = random_shape(rng, &[("Q2", 2), ("Q3", 3)]);
    let mut backend = QuantumBackend::new();
    for (i, (id, _, _, k)) in shape.nodes.iter().enumerate() {
        let (d_in, d_out) = shape.port_dims(i);
        backend.insert(id.clone(), library::random_test(d_in, d_out, *k, rng));
    }
    (shape.build(), backend)
}

/// Random closed classical circuit on bits and trits.
pub fn random_classical_circuit(rng: &mut ChaCha8Rng) -> (Circuit, ClassicalBackend) {
    let shape = random_shape(rng, &[("C2", 2), ("C3", 3)]);
    let mut backend = ClassicalBackend::new();
    for (i, (id, _, _, k)) in shape.nodes.iter().enumerate() {
        let (n_in, n_out) = shape.port_dims(i);
        backend.insert(id.clone(), classical::random_test(n_in, n_out, *k, rng));
    }
    (shape.build(), backend)
}

/// Random closed DAG with up to `max_nodes` nodes and shuffled node ids;
/// every edge is a wire of system `A`.
pub fn random_dag(rng: &mut ChaCha8Rng, max_nodes: usize) -> Circuit {
    let n = rng.gen_range(1..=max_nodes);
    let mut names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    names.shuffle(rng);
    let density = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    let mut ins = vec![0usize; n];
    let mut outs = vec![0usize; n];
    let mut wires = Vec::new();
    for &(i, j) in &edges {
        wires.push(((i, outs[i]), (j, ins[j])));
        outs[i] += 1;
        ins[j] += 1;
    }
    let mut b = CircuitBuilder::new().system("A", "2").expect("fresh system");
    for i in 0..n {
        let inp = vec!["A"; ins[i]];
        let out = vec!["A"; outs[i]];
        b = b.node(TestNode::new(names[i].as_str(), &inp, &out, 1, "t"));
    }
    for ((i, sp), (j, dp)) in wires {
        b = b.wire("A", (&names[i], sp), (&names[j], dp));
    }
    b.build().expect("generated DAG is well formed")
}

/// Direct successors read straight off the wire list.
pub fn adjacency(circuit: &Circuit) -> BTreeMap<String, Vec<String>> {
    let mut adj: BTreeMap<String, Vec<String>> = circuit.nodes().map(|n| (n.id.to_string(), Vec::new())).collect();
    for w in circuit.wires() {
        if let (Endpoint::Port(s), Endpoint::Port(t)) = (&w.source, &w.target) {
            adj.get_mut(s.node.as_str()).unwrap().push(t.node.to_string());
        }
    }
    adj
}

/// Every directed path starting at `from` (as node sequences, at least one edge).
pub fn enumerate_paths(adj: &BTreeMap<String, Vec<String>>, from: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![from.to_string()]];
    while let Some(path) = stack.pop() {
        for next in &adj[path.last().unwrap()] {
            if path.contains(next) {
                continue;
            }
            let mut p = path.clone();
            p.push(next.clone());
            out.push(p.clone());
            stack.push(p);
        }
    }
    out
}

/// Whether some enumerated path leads from `a` to `b`.
pub fn path_exists(adj: &BTreeMap<String, Vec<String>>, a: &str, b: &str) -> bool {
    enumerate_paths(adj, a).iter().any(|p| p.last().map(String::as_str) == Some(b))
}

/// Past and future cones by path enumeration.
pub fn brute_cones(circuit: &Circuit, node: &str) -> (BTreeSet<String>, BTreeSet<String>) {
    let adj = adjacency(circuit);
    let future = enumerate_paths(&adj, node).into_iter().map(|p| p.last().unwrap().clone()).collect();
    let past = adj.keys().filter(|n| path_exists(&adj, n, node)).cloned().collect();
    (past, future)
}

/// Node order that always runs the ready node with the largest id.
fn reverse_ready_order(circuit: &Circuit) -> Vec<String> {
    let adj = adjacency(circuit);
    let mut indeg: BTreeMap<String, usize> = adj.keys().map(|k| (k.clone(), 0)).collect();
    for succ in adj.values() {
        for s in succ {
            *indeg.get_mut(s).unwrap() += 1;
        }
    }
    let mut order = Vec::new();
    while let Some(next) = indeg.iter().filter(|(_, &d)| d == 0).map(|(k, _)| k.clone()).next_back() {
        indeg.remove(&next);
        for s in &adj[&next] {
            *indeg.get_mut(s).unwrap() -= 1;
        }
        order.push(next);
    }
    order
}

/// Permutation sending legs `dims` (first most significant) to the order
/// `order` of old positions, as an explicit 0/1 matrix `P[new][old]`.
fn permutation(dims: &[usize], order: &[usize]) -> DMatrix<f64> {
    let total: usize = dims.iter().product();
    let mut p = DMatrix::zeros(total, total);
    for old in 0..total {
        let mut digits = vec![0; dims.len()];
        let mut rem = old;
        for k in (0..dims.len()).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let new = order.iter().fold(0, |acc, &o| acc * dims[o] + digits[o]);
        p[(new, old)] = 1.0;
    }
    p
}

/// Frontier bookkeeping shared by the two monolithic oracles: for each node
/// in oracle order, the permutation that puts its inputs first (in port
/// order), the dimension of the remaining legs, and the axis it fills.
struct Schedule {
    order: Vec<String>,
    perms: Vec<DMatrix<f64>>,
    rests: Vec<usize>,
}

fn schedule(circuit: &Circuit) -> Schedule {
    let dim = |sys: &str| -> usize { circuit.systems().get(sys).unwrap().descriptor.parse().unwrap() };
    let order = reverse_ready_order(circuit);
    let mut frontier: Vec<(usize, usize)> = Vec::new();
    let mut perms = Vec::new();
    let mut rests = Vec::new();
    for id in &order {
        let inputs: Vec<usize> = circuit.input_wires(id).iter().map(|w| w.unwrap().id.0).collect();
        let mut positions: Vec<usize> =
            inputs.iter().map(|w| frontier.iter().position(|(f, _)| f == w).unwrap()).collect();
        let rest: Vec<usize> = (0..frontier.len()).filter(|i| !positions.contains(i)).collect();
        let rest_dim = rest.iter().map(|&i| frontier[i].1).product();
        positions.extend(rest.iter().copied());
        let dims: Vec<usize> = frontier.iter().map(|f| f.1).collect();
        perms.push(permutation(&dims, &positions));
        rests.push(rest_dim);
        let mut next: Vec<(usize, usize)> =
            circuit.output_wires(id).iter().map(|w| (w.unwrap().id.0, dim(&w.unwrap().system))).collect();
        next.extend(rest.iter().map(|&i| frontier[i]));
        frontier = next;
    }
    Schedule { order, perms, rests }
}

/// Outcome assignments keyed by node id, with their probability.
pub type OracleTable = Vec<(BTreeMap<String, usize>, f64)>;

fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in sizes {
        out = out.into_iter().flat_map(|t| (0..n).map(move |j| [t.clone(), vec![j]].concat())).collect();
    }
    out
}

fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Monolithic evaluation: for every outcome tuple, compose the whole
/// circuit into one map `1 → 1` and read off its value.
pub fn monolithic_quantum(circuit: &Circuit, backend: &QuantumBackend) -> OracleTable {
    let s = schedule(circuit);
    let tests: Vec<&[KrausMap]> =
        s.order.iter().map(|id| backend.get(&circuit.node(id).unwrap().payload).unwrap()).collect();
    let sizes: Vec<usize> = tests.iter().map(|t| t.len()).collect();
    let mut out = Vec::new();
    for tuple in tuples(&sizes) {
        let mut total = KrausMap::identity(1);
        for (k, &j) in tuple.iter().enumerate() {
            let perm = KrausMap::single(complex(&s.perms[k])).unwrap();
            let step = quantum::compose_par(&tests[k][j], &KrausMap::identity(s.rests[k]));
            total = quantum::compose_seq(&total, &perm).unwrap();
            total = quantum::compose_seq(&total, &step).unwrap();
            if total.ops().len() > 2 * total.in_dim() * total.out_dim() {
                total = KrausMap::from_choi(&total.choi(), total.in_dim(), total.out_dim()).unwrap();
            }
        }
        let p: f64 = total.ops().iter().map(|k| k[(0, 0)].norm_sqr()).sum();
        let key = s.order.iter().cloned().zip(tuple).collect();
        out.push((key, p));
    }
    out
}

/// Classical counterpart of [`monolithic_quantum`].
pub fn monolithic_classical(circuit: &Circuit, backend: &ClassicalBackend) -> OracleTable {
    let s = schedule(circuit);
    let tests: Vec<&[SubstochasticMatrix]> =
        s.order.iter().map(|id| backend.get(&circuit.node(id).unwrap().payload).unwrap()).collect();
    let sizes: Vec<usize> = tests.iter().map(|t| t.len()).collect();
    let mut out = Vec::new();
    for tuple in tuples(&sizes) {
        let mut total = SubstochasticMatrix::identity(1);
        for (k, &j) in tuple.iter().enumerate() {
            let perm = SubstochasticMatrix::new(s.perms[k].clone()).unwrap();
            let step = c_compose_par(&tests[k][j], &SubstochasticMatrix::identity(s.rests[k]));
            total = c_compose_seq(&c_compose_seq(&total, &perm).unwrap(), &step).unwrap();
        }
        let key = s.order.iter().cloned().zip(tuple).collect();
        out.push((key, total.matrix()[(0, 0)]));
    }
    out
}

/// Largest per-outcome difference between an oracle table and an engine
/// distribution; `None` when they do not cover the same outcome tuples.
pub fn oracle_deviation(oracle: &OracleTable, dist: &JointDistribution) -> Option<f64> {
    if oracle.len() != dist.len() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for (key, p) in oracle {
        let tuple: Option<Vec<usize>> = dist.axes().iter().map(|a| key.get(a.node.as_str()).copied()).collect();
        worst = worst.max((dist.get(&tuple?)? - p).abs());
    }
    Some(worst)
}
