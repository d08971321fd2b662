//! JSON file formats: graphs, piecewise Hamiltonians and control pulses.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use lightcone_core::control::ControlPulse;
use lightcone_core::linalg::CMatrix;
use lightcone_core::sim::hamiltonian::two_site;
use lightcone_core::sim::{Pauli, PiecewiseHamiltonian, Slice};
use lightcone_core::SpinGraph;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Version stamped into every JSON document and CSV header we write.
pub const SCHEMA_VERSION: u32 = 1;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable value");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// `{"vertices": 4, "local_dims": [2, 2, 2, 2], "edges": [[0, 1], ...], "J": 1, "B": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_dims: Option<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<SpinGraph, CliError> {
        let dims = match &self.local_dims {
            Some(d) if d.len() != self.vertices => {
                return Err(CliError::Usage(format!(
                    "local_dims has {} entries for {} vertices",
                    d.len(),
                    self.vertices
                )))
            }
            Some(d) => d.clone(),
            None => vec![2; self.vertices],
        };
        Ok(SpinGraph::new(dims, self.edges.iter().map(|e| (e[0], e[1])), self.j, self.b)?)
    }

    pub fn from_graph(g: &SpinGraph) -> Self {
        let dims = g.local_dims().to_vec();
        Self {
            vertices: dims.len(),
            local_dims: if dims.iter().all(|&d| d == 2) { None } else { Some(dims) },
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            j: g.coupling_cap(),
            b: g.field_cap(),
        }
    }
}

/// `coeff * P` on one qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldTerm {
    pub vertex: usize,
    pub pauli: String,
    pub coeff: f64,
}

/// `coeff * P (x) Q` on an edge, e.g. `"paulis": "XX"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingTerm {
    pub edge: [usize; 2],
    pub paulis: String,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub duration: f64,
    #[serde(default)]
    pub fields: Vec<FieldTerm>,
    #[serde(default)]
    pub couplings: Vec<CouplingTerm>,
}

/// Piecewise-constant qubit Hamiltonian written as Pauli terms. Terms on the
/// same vertex or edge are summed before the norm caps are checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub graph: GraphFile,
    pub slices: Vec<SliceSpec>,
}

fn pauli(c: char) -> Result<Pauli, CliError> {
    Pauli::from_char(c).ok_or_else(|| CliError::Usage(format!("unknown Pauli label {c:?}")))
}

impl HamiltonianFile {
    pub fn to_hamiltonian(&self) -> Result<PiecewiseHamiltonian, CliError> {
        let g = self.graph.to_graph()?;
        if g.local_dims().iter().any(|&d| d != 2) {
            return Err(CliError::Usage("Pauli terms need qubit vertices".into()));
        }
        let mut slices = Vec::with_capacity(self.slices.len());
        for spec in &self.slices {
            let mut vertex: BTreeMap<usize, CMatrix> = BTreeMap::new();
            for f in &spec.fields {
                let mut chars = f.pauli.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(CliError::Usage(format!("field term needs one Pauli label, got {:?}", f.pauli)));
                };
                let op = pauli(c)?.matrix().scale(f.coeff);
                vertex.entry(f.vertex).and_modify(|m| *m += &op).or_insert(op);
            }
            let mut edge: BTreeMap<(usize, usize), CMatrix> = BTreeMap::new();
            for c in &spec.couplings {
                let labels: Vec<char> = c.paulis.chars().collect();
                let [p, q] = labels[..] else {
                    return Err(CliError::Usage(format!("coupling needs two Pauli labels, got {:?}", c.paulis)));
                };
                // Store in sorted vertex order, swapping the factors to match.
                let (key, p, q) = if c.edge[0] <= c.edge[1] {
                    ((c.edge[0], c.edge[1]), p, q)
                } else {
                    ((c.edge[1], c.edge[0]), q, p)
                };
                let op = two_site(&[(pauli(p)?, pauli(q)?, c.coeff)]);
                edge.entry(key).and_modify(|m| *m += &op).or_insert(op);
            }
            let mut slice = Slice::new(spec.duration);
            for (v, op) in vertex {
                slice = slice.with_vertex(v, op);
            }
            for ((u, v), op) in edge {
                slice = slice.with_edge(u, v, op);
            }
            slices.push(slice);
        }
        Ok(PiecewiseHamiltonian::new(g, slices)?)
    }
}

/// Saved control pulse together with the coupling it was optimized for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseFile {
    pub schema_version: u32,
    #[serde(rename = "J")]
    pub j: f64,
    pub infidelity: f64,
    pub pulse: ControlPulse,
}

impl PulseFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file: PulseFile = read_json(path)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "{}: unsupported schema_version {}",
                path.display(),
                file.schema_version
            )));
        }
        // Re-run the constructor checks on the deserialized fields.
        let p = &file.pulse;
        ControlPulse::new(p.length, p.total_time(), p.fields.clone(), p.amplitude_cap)?;
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = SpinGraph::new(vec![2, 3, 2], [(0, 1), (1, 2)], 1.5, 0.5).unwrap();
        let f = GraphFile::from_graph(&g);
        let text = serde_json::to_string(&f).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn graph_defaults_to_qubits() {
        let f: GraphFile = serde_json::from_str(r#"{"vertices":3,"edges":[[0,1],[1,2]],"J":1,"B":0}"#).unwrap();
        assert_eq!(f.to_graph().unwrap().local_dims(), &[2, 2, 2]);
        let bad: GraphFile =
            serde_json::from_str(r#"{"vertices":3,"local_dims":[2],"edges":[],"J":1,"B":0}"#).unwrap();
        assert!(matches!(bad.to_graph(), Err(CliError::Usage(_))));
    }

    #[test]
    fn hamiltonian_terms_are_summed_per_edge() {
        let text = r#"{
            "graph": {"vertices": 2, "edges": [[0, 1]], "J": 1, "B": 1},
            "slices": [{"duration": 1.0,
                        "fields": [{"vertex": 0, "pauli": "Z", "coeff": 0.5}],
                        "couplings": [{"edge": [0, 1], "paulis": "XX", "coeff": 0.5},
                                      {"edge": [1, 0], "paulis": "YY", "coeff": 0.5}]}]
        }"#;
        let f: HamiltonianFile = serde_json::from_str(text).unwrap();
        let h = f.to_hamiltonian().unwrap();
        assert_eq!(h.slices()[0].edge_terms.len(), 1);
        let expected = two_site(&[(Pauli::X, Pauli::X, 0.5), (Pauli::Y, Pauli::Y, 0.5)]);
        assert!((&h.slices()[0].edge_terms[0].1 - expected).norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_caps_enforced() {
        let text = r#"{
            "graph": {"vertices": 2, "edges": [[0, 1]], "J": 1, "B": 1},
            "slices": [{"duration": 1.0, "couplings": [{"edge": [0, 1], "paulis": "ZZ", "coeff": 1.5}]}]
        }"#;
        let f: HamiltonianFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.to_hamiltonian(), Err(CliError::Domain(_))));
    }
}
