//! Serializable report documents for the command line front end.
//!
//! Every structured output is a single [`Document`] carrying the schema
//! tag; documents round-trip through serde_json unchanged. Exact values
//! travel as decimal strings, never as floats, except the one genuinely
//! floating quantity (a tracking radius).

use serde::{Deserialize, Serialize};

use crate::conics::{record_label, ConicRecord, NodeConics};
use crate::galois::{global_class_exprs, GaloisGroupReport};
use crate::geometry::{gamma_name, SingularReport, SurfaceParams};
use crate::monodromy::TrackedLoop;
use crate::poly::{MultiPoly, TowerField};
use crate::tower::TowerElement;

pub const SCHEMA: &str = "quartic-conics/1";

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct Document {
    pub schema: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub report: Report,
}

impl Document {
    pub fn new(seed: Option<u64>, report: Report) -> Document {
        Document {
            schema: SCHEMA.to_string(),
            seed,
            report,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Singular(SingularDoc),
    Conics(ConicsDoc),
    Galois(GaloisDoc),
    Groups(GroupsDoc),
    Monodromy(MonodromyDoc),
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct FormValue {
    pub form: String,
    pub value: String,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct SingularDoc {
    pub point: [String; 5],
    pub delta: String,
    pub values: Vec<FormValue>,
    pub vanishing: Vec<String>,
    pub singular: bool,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct ConicsDoc {
    pub point: [String; 5],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    pub count: usize,
    pub plane_count: usize,
    pub verified: usize,
    pub nodes: Vec<NodeConicsDoc>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct NodeConicsDoc {
    /// 1-based node label.
    pub node: usize,
    /// Radicands of the node's field tower, in generator order.
    pub tower_generators: Vec<String>,
    pub records: Vec<ConicRecordDoc>,
}

/// A tower element as exact data: one coordinate per generator subset,
/// keyed by the subset mask.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct TowerElementDoc {
    pub coords: Vec<(u32, String)>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct QuadTerm {
    pub monomial: String,
    pub coeff: TowerElementDoc,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct ConicRecordDoc {
    /// Global label in [0, 320).
    pub label: usize,
    /// Γ word carrying the seed pair here; "id" for the seed itself.
    pub gamma: String,
    pub branch: i8,
    pub plane: [TowerElementDoc; 4],
    pub quad: Vec<QuadTerm>,
    pub verified: bool,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct ClassDoc {
    pub name: String,
    pub value: String,
    pub squarefree: String,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct GaloisDoc {
    pub point: [String; 5],
    pub classes: Vec<ClassDoc>,
    pub rank: usize,
    pub order: u64,
    pub basis: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct GeneratorDoc {
    pub name: String,
    pub nodes: String,
    pub hyperplanes: String,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct GroupsDoc {
    pub gamma_order: usize,
    pub omega_order: usize,
    pub quotient_order: usize,
    pub gamma_normal: bool,
    pub centre_trivial: bool,
    pub generators: Vec<GeneratorDoc>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct TrackDoc {
    pub target: String,
    /// "planes" or "conics".
    pub family: String,
    /// Table entry word the tracked permutation realises.
    pub entry: String,
    pub permutation: String,
    pub steps: usize,
    pub radius: f64,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct MonodromyDoc {
    pub plane_group_order: usize,
    pub conic_group_order: usize,
    pub all_involutions: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_entries_matching: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived_entries_total: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<[String; 5]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track: Option<TrackDoc>,
}

pub fn point_strings(p: &SurfaceParams) -> [String; 5] {
    let coords = p.coords();
    std::array::from_fn(|i| coords[i].to_string())
}

pub fn singular_doc(p: &SurfaceParams, report: &SingularReport) -> SingularDoc {
    SingularDoc {
        point: point_strings(p),
        delta: report.delta.to_string(),
        values: report
            .hyperplane_values
            .iter()
            .map(|(h, v)| FormValue {
                form: h.name().to_string(),
                value: v.to_string(),
            })
            .collect(),
        vanishing: report.vanishing.clone(),
        singular: !report.is_smooth(),
    }
}

pub fn tower_element_doc(e: &TowerElement) -> TowerElementDoc {
    TowerElementDoc {
        coords: e
            .coords()
            .iter()
            .map(|(m, q)| (*m, q.to_string()))
            .collect(),
    }
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn monomial_name(exponents: &[u8]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exponents.iter().take(4).enumerate() {
        match e {
            0 => {}
            1 => parts.push(VAR_NAMES[i].to_string()),
            k => parts.push(format!("{}^{}", VAR_NAMES[i], k)),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub fn quad_terms(q: &MultiPoly<TowerField>) -> Vec<QuadTerm> {
    q.terms()
        .map(|(m, c)| QuadTerm {
            monomial: monomial_name(&m.0),
            coeff: tower_element_doc(c),
        })
        .collect()
}

pub fn conic_record_doc(rec: &ConicRecord, verified: bool) -> ConicRecordDoc {
    ConicRecordDoc {
        label: record_label(rec.node, rec.mask, rec.branch),
        gamma: gamma_name(rec.mask),
        branch: rec.branch,
        plane: std::array::from_fn(|i| tower_element_doc(&rec.plane[i])),
        quad: quad_terms(&rec.quad),
        verified,
    }
}

/// One node's family with per-record verification flags, record order
/// preserved (mask-major, positive branch first).
pub fn node_conics_doc(nc: &NodeConics, verified: &[bool]) -> NodeConicsDoc {
    NodeConicsDoc {
        node: nc.node.label(),
        tower_generators: nc
            .tower
            .generators()
            .iter()
            .map(|g| g.to_string())
            .collect(),
        records: nc
            .records
            .iter()
            .zip(verified)
            .map(|(rec, &ok)| conic_record_doc(rec, ok))
            .collect(),
    }
}

pub fn galois_doc(report: &GaloisGroupReport) -> GaloisDoc {
    let names = global_class_exprs().map(|e| e.name());
    GaloisDoc {
        point: point_strings(&report.point),
        classes: (0..report.values.len())
            .map(|i| ClassDoc {
                name: names[i].clone(),
                value: report.values[i].to_string(),
                squarefree: report.classes[i].to_bigint().to_string(),
            })
            .collect(),
        rank: report.rank,
        order: report.order(),
        basis: report.basis.clone(),
    }
}

pub fn track_doc(tracked: &TrackedLoop, family: &str) -> TrackDoc {
    let entry = tracked.entry.word();
    TrackDoc {
        target: tracked.target.name().to_string(),
        family: family.to_string(),
        entry: if entry.is_empty() { "id".to_string() } else { entry },
        permutation: tracked.perm.cycle_notation(),
        steps: tracked.steps_used,
        radius: tracked.radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_document_round_trips() {
        let p = SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap();
        let report = crate::geometry::singular_test(&p);
        let doc = Document::new(
            Some(7),
            Report::Singular(singular_doc(&p, &report)),
        );
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: Document = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.schema, SCHEMA);
    }

    #[test]
    fn monomial_names_are_canonical() {
        assert_eq!(monomial_name(&[2, 0, 0, 0, 0]), "x^2");
        assert_eq!(monomial_name(&[1, 1, 0, 0, 0]), "x*y");
        assert_eq!(monomial_name(&[0, 0, 1, 1, 0]), "z*w");
        assert_eq!(monomial_name(&[0, 0, 0, 0, 0]), "1");
    }
}
