//! Square classes of the conic coordinate fields.
//!
//! Each family of 32 conics attached to a node is cut out over a
//! multiquadratic extension of the base field generated by five explicit
//! square roots; the compositum of all ten node fields is generated by ten
//! square roots. Every generator is (up to sign) the discriminant times a
//! product of up to three of the fifteen hyperplane forms, so the whole
//! Galois computation reduces to square-class linear algebra over F₂.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{class_in_span, square_class_rank, squarefree_part, SquareClass};
use crate::conics::{flip_plane_key, flip_poly, proportional, AllConics, PlaneKey};
use crate::error::{Error, Result};
use crate::geometry::{delta, singular_test, HyperplaneId, NodeId, SurfaceParams, NODE_COUNT};
use crate::groups::Perm;

/// ±Δ times a product of hyperplane forms: one square class attached to a
/// family of conics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassExpr {
    negated: bool,
    factors: Vec<HyperplaneId>,
}

impl ClassExpr {
    /// Parses a compact spec like `-A.q+C.q-C`; the Δ factor is implicit.
    fn parse(spec: &str) -> ClassExpr {
        let (negated, rest) = match spec.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, spec),
        };
        let factors = rest
            .split('.')
            .map(|name| {
                HyperplaneId::by_name(name)
                    .unwrap_or_else(|| panic!("unknown hyperplane {name} in class spec"))
            })
            .collect();
        ClassExpr { negated, factors }
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    /// The hyperplane factors beside Δ, in display order.
    pub fn factors(&self) -> &[HyperplaneId] {
        &self.factors
    }

    /// The exact rational value ±Δ(p)·∏ h(p).
    pub fn value(&self, p: &SurfaceParams) -> BigRational {
        let mut v = delta(p);
        for h in &self.factors {
            v *= h.value(p);
        }
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Display name such as `-Delta*A*q+C*q-C`.
    pub fn name(&self) -> String {
        let mut s = String::new();
        if self.negated {
            s.push('-');
        }
        s.push_str("Delta");
        for h in &self.factors {
            s.push('*');
            s.push_str(h.name());
        }
        s
    }
}

/// The five classes generating the coordinate field of a node's conics.
/// Every factor is a hyperplane form through the node, and every entry must
/// lie in the field cut out by the node's singular-point chain: the radical
/// chain itself fails downstream if a list drifts off that field, so these
/// lists are pinned by the construction, not only by the tests.
const NODE_CLASS_SPECS: [[&str; 5]; NODE_COUNT] = [
    [
        "q+C.p-0.p+1",
        "q+C.p+0.p-1",
        "q+D.p+0.p-2",
        "q+D.p-0.p+2",
        "-q-E.p+1.p-2",
    ],
    [
        "q+C.p-0.p+1",
        "q+C.p+0.p-1",
        "q+E.p+0.p-3",
        "q+E.p-0.p+3",
        "-q-D.p+1.p-3",
    ],
    [
        "q+D.p-0.p+2",
        "q+D.p+0.p-2",
        "q+E.p+0.p-3",
        "q+E.p-0.p+3",
        "-q-C.p+2.p-3",
    ],
    [
        "-q-D.p+1.p-3",
        "-q-D.p-1.p+3",
        "-q-E.p-1.p+2",
        "-q-E.p+1.p-2",
        "-q-C.p+2.p-3",
    ],
    [
        "-A.q+E.q-E",
        "-A.q+D.q-D",
        "q+D.p+0.p-2",
        "q+E.p+0.p-3",
        "-q-E.p+1.p-2",
    ],
    [
        "-A.q+E.q-E",
        "-A.q+D.q-D",
        "q+D.p-0.p+2",
        "q+E.p-0.p+3",
        "-q-E.p-1.p+2",
    ],
    [
        "-A.q+C.q-C",
        "-A.q+E.q-E",
        "q+C.p+0.p-1",
        "q+E.p+0.p-3",
        "-q-E.p-1.p+2",
    ],
    [
        "-A.q+C.q-C",
        "-A.q+E.q-E",
        "q+C.p-0.p+1",
        "q+E.p-0.p+3",
        "-q-E.p+1.p-2",
    ],
    [
        "-A.q+C.q-C",
        "-A.q+D.q-D",
        "q+C.p+0.p-1",
        "q+D.p+0.p-2",
        "-q-D.p-1.p+3",
    ],
    [
        "-A.q+C.q-C",
        "-A.q+D.q-D",
        "q+C.p-0.p+1",
        "q+D.p-0.p+2",
        "-q-D.p+1.p-3",
    ],
];

/// The ten classes generating the compositum, in fixed display order.
const GLOBAL_CLASS_SPECS: [&str; 10] = [
    "-A.q+C.q-C",
    "-A.q+D.q-D",
    "-A.q+E.q-E",
    "q+C.p+0.p-1",
    "q+C.p-0.p+1",
    "q+D.p+0.p-2",
    "q+D.p-0.p+2",
    "q+E.p+0.p-3",
    "q+E.p-0.p+3",
    "-q-C.p+2.p-3",
];

pub fn node_class_exprs(node: NodeId) -> [ClassExpr; 5] {
    NODE_CLASS_SPECS[node.index()].map(ClassExpr::parse)
}

pub fn global_class_exprs() -> [ClassExpr; 10] {
    GLOBAL_CLASS_SPECS.map(ClassExpr::parse)
}

fn require_generic(p: &SurfaceParams) -> Result<()> {
    let report = singular_test(p);
    if report.delta.is_zero() {
        return Err(Error::Degenerate(
            "the discriminant vanishes: the surface is singular".into(),
        ));
    }
    if let Some(h) = report.vanishing.first() {
        return Err(Error::Degenerate(format!(
            "the hyperplane form {h} vanishes"
        )));
    }
    Ok(())
}

/// The five exact class values of a node at `p`.
pub fn node_class_values(p: &SurfaceParams, node: NodeId) -> Result<[BigRational; 5]> {
    require_generic(p)?;
    Ok(node_class_exprs(node).map(|e| e.value(p)))
}

/// The ten exact global class values at `p`, in display order.
pub fn global_class_values(p: &SurfaceParams) -> Result<[BigRational; 10]> {
    require_generic(p)?;
    Ok(global_class_exprs().map(|e| e.value(p)))
}

/// The Galois group of the compositum over the rationals, described through
/// the square classes of the ten generators.
#[derive(Clone, Debug)]
pub struct GaloisGroupReport {
    pub point: SurfaceParams,
    /// Exact values of the ten global classes, display order.
    pub values: [BigRational; 10],
    /// Squarefree parts of the values.
    pub classes: Vec<SquareClass>,
    /// F₂-rank of the classes; the group is C₂^rank.
    pub rank: usize,
    /// Earliest subsequence of the ten realizing a basis.
    pub basis: Vec<usize>,
}

impl GaloisGroupReport {
    /// |Gal| = 2^rank as a u64 (rank ≤ 10).
    pub fn order(&self) -> u64 {
        1u64 << self.rank
    }
}

pub fn galois_group(p: &SurfaceParams) -> Result<GaloisGroupReport> {
    let values = global_class_values(p)?;
    let classes = values
        .iter()
        .map(squarefree_part)
        .collect::<Result<Vec<_>>>()?;
    let (rank, basis) = square_class_rank(&values)?;
    Ok(GaloisGroupReport {
        point: p.clone(),
        values,
        classes,
        rank,
        basis,
    })
}

/// The permutation of the 320 conic records induced by flipping the sign of
/// the `generator`-th basis square root (0-based index into `report.basis`).
///
/// Every node-tower generator is a product of global basis classes, so the
/// flip restricts to a sign automorphism of each node tower. The
/// automorphism commutes with the plane keys and chart forms, so the moved
/// invariants are sign flips of the stored ones; each moved record is
/// matched by plane key and then by chart-form proportionality.
pub fn galois_action_on_conics(
    conics: &AllConics,
    report: &GaloisGroupReport,
    generator: usize,
) -> Result<Perm> {
    if generator >= report.basis.len() {
        return Err(Error::ArityMismatch {
            expected: report.basis.len(),
            got: generator,
        });
    }
    let basis_values: Vec<BigRational> = report
        .basis
        .iter()
        .map(|&k| report.values[k].clone())
        .collect();
    let mut images = vec![0usize; 32 * conics.nodes.len()];
    for (block, node) in conics.nodes.iter().enumerate() {
        let mut signs = Vec::with_capacity(node.tower.rank());
        for d in node.tower.generators() {
            let value = BigRational::from_integer(d.clone());
            let support = class_in_span(&value, &basis_values)?.ok_or_else(|| {
                Error::Internal(format!(
                    "node tower generator {d} lies outside the global class span"
                ))
            })?;
            signs.push(if support.contains(&generator) { -1 } else { 1 });
        }
        let mut lookup: HashMap<&PlaneKey, Vec<usize>> = HashMap::new();
        for (k, key) in node.plane_keys.iter().enumerate() {
            lookup.entry(key).or_default().push(k);
        }
        // the flip is a ring involution, so k -> target forces target -> k
        let mut assigned = vec![false; node.records.len()];
        for k in 0..node.records.len() {
            if assigned[k] {
                continue;
            }
            let moved_key = flip_plane_key(&node.plane_keys[k], &signs);
            let moved_form = flip_poly(&node.forms[k], &signs)?;
            let mut target = None;
            for &cand in lookup.get(&moved_key).map(Vec::as_slice).unwrap_or(&[]) {
                if proportional(&moved_form, &node.forms[cand])? {
                    target = Some(cand);
                    break;
                }
            }
            let target = target.ok_or_else(|| {
                Error::Internal(format!(
                    "the sign automorphism left the record set of node {}",
                    node.node
                ))
            })?;
            images[32 * block + k] = 32 * block + target;
            images[32 * block + target] = 32 * block + k;
            assigned[k] = true;
            assigned[target] = true;
        }
    }
    Perm::from_images(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big_rational_from_i64;

    fn sample() -> SurfaceParams {
        SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap()
    }

    #[test]
    fn first_node_class_values_at_the_sample_point() {
        let p = sample();
        let values = node_class_values(&p, NodeId::from_label(1).unwrap()).unwrap();
        // Δ·q₊C·p₋0·p₊1 = 47977·17·67·1
        assert_eq!(values[0], big_rational_from_i64(47977 * 17 * 67));
        // −Δ·q₋E·p₊1·p₋2 = −47977·(−19)·1·(−77)
        assert_eq!(values[4], big_rational_from_i64(-47977 * 19 * 77));
    }

    #[test]
    fn global_classes_have_the_display_order_and_rank_ten() {
        let p = sample();
        let report = galois_group(&p).unwrap();
        assert_eq!(
            global_class_exprs()[0].name(),
            "-Delta*A*q+C*q-C".to_string()
        );
        assert_eq!(report.values[0], big_rational_from_i64(47977 * 17 * 13));
        assert_eq!(report.rank, 10);
        assert_eq!(report.basis, (0..10).collect::<Vec<_>>());
        assert_eq!(report.order(), 1024);
    }

    #[test]
    fn every_node_class_lies_in_the_global_span() {
        // exercised at several generic points so the span containment is a
        // polynomial fact, not an accident of one sample
        let points = [
            [1i64, 87, 15, 39, 21],
            [1, 3, 5, 7, 11],
            [2, 1, 9, -4, 7],
            [3, -5, 2, 11, 8],
            [1, 13, -6, 5, -9],
        ];
        for coords in points {
            let p = SurfaceParams::from_ints(coords).unwrap();
            if !singular_test(&p).is_smooth() {
                continue;
            }
            let global = global_class_values(&p).unwrap().to_vec();
            for node in NodeId::all() {
                for value in node_class_values(&p, node).unwrap() {
                    assert!(
                        class_in_span(&value, &global).unwrap().is_some(),
                        "node {node} class {value} escapes the span at {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_drops_when_a_class_is_a_square() {
        let p = SurfaceParams::from_ints([1, 1, 1, 1, 1]).unwrap();
        assert!(singular_test(&p).is_smooth());
        let report = galois_group(&p).unwrap();
        // Δ·q₊C·p₋0·p₊1 = 9·3·9·3 = 729 = 27²
        assert_eq!(report.values[4], big_rational_from_i64(729));
        assert!(report.classes[4].is_trivial());
        assert!(report.rank <= 9);
    }

    #[test]
    fn sign_flips_act_on_the_conics_as_commuting_involutions() {
        let p = sample();
        let conics = crate::conics::all_conics(&p).unwrap();
        let report = galois_group(&p).unwrap();
        let perms: Vec<Perm> = (0..report.rank)
            .map(|g| galois_action_on_conics(&conics, &report, g).unwrap())
            .collect();
        for (g, perm) in perms.iter().enumerate() {
            assert!(!perm.is_identity(), "generator {g} acts trivially");
            assert!(perm.compose(perm).is_identity());
            for k in 0..perm.len() {
                // node blocks are stable and conjugate pairs map to pairs
                assert_eq!(perm.apply(k) / 32, k / 32);
                assert_eq!(perm.apply(k ^ 1), perm.apply(k) ^ 1);
            }
        }
        assert_eq!(perms[0].compose(&perms[7]), perms[7].compose(&perms[0]));
    }

    #[test]
    fn degenerate_points_are_refused_by_name() {
        let node = SurfaceParams::from_ints([1, 0, -2, -2, 2]).unwrap();
        assert!(matches!(
            galois_group(&node),
            Err(Error::Degenerate(msg)) if msg.contains("discriminant")
        ));
        // Δ = −35 there, so the hyperplane diagnostic is the one that fires
        let on_hyperplane = SurfaceParams::from_ints([1, 1, -2, 1, 2]).unwrap();
        assert!(matches!(
            galois_group(&on_hyperplane),
            Err(Error::Degenerate(msg)) if msg.contains("q+C")
        ));
    }
}
