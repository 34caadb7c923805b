//! Monodromy of the plane and conic families.
//!
//! When the parameter point travels a loop in the smooth locus, the sixteen
//! planes through each node and the thirty-two conics they carry come back
//! permuted. The permutations around the fifteen singular hyperplanes and
//! around the discriminant cubic are recorded in two sign tables shipped as
//! data: every cell is an element of the coordinate group Γ, optionally
//! composed with the swap of the two conics on every plane. This module
//! loads the tables, re-derives the plane table from its first column
//! through the symmetry group, realises both tables as permutation groups
//! on the 160 plane labels and 320 conic labels, matches them against the
//! Galois action of the square-class field, and replays individual loops
//! with floating-point continuation as an independent numeric witness.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::conics::{conics_for_node, AllConics, NodeConics};
use crate::error::{Error, Result};
use crate::galois::{galois_action_on_conics, galois_group, global_class_exprs};
use crate::geometry::{
    gamma_matrix, gamma_name, GammaMask, HyperplaneId, NodeId, SurfaceParams, GAMMA_ORDER,
    HYPERPLANE_COUNT, NODE_COUNT,
};
use crate::groups::{generate_group, phi, GroupElement, Perm};
use crate::poly::{MultiPoly, TowerField};
use crate::tower::{TowerDescriptor, TowerElement};

/// Plane labels run node-major, then by Γ mask.
pub const PLANE_DEGREE: usize = NODE_COUNT * GAMMA_ORDER;
/// Conic labels run node-major, mask-major, then branch.
pub const CONIC_DEGREE: usize = 2 * PLANE_DEGREE;

const TABLE_DATA: &str = include_str!("../data/monodromy_tables.txt");

// ---------------------------------------------------------------------
// Stored tables
// ---------------------------------------------------------------------

/// A loop in the smooth parameter locus: once around a singular hyperplane,
/// or once around the discriminant cubic.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LoopTarget {
    Hyperplane(HyperplaneId),
    Discriminant,
}

impl LoopTarget {
    pub fn by_name(name: &str) -> Option<LoopTarget> {
        if name == "Delta" {
            return Some(LoopTarget::Discriminant);
        }
        HyperplaneId::by_name(name).map(LoopTarget::Hyperplane)
    }

    pub fn name(self) -> &'static str {
        match self {
            LoopTarget::Hyperplane(h) => h.name(),
            LoopTarget::Discriminant => "Delta",
        }
    }
}

impl std::fmt::Display for LoopTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One table cell: the Γ word acting on a node's sixteen planes, plus
/// whether the two conics on every plane of that family swap.
#[derive(Clone, Copy, PartialEq, Eq, Default, Debug)]
pub struct TableEntry {
    pub mask: GammaMask,
    pub swap: bool,
}

impl TableEntry {
    /// Compact word: empty for the identity, `g1g3`, `-g2`, `-id`.
    pub fn word(self) -> String {
        match (self.mask, self.swap) {
            (0, false) => String::new(),
            (m, false) => gamma_name(m),
            (m, true) => format!("-{}", gamma_name(m)),
        }
    }

    fn parse(cell: &str) -> Result<TableEntry> {
        let (swap, word) = match cell.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, cell),
        };
        if word.is_empty() {
            return if swap {
                Err(Error::Internal("a bare sign is not a table entry".into()))
            } else {
                Ok(TableEntry::default())
            };
        }
        if word == "id" {
            return Ok(TableEntry { mask: 0, swap });
        }
        let bytes = word.as_bytes();
        if bytes.len() % 2 != 0 {
            return Err(Error::Internal(format!("malformed table entry {cell:?}")));
        }
        let mut mask: GammaMask = 0;
        for pair in bytes.chunks(2) {
            if pair[0] != b'g' || !(b'1'..=b'4').contains(&pair[1]) {
                return Err(Error::Internal(format!("malformed table entry {cell:?}")));
            }
            mask |= 1 << (pair[1] - b'1');
        }
        if gamma_name(mask) != word {
            return Err(Error::Internal(format!(
                "non-canonical table entry {cell:?}"
            )));
        }
        Ok(TableEntry { mask, swap })
    }
}

/// A monodromy table: one row per loop, one entry per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyTable {
    pub rows: Vec<(LoopTarget, [TableEntry; NODE_COUNT])>,
}

impl MonodromyTable {
    pub fn row(&self, target: LoopTarget) -> Option<&[TableEntry; NODE_COUNT]> {
        self.rows.iter().find(|(t, _)| *t == target).map(|(_, r)| r)
    }

    pub fn entry(&self, target: LoopTarget, node: NodeId) -> Option<TableEntry> {
        self.row(target).map(|r| r[node.index()])
    }
}

/// Loads the two shipped tables and cross-checks their joint structure: the
/// plane table has one swap-free row per hyperplane in index order, and the
/// conic table is the plane table with every nontrivial cell negated plus a
/// leading discriminant row that swaps every conjugate pair.
pub fn stored_tables() -> Result<(MonodromyTable, MonodromyTable)> {
    let mut planes = Vec::new();
    let mut conics = Vec::new();
    let mut section: Option<bool> = None;
    for raw in TABLE_DATA.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[planes]" => {
                section = Some(false);
                continue;
            }
            "[conics]" => {
                section = Some(true);
                continue;
            }
            _ => {}
        }
        let (label, cells) = line
            .split_once('|')
            .ok_or_else(|| Error::Internal(format!("table row without separator: {line:?}")))?;
        let target = LoopTarget::by_name(label.trim())
            .ok_or_else(|| Error::Internal(format!("unknown loop target {label:?}")))?;
        let cells: Vec<&str> = cells.split(',').map(str::trim).collect();
        if cells.len() != NODE_COUNT {
            return Err(Error::Internal(format!(
                "row {} has {} cells",
                target,
                cells.len()
            )));
        }
        let mut entries = [TableEntry::default(); NODE_COUNT];
        for (e, cell) in entries.iter_mut().zip(&cells) {
            *e = TableEntry::parse(cell)?;
        }
        match section {
            Some(false) => planes.push((target, entries)),
            Some(true) => conics.push((target, entries)),
            None => return Err(Error::Internal("table row outside a section".into())),
        }
    }
    let planes = MonodromyTable { rows: planes };
    let conics = MonodromyTable { rows: conics };
    cross_check_tables(&planes, &conics)?;
    Ok((planes, conics))
}

fn cross_check_tables(planes: &MonodromyTable, conics: &MonodromyTable) -> Result<()> {
    if planes.rows.len() != HYPERPLANE_COUNT {
        return Err(Error::Internal("the plane table must have 15 rows".into()));
    }
    for (i, (target, row)) in planes.rows.iter().enumerate() {
        let expected = HyperplaneId::from_index(i).map(LoopTarget::Hyperplane);
        if Some(*target) != expected {
            return Err(Error::Internal("plane table rows out of order".into()));
        }
        if row.iter().any(|e| e.swap) {
            return Err(Error::Internal(
                "the plane table cannot carry swap signs".into(),
            ));
        }
    }
    if conics.rows.len() != HYPERPLANE_COUNT + 1 {
        return Err(Error::Internal("the conic table must have 16 rows".into()));
    }
    let (first, delta_row) = &conics.rows[0];
    if *first != LoopTarget::Discriminant
        || delta_row.iter().any(|e| e.mask != 0 || !e.swap)
    {
        return Err(Error::Internal(
            "the conic table must open with the pure-swap discriminant row".into(),
        ));
    }
    for (plane_row, conic_row) in planes.rows.iter().zip(&conics.rows[1..]) {
        if plane_row.0 != conic_row.0 {
            return Err(Error::Internal("conic table rows out of order".into()));
        }
        for (pe, ce) in plane_row.1.iter().zip(&conic_row.1) {
            if ce.mask != pe.mask || ce.swap != (pe.mask != 0) {
                return Err(Error::Internal(format!(
                    "conic row {} is not the negated plane row",
                    plane_row.0
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Re-derivation from the first column
// ---------------------------------------------------------------------

/// The first node's column of the plane table: looping around a hyperplane
/// flips a subset of the five square roots generating the first node's
/// coordinate field, and the flip moves the sixteen planes by this Γ word.
/// Only nine hyperplanes act at all; the rest fix every plane of the family.
pub const FIRST_NODE_COLUMN: [GammaMask; HYPERPLANE_COUNT] = [
    0b0000, // A
    0b0100, // q+C -> g3
    0b0000, // q-C
    0b1000, // q+D -> g4
    0b0000, // q-D
    0b0000, // q+E
    0b1100, // q-E -> g3g4
    0b0011, // p+0 -> g1g2
    0b1111, // p-0 -> g1g2g3g4
    0b1110, // p+1 -> g2g3g4
    0b0110, // p-1 -> g2g3
    0b1101, // p+2 -> g1g3g4
    0b1001, // p-2 -> g1g4
    0b0000, // p+3
    0b0000, // p-3
];

/// The hyperplanes that act nontrivially on the first family.
pub fn active_first_node_loops() -> Vec<HyperplaneId> {
    HyperplaneId::all()
        .filter(|h| FIRST_NODE_COLUMN[h.index()] != 0)
        .collect()
}

/// For each node, a symmetry carrying it to the first node, found by
/// closing the node action of the five mixing generators. The node action
/// factors through a quotient of order 720, so the search stays small.
fn transporters_to_first_node() -> Result<Vec<GroupElement>> {
    let gens: Vec<GroupElement> = (1..=5).map(phi).collect();
    let gen_perms: Vec<Perm> = gens
        .iter()
        .map(|g| g.action_on_nodes())
        .collect::<Result<_>>()?;
    let mut found: Vec<Option<GroupElement>> = vec![None; NODE_COUNT];
    found[0] = Some(GroupElement::identity());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(Perm::identity(NODE_COUNT).images().to_vec());
    let mut queue = VecDeque::new();
    queue.push_back((GroupElement::identity(), Perm::identity(NODE_COUNT)));
    while let Some((el, perm)) = queue.pop_front() {
        if found.iter().all(Option::is_some) {
            break;
        }
        for (gel, gperm) in gens.iter().zip(&gen_perms) {
            let nel = gel.compose(&el);
            let nperm = gperm.compose(&perm);
            if seen.insert(nperm.images().to_vec()) {
                let carried = nperm.inverse().apply(0);
                if found[carried].is_none() {
                    found[carried] = Some(nel.clone());
                }
                queue.push_back((nel, nperm));
            }
        }
    }
    found
        .into_iter()
        .map(|o| {
            o.ok_or_else(|| {
                Error::Internal("the mixing generators do not reach every node".into())
            })
        })
        .collect()
}

/// Rebuilds the plane table from its first column. A loop around H seen
/// from the i-th family is the loop around φ(H) seen from the first family,
/// conjugated back through any symmetry φ carrying the i-th node to the
/// first; the conjugate of a Γ element stays in Γ, so every cell is forced.
pub fn derive_plane_table() -> Result<MonodromyTable> {
    let transporters = transporters_to_first_node()?;
    let mut rows: Vec<(LoopTarget, [TableEntry; NODE_COUNT])> = HyperplaneId::all()
        .map(|h| (LoopTarget::Hyperplane(h), [TableEntry::default(); NODE_COUNT]))
        .collect();
    for (i, carrier) in transporters.iter().enumerate() {
        let carrier_inv = carrier.inverse();
        let hyper = carrier.action_on_hyperplanes()?;
        for h in 0..HYPERPLANE_COUNT {
            let column_mask = FIRST_NODE_COLUMN[hyper.apply(h)];
            let mask = if column_mask == 0 {
                0
            } else {
                carrier_inv
                    .compose(&GroupElement::gamma(column_mask))
                    .compose(carrier)
                    .as_gamma()
                    .ok_or_else(|| {
                        Error::Internal("a conjugated flip left the coordinate kernel".into())
                    })?
            };
            rows[h].1[i] = TableEntry { mask, swap: false };
        }
    }
    Ok(MonodromyTable { rows })
}

// ---------------------------------------------------------------------
// Permutation groups on the labels
// ---------------------------------------------------------------------

/// The permutation of the 160 plane labels induced by one table row: each
/// node block is translated by the row's Γ word.
pub fn plane_row_perm(entries: &[TableEntry; NODE_COUNT]) -> Result<Perm> {
    let mut images = vec![0usize; PLANE_DEGREE];
    for (n, entry) in entries.iter().enumerate() {
        let m = entry.mask as usize;
        for mu in 0..GAMMA_ORDER {
            images[n * GAMMA_ORDER + mu] = n * GAMMA_ORDER + (mu ^ m);
        }
    }
    Perm::from_images(images)
}

/// The permutation of the 320 conic labels induced by one table row: the
/// plane translation, with the two branches on every plane of a node
/// exchanged where the row carries a swap sign.
pub fn conic_row_perm(entries: &[TableEntry; NODE_COUNT]) -> Result<Perm> {
    let mut images = vec![0usize; CONIC_DEGREE];
    for (n, entry) in entries.iter().enumerate() {
        let m = entry.mask as usize;
        let s = usize::from(entry.swap);
        for mu in 0..GAMMA_ORDER {
            for b in 0..2 {
                images[n * 2 * GAMMA_ORDER + 2 * mu + b] =
                    n * 2 * GAMMA_ORDER + 2 * (mu ^ m) + (b ^ s);
            }
        }
    }
    Perm::from_images(images)
}

/// A monodromy group realised on labels: the table rows and the group they
/// generate.
#[derive(Clone, Debug)]
pub struct MonodromyGroup {
    pub generators: Vec<Perm>,
    pub elements: Vec<Perm>,
}

/// The group generated by the fifteen plane rows on the 160 plane labels;
/// its order is 2^9.
pub fn plane_monodromy_group() -> Result<MonodromyGroup> {
    let (planes, _) = stored_tables()?;
    let generators: Vec<Perm> = planes
        .rows
        .iter()
        .map(|(_, row)| plane_row_perm(row))
        .collect::<Result<_>>()?;
    let elements = generate_group(&generators, 1024)?;
    if elements.len() != 512 {
        return Err(Error::Internal(format!(
            "the plane monodromy group has order {}, not 512",
            elements.len()
        )));
    }
    Ok(MonodromyGroup {
        generators,
        elements,
    })
}

/// The group generated by the sixteen conic rows on the 320 conic labels;
/// its order is 2^10.
pub fn conic_monodromy_group() -> Result<MonodromyGroup> {
    let (_, conics) = stored_tables()?;
    let generators: Vec<Perm> = conics
        .rows
        .iter()
        .map(|(_, row)| conic_row_perm(row))
        .collect::<Result<_>>()?;
    let elements = generate_group(&generators, 2048)?;
    if elements.len() != 1024 {
        return Err(Error::Internal(format!(
            "the conic monodromy group has order {}, not 1024",
            elements.len()
        )));
    }
    Ok(MonodromyGroup {
        generators,
        elements,
    })
}

/// Forgets the branch bit of a conic permutation, yielding its image on the
/// 160 plane labels; fails if the permutation tears a conjugate pair apart.
pub fn forget_branches(perm: &Perm) -> Result<Perm> {
    if perm.len() != CONIC_DEGREE {
        return Err(Error::ArityMismatch {
            expected: CONIC_DEGREE,
            got: perm.len(),
        });
    }
    let mut images = vec![0usize; PLANE_DEGREE];
    for (k, img) in images.iter_mut().enumerate() {
        let a = perm.apply(2 * k) / 2;
        let b = perm.apply(2 * k + 1) / 2;
        if a != b {
            return Err(Error::Internal(
                "a conic permutation does not preserve conjugate pairs".into(),
            ));
        }
        *img = a;
    }
    Perm::from_images(images)
}

// ---------------------------------------------------------------------
// Matching the Galois action
// ---------------------------------------------------------------------

/// Indices (into the ten global classes, display order) of the square
/// classes whose roots flip along the loop: the classes containing the
/// target form to odd order. Every class contains the discriminant, so the
/// discriminant loop flips all ten.
pub fn loop_to_class_flips(target: LoopTarget) -> Vec<usize> {
    let exprs = global_class_exprs();
    match target {
        LoopTarget::Discriminant => (0..exprs.len()).collect(),
        LoopTarget::Hyperplane(h) => exprs
            .iter()
            .enumerate()
            .filter(|(_, e)| e.factors().iter().filter(|&&f| f == h).count() % 2 == 1)
            .map(|(j, _)| j)
            .collect(),
    }
}

/// One row of the comparison: the loop, the classes it flips, and whether
/// the product of the corresponding Galois involutions equals the table
/// permutation on the 320 records.
#[derive(Clone, Debug)]
pub struct LoopRowMatch {
    pub target: LoopTarget,
    pub flips: Vec<usize>,
    pub matched: bool,
}

/// Result of matching the Galois action against the conic table.
#[derive(Clone, Debug)]
pub struct MatchReport {
    pub rows: Vec<LoopRowMatch>,
    /// The group generated by the ten Galois involutions equals the group
    /// generated by the sixteen table rows.
    pub groups_equal: bool,
    /// Orbit sizes of the Galois generators on the 320 records.
    pub orbit_sizes: Vec<usize>,
}

impl MatchReport {
    pub fn fully_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.matched)
            && self.groups_equal
            && self.orbit_sizes.len() == NODE_COUNT
            && self.orbit_sizes.iter().all(|&s| s == 2 * GAMMA_ORDER)
    }
}

/// Matches the Galois action on the constructed conic records against the
/// stored conic table, row by row: the loop around each target must act on
/// the records exactly as the product of the sign flips of the square
/// classes it winds around. Requires all ten classes independent at `p`.
pub fn match_galois_monodromy(p: &SurfaceParams, conics: &AllConics) -> Result<MatchReport> {
    if conics.nodes.len() != NODE_COUNT {
        return Err(Error::ArityMismatch {
            expected: NODE_COUNT,
            got: conics.nodes.len(),
        });
    }
    let report = galois_group(p)?;
    if report.rank != NODE_COUNT {
        return Err(Error::Degenerate(format!(
            "the ten global classes have rank {} at this point; the comparison needs rank 10",
            report.rank
        )));
    }
    let galois_perms: Vec<Perm> = (0..NODE_COUNT)
        .map(|j| galois_action_on_conics(conics, &report, j))
        .collect::<Result<_>>()?;

    let (_, conic_table) = stored_tables()?;
    let mut rows = Vec::with_capacity(conic_table.rows.len());
    let mut table_perms = Vec::with_capacity(conic_table.rows.len());
    for (target, entries) in &conic_table.rows {
        let flips = loop_to_class_flips(*target);
        let predicted = flips.iter().fold(Perm::identity(CONIC_DEGREE), |acc, &j| {
            acc.compose(&galois_perms[j])
        });
        let table_perm = conic_row_perm(entries)?;
        rows.push(LoopRowMatch {
            target: *target,
            flips,
            matched: predicted == table_perm,
        });
        table_perms.push(table_perm);
    }

    let from_galois = generate_group(&galois_perms, 2048)?;
    let from_table = generate_group(&table_perms, 2048)?;
    let galois_set: HashSet<&Perm> = from_galois.iter().collect();
    let groups_equal =
        from_galois.len() == from_table.len() && from_table.iter().all(|g| galois_set.contains(g));

    let orbit_sizes = Perm::orbits(&galois_perms, CONIC_DEGREE)
        .iter()
        .map(Vec::len)
        .collect();
    Ok(MatchReport {
        rows,
        groups_equal,
        orbit_sizes,
    })
}

// ---------------------------------------------------------------------
// Numeric loop tracking
// ---------------------------------------------------------------------

type C64 = Complex64;

/// Options for the numeric tracker.
#[derive(Clone, Copy, Debug)]
pub struct TrackOptions {
    /// Samples per path segment on the first attempt.
    pub steps: usize,
    /// Ceiling for the per-segment sample count under refinement.
    pub max_steps: usize,
}

impl Default for TrackOptions {
    fn default() -> TrackOptions {
        TrackOptions {
            steps: 512,
            max_steps: 1 << 16,
        }
    }
}

/// Outcome of tracking one loop on the first node's family.
#[derive(Clone, Debug)]
pub struct TrackedLoop {
    pub target: LoopTarget,
    /// Permutation of the sixteen plane labels, or of the thirty-two conic
    /// labels when conics are tracked.
    pub perm: Perm,
    /// The Γ translation (and swap) the permutation realises.
    pub entry: TableEntry,
    /// Samples per segment actually used.
    pub steps_used: usize,
    /// Loop radius actually used, in units of the moving coordinate.
    pub radius: f64,
}

/// Conservative f64 value of a big rational, immune to overflow of the raw
/// numerator or denominator.
fn rational_approx(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let (n, d) = (q.numer(), q.denom());
    let ns = n.bits().saturating_sub(900) as usize;
    let ds = d.bits().saturating_sub(900) as usize;
    let nf = (n >> ns).to_f64().unwrap_or(f64::NAN);
    let df = (d >> ds).to_f64().unwrap_or(f64::NAN);
    (nf / df) * 2f64.powi(ns as i32 - ds as i32)
}

fn form_at(form: &[i64; 5], pt: &[C64; 5]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (w, x) in form.iter().zip(pt) {
        acc += *x * *w as f64;
    }
    acc
}

fn delta_at(pt: &[C64; 5]) -> C64 {
    let [a, b, c, d, e] = *pt;
    16.0 * a * a * a + a * b * b - 4.0 * a * (c * c + d * d + e * e) + 4.0 * c * d * e
}

/// β of the first node, the closed quadratic with signs (+, +, −).
fn beta1_at(pt: &[C64; 5]) -> C64 {
    let [a, b, c, d, e] = *pt;
    12.0 * a * a + 0.25 * b * b + 4.0 * a * (c + d - e) - (c * c + d * d + e * e)
        + 2.0 * (c * d - c * e - d * e)
}

const NODE1_COORDS: [f64; 5] = [1.0, 0.0, -2.0, -2.0, 2.0];

/// The residual Kummer parameter vector over the first node, at the scale
/// 4β·p − Δ·q̃ the exact pipeline uses.
fn residual_at(pt: &[C64; 5]) -> [C64; 5] {
    let b = beta1_at(pt);
    let d = delta_at(pt);
    std::array::from_fn(|k| 4.0 * b * pt[k] - d * NODE1_COORDS[k])
}

/// Discriminant of the quadratic in u = z² + z⁻² of the symmetric octic.
fn octic_u_disc(p1: &[C64; 5]) -> C64 {
    let [a, b, c, d, e] = *p1;
    let oa = -(a * a * b * b);
    let ob = 4.0 * (2.0 * a * d - c * e) * (2.0 * a * e - c * d);
    let oc = 2.0
        * (a * a * b * b - 2.0 * (e * e + d * d) * (4.0 * a * a + c * c)
            + 16.0 * a * c * d * e);
    ob * ob - 4.0 * oa * (oc - 2.0 * oa)
}

const TINY: f64 = 1e-280;

fn finite4(v: &[C64; 4]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// One singular point [x, y, z, 1] of the residual surface, by the radical
/// chain with floating branches. Every resolvable branch lands somewhere on
/// the sixteen-point fiber, and the Γ-orbit recovers the rest, so the
/// branch choice is immaterial.
fn chain_seed(p1: &[C64; 5]) -> Option<[C64; 4]> {
    let [a, b, c, d, e] = *p1;
    let oa = -(a * a * b * b);
    if oa.norm() < TINY {
        return None;
    }
    let ob = 4.0 * (2.0 * a * d - c * e) * (2.0 * a * e - c * d);
    let oc = 2.0
        * (a * a * b * b - 2.0 * (e * e + d * d) * (4.0 * a * a + c * c)
            + 16.0 * a * c * d * e);
    let disc = (ob * ob - 4.0 * oa * (oc - 2.0 * oa)).sqrt();
    let dq = 4.0 * a * a - c * c;
    let eq = e * e - d * d;
    for u_sign in [1.0, -1.0] {
        let u = (-ob + u_sign * disc) / (2.0 * oa);
        let inner = (u * u - 4.0).sqrt();
        for z_sign in [1.0, -1.0] {
            let zsq = (u + z_sign * inner) / 2.0;
            if zsq.norm() < TINY {
                continue;
            }
            let z = zsq.sqrt();
            let z4 = zsq * zsq;
            let den = dq * (e * zsq - d);
            if den.norm() < TINY {
                continue;
            }
            let ysq = -(a * (dq * (z4 - 1.0) + eq * (z4 + 1.0)) + c * eq * zsq) / den;
            if ysq.norm() < TINY {
                continue;
            }
            let y = ysq.sqrt();
            let x_den = 2.0 * (c * c - 4.0 * a * a) * z * y;
            if x_den.norm() < TINY {
                continue;
            }
            let x = -b * (a * (z4 + 1.0) + c * zsq) / x_den;
            let seed = [x, y, z, C64::new(1.0, 0.0)];
            if finite4(&seed) {
                return Some(seed);
            }
        }
    }
    None
}

fn gamma_apply_c(mask: GammaMask, v: &[C64; 4]) -> [C64; 4] {
    let m = gamma_matrix(mask);
    std::array::from_fn(|i| {
        let mut acc = C64::new(0.0, 0.0);
        for (j, x) in v.iter().enumerate() {
            acc += *x * m[i][j] as f64;
        }
        acc
    })
}

/// Pushes a quadratic form through γ: the matrix of q ∘ γ⁻¹ is M·Q·Mᵀ for
/// the orthogonal signed permutation M.
fn gamma_conjugate_quad(mask: GammaMask, q: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let m = gamma_matrix(mask);
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for (k, row) in q.iter().enumerate() {
                if m[i][k] == 0 {
                    continue;
                }
                for (l, cell) in row.iter().enumerate() {
                    if m[j][l] != 0 {
                        acc += *cell * (m[i][k] * m[j][l]) as f64;
                    }
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

/// The sixteen trope planes of the first node's residual surface over a
/// complex parameter point, in an arbitrary enumeration.
fn plane_fiber(pt: &[C64; 5]) -> Option<Vec<[C64; 4]>> {
    let p1 = residual_at(pt);
    let seed = chain_seed(&p1)?;
    Some((0..GAMMA_ORDER as u8).map(|m| gamma_apply_c(m, &seed)).collect())
}

/// A conic as tracked numerically: its plane and the quadric cutting it,
/// both up to scale.
#[derive(Clone)]
struct ConicVec {
    plane: [C64; 4],
    quad: [[C64; 4]; 4],
}

/// The thirty-two conics of the first node over a complex parameter point:
/// the conjugate pair on the seed trope, transported around the Γ-orbit.
fn conic_fiber(pt: &[C64; 5]) -> Option<Vec<ConicVec>> {
    let p1 = residual_at(pt);
    let seed = chain_seed(&p1)?;
    let (r3, r2, r1) = (seed[0], seed[1], seed[2]);
    let m23 = r2 * r3;
    let m13 = r1 * r3;
    let m12 = r1 * r2;
    let f0 = (m23 - r1) * (m23 + r1);
    let f1 = (m13 - r2) * (m13 + r2);
    let f2 = (m12 - r3) * (m12 + r3);
    let a0 = f0 * f1;
    let a1 = f0 * f2;
    let a2 = f1 * f2;
    if a2.norm() < TINY {
        return None;
    }
    let r1s = r1 * r1;
    let r2s = r2 * r2;
    let r3s = r3 * r3;
    let t = 2.0 * r1s * r2s * r3s - r1s * r1s - r2s * r2s - r3s * r3s + 1.0;
    let a3 = r3 * r2 * t;
    let a4 = r3 * r1 * t;
    let a5 = r2 * r1 * t;
    let r1q = r1s * r1s;
    let mu = (p1[0] * (r1q + 1.0) + p1[2] * r1s) / (a2 * a2);
    let dlt = delta_at(pt);
    if dlt.norm() < TINY {
        return None;
    }
    let r = (-mu * a2 * a2 / dlt).sqrt();
    let zero = C64::new(0.0, 0.0);
    let qtilde = [
        [a2, zero, zero, zero],
        [zero, -a2, zero, zero],
        [zero, zero, -a2, zero],
        [zero, zero, zero, a2],
    ];
    let qprime = [
        [a0, a3 / 2.0, a4 / 2.0, zero],
        [a3 / 2.0, a1, a5 / 2.0, zero],
        [a4 / 2.0, a5 / 2.0, a2, zero],
        [zero, zero, zero, zero],
    ];
    let mut plus = [[zero; 4]; 4];
    let mut minus = [[zero; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            plus[i][j] = qtilde[i][j] + r * qprime[i][j];
            minus[i][j] = qtilde[i][j] - r * qprime[i][j];
        }
    }
    let mut out = Vec::with_capacity(2 * GAMMA_ORDER);
    for m in 0..GAMMA_ORDER as u8 {
        let plane = gamma_apply_c(m, &seed);
        if !finite4(&plane) {
            return None;
        }
        out.push(ConicVec {
            plane,
            quad: gamma_conjugate_quad(m, &plus),
        });
        out.push(ConicVec {
            plane,
            quad: gamma_conjugate_quad(m, &minus),
        });
    }
    Some(out)
}

/// Scale- and phase-invariant squared distance between projective vectors.
fn fs_dist_sq(u: &[C64], v: &[C64]) -> f64 {
    let mut ip = C64::new(0.0, 0.0);
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        ip += *a * b.conj();
        nu += a.norm_sqr();
        nv += b.norm_sqr();
    }
    if nu == 0.0 || nv == 0.0 {
        return 1.0;
    }
    (1.0 - ip.norm_sqr() / (nu * nv)).max(0.0)
}

trait FiberItem: Clone {
    fn distance_sq(&self, other: &Self) -> f64;
}

impl FiberItem for [C64; 4] {
    fn distance_sq(&self, other: &Self) -> f64 {
        fs_dist_sq(self, other)
    }
}

/// A basis of the plane: the three coordinate directions complementary to
/// the pivot, corrected to satisfy the plane equation.
fn plane_basis(plane: &[C64; 4]) -> [[C64; 4]; 3] {
    let zero = C64::new(0.0, 0.0);
    let pivot = (0..4)
        .max_by(|&a, &b| {
            plane[a]
                .norm()
                .partial_cmp(&plane[b].norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let mut basis = [[zero; 4]; 3];
    for (row, j) in (0..4).filter(|&j| j != pivot).enumerate() {
        basis[row][j] = C64::new(1.0, 0.0);
        basis[row][pivot] = -plane[j] / plane[pivot];
    }
    basis
}

fn restrict_quad(q: &[[C64; 4]; 4], basis: &[[C64; 4]; 3]) -> [C64; 9] {
    let mut out = [C64::new(0.0, 0.0); 9];
    for (a, ba) in basis.iter().enumerate() {
        for (b, bb) in basis.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (i, row) in q.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    acc += ba[i] * *cell * bb[j];
                }
            }
            out[3 * a + b] = acc;
        }
    }
    out
}

impl FiberItem for ConicVec {
    /// The quadric of a conic is only determined modulo multiples of its
    /// plane, and the chain produces different representatives on different
    /// branches, so the comparison restricts both quadrics to the plane.
    fn distance_sq(&self, other: &Self) -> f64 {
        let basis = plane_basis(&other.plane);
        let ra = restrict_quad(&self.quad, &basis);
        let rb = restrict_quad(&other.quad, &basis);
        fs_dist_sq(&self.plane, &other.plane) + fs_dist_sq(&ra, &rb)
    }
}

/// Matches each item to its nearest counterpart; a runner-up closer than
/// ten times the winner, or a collision, signals an ambiguous step.
fn match_into<T: FiberItem>(from: &[T], to: &[T]) -> Result<Vec<usize>> {
    let mut images = vec![usize::MAX; from.len()];
    let mut taken = vec![false; to.len()];
    for (j, item) in from.iter().enumerate() {
        let mut best = usize::MAX;
        let mut d1 = f64::INFINITY;
        let mut d2 = f64::INFINITY;
        for (k, cand) in to.iter().enumerate() {
            let d = item.distance_sq(cand);
            if d < d1 {
                d2 = d1;
                d1 = d;
                best = k;
            } else if d < d2 {
                d2 = d;
            }
        }
        if best == usize::MAX || !d1.is_finite() {
            return Err(Error::TrackingAmbiguous(
                "non-finite distances in a matching step".into(),
            ));
        }
        if d2 < 100.0 * d1 {
            return Err(Error::TrackingAmbiguous(format!(
                "nearest-neighbour margin too thin: {:.3e} against {:.3e}",
                d1, d2
            )));
        }
        if taken[best] {
            return Err(Error::TrackingAmbiguous(
                "two tracked items matched the same fiber item".into(),
            ));
        }
        taken[best] = true;
        images[j] = best;
    }
    Ok(images)
}

/// Walks the labeled start configuration along the sampled path, matching
/// into the freshly evaluated fiber at every sample, and closes up against
/// the start configuration to read off the permutation.
fn track_items<T: FiberItem>(
    start: &[T],
    samples: &[[C64; 5]],
    fiber_at: &dyn Fn(&[C64; 5]) -> Option<Vec<T>>,
) -> Result<Perm> {
    let mut current: Vec<T> = start.to_vec();
    for pt in samples.iter().skip(1) {
        let fiber = fiber_at(pt).ok_or_else(|| {
            Error::TrackingAmbiguous("the fiber evaluation degenerated at a path sample".into())
        })?;
        if fiber.len() != start.len() {
            return Err(Error::Internal("fiber size changed along the path".into()));
        }
        let images = match_into(&current, &fiber)?;
        current = images.iter().map(|&k| fiber[k].clone()).collect();
    }
    let images = match_into(&current, start)?;
    Perm::from_images(images)
}

// - embedding the exact records -

/// Complex values of the tower generators under one fixed embedding: the
/// principal square root of each generator. Any choice of signs extends to
/// a field embedding, and the extracted Γ pattern does not depend on it.
fn principal_generator_values(tower: &TowerDescriptor) -> Vec<C64> {
    tower
        .generators()
        .iter()
        .map(|d| C64::new(d.to_f64().unwrap_or(f64::NAN), 0.0).sqrt())
        .collect()
}

fn embed_element(e: &TowerElement, gens: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (mask, q) in e.coords() {
        let mut term = C64::new(rational_approx(q), 0.0);
        for (j, g) in gens.iter().enumerate() {
            if mask & (1 << j) != 0 {
                term *= *g;
            }
        }
        acc += term;
    }
    acc
}

fn embed_plane(plane: &[TowerElement; 4], gens: &[C64]) -> [C64; 4] {
    std::array::from_fn(|i| embed_element(&plane[i], gens))
}

fn embed_quad(q: &MultiPoly<TowerField>, gens: &[C64]) -> Result<[[C64; 4]; 4]> {
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (mono, coeff) in q.terms() {
        let c = embed_element(coeff, gens);
        let e = mono.0;
        if e[4] != 0 || e.iter().map(|&x| x as usize).sum::<usize>() != 2 {
            return Err(Error::Internal("a conic quadric has a non-quadratic term".into()));
        }
        if let Some(i) = (0..4).find(|&i| e[i] == 2) {
            m[i][i] += c;
        } else {
            let mut it = (0..4).filter(|&i| e[i] == 1);
            let (i, j) = (it.next().unwrap(), it.next().unwrap());
            m[i][j] += c / 2.0;
            m[j][i] += c / 2.0;
        }
    }
    Ok(m)
}

/// The sixteen planes of the first node's records under the embedding, in
/// mask order, giving the labeled start configuration.
fn embedded_start_planes(node: &NodeConics) -> Vec<[C64; 4]> {
    let gens = principal_generator_values(&node.tower);
    (0..GAMMA_ORDER)
        .map(|mu| embed_plane(&node.records[2 * mu].plane, &gens))
        .collect()
}

/// The thirty-two conic records under the embedding, in label order.
fn embedded_start_conics(node: &NodeConics) -> Result<Vec<ConicVec>> {
    let gens = principal_generator_values(&node.tower);
    node.records
        .iter()
        .map(|rec| {
            Ok(ConicVec {
                plane: embed_plane(&rec.plane, &gens),
                quad: embed_quad(&rec.quad, &gens)?,
            })
        })
        .collect()
}

// - loop geometry -

/// Which parameter coordinate a loop moves: the matching letter for the
/// quadric-type forms, the second coordinate for the octahedral forms and
/// the discriminant, the first for the leading form.
fn moving_coordinate(h: HyperplaneId) -> usize {
    match h.index() {
        0 => 0,
        1 | 2 => 2,
        3 | 4 => 3,
        5 | 6 => 4,
        _ => 1,
    }
}

#[derive(Clone, Debug)]
struct LoopGeometry {
    base: [f64; 5],
    coord: usize,
    center: C64,
    rho: f64,
}

#[derive(Clone, Debug)]
enum LoopPlan {
    Direct(LoopGeometry),
    /// An in-leading-coordinate shift first, when the two discriminant
    /// roots on the loop line coincide at the base point.
    Shifted {
        start: [f64; 5],
        inner: LoopGeometry,
    },
}

fn base_f64(base: &[BigRational; 5]) -> [f64; 5] {
    std::array::from_fn(|k| rational_approx(&base[k]))
}

fn dot_form(form: &[i64; 5], coords: &[BigRational; 5]) -> BigRational {
    let mut acc = BigRational::zero();
    for (w, x) in form.iter().zip(coords) {
        acc += x * BigRational::from_integer(BigInt::from(*w));
    }
    acc
}

fn delta_rational(c: &[BigRational; 5]) -> BigRational {
    let [a, b, cc, d, e] = c;
    let sixteen = BigRational::from_integer(BigInt::from(16));
    let four = BigRational::from_integer(BigInt::from(4));
    sixteen * a * a * a + a * b * b - four.clone() * a * (cc * cc + d * d + e * e)
        + four * cc * d * e
}

/// Monomial coefficients of the cubic through f(0), f(1), f(2), f(3).
fn newton_cubic(f: impl Fn(i64) -> BigRational) -> [BigRational; 4] {
    let (f0, f1, f2, f3) = (f(0), f(1), f(2), f(3));
    let d1 = &f1 - &f0;
    let d2 = &f2 - BigRational::from_integer(BigInt::from(2)) * &f1 + &f0;
    let d3 = &f3 - BigRational::from_integer(BigInt::from(3)) * &f2
        + BigRational::from_integer(BigInt::from(3)) * &f1
        - &f0;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    let sixth = BigRational::new(BigInt::from(1), BigInt::from(6));
    let c3 = &d3 * &sixth;
    let c2 = &d2 * &half - &d3 * &half;
    let c1 = &d1 - &d2 * &half + &d3 * &third;
    [f0, c1, c2, c3]
}

fn min_rational(a: BigRational, b: BigRational) -> BigRational {
    if b < a {
        b
    } else {
        a
    }
}

/// Radius below which a disk around the line point keeps a polynomial with
/// these line coefficients away from zero: inside min(1, |c₀|/Σ|cₖ|) the
/// tail is dominated by the constant term.
fn safe_disk_radius(coeffs: &[BigRational]) -> Option<BigRational> {
    let c0 = coeffs.first()?.abs();
    if c0.is_zero() {
        return Some(BigRational::zero());
    }
    let tail: BigRational = coeffs[1..].iter().map(|c| c.abs()).sum();
    if tail.is_zero() {
        return None;
    }
    Some(min_rational(BigRational::from_integer(BigInt::from(1)), c0 / tail))
}

/// Exact loop geometry for a hyperplane target: the center where the form
/// vanishes on the coordinate line, and a radius keeping every other
/// singular form and the discriminant away from the enclosed disk, halved
/// for safety.
fn hyperplane_plan(base: &[BigRational; 5], target: HyperplaneId) -> Result<LoopGeometry> {
    let coord = moving_coordinate(target);
    let form = target.form();
    let w = BigRational::from_integer(BigInt::from(form[coord]));
    let f0 = dot_form(&form, base);
    if f0.is_zero() {
        return Err(Error::Degenerate(format!(
            "the base point lies on the loop target {}",
            target.name()
        )));
    }
    let g0 = &f0 / &w;
    let center = &base[coord] - &g0;
    let mut centered = base.clone();
    centered[coord] = center.clone();

    let mut bound = g0.abs() * BigRational::new(BigInt::from(9), BigInt::from(10));
    for h in HyperplaneId::all() {
        if h == target {
            continue;
        }
        let wh = h.form()[coord];
        let v0 = dot_form(&h.form(), &centered);
        if wh == 0 {
            if v0.is_zero() {
                return Err(Error::Degenerate(format!(
                    "{} vanishes on the whole loop line",
                    h.name()
                )));
            }
            continue;
        }
        if v0.is_zero() {
            return Err(Error::Degenerate(format!(
                "{} vanishes at the loop centre",
                h.name()
            )));
        }
        bound = min_rational(bound, (v0 / BigRational::from_integer(BigInt::from(wh))).abs());
    }
    // keep a value-zero of the moving second coordinate off the disk: the
    // radical chain needs it nonzero
    if coord == 1 && !center.is_zero() {
        bound = min_rational(bound, center.abs());
    }
    let coeffs = newton_cubic(|g| {
        let mut at = centered.clone();
        at[coord] = &center + BigRational::from_integer(BigInt::from(g));
        delta_rational(&at)
    });
    if coeffs[0].is_zero() {
        return Err(Error::Degenerate(
            "the discriminant vanishes at the loop centre".into(),
        ));
    }
    if let Some(r) = safe_disk_radius(&coeffs) {
        if r.is_zero() {
            return Err(Error::Degenerate(
                "the discriminant pinches the loop disk".into(),
            ));
        }
        bound = min_rational(bound, r);
    }
    let rho = rational_approx(&bound) / 2.0;
    if !(rho > 0.0) {
        return Err(Error::Degenerate("the loop radius collapsed".into()));
    }
    Ok(LoopGeometry {
        base: base_f64(base),
        coord,
        center: C64::new(rational_approx(&center), 0.0),
        rho,
    })
}

const SHIFT_CANDIDATES: [(i64, i64); 10] = [
    (1, 1),
    (-1, 1),
    (1, 2),
    (-1, 2),
    (2, 1),
    (-2, 1),
    (1, 4),
    (-1, 4),
    (4, 1),
    (-4, 1),
];

/// Loop geometry for the discriminant: the two roots of Δ on the line of
/// second coordinates are ±B′ with A·B′² = A·B² − Δ; the loop circles the
/// root nearer the base. When the roots collide, the plan prepends a small
/// exact shift of the leading coordinate that separates them.
fn discriminant_plan(base: &[BigRational; 5], depth: usize) -> Result<LoopPlan> {
    if base[0].is_zero() {
        return Err(Error::Degenerate(
            "the discriminant loop needs a nonzero leading coefficient".into(),
        ));
    }
    let delta0 = delta_rational(base);
    if delta0.is_zero() {
        return Err(Error::Degenerate(
            "the base point lies on the discriminant".into(),
        ));
    }
    let bsq = &base[1] * &base[1] - &delta0 / &base[0];
    let bsq_f = rational_approx(&bsq);
    let b_f = rational_approx(&base[1]);
    if bsq_f.abs() > 1e-8 * (1.0 + b_f * b_f) {
        let root = C64::new(bsq_f, 0.0).sqrt();
        let center = if (C64::new(b_f, 0.0) - root).norm() <= (C64::new(b_f, 0.0) + root).norm()
        {
            root
        } else {
            -root
        };
        let g0 = C64::new(b_f, 0.0) - center;
        let mut bound = g0.norm() * 0.9;
        bound = bound.min(center.norm()); // the mirror root −B′ and the value B = 0
        for h in HyperplaneId::all() {
            let form = h.form();
            if form[1] == 0 {
                if dot_form(&form, base).is_zero() {
                    return Err(Error::Degenerate(format!(
                        "{} vanishes on the whole loop line",
                        h.name()
                    )));
                }
                continue;
            }
            let mut at_zero = base.clone();
            at_zero[1] = BigRational::zero();
            let rest = rational_approx(&dot_form(&form, &at_zero));
            let zero = C64::new(-rest / form[1] as f64, 0.0);
            bound = bound.min((zero - center).norm());
        }
        let rho = bound / 2.0;
        if !(rho > 0.0) {
            return Err(Error::Degenerate("the loop radius collapsed".into()));
        }
        return Ok(LoopPlan::Direct(LoopGeometry {
            base: base_f64(base),
            coord: 1,
            center,
            rho,
        }));
    }
    if depth > 0 {
        return Err(Error::Degenerate(
            "the discriminant roots stay together after the shift".into(),
        ));
    }
    for (n, d) in SHIFT_CANDIDATES {
        let eps = BigRational::new(BigInt::from(n), BigInt::from(d));
        let mut shifted = base.clone();
        shifted[0] = &base[0] + &eps;
        if shifted[0].is_zero() || delta_rational(&shifted).is_zero() {
            continue;
        }
        if HyperplaneId::all().any(|h| dot_form(&h.form(), &shifted).is_zero()) {
            continue;
        }
        match discriminant_plan(&shifted, depth + 1) {
            Ok(LoopPlan::Direct(inner)) => {
                return Ok(LoopPlan::Shifted {
                    start: base_f64(base),
                    inner,
                });
            }
            _ => continue,
        }
    }
    Err(Error::Degenerate(
        "no small shift separates the discriminant roots".into(),
    ))
}

fn plan_loop(base: &[BigRational; 5], target: LoopTarget) -> Result<LoopPlan> {
    match target {
        LoopTarget::Hyperplane(h) => Ok(LoopPlan::Direct(hyperplane_plan(base, h)?)),
        LoopTarget::Discriminant => discriminant_plan(base, 0),
    }
}

// - guarded path assembly -

struct Guard {
    name: String,
    protected: bool,
    /// Whether the guard cuts the branch locus in the parameter plane, so
    /// its winding number around the loop circle is constrained: zero when
    /// protected, exactly one for the target. Chain-degeneracy guards are
    /// not branch loci and carry no winding constraint; they only keep the
    /// samples themselves clear of their zeros.
    winding: bool,
    f: Box<dyn Fn(&[C64; 5]) -> C64>,
}

/// The quantities that must stay away from zero along the path: the
/// fifteen singular forms and the discriminant at the moving point (except
/// the loop target, which winds exactly once), plus everything the fiber
/// evaluation divides by: β, the second coordinate, the singular forms of
/// the residual point, and the octic resolvent discriminant.
fn standard_guards(target: LoopTarget) -> Vec<Guard> {
    let mut out: Vec<Guard> = Vec::new();
    for h in HyperplaneId::all() {
        let form = h.form();
        out.push(Guard {
            name: h.name().to_string(),
            protected: target != LoopTarget::Hyperplane(h),
            winding: true,
            f: Box::new(move |pt| form_at(&form, pt)),
        });
    }
    out.push(Guard {
        name: "Delta".into(),
        protected: target != LoopTarget::Discriminant,
        winding: true,
        f: Box::new(|pt| delta_at(pt)),
    });
    out.push(Guard {
        name: "beta1".into(),
        protected: true,
        winding: false,
        f: Box::new(|pt| beta1_at(pt)),
    });
    out.push(Guard {
        name: "B".into(),
        protected: true,
        winding: false,
        f: Box::new(|pt| pt[1]),
    });
    for h in HyperplaneId::all() {
        let form = h.form();
        out.push(Guard {
            name: format!("{}(residual)", h.name()),
            protected: true,
            winding: false,
            f: Box::new(move |pt| form_at(&form, &residual_at(pt))),
        });
    }
    out.push(Guard {
        name: "disc(residual)".into(),
        protected: true,
        winding: false,
        f: Box::new(|pt| octic_u_disc(&residual_at(pt))),
    });
    out
}

fn point_with(base: &[f64; 5], coord: usize, v: C64) -> [C64; 5] {
    std::array::from_fn(|k| {
        if k == coord {
            v
        } else {
            C64::new(base[k], 0.0)
        }
    })
}

/// Samples a straight piece of the moving coordinate, detouring above any
/// position where a guarded quantity vanishes. Out-and-back traversals use
/// the same detours, so a detour contributes nothing to the loop class.
fn straight_with_detours(
    base: &[f64; 5],
    coord: usize,
    from: C64,
    to: C64,
    guards: &[Guard],
    n: usize,
) -> Result<Vec<C64>> {
    const SCAN: usize = 4096;
    let seg = to - from;
    if seg.norm() == 0.0 {
        return Ok(vec![from]);
    }
    let at = |s: f64| from + seg * s;
    let mut hits: Vec<f64> = Vec::new();
    for guard in guards {
        let vals: Vec<C64> = (0..=SCAN)
            .map(|i| (guard.f)(&point_with(base, coord, at(i as f64 / SCAN as f64))))
            .collect();
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !scale.is_finite() {
            return Err(Error::Degenerate(format!(
                "{} overflows along a tracking segment",
                guard.name
            )));
        }
        if scale == 0.0 {
            return Err(Error::Degenerate(format!(
                "{} vanishes identically along a tracking segment",
                guard.name
            )));
        }
        for i in 1..SCAN {
            let m = vals[i].norm();
            if m < 1e-7 * scale && m <= vals[i - 1].norm() && m <= vals[i + 1].norm() {
                hits.push(i as f64 / SCAN as f64);
            }
        }
        for i in 0..SCAN {
            let (a, b) = (vals[i], vals[i + 1]);
            if a.im.abs() < 1e-9 * scale
                && b.im.abs() < 1e-9 * scale
                && a.re * b.re < 0.0
            {
                let t = a.re.abs() / (a.re - b.re).abs();
                hits.push((i as f64 + t) / SCAN as f64);
            }
        }
    }
    hits.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<f64> = Vec::new();
    for h in hits {
        match merged.last_mut() {
            Some(last) if h - *last < 8.0 / SCAN as f64 => *last = (*last + h) / 2.0,
            _ => merged.push(h),
        }
    }
    for &h in &merged {
        if !(1e-4..=1.0 - 1e-4).contains(&h) {
            return Err(Error::Degenerate(
                "a guarded quantity vanishes at a tracking segment endpoint".into(),
            ));
        }
    }

    let mut windows: Vec<(f64, f64)> = Vec::new(); // (position, half-width)
    for (i, &h) in merged.iter().enumerate() {
        let prev = if i == 0 { 0.0 } else { merged[i - 1] };
        let next = if i + 1 == merged.len() { 1.0 } else { merged[i + 1] };
        let delta = ((h - prev).min(next - h) / 3.0).min(0.04);
        if delta < 1e-5 {
            return Err(Error::Degenerate(
                "two degeneracies pinch a tracking segment".into(),
            ));
        }
        windows.push((h, delta));
    }

    let arc_n = (n / 16).max(16);
    let mut out = vec![from];
    let mut cursor = 0.0;
    let push_linear = |out: &mut Vec<C64>, from_s: f64, to_s: f64| {
        let count = ((to_s - from_s) * n as f64).ceil().max(2.0) as usize;
        for j in 1..=count {
            out.push(at(from_s + (to_s - from_s) * j as f64 / count as f64));
        }
    };
    let travel = seg / seg.norm();
    for (h, delta) in windows {
        push_linear(&mut out, cursor, h - delta);
        let center_v = at(h);
        let radius = delta * seg.norm();
        for j in 1..=arc_n {
            let theta = PI - PI * j as f64 / arc_n as f64;
            out.push(center_v + travel * radius * C64::new(theta.cos(), theta.sin()));
        }
        cursor = h + delta;
    }
    push_linear(&mut out, cursor, 1.0);
    Ok(out)
}

enum CircleVerdict {
    Accept(Vec<C64>),
    Shrink,
    Refine,
}

/// Samples the loop circle and validates every guard on it: protected
/// quantities keep a safe magnitude and wind zero times, the target winds
/// exactly once.
fn circle_check(
    base: &[f64; 5],
    coord: usize,
    center: C64,
    entry: C64,
    guards: &[Guard],
    n: usize,
) -> CircleVerdict {
    let radial = entry - center;
    let samples: Vec<C64> = (0..=n)
        .map(|j| {
            if j == n {
                entry
            } else {
                let th = 2.0 * PI * j as f64 / n as f64;
                center + radial * C64::new(th.cos(), th.sin())
            }
        })
        .collect();
    for guard in guards {
        let vals: Vec<C64> = samples
            .iter()
            .map(|v| (guard.f)(&point_with(base, coord, *v)))
            .collect();
        let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(scale.is_finite() && scale > 0.0) {
            return CircleVerdict::Shrink;
        }
        if vals.iter().any(|v| v.norm() < 1e-10 * scale) {
            return CircleVerdict::Shrink;
        }
        if !guard.winding {
            continue;
        }
        let mut winding = 0.0;
        for pair in vals.windows(2) {
            let step = (pair[1] / pair[0]).arg();
            if step.abs() > 2.5 {
                return CircleVerdict::Refine;
            }
            winding += step;
        }
        let turns = (winding / (2.0 * PI)).round() as i64;
        if guard.protected && turns != 0 {
            return CircleVerdict::Shrink;
        }
        if !guard.protected && turns.abs() != 1 {
            return CircleVerdict::Shrink;
        }
    }
    CircleVerdict::Accept(samples)
}

/// Assembles the full sampled loop for a direct plan: radial approach,
/// validated circle, radial return. Returns the radius used, or nothing
/// when the circle wants more samples.
fn build_direct(
    geom: &LoopGeometry,
    guards: &[Guard],
    steps: usize,
) -> Result<Option<(Vec<[C64; 5]>, f64)>> {
    let start_v = C64::new(geom.base[geom.coord], 0.0);
    let g0 = start_v - geom.center;
    if g0.norm() == 0.0 {
        return Err(Error::Degenerate("the base point sits at the loop centre".into()));
    }
    let direction = g0 / g0.norm();
    for shrink in 0..24 {
        let rho = geom.rho * 0.5f64.powi(shrink);
        if rho < 1e-12 * (1.0 + geom.center.norm()) {
            break;
        }
        let entry = geom.center + direction * rho;
        let circle = match circle_check(&geom.base, geom.coord, geom.center, entry, guards, steps)
        {
            CircleVerdict::Accept(s) => s,
            CircleVerdict::Shrink => continue,
            CircleVerdict::Refine => return Ok(None),
        };
        let inward = straight_with_detours(&geom.base, geom.coord, start_v, entry, guards, steps)?;
        let mut values = inward.clone();
        values.extend_from_slice(&circle[1..]);
        values.extend(inward.iter().rev().skip(1).copied());
        let points = values
            .into_iter()
            .map(|v| point_with(&geom.base, geom.coord, v))
            .collect();
        return Ok(Some((points, rho)));
    }
    Err(Error::Degenerate(
        "no loop radius satisfies the guards".into(),
    ))
}

fn build_samples(
    plan: &LoopPlan,
    guards: &[Guard],
    steps: usize,
) -> Result<Option<(Vec<[C64; 5]>, f64)>> {
    match plan {
        LoopPlan::Direct(geom) => build_direct(geom, guards, steps),
        LoopPlan::Shifted { start, inner } => {
            let Some((loop_points, rho)) = build_direct(inner, guards, steps)? else {
                return Ok(None);
            };
            let seg_values = straight_with_detours(
                start,
                0,
                C64::new(start[0], 0.0),
                C64::new(inner.base[0], 0.0),
                guards,
                steps,
            )?;
            let seg_points: Vec<[C64; 5]> = seg_values
                .iter()
                .map(|v| point_with(start, 0, *v))
                .collect();
            let mut points = seg_points.clone();
            points.extend_from_slice(&loop_points[1..]);
            points.extend(seg_points.iter().rev().skip(1).copied());
            Ok(Some((points, rho)))
        }
    }
}

fn run_tracker<T: FiberItem>(
    base: &[BigRational; 5],
    start: &[T],
    fiber_at: &dyn Fn(&[C64; 5]) -> Option<Vec<T>>,
    target: LoopTarget,
    opts: TrackOptions,
) -> Result<(Perm, usize, f64)> {
    let plan = plan_loop(base, target)?;
    let guards = standard_guards(target);
    let mut steps = opts.steps.max(16);
    let max_steps = opts.max_steps.max(steps);
    loop {
        let msg = match build_samples(&plan, &guards, steps)? {
            Some((samples, rho)) => match track_items(start, &samples, fiber_at) {
                Ok(perm) => return Ok((perm, steps, rho)),
                Err(Error::TrackingAmbiguous(msg)) => msg,
                Err(e) => return Err(e),
            },
            None => "the loop circle needs more samples".to_string(),
        };
        if steps >= max_steps {
            return Err(Error::TrackingAmbiguous(format!(
                "{msg} (at the {steps}-sample ceiling)"
            )));
        }
        steps *= 2;
    }
}

/// Reads the Γ translation off a tracked plane permutation.
fn plane_entry(perm: &Perm) -> Result<TableEntry> {
    let m = perm.apply(0);
    for mu in 0..GAMMA_ORDER {
        if perm.apply(mu) != mu ^ m {
            return Err(Error::Internal(
                "a tracked plane permutation is not a Γ translation".into(),
            ));
        }
    }
    Ok(TableEntry {
        mask: m as GammaMask,
        swap: false,
    })
}

/// Reads the Γ translation and swap bit off a tracked conic permutation.
fn conic_entry(perm: &Perm) -> Result<TableEntry> {
    let first = perm.apply(0);
    let (m, s) = (first / 2, first % 2);
    for mu in 0..GAMMA_ORDER {
        for b in 0..2 {
            if perm.apply(2 * mu + b) != 2 * (mu ^ m) + (b ^ s) {
                return Err(Error::Internal(
                    "a tracked conic permutation is not a signed Γ translation".into(),
                ));
            }
        }
    }
    Ok(TableEntry {
        mask: m as GammaMask,
        swap: s == 1,
    })
}

/// Tracks the sixteen planes of the first node around the loop and returns
/// the induced permutation, which must be a Γ translation. The start
/// configuration is the exact record set under a fixed complex embedding,
/// so the labels agree with the stored tables.
pub fn numeric_track_planes(
    p: &SurfaceParams,
    target: LoopTarget,
    opts: TrackOptions,
) -> Result<TrackedLoop> {
    let node = conics_for_node(p, NodeId::from_index(0).expect("first node"))?;
    numeric_track_planes_with(p, &node, target, opts)
}

/// As [`numeric_track_planes`], reusing an already constructed first-node
/// family.
pub fn numeric_track_planes_with(
    p: &SurfaceParams,
    node: &NodeConics,
    target: LoopTarget,
    opts: TrackOptions,
) -> Result<TrackedLoop> {
    require_first_node(node)?;
    let start = embedded_start_planes(node);
    let base = p.rationals();
    let (perm, steps_used, radius) =
        run_tracker(&base, &start, &|pt| plane_fiber(pt), target, opts)?;
    let entry = plane_entry(&perm)?;
    Ok(TrackedLoop {
        target,
        perm,
        entry,
        steps_used,
        radius,
    })
}

/// Tracks the thirty-two conics of the first node around the loop; the
/// permutation must be a Γ translation with a uniform swap bit. The
/// discriminant loop realises the pure swap.
pub fn numeric_track_conics(
    p: &SurfaceParams,
    target: LoopTarget,
    opts: TrackOptions,
) -> Result<TrackedLoop> {
    let node = conics_for_node(p, NodeId::from_index(0).expect("first node"))?;
    numeric_track_conics_with(p, &node, target, opts)
}

/// As [`numeric_track_conics`], reusing an already constructed first-node
/// family.
pub fn numeric_track_conics_with(
    p: &SurfaceParams,
    node: &NodeConics,
    target: LoopTarget,
    opts: TrackOptions,
) -> Result<TrackedLoop> {
    require_first_node(node)?;
    let start = embedded_start_conics(node)?;
    let base = p.rationals();
    let (perm, steps_used, radius) =
        run_tracker(&base, &start, &|pt| conic_fiber(pt), target, opts)?;
    let entry = conic_entry(&perm)?;
    Ok(TrackedLoop {
        target,
        perm,
        entry,
        steps_used,
        radius,
    })
}

fn require_first_node(node: &NodeConics) -> Result<()> {
    if node.node.index() != 0 {
        return Err(Error::Degenerate(
            "the numeric tracker follows the first node's family".into(),
        ));
    }
    if node.records.len() != 2 * GAMMA_ORDER {
        return Err(Error::Internal("the first-node family is incomplete".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SurfaceParams {
        SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap()
    }

    fn hyper(name: &str) -> LoopTarget {
        LoopTarget::Hyperplane(HyperplaneId::by_name(name).unwrap())
    }

    fn node(i: usize) -> NodeId {
        NodeId::from_index(i).unwrap()
    }

    #[test]
    fn stored_tables_load_and_spot_entries_match() {
        let (planes, conics) = stored_tables().unwrap();
        let e = planes.entry(hyper("q+C"), node(0)).unwrap();
        assert_eq!((e.mask, e.swap), (0b0100, false));
        let e = planes.entry(hyper("p-0"), node(0)).unwrap();
        assert_eq!((e.mask, e.swap), (0b1111, false));
        let e = conics.entry(hyper("p-2"), node(4)).unwrap();
        assert_eq!((e.mask, e.swap), (0b1001, true));
        let e = conics.entry(LoopTarget::Discriminant, node(2)).unwrap();
        assert_eq!((e.mask, e.swap), (0, true));
    }

    #[test]
    fn first_node_column_agrees_with_the_stored_table() {
        let (planes, _) = stored_tables().unwrap();
        for (i, (_, row)) in planes.rows.iter().enumerate() {
            assert_eq!(row[0].mask, FIRST_NODE_COLUMN[i], "row {i}");
        }
        assert_eq!(active_first_node_loops().len(), 9);
    }

    #[test]
    fn derived_plane_table_equals_the_stored_one() {
        let derived = derive_plane_table().unwrap();
        let (stored, _) = stored_tables().unwrap();
        for ((dt, dr), (st, sr)) in derived.rows.iter().zip(&stored.rows) {
            assert_eq!(dt, st);
            for n in 0..NODE_COUNT {
                assert_eq!(
                    dr[n], sr[n],
                    "row {} node {} derived {} stored {}",
                    dt,
                    n + 1,
                    dr[n].word(),
                    sr[n].word()
                );
            }
        }
    }

    #[test]
    fn transported_entry_example_second_family() {
        // the loop around q+E seen from the second family conjugates to g3g4
        let (planes, _) = stored_tables().unwrap();
        let e = planes.entry(hyper("q+E"), node(1)).unwrap();
        assert_eq!(e.mask, 0b1100);
    }

    #[test]
    fn plane_group_is_an_elementary_abelian_512() {
        let group = plane_monodromy_group().unwrap();
        assert_eq!(group.elements.len(), 512);
        for g in &group.elements {
            assert!(g.compose(g).is_identity());
        }
        for a in &group.generators {
            for b in &group.generators {
                assert_eq!(a.compose(b), b.compose(a));
            }
        }
    }

    #[test]
    fn conic_group_forgets_onto_the_plane_group_with_kernel_two() {
        let conic = conic_monodromy_group().unwrap();
        assert_eq!(conic.elements.len(), 1024);
        let plane = plane_monodromy_group().unwrap();
        // the discriminant row forgets to the identity, the rest onto the
        // plane rows
        assert!(forget_branches(&conic.generators[0]).unwrap().is_identity());
        for (cg, pg) in conic.generators[1..].iter().zip(&plane.generators) {
            assert_eq!(&forget_branches(cg).unwrap(), pg);
        }
        let kernel = conic
            .elements
            .iter()
            .filter(|g| forget_branches(g).unwrap().is_identity())
            .count();
        assert_eq!(kernel, 2);
    }

    #[test]
    fn loop_class_flip_examples() {
        assert_eq!(
            loop_to_class_flips(LoopTarget::Discriminant),
            (0..10).collect::<Vec<_>>()
        );
        assert_eq!(loop_to_class_flips(hyper("q+C")), vec![0, 3, 4]);
        assert_eq!(loop_to_class_flips(hyper("p+3")), vec![8]);
        assert_eq!(loop_to_class_flips(hyper("q-D")), vec![1]);
    }

    #[test]
    fn tracked_basic_loop_reproduces_the_first_column() {
        let p = sample();
        let tracked =
            numeric_track_planes(&p, hyper("q+C"), TrackOptions::default()).unwrap();
        assert_eq!((tracked.entry.mask, tracked.entry.swap), (0b0100, false));
    }

    #[test]
    fn tracked_control_loop_is_the_identity() {
        let p = sample();
        let tracked =
            numeric_track_planes(&p, hyper("q-D"), TrackOptions::default()).unwrap();
        assert!(tracked.perm.is_identity());
    }

    #[test]
    fn tracked_discriminant_loop_swaps_every_pair() {
        let p = sample();
        let tracked =
            numeric_track_conics(&p, LoopTarget::Discriminant, TrackOptions::default()).unwrap();
        assert_eq!((tracked.entry.mask, tracked.entry.swap), (0, true));
    }

    #[test]
    fn shifted_discriminant_loop_handles_a_double_root() {
        // Δ = A·B² here, so the two roots of Δ on the B-line coincide and
        // the tracker must shift the leading coordinate first
        let p = SurfaceParams::from_ints([9, 21, 3, 3, -17]).unwrap();
        let base = p.rationals();
        assert_eq!(
            &base[1] * &base[1] - delta_rational(&base) / &base[0],
            BigRational::zero()
        );
        let tracked =
            numeric_track_conics(&p, LoopTarget::Discriminant, TrackOptions::default()).unwrap();
        assert_eq!((tracked.entry.mask, tracked.entry.swap), (0, true));
    }
}
