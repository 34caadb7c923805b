//! The dictionary between P⁴ (parameters) and P³ (surfaces).
//!
//! A point p = [A:B:C:D:E] names the quartic
//!   A(x⁴+y⁴+z⁴+w⁴) + Bxyzw + C(x²y²+z²w²) + D(x²z²+y²w²) + E(x²w²+y²z²),
//! the unique shape invariant under the group Γ of coordinate swaps and sign
//! flips defined below. This module owns that family, the discriminant
//! hypersurface Δ with its ten nodes and quadrics, the fifteen singular
//! hyperplanes, the Γ-invariant lines with their plane triples, and the
//! node-residual computations that seed the conic construction.
//!
//! Everything here is exact. The one scale-sensitive definition is the
//! residual surface: the quartic attached to the third intersection point of
//! the line through p and a node q_i is fixed as 4β_i·X̃_p − Δ·Q̃_i², not
//! just its projective class, because downstream radicands are read off its
//! literal coefficients.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{big_rational_from_i64, rational_nullspace};
use crate::error::{Error, Result};
use crate::gauss::{GaussRat, GaussianRationals, Gi};
use crate::poly::{Field, Mono, MultiPoly, Rationals};
use crate::tower::{sqrt_rational, TowerDescriptor, TowerElement};

// ---------------------------------------------------------------------
// Γ: the C₂⁴ of coordinate symmetries
// ---------------------------------------------------------------------

/// Element of Γ as a bitmask over the four generators; the group law is XOR.
pub type GammaMask = u8;

pub const GAMMA_ORDER: usize = 16;

/// Generator matrices: swap x↔y,z↔w; swap x↔z,y↔w; negate z,w; negate y,w.
const GAMMA_GENERATORS: [[[i64; 4]; 4]; 4] = [
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
    [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]],
];

pub fn mat4_mul_i64(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Matrix of the Γ element with the given mask, multiplying the generators
/// in index order. Distinct masks give projectively distinct matrices; the
/// sign ambiguity from anticommuting generators never matters because every
/// consumer is projective or of even degree.
pub fn gamma_matrix(mask: GammaMask) -> [[i64; 4]; 4] {
    let mut m = [[0i64; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    for (j, gen) in GAMMA_GENERATORS.iter().enumerate() {
        if mask & (1 << j) != 0 {
            m = mat4_mul_i64(&m, gen);
        }
    }
    m
}

/// Applies the Γ element to a point of P³. The matrices are orthogonal, so
/// the same map also transports plane coefficient vectors: the plane
/// {c·x = 0} maps to {(Mc)·x = 0}.
pub fn gamma_apply_point<F: Field>(field: &F, mask: GammaMask, pt: &[F::Elem; 4]) -> [F::Elem; 4] {
    let m = gamma_matrix(mask);
    std::array::from_fn(|i| {
        let mut acc = field.zero();
        for (j, x) in pt.iter().enumerate() {
            match m[i][j] {
                0 => {}
                1 => acc = field.add(&acc, x),
                -1 => acc = field.sub(&acc, x),
                _ => unreachable!("signed permutation entries are 0, ±1"),
            }
        }
        acc
    })
}

/// Pushes a polynomial forward: returns q ∘ γ⁻¹, the equation of the image
/// of {q = 0} under γ.
pub fn gamma_transform_poly<F: Field>(mask: GammaMask, poly: &MultiPoly<F>) -> MultiPoly<F> {
    let field = poly.field().clone();
    let m = gamma_matrix(mask);
    // γ⁻¹ = γᵗ for orthogonal matrices
    let rows: Vec<Vec<F::Elem>> = (0..4)
        .map(|i| (0..4).map(|j| field.from_int(m[j][i])).collect())
        .collect();
    poly.act_linear(&rows)
}

/// Word like "g1g3" for a mask; "id" for the identity.
pub fn gamma_name(mask: GammaMask) -> String {
    if mask == 0 {
        return "id".to_string();
    }
    let mut s = String::new();
    for j in 0..4 {
        if mask & (1 << j) != 0 {
            s.push('g');
            s.push(char::from_digit(j as u32 + 1, 10).unwrap());
        }
    }
    s
}

/// Inverse of [`gamma_name`].
pub fn gamma_from_name(s: &str) -> Option<GammaMask> {
    if s == "id" {
        return Some(0);
    }
    let bytes = s.as_bytes();
    if bytes.is_empty() || bytes.len() % 2 != 0 {
        return None;
    }
    let mut mask = 0u8;
    for pair in bytes.chunks(2) {
        if pair[0] != b'g' {
            return None;
        }
        let j = (pair[1] as char).to_digit(10)?;
        if !(1..=4).contains(&j) {
            return None;
        }
        mask |= 1 << (j - 1);
    }
    Some(mask)
}

// ---------------------------------------------------------------------
// Parameter points
// ---------------------------------------------------------------------

/// A point of the parameter space P⁴, stored as its pinned integer
/// representative: denominators cleared, content 1, first nonzero
/// coordinate positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SurfaceParams {
    coords: [BigInt; 5],
}

impl SurfaceParams {
    pub fn new(coords: &[BigRational]) -> Result<SurfaceParams> {
        if coords.len() != 5 {
            return Err(Error::ArityMismatch {
                expected: 5,
                got: coords.len(),
            });
        }
        if coords.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroObject("parameter point"));
        }
        let mut lcm = BigInt::one();
        for c in coords {
            lcm = lcm.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = coords
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = content.gcd(c);
        }
        if ints
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.is_negative())
            .unwrap_or(false)
        {
            content = -content;
        }
        for c in &mut ints {
            *c /= &content;
        }
        Ok(SurfaceParams {
            coords: std::array::from_fn(|i| ints[i].clone()),
        })
    }

    pub fn from_ints(coords: [i64; 5]) -> Result<SurfaceParams> {
        let rats: Vec<BigRational> = coords.iter().map(|&c| big_rational_from_i64(c)).collect();
        SurfaceParams::new(&rats)
    }

    pub fn coords(&self) -> &[BigInt; 5] {
        &self.coords
    }

    pub fn rationals(&self) -> [BigRational; 5] {
        std::array::from_fn(|i| BigRational::from_integer(self.coords[i].clone()))
    }
}

impl std::fmt::Display for SurfaceParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

// ---------------------------------------------------------------------
// The quartic family
// ---------------------------------------------------------------------

/// The eleven monomials of the invariant family, tagged by which of the
/// five parameters multiplies them.
const FAMILY_TERMS: [([u8; 4], usize); 11] = [
    ([4, 0, 0, 0], 0),
    ([0, 4, 0, 0], 0),
    ([0, 0, 4, 0], 0),
    ([0, 0, 0, 4], 0),
    ([1, 1, 1, 1], 1),
    ([2, 2, 0, 0], 2),
    ([0, 0, 2, 2], 2),
    ([2, 0, 2, 0], 3),
    ([0, 2, 0, 2], 3),
    ([2, 0, 0, 2], 4),
    ([0, 2, 2, 0], 4),
];

fn mono4(e: [u8; 4]) -> Mono {
    Mono([e[0], e[1], e[2], e[3], 0])
}

/// The family quartic with coefficients in an arbitrary field.
pub fn surface_equation_with<F: Field>(field: &F, p: &[F::Elem; 5]) -> MultiPoly<F> {
    let mut q = MultiPoly::zero(field.clone(), 4);
    for (exps, k) in FAMILY_TERMS {
        q.add_term(mono4(exps), p[k].clone());
    }
    q
}

/// X̃_p with the pinned integer coefficients of `p`.
pub fn surface_equation(p: &SurfaceParams) -> MultiPoly<Rationals> {
    surface_equation_with(&Rationals, &p.rationals())
}

/// Reads a quartic back into family coordinates; `None` when it is not of
/// the invariant shape.
pub fn family_coefficient_vector(q: &MultiPoly<Rationals>) -> Option<[BigRational; 5]> {
    let mut vec: [Option<BigRational>; 5] = Default::default();
    let mut seen = 0usize;
    for (exps, k) in FAMILY_TERMS {
        let c = q.coeff(&mono4(exps));
        if !c.is_zero() {
            seen += 1;
        }
        match &vec[k] {
            None => vec[k] = Some(c),
            Some(prev) => {
                if *prev != c {
                    return None;
                }
            }
        }
    }
    if seen != q.num_terms() {
        return None; // a monomial outside the family shape is present
    }
    Some(std::array::from_fn(|k| {
        vec[k].clone().unwrap_or_else(BigRational::zero)
    }))
}

// ---------------------------------------------------------------------
// The discriminant cubic, its nodes and quadrics
// ---------------------------------------------------------------------

/// Δ = 16A³ + AB² − 4A(C²+D²+E²) + 4CDE as a polynomial on P⁴.
pub fn segre_cubic() -> MultiPoly<Rationals> {
    MultiPoly::from_integer_terms(
        Rationals,
        5,
        &[
            (&[3, 0, 0, 0, 0], 16),
            (&[1, 2, 0, 0, 0], 1),
            (&[1, 0, 2, 0, 0], -4),
            (&[1, 0, 0, 2, 0], -4),
            (&[1, 0, 0, 0, 2], -4),
            (&[0, 0, 1, 1, 1], 4),
        ],
    )
}

pub fn delta(p: &SurfaceParams) -> BigRational {
    segre_cubic().evaluate(&p.rationals())
}

pub const NODE_COUNT: usize = 10;

/// Node coordinates, kept verbatim (not pinned): the β identities below are
/// stated for exactly these representatives.
const NODES: [[i64; 5]; 10] = [
    [1, 0, -2, -2, 2],
    [1, 0, -2, 2, -2],
    [1, 0, 2, -2, -2],
    [1, 0, 2, 2, 2],
    [0, -2, 1, 0, 0],
    [0, 2, 1, 0, 0],
    [0, -2, 0, 1, 0],
    [0, 2, 0, 1, 0],
    [0, -2, 0, 0, 1],
    [0, 2, 0, 0, 1],
];

/// Terms of the rank-4 quadric attached to each node.
const QUADRIC_TERMS: [&[([u8; 4], i64)]; 10] = [
    &[([2, 0, 0, 0], 1), ([0, 2, 0, 0], -1), ([0, 0, 2, 0], -1), ([0, 0, 0, 2], 1)],
    &[([2, 0, 0, 0], 1), ([0, 2, 0, 0], -1), ([0, 0, 2, 0], 1), ([0, 0, 0, 2], -1)],
    &[([2, 0, 0, 0], 1), ([0, 2, 0, 0], 1), ([0, 0, 2, 0], -1), ([0, 0, 0, 2], -1)],
    &[([2, 0, 0, 0], 1), ([0, 2, 0, 0], 1), ([0, 0, 2, 0], 1), ([0, 0, 0, 2], 1)],
    &[([1, 1, 0, 0], 1), ([0, 0, 1, 1], -1)],
    &[([1, 1, 0, 0], 1), ([0, 0, 1, 1], 1)],
    &[([1, 0, 1, 0], 1), ([0, 1, 0, 1], -1)],
    &[([1, 0, 1, 0], 1), ([0, 1, 0, 1], 1)],
    &[([1, 0, 0, 1], 1), ([0, 1, 1, 0], -1)],
    &[([1, 0, 0, 1], 1), ([0, 1, 1, 0], 1)],
];

/// One of the ten nodes of the discriminant cubic, 0-indexed internally and
/// displayed 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NodeId(usize);

impl NodeId {
    pub fn from_index(i: usize) -> Option<NodeId> {
        (i < NODE_COUNT).then_some(NodeId(i))
    }

    /// 1-based label as used in reports.
    pub fn from_label(l: usize) -> Option<NodeId> {
        (1..=NODE_COUNT).contains(&l).then(|| NodeId(l - 1))
    }

    pub fn all() -> impl Iterator<Item = NodeId> {
        (0..NODE_COUNT).map(NodeId)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }

    pub fn coords(self) -> [i64; 5] {
        NODES[self.0]
    }

    pub fn coords_rationals(self) -> [BigRational; 5] {
        std::array::from_fn(|k| big_rational_from_i64(NODES[self.0][k]))
    }

    /// The quadric Q̃_i vanishing doubly on the node's surface; its square
    /// is a family member with parameter vector exactly `coords()`.
    pub fn quadric(self) -> MultiPoly<Rationals> {
        let mut q = MultiPoly::zero(Rationals, 4);
        for (exps, c) in QUADRIC_TERMS[self.0] {
            q.add_term(mono4(*exps), big_rational_from_i64(*c));
        }
        q
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "q{}", self.label())
    }
}

// ---------------------------------------------------------------------
// The fifteen singular hyperplanes
// ---------------------------------------------------------------------

pub const HYPERPLANE_COUNT: usize = 15;

const HYPERPLANES: [(&str, [i64; 5]); 15] = [
    ("A", [1, 0, 0, 0, 0]),
    ("q+C", [2, 0, 1, 0, 0]),
    ("q-C", [2, 0, -1, 0, 0]),
    ("q+D", [2, 0, 0, 1, 0]),
    ("q-D", [2, 0, 0, -1, 0]),
    ("q+E", [2, 0, 0, 0, 1]),
    ("q-E", [2, 0, 0, 0, -1]),
    ("p+0", [4, 1, 2, 2, 2]),
    ("p-0", [4, -1, 2, 2, 2]),
    ("p+1", [4, 1, 2, -2, -2]),
    ("p-1", [4, -1, 2, -2, -2]),
    ("p+2", [4, 1, -2, 2, -2]),
    ("p-2", [4, -1, -2, 2, -2]),
    ("p+3", [4, 1, -2, -2, 2]),
    ("p-3", [4, -1, -2, -2, 2]),
];

/// One of the fifteen linear forms whose vanishing (together with Δ) cuts
/// out the singular members of the family.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HyperplaneId(usize);

impl HyperplaneId {
    pub fn from_index(i: usize) -> Option<HyperplaneId> {
        (i < HYPERPLANE_COUNT).then_some(HyperplaneId(i))
    }

    pub fn all() -> impl Iterator<Item = HyperplaneId> {
        (0..HYPERPLANE_COUNT).map(HyperplaneId)
    }

    pub fn by_name(name: &str) -> Option<HyperplaneId> {
        HYPERPLANES
            .iter()
            .position(|(n, _)| *n == name)
            .map(HyperplaneId)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn name(self) -> &'static str {
        HYPERPLANES[self.0].0
    }

    pub fn form(self) -> [i64; 5] {
        HYPERPLANES[self.0].1
    }

    pub fn value(self, p: &SurfaceParams) -> BigRational {
        let form = self.form();
        let mut acc = BigInt::zero();
        for (k, c) in p.coords().iter().enumerate() {
            acc += c * BigInt::from(form[k]);
        }
        BigRational::from_integer(acc)
    }

    fn dot_i64(self, v: &[i64; 5]) -> i64 {
        let form = self.form();
        (0..5).map(|k| form[k] * v[k]).sum()
    }
}

impl std::fmt::Display for HyperplaneId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The hyperplanes whose forms vanish at the given node.
pub fn hyperplanes_through_node(i: NodeId) -> Vec<HyperplaneId> {
    let v = i.coords();
    HyperplaneId::all().filter(|h| h.dot_i64(&v) == 0).collect()
}

/// Evaluation of all sixteen singularity forms at a parameter point.
#[derive(Clone, Debug)]
pub struct SingularReport {
    pub delta: BigRational,
    pub hyperplane_values: Vec<(HyperplaneId, BigRational)>,
    /// Names of the vanishing forms; "Delta" stands for the cubic.
    pub vanishing: Vec<String>,
}

impl SingularReport {
    pub fn is_smooth(&self) -> bool {
        self.vanishing.is_empty()
    }
}

/// The surface X̃_p is singular iff Δ or one of the fifteen hyperplane
/// forms vanishes at p; the report lists every vanishing factor.
pub fn singular_test(p: &SurfaceParams) -> SingularReport {
    let d = delta(p);
    let mut vanishing = Vec::new();
    if d.is_zero() {
        vanishing.push("Delta".to_string());
    }
    let mut hyperplane_values = Vec::with_capacity(HYPERPLANE_COUNT);
    for h in HyperplaneId::all() {
        let v = h.value(p);
        if v.is_zero() {
            vanishing.push(h.name().to_string());
        }
        hyperplane_values.push((h, v));
    }
    SingularReport {
        delta: d,
        hyperplane_values,
        vanishing,
    }
}

// ---------------------------------------------------------------------
// β forms, third intersections, residual surfaces
// ---------------------------------------------------------------------

/// The closed-form β_i at p: the coefficient controlling how the line
/// through p and node q_i meets the discriminant cubic a third time.
pub fn beta(i: NodeId, p: &SurfaceParams) -> BigRational {
    let [a, b, c, d, e] = p.rationals();
    let sq = |x: &BigRational| x * x;
    // for the four nodes [1,0,±2,±2,±2] the signs are the negated node signs
    let quadratic = |sc: i64, sd: i64, se: i64| {
        // 12A² + B²/4 + 4A(sc·C+sd·D+se·E) − (C²+D²+E²)
        //   + 2·(sc·sd·CD + sc·se·CE + sd·se·DE)
        let mut acc = big_rational_from_i64(12) * sq(&a);
        acc += sq(&b) / big_rational_from_i64(4);
        let lin = &c * big_rational_from_i64(sc)
            + &d * big_rational_from_i64(sd)
            + &e * big_rational_from_i64(se);
        acc += big_rational_from_i64(4) * &a * lin;
        acc -= sq(&c) + sq(&d) + sq(&e);
        acc += big_rational_from_i64(2 * sc * sd) * &c * &d;
        acc += big_rational_from_i64(2 * sc * se) * &c * &e;
        acc += big_rational_from_i64(2 * sd * se) * &d * &e;
        acc
    };
    match i.index() {
        0 => quadratic(1, 1, -1),
        1 => quadratic(1, -1, 1),
        2 => quadratic(-1, 1, 1),
        3 => quadratic(-1, -1, -1),
        4 => -(&a * &b + big_rational_from_i64(2) * &a * &c - &d * &e),
        5 => &a * &b - big_rational_from_i64(2) * &a * &c + &d * &e,
        6 => -(&a * &b + big_rational_from_i64(2) * &a * &d - &c * &e),
        7 => &a * &b - big_rational_from_i64(2) * &a * &d + &c * &e,
        8 => -(&a * &b + big_rational_from_i64(2) * &a * &e - &c * &d),
        9 => &a * &b - big_rational_from_i64(2) * &a * &e + &c * &d,
        _ => unreachable!(),
    }
}

/// The third intersection of the line p–q_i with the discriminant cubic.
///
/// Restricting Δ to s·p + t·q_i gives Δ(p)s³ + 4β_i(p)s²t exactly (the node
/// is a double point), so the residual point is 4β_i·p − Δ·q_i. Returns it
/// pinned, together with β_i.
pub fn third_intersection(p: &SurfaceParams, i: NodeId) -> Result<(SurfaceParams, BigRational)> {
    let dp = delta(p);
    if dp.is_zero() {
        return Err(Error::Degenerate(
            "the parameter point lies on the discriminant cubic".into(),
        ));
    }
    let node = i.coords_rationals();
    let cubic = segre_cubic().restrict_to_line(&p.rationals(), &node);
    let c3 = cubic.coeff(&Mono([3, 0, 0, 0, 0]));
    let c2 = cubic.coeff(&Mono([2, 1, 0, 0, 0]));
    let c1 = cubic.coeff(&Mono([1, 2, 0, 0, 0]));
    let c0 = cubic.coeff(&Mono([0, 3, 0, 0, 0]));
    if !c1.is_zero() || !c0.is_zero() || c3 != dp {
        return Err(Error::Internal(format!(
            "node {i} is not a double point of the restricted cubic"
        )));
    }
    let b = beta(i, p);
    if c2 != big_rational_from_i64(4) * &b {
        return Err(Error::Internal(format!(
            "closed-form beta disagrees with the line restriction at node {i}"
        )));
    }
    if b.is_zero() {
        return Err(Error::Degenerate(format!(
            "beta vanishes at node {i}: the residual intersection collapses onto the node"
        )));
    }
    let pr = p.rationals();
    let coords: Vec<BigRational> = (0..5).map(|k| &c2 * &pr[k] - &c3 * &node[k]).collect();
    Ok((SurfaceParams::new(&coords)?, b))
}

/// The residual quartic 4β_i·X̃_p − Δ·Q̃_i², at its definite scale.
///
/// Its coefficient vector is the (unpinned) third-intersection point, so it
/// is again a family member; all downstream radicands read coefficients off
/// this exact polynomial.
pub fn residual_surface(p: &SurfaceParams, i: NodeId) -> Result<MultiPoly<Rationals>> {
    let dp = delta(p);
    if dp.is_zero() {
        return Err(Error::Degenerate(
            "the parameter point lies on the discriminant cubic".into(),
        ));
    }
    let b = beta(i, p);
    if b.is_zero() {
        return Err(Error::Degenerate(format!("beta vanishes at node {i}")));
    }
    let four_beta = big_rational_from_i64(4) * &b;
    let q2 = i.quadric().pow(2);
    Ok(surface_equation(p).scale(&four_beta).sub(&q2.scale(&dp)))
}

// ---------------------------------------------------------------------
// Invariant lines
// ---------------------------------------------------------------------

/// The two skew fixed lines of a nontrivial γ together with the plane of
/// parameters whose surfaces contain them.
#[derive(Clone, Debug)]
pub struct InvariantLinePair {
    pub gamma: GammaMask,
    /// Basis points of the (+)-eigenline.
    pub line: [[Gi; 4]; 2],
    /// Basis points of the (−)-eigenline.
    pub conjugate_line: [[Gi; 4]; 2],
    /// The three hyperplanes of the fifteen that vanish on the parameter
    /// plane {p : both lines lie on X̃_p}.
    pub segre_plane: [HyperplaneId; 3],
}

type LineBasis = [[(i64, i64); 4]; 2];

/// Fixed-line data per γ-mask: ((+)-line basis, (−)-line basis).
const LINE_DATA: [(GammaMask, LineBasis, LineBasis); 15] = [
    (1, [[(1,0),(1,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(1,0)]],
        [[(1,0),(-1,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(-1,0)]]),
    (2, [[(1,0),(0,0),(1,0),(0,0)], [(0,0),(1,0),(0,0),(1,0)]],
        [[(1,0),(0,0),(-1,0),(0,0)], [(0,0),(1,0),(0,0),(-1,0)]]),
    (3, [[(1,0),(0,0),(0,0),(1,0)], [(0,0),(1,0),(1,0),(0,0)]],
        [[(1,0),(0,0),(0,0),(-1,0)], [(0,0),(1,0),(-1,0),(0,0)]]),
    (4, [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(1,0),(0,0),(0,0)]],
        [[(0,0),(0,0),(1,0),(0,0)], [(0,0),(0,0),(0,0),(1,0)]]),
    (5, [[(1,0),(-1,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(1,0)]],
        [[(1,0),(1,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(-1,0)]]),
    (6, [[(1,0),(0,0),(0,1),(0,0)], [(0,0),(1,0),(0,0),(0,1)]],
        [[(1,0),(0,0),(0,-1),(0,0)], [(0,0),(1,0),(0,0),(0,-1)]]),
    (7, [[(1,0),(0,0),(0,0),(0,1)], [(0,0),(1,0),(0,1),(0,0)]],
        [[(1,0),(0,0),(0,0),(0,-1)], [(0,0),(1,0),(0,-1),(0,0)]]),
    (8, [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,0)]],
        [[(0,0),(1,0),(0,0),(0,0)], [(0,0),(0,0),(0,0),(1,0)]]),
    (9, [[(1,0),(0,1),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,1)]],
        [[(1,0),(0,-1),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,-1)]]),
    (10, [[(1,0),(0,0),(-1,0),(0,0)], [(0,0),(1,0),(0,0),(1,0)]],
         [[(1,0),(0,0),(1,0),(0,0)], [(0,0),(1,0),(0,0),(-1,0)]]),
    (11, [[(1,0),(0,0),(0,0),(0,-1)], [(0,0),(1,0),(0,1),(0,0)]],
         [[(1,0),(0,0),(0,0),(0,1)], [(0,0),(1,0),(0,-1),(0,0)]]),
    (12, [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(0,0),(0,0),(1,0)]],
         [[(0,0),(1,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,0)]]),
    (13, [[(1,0),(0,-1),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,1)]],
         [[(1,0),(0,1),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,-1)]]),
    (14, [[(1,0),(0,0),(0,-1),(0,0)], [(0,0),(1,0),(0,0),(0,1)]],
         [[(1,0),(0,0),(0,1),(0,0)], [(0,0),(1,0),(0,0),(0,-1)]]),
    (15, [[(1,0),(0,0),(0,0),(-1,0)], [(0,0),(1,0),(1,0),(0,0)]],
         [[(1,0),(0,0),(0,0),(1,0)], [(0,0),(1,0),(-1,0),(0,0)]]),
];

fn line_basis_to_gi(b: &LineBasis) -> [[Gi; 4]; 2] {
    std::array::from_fn(|r| std::array::from_fn(|c| Gi::new(b[r][c].0, b[r][c].1)))
}

fn det3_gauss(m: &[[GaussRat; 3]; 3]) -> GaussRat {
    let f = GaussianRationals;
    let mut acc = f.zero();
    for (sign, p) in [
        (1, [0, 1, 2]),
        (1, [1, 2, 0]),
        (1, [2, 0, 1]),
        (-1, [0, 2, 1]),
        (-1, [1, 0, 2]),
        (-1, [2, 1, 0]),
    ] {
        let term = f.mul(&f.mul(&m[0][p[0]], &m[1][p[1]]), &m[2][p[2]]);
        let signed = if sign == 1 { term } else { f.neg(&term) };
        acc = f.add(&acc, &signed);
    }
    acc
}

fn gi_to_gauss(g: Gi) -> GaussRat {
    GaussRat {
        re: big_rational_from_i64(g.re),
        im: big_rational_from_i64(g.im),
    }
}

/// Whether the rational point lies on the complex line spanned by `basis`.
fn point_on_line(pt: &[BigRational; 4], basis: &[[Gi; 4]; 2]) -> bool {
    let rows: [[GaussRat; 4]; 3] = [
        std::array::from_fn(|c| gi_to_gauss(basis[0][c])),
        std::array::from_fn(|c| gi_to_gauss(basis[1][c])),
        std::array::from_fn(|c| GaussRat::from_rational(pt[c].clone())),
    ];
    let f = GaussianRationals;
    for drop in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != drop).collect();
        let minor: [[GaussRat; 3]; 3] =
            std::array::from_fn(|r| std::array::from_fn(|c| rows[r][cols[c]].clone()));
        if !f.is_zero(&det3_gauss(&minor)) {
            return false;
        }
    }
    true
}

/// True when the point lies on any of the thirty invariant lines.
pub fn on_invariant_lines(pt: &[BigRational; 4]) -> Option<GammaMask> {
    for (mask, l, lbar) in &LINE_DATA {
        if point_on_line(pt, &line_basis_to_gi(l)) || point_on_line(pt, &line_basis_to_gi(lbar)) {
            return Some(*mask);
        }
    }
    None
}

/// Parameter plane of the surfaces containing a given line: the conditions
/// are the vanishing of the five coefficients of the family quartic
/// restricted to the line, each linear in p. Returns the three hyperplanes
/// of the fifteen vanishing on that plane.
fn segre_plane_of_line(basis: &[[Gi; 4]; 2]) -> Result<[HyperplaneId; 3]> {
    let f = GaussianRationals;
    let u: Vec<GaussRat> = basis[0].iter().map(|&g| gi_to_gauss(g)).collect();
    let v: Vec<GaussRat> = basis[1].iter().map(|&g| gi_to_gauss(g)).collect();
    let quartic_monos = [
        Mono([4, 0, 0, 0, 0]),
        Mono([3, 1, 0, 0, 0]),
        Mono([2, 2, 0, 0, 0]),
        Mono([1, 3, 0, 0, 0]),
        Mono([0, 4, 0, 0, 0]),
    ];
    // condition matrix over Q: rows = re/im of each binary-quartic
    // coefficient, columns = the five parameters
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut re_rows = vec![vec![BigRational::zero(); 5]; quartic_monos.len()];
    let mut im_rows = vec![vec![BigRational::zero(); 5]; quartic_monos.len()];
    for k in 0..5 {
        let mut basis_param: [GaussRat; 5] = std::array::from_fn(|_| f.zero());
        basis_param[k] = f.one();
        let restricted = surface_equation_with(&f, &basis_param).restrict_to_line(&u, &v);
        for (m, mono) in quartic_monos.iter().enumerate() {
            let c = restricted.coeff(mono);
            re_rows[m][k] = c.re;
            im_rows[m][k] = c.im;
        }
    }
    rows.extend(re_rows);
    rows.extend(im_rows);
    let null = rational_nullspace(&rows, 5);
    if null.len() != 3 {
        return Err(Error::Internal(format!(
            "line containment conditions have nullity {}, expected 3",
            null.len()
        )));
    }
    let vanishing: Vec<HyperplaneId> = HyperplaneId::all()
        .filter(|h| {
            let form = h.form();
            null.iter().all(|vec| {
                let mut acc = BigRational::zero();
                for (k, c) in vec.iter().enumerate() {
                    acc += c * big_rational_from_i64(form[k]);
                }
                acc.is_zero()
            })
        })
        .collect();
    match <[HyperplaneId; 3]>::try_from(vanishing) {
        Ok(t) => Ok(t),
        Err(v) => Err(Error::Internal(format!(
            "parameter plane lies on {} of the fifteen hyperplanes, expected 3",
            v.len()
        ))),
    }
}

/// The fifteen invariant line pairs with verified eigenline structure and
/// computed parameter-plane triples.
pub fn invariant_lines_table() -> Result<Vec<InvariantLinePair>> {
    let f = GaussianRationals;
    let mut out = Vec::with_capacity(15);
    for (mask, l, lbar) in &LINE_DATA {
        let line = line_basis_to_gi(l);
        let conjugate_line = line_basis_to_gi(lbar);
        // both basis points must be eigenvectors with a common eigenvalue
        for basis in [&line, &conjugate_line] {
            let mut eigen: Option<GaussRat> = None;
            for vec in basis {
                let pt: [GaussRat; 4] = std::array::from_fn(|c| gi_to_gauss(vec[c]));
                let img = gamma_apply_point(&f, *mask, &pt);
                let k = (0..4)
                    .find(|&c| !f.is_zero(&pt[c]))
                    .expect("line basis point is nonzero");
                let lambda = f.div(&img[k], &pt[k])?;
                for c in 0..4 {
                    if img[c] != f.mul(&lambda, &pt[c]) {
                        return Err(Error::Internal(format!(
                            "stored line for {} is not an eigenline",
                            gamma_name(*mask)
                        )));
                    }
                }
                match &eigen {
                    None => eigen = Some(lambda),
                    Some(prev) if *prev == lambda => {}
                    Some(_) => {
                        return Err(Error::Internal(format!(
                            "line basis for {} mixes eigenvalues",
                            gamma_name(*mask)
                        )))
                    }
                }
            }
        }
        let segre_plane = segre_plane_of_line(&line)?;
        let from_conjugate = segre_plane_of_line(&conjugate_line)?;
        if segre_plane != from_conjugate {
            return Err(Error::Internal(format!(
                "the two lines of {} give different parameter planes",
                gamma_name(*mask)
            )));
        }
        out.push(InvariantLinePair {
            gamma: *mask,
            line,
            conjugate_line,
            segre_plane,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Kummer correspondences
// ---------------------------------------------------------------------

/// The parameter point whose surface is singular exactly at the Γ-orbit of
/// a given point of P³ off the invariant lines.
pub fn kummer_from_point(pt: &[BigRational; 4]) -> Result<SurfaceParams> {
    if pt.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroObject("point"));
    }
    if let Some(mask) = on_invariant_lines(pt) {
        return Err(Error::Degenerate(format!(
            "the point lies on an invariant line of {}",
            gamma_name(mask)
        )));
    }
    let [x, y, z, w] = pt;
    let yz = y * z;
    let xw = x * w;
    let xz = x * z;
    let yw = y * w;
    let zw = z * w;
    let xy = x * y;
    let f1 = &yz + &xw;
    let f2 = &yz - &xw;
    let f3 = &xz + &yw;
    let f4 = &xz - &yw;
    let f5 = &zw + &xy;
    let f6 = &zw - &xy;
    let x2 = x * x;
    let y2 = y * y;
    let z2 = z * z;
    let w2 = w * w;
    let x4 = &x2 * &x2;
    let y4 = &y2 * &y2;
    let z4 = &z2 * &z2;
    let w4 = &w2 * &w2;
    let g1 = &(&z2 + &w2) - &(&x2 + &y2);
    let g2 = &(&y2 + &z2) - &(&x2 + &w2);
    let g3 = &(&x2 + &z2) - &(&y2 + &w2);
    let g4 = &(&x2 + &y2) + &(&z2 + &w2);
    let a = &(&(&f1 * &f2) * &(&f3 * &f4)) * &(&f5 * &f6);
    let b = big_rational_from_i64(2) * x * y * z * w * &(&g1 * &g2) * &(&g3 * &g4);
    let c = &(&(&f1 * &f2) * &(&f3 * &f4)) * &(&(&x4 + &y4) - &(&z4 + &w4));
    let d = &(&(&f1 * &f2) * &(&f5 * &f6)) * &(&(&y4 + &w4) - &(&x4 + &z4));
    let e = &(&(&f3 * &f4) * &(&f5 * &f6)) * &(&(&x4 + &w4) - &(&y4 + &z4));
    let out = SurfaceParams::new(&[a, b, c, d, e])?;
    debug_assert!(delta(&out).is_zero(), "product point left the cubic");
    Ok(out)
}

/// The sixteen singular points of the surface of a parameter point on the
/// discriminant cubic but off the fifteen hyperplanes, with coordinates in
/// the supplied tower. The radical chain follows the symmetric octic in z:
/// one branch is resolved, one seed point [x:y:z:1] is checked singular,
/// and its Γ-orbit is returned.
pub fn singular_points_on_segre(
    p: &SurfaceParams,
    desc: &Arc<TowerDescriptor>,
) -> Result<Vec<[TowerElement; 4]>> {
    if !delta(p).is_zero() {
        return Err(Error::Degenerate(
            "the parameter point is not on the discriminant cubic".into(),
        ));
    }
    for h in HyperplaneId::all() {
        if h.value(p).is_zero() {
            return Err(Error::Degenerate(format!(
                "the parameter point lies on singular hyperplane {}",
                h.name()
            )));
        }
    }
    let [pa, pb, pc, pd, pe] = p.rationals();
    let sq = |x: &BigRational| x * x;
    let two = big_rational_from_i64(2);
    let four = big_rational_from_i64(4);
    // symmetric octic a·z⁸ + b·z⁶ + c·z⁴ + b·z² + a at w = 1
    let oa = -(sq(&pa) * sq(&pb));
    if oa.is_zero() {
        return Err(Error::Degenerate(
            "the octic degenerates: the product A·B vanishes".into(),
        ));
    }
    let ob = &four * (&two * &pa * &pd - &pc * &pe) * (&two * &pa * &pe - &pc * &pd);
    let oc = &two
        * (sq(&pa) * sq(&pb) - &two * (sq(&pe) + sq(&pd)) * (&four * sq(&pa) + sq(&pc))
            + big_rational_from_i64(16) * &pa * &pc * &pd * &pe);
    // u = z² + z⁻²  satisfies  a·u² + b·u + (c − 2a) = 0
    let disc_u = sq(&ob) - &four * &oa * (&oc - &two * &oa);
    let sqrt_disc = sqrt_rational(desc, &disc_u)?;
    let inv_2a = TowerElement::from_rational(desc, (&two * &oa).recip());
    let minus_b = TowerElement::from_rational(desc, -&ob);
    let tower_four = TowerElement::from_int(desc, 4);
    let half = TowerElement::from_rational(desc, BigRational::new(1.into(), 2.into()));

    let d_q = &four * sq(&pa) - sq(&pc); // 4A² − C²
    let e_q = sq(&pe) - sq(&pd); // E² − D²
    let mut resolved_any = false;
    for u_sign in [1i8, -1] {
        let u = match u_sign {
            1 => minus_b.add(&sqrt_disc)?.mul(&inv_2a)?,
            _ => minus_b.sub(&sqrt_disc)?.mul(&inv_2a)?,
        };
        let Some(m) = u.mul(&u)?.sub(&tower_four)?.tower_sqrt() else {
            continue;
        };
        for inner in [m.clone(), m.neg()] {
            let z2 = u.add(&inner)?.mul(&half)?;
            if z2.is_zero() {
                continue;
            }
            let Some(r1) = z2.tower_sqrt() else {
                continue;
            };
            resolved_any = true;
            let r1sq = r1.mul(&r1)?;
            let r1q = r1sq.mul(&r1sq)?;
            // (4A²−C²)(E·z² − D)·y² + A((4A²−C²)(z⁴−1) + (E²−D²)(z⁴+1))
            //   + C(E²−D²)z² = 0  at w = 1
            let denom = r1sq
                .scale(&pe)
                .sub(&TowerElement::from_rational(desc, pd.clone()))?
                .scale(&d_q);
            if denom.is_zero() {
                continue;
            }
            let one = TowerElement::one(desc);
            let num = r1q
                .sub(&one)?
                .scale(&d_q)
                .add(&r1q.add(&one)?.scale(&e_q))?
                .scale(&pa)
                .add(&r1sq.scale(&(&pc * &e_q)))?;
            let y2 = num.neg().mul(&denom.invert()?)?;
            if y2.is_zero() {
                continue;
            }
            let Some(r2) = y2.tower_sqrt() else {
                continue;
            };
            // 2(C²−4A²)xyz + BC·z² + AB·z⁴ + AB = 0  at w = 1
            let x_num = r1q
                .add(&one)?
                .scale(&pa)
                .add(&r1sq.scale(&pc))?
                .scale(&-&pb);
            let x_den = r1.mul(&r2)?.scale(&(&two * (sq(&pc) - &four * sq(&pa))));
            let r3 = x_num.mul(&x_den.invert()?)?;
            let seed = [r3, r2, r1, one];
            // the seed must be a singular point of X̃_p
            let tf = crate::poly::TowerField(desc.clone());
            let params: [TowerElement; 5] =
                std::array::from_fn(|k| TowerElement::from_rational(desc, p.rationals()[k].clone()));
            let quartic = surface_equation_with(&tf, &params);
            let singular = (0..4).all(|j| {
                quartic
                    .partial_derivative(j)
                    .evaluate(&seed)
                    .is_zero()
            });
            if !singular {
                continue;
            }
            let orbit = (0..GAMMA_ORDER as u8)
                .map(|mask| gamma_apply_point(&tf, mask, &seed))
                .collect();
            return Ok(orbit);
        }
    }
    if resolved_any {
        Err(Error::Internal(
            "a resolved radical branch produced a non-singular point".into(),
        ))
    } else {
        Err(Error::TowerInsufficient(
            "no branch of the radical chain resolves in the supplied tower".into(),
        ))
    }
}

// ---------------------------------------------------------------------
// Decomposition of Δ ∩ {hyperplane}
// ---------------------------------------------------------------------

fn form_rationals(h: HyperplaneId) -> Vec<BigRational> {
    h.form().iter().map(|&c| big_rational_from_i64(c)).collect()
}

/// Restricts Δ to the subspace spanned by `basis` (given as parameter
/// 5-vectors); the result is a cubic in `basis.len()` variables.
fn restrict_cubic_to_span(basis: &[Vec<BigRational>]) -> MultiPoly<Rationals> {
    let n = basis.len();
    let images: Vec<MultiPoly<Rationals>> = (0..5)
        .map(|k| {
            let mut l = MultiPoly::zero(Rationals, n);
            for (j, b) in basis.iter().enumerate() {
                l.add_term(Mono::var(j), b[k].clone());
            }
            l
        })
        .collect();
    segre_cubic().substitute(&images)
}

/// The three parameter planes in which a singular hyperplane meets the
/// discriminant cubic, each reported as the triple of hyperplanes (from the
/// fifteen) containing it; the triple always includes the input.
pub fn segre_plane_decomposition(h: HyperplaneId) -> Result<[[HyperplaneId; 3]; 3]> {
    // candidate partners: h' such that Δ vanishes on {h = 0} ∩ {h' = 0}
    let mut partners = Vec::new();
    for hp in HyperplaneId::all() {
        if hp == h {
            continue;
        }
        let null = rational_nullspace(&[form_rationals(h), form_rationals(hp)], 5);
        if null.len() != 3 {
            continue; // proportional forms cannot occur among the fifteen
        }
        if restrict_cubic_to_span(&null).is_zero() {
            partners.push((hp, null));
        }
    }
    // group partners by the plane they cut: same plane ⇔ each vanishes on
    // the other's nullspace
    let vanishes_on = |hp: HyperplaneId, null: &[Vec<BigRational>]| {
        let form = form_rationals(hp);
        null.iter().all(|v| {
            let mut acc = BigRational::zero();
            for k in 0..5 {
                acc += &form[k] * &v[k];
            }
            acc.is_zero()
        })
    };
    let mut groups: Vec<(Vec<HyperplaneId>, Vec<Vec<BigRational>>)> = Vec::new();
    for (hp, null) in partners {
        match groups.iter_mut().find(|(_, gn)| vanishes_on(hp, gn)) {
            Some((members, _)) => members.push(hp),
            None => groups.push((vec![hp], null)),
        }
    }
    if groups.len() != 3 || groups.iter().any(|(m, _)| m.len() != 2) {
        return Err(Error::Internal(format!(
            "decomposition of {} did not yield 3 planes with 2 extra hyperplanes each",
            h.name()
        )));
    }
    // verify the product of one linear form per plane recovers Δ|_{h=0}
    let ambient = rational_nullspace(&[form_rationals(h)], 5);
    let restricted = restrict_cubic_to_span(&ambient);
    let mut product = MultiPoly::constant(Rationals, ambient.len(), BigRational::one());
    for (members, _) in &groups {
        let form = form_rationals(members[0]);
        let mut linear = MultiPoly::zero(Rationals, ambient.len());
        for (j, b) in ambient.iter().enumerate() {
            let mut acc = BigRational::zero();
            for k in 0..5 {
                acc += &form[k] * &b[k];
            }
            linear.add_term(Mono::var(j), acc);
        }
        product = product.mul(&linear);
    }
    let (pm, pc) = product
        .leading()
        .ok_or_else(|| Error::Internal("plane product vanished".into()))?;
    let rc = restricted.coeff(pm);
    if rc.is_zero() || restricted != product.scale(&(rc / pc)) {
        return Err(Error::Internal(format!(
            "plane product does not reproduce the restriction of Δ to {}",
            h.name()
        )));
    }
    groups.sort_by_key(|(m, _)| m.iter().map(|hp| hp.index()).min());
    let triples: Vec<[HyperplaneId; 3]> = groups
        .into_iter()
        .map(|(mut members, _)| {
            members.sort();
            [h, members[0], members[1]]
        })
        .collect();
    Ok([triples[0], triples[1], triples[2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        big_rational_from_i64(n)
    }

    fn sample() -> SurfaceParams {
        SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap()
    }

    #[test]
    fn pinning_normalizes_scale_and_sign() {
        let a = SurfaceParams::new(&[
            BigRational::new(2.into(), 3.into()),
            q(0),
            q(-4),
            q(2),
            q(0),
        ])
        .unwrap();
        let b = SurfaceParams::from_ints([1, 0, -6, 3, 0]).unwrap();
        assert_eq!(a, b);
        let c = SurfaceParams::from_ints([-1, 0, 6, -3, 0]).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn surface_equation_basis_members() {
        let fermat = surface_equation(&SurfaceParams::from_ints([1, 0, 0, 0, 0]).unwrap());
        let expect = MultiPoly::from_integer_terms(
            Rationals,
            4,
            &[(&[4, 0, 0, 0], 1), (&[0, 4, 0, 0], 1), (&[0, 0, 4, 0], 1), (&[0, 0, 0, 4], 1)],
        );
        assert_eq!(fermat, expect);
        let prod = surface_equation(&SurfaceParams::from_ints([0, 1, 0, 0, 0]).unwrap());
        assert_eq!(
            prod,
            MultiPoly::from_integer_terms(Rationals, 4, &[(&[1, 1, 1, 1], 1)])
        );
    }

    #[test]
    fn family_is_gamma_invariant() {
        let x = surface_equation(&sample());
        for mask in 0..GAMMA_ORDER as u8 {
            assert_eq!(gamma_transform_poly(mask, &x), x, "mask {mask}");
        }
    }

    #[test]
    fn gamma_masks_multiply_by_xor() {
        for m1 in 0..16u8 {
            for m2 in 0..16u8 {
                let prod = mat4_mul_i64(&gamma_matrix(m1), &gamma_matrix(m2));
                let expect = gamma_matrix(m1 ^ m2);
                let neg = |m: &[[i64; 4]; 4]| {
                    let mut out = *m;
                    for row in &mut out {
                        for e in row {
                            *e = -*e;
                        }
                    }
                    out
                };
                assert!(
                    prod == expect || prod == neg(&expect),
                    "masks {m1},{m2} compose outside ±Γ"
                );
            }
        }
    }

    #[test]
    fn gamma_names_round_trip() {
        for mask in 0..16u8 {
            assert_eq!(gamma_from_name(&gamma_name(mask)), Some(mask));
        }
        assert_eq!(gamma_name(0), "id");
        assert_eq!(gamma_name(0b0101), "g1g3");
        assert_eq!(gamma_from_name("g9"), None);
    }

    #[test]
    fn delta_values() {
        assert_eq!(
            delta(&SurfaceParams::from_ints([1, 0, 0, 0, 0]).unwrap()),
            q(16)
        );
        assert_eq!(delta(&sample()), q(47977));
        for i in NodeId::all() {
            let v = segre_cubic().evaluate(&i.coords_rationals());
            assert!(v.is_zero(), "node {i} off the cubic");
        }
    }

    #[test]
    fn node_quadric_squares_have_node_coefficients() {
        for i in NodeId::all() {
            let sq = i.quadric().pow(2);
            let vec = family_coefficient_vector(&sq).expect("family shape");
            assert_eq!(vec, i.coords_rationals(), "node {i}");
        }
    }

    #[test]
    fn singular_report_values() {
        let rep = singular_test(&sample());
        assert!(rep.is_smooth());
        let get = |name: &str| {
            let h = HyperplaneId::by_name(name).unwrap();
            rep.hyperplane_values[h.index()].1.clone()
        };
        assert_eq!(get("q+C"), q(17));
        assert_eq!(get("q-C"), q(-13));
        assert_eq!(get("p+0"), q(241));
        assert_eq!(get("p+1"), q(1));
        assert_eq!(get("p-1"), q(-173));
        assert_eq!(get("p+3"), q(25));
        let node6 = singular_test(&SurfaceParams::from_ints([0, 2, 1, 0, 0]).unwrap());
        assert!(!node6.is_smooth());
        assert!(node6.vanishing.contains(&"Delta".to_string()));
    }

    #[test]
    fn nine_hyperplanes_pass_through_the_first_node() {
        let through = hyperplanes_through_node(NodeId::from_index(0).unwrap());
        let names: Vec<&str> = through.iter().map(|h| h.name()).collect();
        assert_eq!(
            names,
            ["q+C", "q+D", "q-E", "p+0", "p-0", "p+1", "p-1", "p+2", "p-2"]
        );
    }

    #[test]
    fn third_intersection_at_fermat() {
        let p = SurfaceParams::from_ints([1, 0, 0, 0, 0]).unwrap();
        let (p1, b1) = third_intersection(&p, NodeId::from_index(0).unwrap()).unwrap();
        assert_eq!(p1, SurfaceParams::from_ints([1, 0, 1, 1, -1]).unwrap());
        assert_eq!(b1, q(12));
        let on_cubic = SurfaceParams::from_ints([0, 2, 1, 0, 0]).unwrap();
        assert!(matches!(
            third_intersection(&on_cubic, NodeId::from_index(0).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn residual_surface_matches_line_residual() {
        let pts = [
            [1i64, 0, 0, 0, 0],
            [1, 87, 15, 39, 21],
            [3, -5, 7, 2, 11],
            [2, 1, -1, 4, 3],
            [5, 9, 8, -7, 1],
        ];
        for coords in pts {
            let p = SurfaceParams::from_ints(coords).unwrap();
            for i in NodeId::all() {
                // only a genuine degeneracy may skip a node: the internal
                // beta cross-check must hold everywhere else
                let pi = match third_intersection(&p, i) {
                    Ok((pi, _)) => pi,
                    Err(Error::Degenerate(_)) => continue,
                    Err(e) => panic!("point {coords:?} node {i}: {e}"),
                };
                let res = residual_surface(&p, i).unwrap();
                let vec = family_coefficient_vector(&res).expect("family shape");
                let repinned = SurfaceParams::new(&vec).unwrap();
                assert_eq!(repinned, pi, "point {coords:?} node {i}");
            }
        }
    }

    #[test]
    fn beta_agrees_with_the_delta_gradient() {
        // the s²t coefficient of Δ on the line s·p + t·q_i is ∇Δ(p)·q_i,
        // which pins each β_i = ¼∇Δ(p)·q_i; spot value at the fourth node
        let p = SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap();
        let grad: Vec<BigRational> = (0..5)
            .map(|k| segre_cubic().partial_derivative(k).evaluate(&p.rationals()))
            .collect();
        for i in NodeId::all() {
            let pairing: BigRational = grad
                .iter()
                .zip(i.coords_rationals())
                .map(|(g, c)| g * c)
                .sum();
            assert_eq!(q(4) * beta(i, &p), pairing, "node {i}");
        }
        let i4 = NodeId::from_index(3).unwrap();
        assert_eq!(q(4) * beta(i4, &p), q(11421));
    }

    #[test]
    fn residual_scale_at_fermat() {
        // 4β₁·X̃_p − Δ·Q̃₁² at p = [1,0,0,0,0]: 48p − 16q₁ = [32,0,32,32,−32]
        let p = SurfaceParams::from_ints([1, 0, 0, 0, 0]).unwrap();
        let res = residual_surface(&p, NodeId::from_index(0).unwrap()).unwrap();
        let vec = family_coefficient_vector(&res).unwrap();
        assert_eq!(vec, [q(32), q(0), q(32), q(32), q(-32)]);
    }

    #[test]
    fn kummer_products_at_sample_seed() {
        let pt = [q(1), q(2), q(3), q(4)];
        let params = kummer_from_point(&pt).unwrap();
        // A-product before pinning: (10)(2)(11)(−5)(14)(10) = −154000
        let [x, y, z, w] = &pt;
        let a_product = (y * z + x * w)
            * (y * z - x * w)
            * (x * z + y * w)
            * (x * z - y * w)
            * (z * w + x * y)
            * (z * w - x * y);
        assert_eq!(a_product, q(-154000));
        assert!(delta(&params).is_zero());
        // the surface is singular along the whole Γ-orbit of the seed
        let quartic = surface_equation(&params);
        for mask in 0..GAMMA_ORDER as u8 {
            let img = gamma_apply_point(&Rationals, mask, &pt);
            for j in 0..4 {
                assert!(quartic.partial_derivative(j).evaluate(&img).is_zero());
            }
        }
    }

    #[test]
    fn kummer_rejects_points_on_invariant_lines() {
        // [1:1:2:2] = s(1,1,0,0) + t(0,0,1,1)
        let on_line = [q(1), q(1), q(2), q(2)];
        assert!(matches!(
            kummer_from_point(&on_line),
            Err(Error::Degenerate(_))
        ));
        // a complex-line member with rational coordinates: [0:1:0:0]
        let on_gamma4_line = [q(0), q(1), q(0), q(0)];
        assert!(matches!(
            kummer_from_point(&on_gamma4_line),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn kummer_agrees_with_gradient_solve() {
        // independent construction: the parameters solve the 4 linear
        // equations ∇X̃(seed) = 0
        let pt = [q(1), q(3), q(5), q(7)];
        let params = kummer_from_point(&pt).unwrap();
        let mut rows = Vec::new();
        for j in 0..4 {
            let mut row = Vec::with_capacity(5);
            for k in 0..5 {
                let mut basis: [BigRational; 5] = std::array::from_fn(|_| q(0));
                basis[k] = q(1);
                let poly = surface_equation_with(&Rationals, &basis);
                row.push(poly.partial_derivative(j).evaluate(&pt));
            }
            rows.push(row);
        }
        let null = rational_nullspace(&rows, 5);
        assert_eq!(null.len(), 1);
        let solved = SurfaceParams::new(&null[0]).unwrap();
        assert_eq!(solved, params);
    }

    #[test]
    fn singular_points_recover_kummer_orbit() {
        let seeds = [[1i64, 2, 3, 4], [1, 3, 5, 7]];
        for seed in seeds {
            let pt: [BigRational; 4] = std::array::from_fn(|i| q(seed[i]));
            let params = kummer_from_point(&pt).unwrap();
            let desc = TowerDescriptor::rationals();
            let points = singular_points_on_segre(&params, &desc).unwrap();
            assert_eq!(points.len(), 16);
            // compare as projectively normalized rational sets
            let normalize = |v: &[TowerElement; 4]| -> Vec<BigRational> {
                let vals: Vec<BigRational> =
                    v.iter().map(|t| t.as_rational().expect("rational tower")).collect();
                let pivot = vals.iter().find(|c| !c.is_zero()).unwrap().clone();
                vals.iter().map(|c| c / &pivot).collect()
            };
            let mut got: Vec<Vec<BigRational>> = points.iter().map(normalize).collect();
            let mut expect: Vec<Vec<BigRational>> = (0..16u8)
                .map(|mask| {
                    let img = gamma_apply_point(&Rationals, mask, &pt);
                    let lifted: [TowerElement; 4] =
                        std::array::from_fn(|i| TowerElement::from_rational(&desc, img[i].clone()));
                    normalize(&lifted)
                })
                .collect();
            got.sort();
            got.dedup();
            expect.sort();
            expect.dedup();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn singular_points_reject_hyperplane_members() {
        // Δ = 0 and q+C = 0: A=1, C=−2, B=4, D=E=1
        let p = SurfaceParams::from_ints([1, 4, -2, 1, 1]).unwrap();
        assert!(delta(&p).is_zero());
        let desc = TowerDescriptor::rationals();
        assert!(matches!(
            singular_points_on_segre(&p, &desc),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn invariant_lines_and_their_planes() {
        let table = invariant_lines_table().unwrap();
        assert_eq!(table.len(), 15);
        let by_gamma = |mask: u8| table.iter().find(|r| r.gamma == mask).unwrap();
        let names = |r: &InvariantLinePair| -> Vec<&str> {
            r.segre_plane.iter().map(|h| h.name()).collect()
        };
        assert_eq!(names(by_gamma(0b0001)), ["q+C", "p+0", "p-1"]);
        assert_eq!(names(by_gamma(0b0010)), ["q+D", "p+0", "p-2"]);
        assert_eq!(names(by_gamma(0b0100)), ["A", "q+C", "q-C"]);
        assert_eq!(names(by_gamma(0b1000)), ["A", "q+D", "q-D"]);
        assert_eq!(names(by_gamma(0b1100)), ["A", "q+E", "q-E"]);
        // the full-product row: its first hyperplane is q+E
        assert_eq!(names(by_gamma(0b1111)), ["q+E", "p-0", "p+3"]);
        // all fifteen parameter planes are distinct
        let mut planes: Vec<[HyperplaneId; 3]> = table
            .iter()
            .map(|r| {
                let mut t = r.segre_plane;
                t.sort();
                t
            })
            .collect();
        planes.sort();
        planes.dedup();
        assert_eq!(planes.len(), 15);
    }

    #[test]
    fn invariant_lines_are_gamma_stable_as_a_pair() {
        let table = invariant_lines_table().unwrap();
        let f = GaussianRationals;
        for rec in &table {
            for mask in 0..16u8 {
                for basis in [&rec.line, &rec.conjugate_line] {
                    for vec in basis {
                        let pt: [GaussRat; 4] = std::array::from_fn(|c| gi_to_gauss(vec[c]));
                        let img = gamma_apply_point(&f, mask, &pt);
                        let on = |b: &[[Gi; 4]; 2]| {
                            let rows: [[GaussRat; 4]; 3] = [
                                std::array::from_fn(|c| gi_to_gauss(b[0][c])),
                                std::array::from_fn(|c| gi_to_gauss(b[1][c])),
                                img.clone(),
                            ];
                            (0..4).all(|drop| {
                                let cols: Vec<usize> = (0..4).filter(|&c| c != drop).collect();
                                let minor: [[GaussRat; 3]; 3] = std::array::from_fn(|r| {
                                    std::array::from_fn(|c| rows[r][cols[c]].clone())
                                });
                                f.is_zero(&det3_gauss(&minor))
                            })
                        };
                        assert!(
                            on(&rec.line) || on(&rec.conjugate_line),
                            "gamma {} does not stabilize the line pair of {}",
                            gamma_name(mask),
                            gamma_name(rec.gamma)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn plane_decomposition_examples() {
        let qpc = HyperplaneId::by_name("q+C").unwrap();
        let triples = segre_plane_decomposition(qpc).unwrap();
        let names: Vec<Vec<&str>> = triples
            .iter()
            .map(|t| t.iter().map(|h| h.name()).collect())
            .collect();
        assert!(names.contains(&vec!["q+C", "A", "q-C"]));
        assert!(names.contains(&vec!["q+C", "p-0", "p+1"]));
        assert!(names.contains(&vec!["q+C", "p+0", "p-1"]));
        let a = HyperplaneId::by_name("A").unwrap();
        let a_triples = segre_plane_decomposition(a).unwrap();
        for t in a_triples {
            assert_eq!(t[0].name(), "A");
            assert!(t[1].name().starts_with("q+"));
            assert!(t[2].name().starts_with("q-"));
        }
    }

    #[test]
    fn restriction_to_qpc_factors_explicitly() {
        // Δ|_{C=−2A} ∝ A(B−2(D+E))(B+2(D+E))
        let basis = vec![
            vec![q(1), q(0), q(-2), q(0), q(0)],
            vec![q(0), q(1), q(0), q(0), q(0)],
            vec![q(0), q(0), q(0), q(1), q(0)],
            vec![q(0), q(0), q(0), q(0), q(1)],
        ];
        let restricted = restrict_cubic_to_span(&basis);
        // variables: (a, b, d, e)
        let a = MultiPoly::variable(Rationals, 4, 0);
        let b = MultiPoly::variable(Rationals, 4, 1);
        let d = MultiPoly::variable(Rationals, 4, 2);
        let e = MultiPoly::variable(Rationals, 4, 3);
        let de2 = d.add(&e).scale(&q(2));
        let product = a.mul(&b.sub(&de2)).mul(&b.add(&de2));
        let lead = restricted.leading().unwrap();
        let scale = restricted.coeff(lead.0) / product.coeff(lead.0);
        assert_eq!(restricted, product.scale(&scale));
    }

    #[test]
    fn all_fifteen_decompositions_match_line_table() {
        let table = invariant_lines_table().unwrap();
        let mut from_lines: Vec<[HyperplaneId; 3]> = table
            .iter()
            .map(|r| {
                let mut t = r.segre_plane;
                t.sort();
                t
            })
            .collect();
        from_lines.sort();
        let mut from_decomp = Vec::new();
        for h in HyperplaneId::all() {
            for mut t in segre_plane_decomposition(h).unwrap() {
                t.sort();
                from_decomp.push(t);
            }
        }
        from_decomp.sort();
        from_decomp.dedup();
        assert_eq!(from_decomp.len(), 15);
        assert_eq!(from_lines, from_decomp);
    }
}
