//! Construction and verification of the 320 conics.
//!
//! For a smooth member of the family and a node of the discriminant cubic,
//! the line through the parameter point and the node meets the cubic in a
//! third point whose surface is a Kummer quartic. Each of its sixteen
//! singular points spans a trope plane, the surface meets that plane in a
//! doubled conic, and pulling the factorization back to the smooth surface
//! splits the intersection into a conjugate pair of smooth conics. Ten nodes
//! times sixteen planes times two branches gives the 320 records.
//!
//! All coordinates live in the node's multiquadratic tower, built from the
//! five square classes attached to the node. Records are compared through
//! projective canonical keys: coefficient vectors are normalized by their
//! first nonzero entry inside the tower field, so two records match exactly
//! when they cut out the same variety, even when representatives differ by
//! an irrational unit of the tower.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::arith::big_rational_from_i64;
use crate::error::{Error, Result};
use crate::galois::node_class_values;
use crate::geometry::{
    delta, gamma_apply_point, gamma_transform_poly, residual_surface, singular_points_on_segre,
    singular_test, surface_equation_with, third_intersection, GammaMask, HyperplaneId, NodeId,
    SurfaceParams, GAMMA_ORDER, NODE_COUNT,
};
use crate::parallel::try_par_map;
use crate::poly::{Field, Mono, MultiPoly, TowerField};
use crate::tower::{sqrt_rational, TowerDescriptor, TowerElement};

// ---------------------------------------------------------------------
// Canonical projective keys
// ---------------------------------------------------------------------

type ElemKey = Vec<(u32, BigRational)>;
/// A plane up to scale: the four coefficients divided by the first nonzero
/// one, serialized coordinate-wise. Dividing inside the tower makes the key
/// invariant even under irrational unit rescalings.
pub type PlaneKey = Vec<ElemKey>;

fn elem_key(e: &TowerElement) -> ElemKey {
    e.coords().iter().map(|(m, c)| (*m, c.clone())).collect()
}

pub fn canonical_plane_key(plane: &[TowerElement; 4]) -> Result<PlaneKey> {
    let pivot = plane
        .iter()
        .find(|c| !c.is_zero())
        .ok_or(Error::ZeroObject("plane"))?;
    let inv = pivot.invert()?;
    let mut key = Vec::with_capacity(4);
    for c in plane {
        key.push(elem_key(&c.mul(&inv)?));
    }
    Ok(key)
}

/// The quadric pushed through the division-free chart substitution
/// x_j ↦ c_p·x_j (j ≠ p), x_p ↦ −Σ_{j≠p} c_j x_j, where p is the plane's
/// pivot. Two quadrics cut the same conic on the plane exactly when their
/// images are proportional, and rescaling either the plane or the quadric
/// only rescales the image, so no inversions are needed to compare conics.
pub fn conic_chart_form(
    quad: &MultiPoly<TowerField>,
    plane: &[TowerElement; 4],
) -> Result<MultiPoly<TowerField>> {
    let pivot = (0..4)
        .rev()
        .find(|&i| !plane[i].is_zero())
        .ok_or(Error::ZeroObject("plane"))?;
    let desc = plane[pivot].descriptor();
    let zero = TowerElement::zero(desc);
    let mut m = vec![vec![zero; 4]; 4];
    for j in 0..4 {
        if j != pivot {
            m[j][j] = plane[pivot].clone();
            m[pivot][j] = plane[j].neg();
        }
    }
    Ok(quad.act_linear(&m))
}

/// The rational factor that clears every denominator and divides out the
/// integer gcd across all tower coordinates of `elems`. `None` when all
/// elements are zero.
fn content_scale<'a>(elems: impl Iterator<Item = &'a TowerElement>) -> Option<BigRational> {
    use num_integer::Integer;
    use num_traits::Zero;
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::from(1);
    for c in elems {
        for r in c.coords().values() {
            num_gcd = num_gcd.gcd(r.numer());
            den_lcm = den_lcm.lcm(r.denom());
        }
    }
    if num_gcd.is_zero() {
        None
    } else {
        Some(BigRational::new(den_lcm, num_gcd))
    }
}

/// Divides out the rational content across every tower coordinate of every
/// coefficient. A pure rescaling, so the proportionality class is unchanged,
/// but cross-multiplications on the reduced form work on far smaller
/// integers.
pub fn reduce_content(p: &MultiPoly<TowerField>) -> MultiPoly<TowerField> {
    match content_scale(p.terms().map(|(_, c)| c)) {
        Some(s) => p.map_coeffs(p.field().clone(), |c| c.scale(&s)),
        None => p.clone(),
    }
}

/// Content reduction for a coefficient vector, as for polynomials.
fn reduce_vector_content(v: &[TowerElement; 4]) -> [TowerElement; 4] {
    match content_scale(v.iter()) {
        Some(s) => std::array::from_fn(|k| v[k].scale(&s)),
        None => v.clone(),
    }
}

/// Whether two polynomials differ only by a nonzero scalar of the field.
/// Compared term by term with cross-multiplications, bailing out on the
/// first mismatch.
pub fn proportional(a: &MultiPoly<TowerField>, b: &MultiPoly<TowerField>) -> Result<bool> {
    if a.num_terms() != b.num_terms() {
        return Ok(false);
    }
    let (Some((m0, a0)), Some((n0, b0))) = (a.terms().next(), b.terms().next()) else {
        return Ok(true);
    };
    if m0 != n0 {
        return Ok(false);
    }
    for ((ma, ca), (mb, cb)) in a.terms().zip(b.terms()).skip(1) {
        if ma != mb || ca.mul(b0)? != cb.mul(a0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------

/// One of the 320 conics: a trope plane of the node's residual Kummer
/// surface together with the quadric cutting the conic out of the smooth
/// surface inside that plane.
#[derive(Clone, Debug)]
pub struct ConicRecord {
    pub node: NodeId,
    /// The Γ element carrying the seed pair to this record.
    pub mask: GammaMask,
    /// +1 or −1, the sign of the square root splitting the doubled conic.
    pub branch: i8,
    /// Coefficients of the trope plane.
    pub plane: [TowerElement; 4],
    /// The quadric a₂·Q̃ ± r·Q′ in the ambient coordinates.
    pub quad: MultiPoly<TowerField>,
}

impl ConicRecord {
    pub fn plane_key(&self) -> Result<PlaneKey> {
        canonical_plane_key(&self.plane)
    }

    /// The chart form of the record's conic; proportional forms on the same
    /// plane are the same conic.
    pub fn conic_form(&self) -> Result<MultiPoly<TowerField>> {
        conic_chart_form(&self.quad, &self.plane)
    }

    pub fn same_conic(&self, other: &ConicRecord) -> Result<bool> {
        if self.plane_key()? != other.plane_key()? {
            return Ok(false);
        }
        proportional(&self.conic_form()?, &other.conic_form()?)
    }
}

/// A plane key after the tower sign automorphism given by `signs`: the key
/// entries are field elements of the tower, so the automorphism acts on the
/// serialized coordinates directly.
pub fn flip_plane_key(key: &PlaneKey, signs: &[i8]) -> PlaneKey {
    key.iter()
        .map(|e| {
            e.iter()
                .map(|(m, c)| {
                    let negatives = (0..signs.len())
                        .filter(|&j| signs[j] < 0 && m & (1 << j) != 0)
                        .count();
                    (*m, if negatives % 2 == 1 { -c } else { c.clone() })
                })
                .collect()
        })
        .collect()
}

/// A polynomial with every coefficient pushed through the tower sign
/// automorphism.
pub fn flip_poly(p: &MultiPoly<TowerField>, signs: &[i8]) -> Result<MultiPoly<TowerField>> {
    let mut out = MultiPoly::zero(p.field().clone(), p.nvars());
    for (m, c) in p.terms() {
        out.add_term(*m, c.apply_sign_automorphism(signs)?);
    }
    Ok(out)
}

/// Stable label of a record inside the full list: node-major, then the Γ
/// mask, then the branch.
pub fn record_label(node: NodeId, mask: GammaMask, branch: i8) -> usize {
    node.index() * 32 + (mask as usize) * 2 + usize::from(branch < 0)
}

/// Stable label of a trope plane: node-major, then the Γ mask.
pub fn plane_label(node: NodeId, mask: GammaMask) -> usize {
    node.index() * 16 + mask as usize
}

// ---------------------------------------------------------------------
// Trope and residual conic
// ---------------------------------------------------------------------

/// The trope plane spanned by a singular point [r₃:r₂:r₁:1] of a Kummer
/// member: r₃x + r₂y + r₁z + w, whose coefficient vector is the point
/// itself. The normalization of the last coordinate pins the scale.
pub fn trope_from_singular_point(s: &[TowerElement; 4]) -> Result<[TowerElement; 4]> {
    let normalized = s[3]
        .as_rational()
        .map(|r| r == big_rational_from_i64(1))
        .unwrap_or(false);
    if !normalized {
        return Err(Error::Degenerate(
            "the singular point is not normalized to last coordinate 1".into(),
        ));
    }
    Ok(s.clone())
}

/// Splits a Kummer quartic along the trope of its singular point
/// s = [r₃:r₂:r₁:1]: returns the conic quadric Q′ and the factor μ with
/// X̃ − μ·(Q′)² divisible by the trope form. μ scales linearly with the
/// input quartic, so callers fix the scale by fixing the quartic.
pub fn qprime_and_mu<F: Field>(
    quartic: &MultiPoly<F>,
    s: &[F::Elem; 4],
) -> Result<(MultiPoly<F>, F::Elem)> {
    let f = quartic.field().clone();
    let (r3, r2, r1) = (&s[0], &s[1], &s[2]);
    let m23 = f.mul(r2, r3);
    let m13 = f.mul(r1, r3);
    let m12 = f.mul(r1, r2);
    // differences of squares (r_i r_j)² − r_k²
    let f0 = f.mul(&f.sub(&m23, r1), &f.add(&m23, r1));
    let f1 = f.mul(&f.sub(&m13, r2), &f.add(&m13, r2));
    let f2 = f.mul(&f.sub(&m12, r3), &f.add(&m12, r3));
    let a0 = f.mul(&f0, &f1);
    let a1 = f.mul(&f0, &f2);
    let a2 = f.mul(&f1, &f2);
    if f.is_zero(&a2) {
        return Err(Error::Degenerate(
            "the z² coefficient of the trope conic vanishes".into(),
        ));
    }
    let sq = |v: &F::Elem| f.mul(v, v);
    let (r1s, r2s, r3s) = (sq(r1), sq(r2), sq(r3));
    // t = 2r₁²r₂²r₃² − r₁⁴ − r₂⁴ − r₃⁴ + 1
    let mut t = f.mul(&f.from_int(2), &f.mul(&r1s, &f.mul(&r2s, &r3s)));
    t = f.sub(&t, &sq(&r1s));
    t = f.sub(&t, &sq(&r2s));
    t = f.sub(&t, &sq(&r3s));
    t = f.add(&t, &f.one());
    let a3 = f.mul(&f.mul(r3, r2), &t);
    let a4 = f.mul(&f.mul(r3, r1), &t);
    let a5 = f.mul(&f.mul(r2, r1), &t);

    let mut qp = MultiPoly::zero(f.clone(), 4);
    qp.add_term(Mono([2, 0, 0, 0, 0]), a0);
    qp.add_term(Mono([0, 2, 0, 0, 0]), a1);
    qp.add_term(Mono([0, 0, 2, 0, 0]), a2.clone());
    qp.add_term(Mono([1, 1, 0, 0, 0]), a3);
    qp.add_term(Mono([1, 0, 1, 0, 0]), a4);
    qp.add_term(Mono([0, 1, 1, 0, 0]), a5);

    // μ = (A·r₁⁴ + C·r₁² + A)/a₂², reading A, C off the quartic
    let ca = quartic.coeff(&Mono([4, 0, 0, 0, 0]));
    let cc = quartic.coeff(&Mono([2, 2, 0, 0, 0]));
    let r1q = sq(&r1s);
    let num = f.add(
        &f.mul(&ca, &f.add(&r1q, &f.one())),
        &f.mul(&cc, &r1s),
    );
    let mu = f.mul(&num, &f.invert(&sq(&a2))?);

    // the trope must divide the quartic minus the doubled conic
    let mut trope = MultiPoly::zero(f.clone(), 4);
    for (i, c) in s.iter().enumerate() {
        trope.add_term(Mono::var(i), c.clone());
    }
    let diff = quartic.sub(&qp.pow(2).scale(&mu));
    diff.exact_divide(&trope).map_err(|_| {
        Error::Internal("the trope does not divide the quartic minus the doubled conic".into())
    })?;
    Ok((qp, mu))
}

/// The conjugate pair of conics on the trope of `seed`, as the two branches
/// of a₂·Q̃ ± r·Q′ with r² = −μ·a₂²/Δ. The pair is verified against the
/// product identity Δ·(quad₊·quad₋) = 4β·a₂²·X̃_p on the trope.
pub fn conic_pair(
    p: &SurfaceParams,
    node: NodeId,
    tower: &Arc<TowerDescriptor>,
    seed: &[TowerElement; 4],
) -> Result<[ConicRecord; 2]> {
    let tf = TowerField(tower.clone());
    let lift = |q: &BigRational| TowerElement::from_rational(tower, q.clone());
    let plane = trope_from_singular_point(seed)?;

    let residual = residual_surface(p, node)?;
    let residual_t = residual.map_coeffs(tf.clone(), lift);
    let (qprime, mu) = qprime_and_mu(&residual_t, &plane)?;
    if mu.is_zero() {
        return Err(Error::Degenerate(
            "the trope factor μ vanishes: the intersection is a doubled line".into(),
        ));
    }
    let a2 = qprime.coeff(&Mono([0, 0, 2, 0, 0]));
    let d = delta(p);
    let radicand = mu.mul(&a2)?.mul(&a2)?.scale(&-d.recip());
    let r = radicand.tower_sqrt().ok_or_else(|| {
        Error::TowerInsufficient(
            "the conic radicand −μa₂²/Δ is not a square in the node tower".into(),
        )
    })?;

    let quadric_t = node.quadric().map_coeffs(tf.clone(), lift);
    let base = quadric_t.scale(&a2);
    let plus = base.add(&qprime.scale(&r));
    let minus = base.sub(&qprime.scale(&r));

    // product identity on the trope, at the declared scale
    let params: [TowerElement; 5] = std::array::from_fn(|k| lift(&p.rationals()[k]));
    let surface = surface_equation_with(&tf, &params);
    let (lhs, _) = plus.mul(&minus).restrict_to_plane(&plane)?;
    let (rhs, _) = surface.restrict_to_plane(&plane)?;
    let (_, beta) = third_intersection(p, node)?;
    let lhs_scaled = lhs.scale(&lift(&d));
    let rhs_scaled = rhs
        .scale(&lift(&(big_rational_from_i64(4) * beta)))
        .scale(&a2)
        .scale(&a2);
    if !lhs_scaled.sub(&rhs_scaled).is_zero() {
        return Err(Error::Internal(
            "the conjugate conics do not multiply to the restricted surface".into(),
        ));
    }

    // everything downstream is projective, so shed the huge shared factors
    let plane = reduce_vector_content(&plane);
    let plus = reduce_content(&plus);
    let minus = reduce_content(&minus);
    Ok([
        ConicRecord {
            node,
            mask: 0,
            branch: 1,
            plane: plane.clone(),
            quad: plus,
        },
        ConicRecord {
            node,
            mask: 0,
            branch: -1,
            plane,
            quad: minus,
        },
    ])
}

// ---------------------------------------------------------------------
// Per-node and global construction
// ---------------------------------------------------------------------

/// The 32 conics of one node, defined over that node's tower.
#[derive(Clone, Debug)]
pub struct NodeConics {
    pub node: NodeId,
    pub tower: Arc<TowerDescriptor>,
    /// 32 records: Γ-mask major, branch +1 before −1.
    pub records: Vec<ConicRecord>,
    /// Cached `records[k].plane_key()`, in record order.
    pub plane_keys: Vec<PlaneKey>,
    /// Cached `records[k].conic_form()`, in record order.
    pub forms: Vec<MultiPoly<TowerField>>,
}

/// Builds the node tower from the node's five square classes, resolves one
/// singular point of the residual Kummer surface in it, splits the seed
/// trope, and transports the pair around the Γ-orbit.
pub fn conics_for_node(p: &SurfaceParams, node: NodeId) -> Result<NodeConics> {
    let class_values = node_class_values(p, node)?;
    let (tower, _) = TowerDescriptor::from_values(&class_values)?;
    let (residual_point, _) = third_intersection(p, node)?;
    let points = singular_points_on_segre(&residual_point, &tower)?;
    let [plus, minus] = conic_pair(p, node, &tower, &points[0])?;

    let tf = TowerField(tower.clone());
    let mut records = Vec::with_capacity(2 * GAMMA_ORDER);
    for mask in 0..GAMMA_ORDER as u8 {
        for rec in [&plus, &minus] {
            records.push(ConicRecord {
                node,
                mask,
                branch: rec.branch,
                plane: gamma_apply_point(&tf, mask, &rec.plane),
                quad: gamma_transform_poly(mask, &rec.quad),
            });
        }
    }

    let plane_keys: Vec<PlaneKey> = records
        .iter()
        .map(|rec| rec.plane_key())
        .collect::<Result<_>>()?;
    let forms: Vec<MultiPoly<TowerField>> = records
        .iter()
        .map(|rec| rec.conic_form().map(|f| reduce_content(&f)))
        .collect::<Result<_>>()?;

    // the orbit must consist of 16 planes each carrying a conjugate pair of
    // genuinely different conics
    let mut by_plane: HashMap<&PlaneKey, Vec<usize>> = HashMap::new();
    for (k, key) in plane_keys.iter().enumerate() {
        by_plane.entry(key).or_default().push(k);
    }
    if by_plane.len() != GAMMA_ORDER {
        return Err(Error::Degenerate(format!(
            "the Γ-orbit of the seed pair collapses at node {node}"
        )));
    }
    for group in by_plane.values() {
        let pair: Vec<i8> = group.iter().map(|&k| records[k].branch).collect();
        if pair.len() != 2 || pair[0] == pair[1] {
            return Err(Error::Degenerate(format!(
                "a trope of node {node} does not carry a conjugate pair"
            )));
        }
        if proportional(&forms[group[0]], &forms[group[1]])? {
            return Err(Error::Degenerate(format!(
                "the conjugate conics coincide on a trope of node {node}"
            )));
        }
    }
    Ok(NodeConics {
        node,
        tower,
        records,
        plane_keys,
        forms,
    })
}

/// All 320 records, one [`NodeConics`] per node in node order.
#[derive(Clone, Debug)]
pub struct AllConics {
    pub point: SurfaceParams,
    pub nodes: Vec<NodeConics>,
    /// A tower spanning every node tower, for cross-node comparisons.
    pub union_tower: Arc<TowerDescriptor>,
}

impl AllConics {
    pub fn records(&self) -> impl Iterator<Item = &ConicRecord> + '_ {
        self.nodes.iter().flat_map(|n| n.records.iter())
    }

    pub fn count(&self) -> usize {
        self.nodes.iter().map(|n| n.records.len()).sum()
    }

    pub fn record(&self, label: usize) -> &ConicRecord {
        &self.nodes[label / 32].records[label % 32]
    }
}

/// A reusable embedding of one tower into a larger one, with the generator
/// images computed once.
struct TowerEmbedding {
    target: Arc<TowerDescriptor>,
    images: Vec<TowerElement>,
}

impl TowerEmbedding {
    fn new(source: &Arc<TowerDescriptor>, target: &Arc<TowerDescriptor>) -> Result<TowerEmbedding> {
        let mut images = Vec::with_capacity(source.rank());
        for d in source.generators() {
            let r = BigRational::from_integer(d.clone());
            let img = TowerElement::embed_rational_sqrt(&r, target)?.ok_or_else(|| {
                Error::TowerInsufficient(format!("generator {d} does not embed in the union tower"))
            })?;
            images.push(img);
        }
        Ok(TowerEmbedding {
            target: target.clone(),
            images,
        })
    }

    fn apply(&self, e: &TowerElement) -> Result<TowerElement> {
        let mut out = TowerElement::zero(&self.target);
        for (m, c) in e.coords() {
            let mut term = TowerElement::from_rational(&self.target, c.clone());
            let mut bits = *m;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                term = term.mul(&self.images[j])?;
                bits &= bits - 1;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

/// Builds the conics of all ten nodes (in parallel over nodes) and checks
/// global distinctness. The 160 planes are compared inside a tower spanning
/// all node towers; per-node checks already separate the two conics on each
/// plane, and records on different planes cannot coincide, so 160 distinct
/// planes give 320 distinct conics.
pub fn all_conics(p: &SurfaceParams) -> Result<AllConics> {
    let nodes = try_par_map(NodeId::all().collect(), |node| conics_for_node(p, node))?;

    let mut values = Vec::with_capacity(5 * NODE_COUNT);
    for node in NodeId::all() {
        values.extend(node_class_values(p, node)?);
    }
    let (union_tower, _) = TowerDescriptor::from_values(&values)?;

    let mut plane_keys = HashSet::new();
    for nc in &nodes {
        let embed = TowerEmbedding::new(&nc.tower, &union_tower)?;
        for rec in &nc.records {
            if rec.branch < 0 {
                continue;
            }
            let plane: [TowerElement; 4] = [
                embed.apply(&rec.plane[0])?,
                embed.apply(&rec.plane[1])?,
                embed.apply(&rec.plane[2])?,
                embed.apply(&rec.plane[3])?,
            ];
            plane_keys.insert(canonical_plane_key(&plane)?);
        }
    }
    if plane_keys.len() != 16 * NODE_COUNT {
        return Err(Error::Internal(format!(
            "expected 160 distinct planes, found {}",
            plane_keys.len()
        )));
    }

    Ok(AllConics {
        point: p.clone(),
        nodes,
        union_tower,
    })
}

// ---------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------

/// Checks that the record's quadric divides the surface on the plane and
/// that the restricted conic is smooth (nonzero 3×3 determinant).
pub fn verify_conic(p: &SurfaceParams, rec: &ConicRecord) -> Result<bool> {
    let tower = rec.plane[0].descriptor().clone();
    let tf = TowerField(tower.clone());
    let params: [TowerElement; 5] =
        std::array::from_fn(|k| TowerElement::from_rational(&tower, p.rationals()[k].clone()));
    let surface = surface_equation_with(&tf, &params);
    let (rs, pivot) = surface.restrict_to_plane(&rec.plane)?;
    let (rq, pivot_q) = rec.quad.restrict_to_plane(&rec.plane)?;
    if pivot != pivot_q || rq.is_zero() {
        return Ok(false);
    }
    if rs.exact_divide(&rq).is_err() {
        return Ok(false);
    }

    let vars: Vec<usize> = (0..4).filter(|&v| v != pivot).collect();
    let half = TowerElement::from_rational(&tower, BigRational::new(1.into(), 2.into()));
    let entry = |a: usize, b: usize| -> TowerElement {
        let c = rq.coeff(&Mono::var(vars[a]).mul(&Mono::var(vars[b])));
        if a == b {
            c
        } else {
            c.mul(&half).expect("tower mismatch")
        }
    };
    let minor = |a: usize, b: usize, c: usize, d: usize| -> Result<TowerElement> {
        entry(a, b).mul(&entry(c, d))?.sub(&entry(a, d).mul(&entry(c, b))?)
    };
    let det = entry(0, 0)
        .mul(&minor(1, 1, 2, 2)?)?
        .sub(&entry(0, 1).mul(&minor(1, 0, 2, 2)?)?)?
        .add(&entry(0, 2).mul(&minor(1, 0, 2, 1)?)?)?;
    Ok(!det.is_zero())
}

// ---------------------------------------------------------------------
// The first node's planes in closed form
// ---------------------------------------------------------------------

/// The sixteen trope planes of the first node written directly as nested
/// radicals in the hyperplane values, independent of the singular-point
/// pipeline.
#[derive(Clone, Debug)]
pub struct Node1Formulas {
    pub tower: Arc<TowerDescriptor>,
    /// Γ-orbit of the printed seed plane, mask order.
    pub planes: Vec<[TowerElement; 4]>,
    /// Index of the √q₊C generator in the tower, when q₊C is not a square.
    pub qpc_generator: Option<usize>,
}

pub fn node1_plane_formulas(p: &SurfaceParams) -> Result<Node1Formulas> {
    let report = singular_test(p);
    if !report.is_smooth() {
        return Err(Error::Degenerate(
            "the closed plane formulas need a smooth parameter point".into(),
        ));
    }
    let v = |name: &str| HyperplaneId::by_name(name).expect("hyperplane name").value(p);
    let qpc = v("q+C");
    let qpd = v("q+D");
    let qme = v("q-E");
    let p0 = v("p+0");
    let m0 = v("p-0");
    let p1 = v("p+1");
    let m1 = v("p-1");
    let p2 = v("p+2");
    let m2 = v("p-2");

    // the three atoms come first so the √q₊C generator is identifiable
    let radicands = [
        qpc.clone(),
        qpd.clone(),
        -qme.clone(),
        -(&qpd * &qpc * &qme),
        &m2 * &m0 * &p2 * &p1,
        &p1 * &p0,
        &m2 * &m1 * &p2 * &p0,
        &m1 * &m0,
        &m1 * &m0 * &p1 * &p2,
        &p2 * &p0,
        &m1 * &m2 * &p1 * &p0,
        &m2 * &m0,
        &m0 * &m1 * &p0 * &p2,
        &p2 * &p1,
        &m0 * &m2 * &p0 * &p1,
        &m2 * &m1,
    ];
    let (tower, _) = TowerDescriptor::from_values(&radicands)?;
    let sq = |r: &BigRational| sqrt_rational(&tower, r);

    let b = p.rationals()[1].clone();
    let r0 = sq(&radicands[3])?.scale(&(big_rational_from_i64(8) * b));
    let r1 = sq(&qpc)?.mul(
        &sq(&radicands[4])?
            .add(&sq(&radicands[5])?.scale(&p2))?
            .add(&sq(&radicands[6])?)?
            .add(&sq(&radicands[7])?.scale(&m2))?,
    )?;
    let r2 = sq(&qpd)?.mul(
        &sq(&radicands[8])?
            .add(&sq(&radicands[9])?.scale(&p1))?
            .add(&sq(&radicands[10])?)?
            .add(&sq(&radicands[11])?.scale(&m1))?,
    )?;
    let r3 = sq(&-qme)?
        .neg()
        .mul(
            &sq(&radicands[12])?
                .add(&sq(&radicands[13])?.scale(&p0))?
                .add(&sq(&radicands[14])?)?
                .add(&sq(&radicands[15])?.scale(&m0))?,
        )?;
    let seed = [r0, r1, r2, r3];

    let tf = TowerField(tower.clone());
    let planes = (0..GAMMA_ORDER as u8)
        .map(|mask| gamma_apply_point(&tf, mask, &seed))
        .collect();

    let qpc_class = crate::arith::squarefree_part(&qpc)?;
    let qpc_generator = if qpc_class.is_trivial() {
        None
    } else {
        tower
            .generators()
            .iter()
            .position(|g| *g == qpc_class.to_bigint())
    };
    Ok(Node1Formulas {
        tower,
        planes,
        qpc_generator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::kummer_from_point;
    use crate::poly::Rationals;
    use crate::tower::TowerDescriptor;
    use num_traits::Zero;

    fn sample() -> SurfaceParams {
        SurfaceParams::from_ints([1, 87, 15, 39, 21]).unwrap()
    }

    fn q(n: i64) -> BigRational {
        big_rational_from_i64(n)
    }

    #[test]
    fn kummer_oracle_splits_over_plain_rationals() {
        let pk = kummer_from_point(&[q(1), q(2), q(3), q(4)]).unwrap();
        let quartic = crate::geometry::surface_equation(&pk);
        let seed = [
            BigRational::new(1.into(), 4.into()),
            BigRational::new(1.into(), 2.into()),
            BigRational::new(3.into(), 4.into()),
            q(1),
        ];
        let (qp, mu) = qprime_and_mu(&quartic, &seed).unwrap();
        assert!(!mu.is_zero());
        assert_eq!(qp.total_degree(), 2);
        assert!(!qp.coeff(&Mono([0, 0, 2, 0, 0])).is_zero());
    }

    #[test]
    fn canonical_keys_ignore_tower_unit_scales() {
        let (tower, _) = TowerDescriptor::from_values(&[q(2)]).unwrap();
        let root2 = sqrt_rational(&tower, &q(2)).unwrap();
        let one = TowerElement::one(&tower);
        let plane = [
            one.clone(),
            root2.clone(),
            TowerElement::zero(&tower),
            one.clone(),
        ];
        let mut scaled = plane.clone();
        for c in &mut scaled {
            *c = c.mul(&root2).unwrap().neg();
        }
        assert_eq!(
            canonical_plane_key(&plane).unwrap(),
            canonical_plane_key(&scaled).unwrap()
        );
    }

    #[test]
    fn trope_requires_the_pinned_normalization() {
        let tower = TowerDescriptor::rationals();
        let one = TowerElement::one(&tower);
        let two = TowerElement::from_int(&tower, 2);
        let good = [two.clone(), one.clone(), two.clone(), one.clone()];
        assert!(trope_from_singular_point(&good).is_ok());
        let bad = [one.clone(), one.clone(), one, two];
        assert!(matches!(
            trope_from_singular_point(&bad),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn rational_quadric_restriction_oracle() {
        // x² + y² − z² − w² on the plane x + y + z + w: substituting
        // w = −x − y − z by hand gives −2(z² + xy + xz + yz), so the
        // canonical restriction pipeline must agree.
        let f = Rationals;
        let quad = MultiPoly::from_integer_terms(
            f,
            4,
            &[(&[2, 0, 0, 0], 1), (&[0, 2, 0, 0], 1), (&[0, 0, 2, 0], -1), (&[0, 0, 0, 2], -1)],
        );
        let plane = [q(1), q(1), q(1), q(1)];
        let (r, pivot) = quad.restrict_to_plane(&plane).unwrap();
        assert_eq!(pivot, 3);
        let expected = MultiPoly::from_integer_terms(
            f,
            4,
            &[
                (&[0, 0, 2, 0], -2),
                (&[1, 1, 0, 0], -2),
                (&[1, 0, 1, 0], -2),
                (&[0, 1, 1, 0], -2),
            ],
        );
        assert!(r.sub(&expected).is_zero());
    }

    #[test]
    fn first_node_conics_form_sixteen_conjugate_pairs() {
        let p = sample();
        let node = NodeId::from_label(1).unwrap();
        let nc = conics_for_node(&p, node).unwrap();
        assert_eq!(nc.records.len(), 32);
        for (k, rec) in nc.records.iter().enumerate() {
            assert_eq!(rec.mask as usize, k / 2);
            assert_eq!(rec.branch, if k % 2 == 0 { 1 } else { -1 });
            assert_eq!(record_label(node, rec.mask, rec.branch), k);
        }
        // conjugates share the plane, branches differ
        let a = nc.records[6].plane_key().unwrap();
        let b = nc.records[7].plane_key().unwrap();
        assert_eq!(a, b);
        // spot-verify divisibility and smoothness on both branches and a
        // transported mask
        for k in [0, 1, 13] {
            assert!(verify_conic(&p, &nc.records[k]).unwrap(), "record {k}");
        }
    }

    #[test]
    fn closed_form_planes_flip_to_their_gamma3_image() {
        let p = sample();
        let formulas = node1_plane_formulas(&p).unwrap();
        assert_eq!(formulas.planes.len(), 16);
        let mut keys = HashSet::new();
        for plane in &formulas.planes {
            keys.insert(canonical_plane_key(plane).unwrap());
        }
        assert_eq!(keys.len(), 16);

        let j = formulas.qpc_generator.expect("q+C is not a square at the sample point");
        let mut signs = vec![1i8; formulas.tower.rank()];
        signs[j] = -1;
        let mut flipped = formulas.planes[0].clone();
        for c in &mut flipped {
            *c = c.apply_sign_automorphism(&signs).unwrap();
        }
        // γ₃ is the mask-4 generator
        assert_eq!(
            canonical_plane_key(&flipped).unwrap(),
            canonical_plane_key(&formulas.planes[4]).unwrap()
        );
    }
}
