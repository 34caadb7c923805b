//! The projective symmetry group of the quartic family.
//!
//! An element acts simultaneously on P³ (by a matrix over the Gaussian
//! integers) and on the parameter space P⁴ (by an integer matrix); both
//! parts are kept in canonical projective form, so equality and hashing are
//! structural. The full group has order 11520; the coordinate group Γ of
//! order 16 sits inside it as the kernel of the parameter action, with
//! quotient of order 720 whose element-order statistics are those of the
//! symmetric group on six letters.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::gauss::{gi_mat_canonical, gi_mat_from_rows, gi_mat_mul, Gi, GiMat, GI_IDENTITY};
use crate::geometry::{gamma_matrix, GammaMask, HyperplaneId, NodeId, GAMMA_ORDER};

// ---------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------

/// A permutation of {0, …, n−1}, stored as its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Internal("image vector is not a bijection".into()));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// self ∘ other: `other` acts first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }

    /// Orbits of the group generated by the given permutations.
    pub fn orbits(perms: &[Perm], n: usize) -> Vec<Vec<usize>> {
        let mut seen = vec![false; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for p in perms {
                    let j = p.apply(i);
                    if !seen[j] {
                        seen[j] = true;
                        orbit.push(j);
                        queue.push_back(j);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// Disjoint-cycle rendering like `(0 3)(1 4 2)`; fixed points omitted,
    /// identity rendered as `()`.
    pub fn cycle_notation(&self) -> String {
        let mut seen = vec![false; self.len()];
        let mut out = String::new();
        for start in 0..self.len() {
            if seen[start] || self.0[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.0[start];
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Closure of a generating set of permutations under composition.
pub fn generate_group(gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    let n = gens
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::Internal("empty generating set".into()))?;
    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    let id = Perm::identity(n);
    seen.insert(id.clone());
    elements.push(id.clone());
    queue.push_back(id);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                if elements.len() >= cap {
                    return Err(Error::Internal(format!(
                        "permutation group closure exceeded cap {cap}"
                    )));
                }
                elements.push(q.clone());
                queue.push_back(q);
            }
        }
    }
    Ok(elements)
}

// ---------------------------------------------------------------------
// Group elements
// ---------------------------------------------------------------------

/// Canonical form of an integer 5×5 matrix up to scale: content 1, first
/// nonzero entry (row-major) positive.
fn canon_m5(mut m: Vec<BigInt>) -> Vec<BigInt> {
    let mut content = BigInt::zero();
    for e in &m {
        content = content.gcd(e);
    }
    if content.is_zero() {
        return m;
    }
    if m.iter()
        .find(|e| !e.is_zero())
        .map(|e| e.is_negative())
        .unwrap_or(false)
    {
        content = -content;
    }
    for e in &mut m {
        *e /= &content;
    }
    m
}

fn m5_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); 25];
    for i in 0..5 {
        for k in 0..5 {
            let aik = &a[5 * i + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..5 {
                out[5 * i + j] += aik * &b[5 * k + j];
            }
        }
    }
    out
}

fn m5_identity() -> Vec<BigInt> {
    let mut m = vec![BigInt::zero(); 25];
    for i in 0..5 {
        m[6 * i] = BigInt::from(1);
    }
    m
}

/// Adjugate of a 5×5 integer matrix; proportional to the inverse, which is
/// all a projective element needs.
fn m5_adjugate(m: &[BigInt]) -> Vec<BigInt> {
    let minor = |r: usize, c: usize| -> BigInt {
        let rows: Vec<usize> = (0..5).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..5).filter(|&j| j != c).collect();
        det_n(&rows, &cols, m)
    };
    let mut adj = vec![BigInt::zero(); 25];
    for r in 0..5 {
        for c in 0..5 {
            let sign = if (r + c) % 2 == 0 { 1 } else { -1 };
            // adjugate = transpose of cofactor matrix
            adj[5 * c + r] = minor(r, c) * BigInt::from(sign);
        }
    }
    adj
}

/// Determinant of the square submatrix on the given rows and columns,
/// by Laplace expansion on the first row.
fn det_n(rows: &[usize], cols: &[usize], m: &[BigInt]) -> BigInt {
    if rows.len() == 1 {
        return m[5 * rows[0] + cols[0]].clone();
    }
    let mut acc = BigInt::zero();
    for (k, &c) in cols.iter().enumerate() {
        let e = &m[5 * rows[0] + c];
        if e.is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sub = det_n(&rows[1..], &sub_cols, m);
        if k % 2 == 0 {
            acc += e * sub;
        } else {
            acc -= e * sub;
        }
    }
    acc
}

fn gi_mat_adjugate(m: &GiMat) -> GiMat {
    let det3 = |rows: [usize; 3], cols: [usize; 3]| -> Gi {
        let mut acc = Gi::ZERO;
        for (sign, p) in [
            (1, [0, 1, 2]),
            (1, [1, 2, 0]),
            (1, [2, 0, 1]),
            (-1, [0, 2, 1]),
            (-1, [1, 0, 2]),
            (-1, [2, 1, 0]),
        ] {
            let t = m[rows[0]][cols[p[0]]]
                .mul(m[rows[1]][cols[p[1]]])
                .mul(m[rows[2]][cols[p[2]]]);
            acc = if sign == 1 { acc.add(t) } else { acc.sub(t) };
        }
        acc
    };
    let others = |i: usize| -> [usize; 3] {
        let mut v = [0; 3];
        let mut k = 0;
        for j in 0..4 {
            if j != i {
                v[k] = j;
                k += 1;
            }
        }
        v
    };
    let mut adj = [[Gi::ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let cof = det3(others(r), others(c));
            adj[c][r] = if (r + c) % 2 == 0 { cof } else { cof.neg() };
        }
    }
    adj
}

/// A projective symmetry of the family: a coordinate matrix on P³ paired
/// with the induced matrix on the parameter P⁴, both stored canonically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    m3: GiMat,
    m5: Vec<BigInt>,
}

impl GroupElement {
    fn new(m3: GiMat, m5: Vec<BigInt>) -> GroupElement {
        GroupElement {
            m3: gi_mat_canonical(&m3),
            m5: canon_m5(m5),
        }
    }

    pub fn identity() -> GroupElement {
        GroupElement::new(GI_IDENTITY, m5_identity())
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupElement::identity()
    }

    pub fn coordinate_matrix(&self) -> &GiMat {
        &self.m3
    }

    pub fn parameter_matrix(&self) -> &[BigInt] {
        &self.m5
    }

    /// self ∘ other: `other` acts first.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(gi_mat_mul(&self.m3, &other.m3), m5_mul(&self.m5, &other.m5))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(gi_mat_adjugate(&self.m3), m5_adjugate(&self.m5))
    }

    /// The Γ element with the given mask (trivial parameter action).
    pub fn gamma(mask: GammaMask) -> GroupElement {
        let g = gamma_matrix(mask);
        let mut rows = [[(0i64, 0i64); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rows[i][j] = (g[i][j], 0);
            }
        }
        GroupElement::new(gi_mat_from_rows(rows), m5_identity())
    }

    /// Recognizes an element of Γ; `None` when the parameter action is
    /// nontrivial or the coordinate matrix is outside Γ.
    pub fn as_gamma(&self) -> Option<GammaMask> {
        if self.m5 != canon_m5(m5_identity()) {
            return None;
        }
        (0..GAMMA_ORDER as u8).find(|&mask| GroupElement::gamma(mask).m3 == self.m3)
    }

    pub fn acts_trivially_on_parameters(&self) -> bool {
        self.m5 == canon_m5(m5_identity())
    }

    /// Image of a node under the parameter action, as a permutation index.
    fn node_image(&self, i: NodeId) -> Option<usize> {
        let v = i.coords();
        let img: Vec<BigInt> = (0..5)
            .map(|r| {
                (0..5)
                    .map(|c| &self.m5[5 * r + c] * BigInt::from(v[c]))
                    .sum()
            })
            .collect();
        NodeId::all()
            .position(|j| proportional(&img, &j.coords()))
    }

    /// Permutation of the ten nodes induced by the parameter action.
    pub fn action_on_nodes(&self) -> Result<Perm> {
        let images: Vec<usize> = NodeId::all()
            .map(|i| {
                self.node_image(i).ok_or_else(|| {
                    Error::Internal(format!("image of node {i} is not a node"))
                })
            })
            .collect::<Result<_>>()?;
        Perm::from_images(images)
    }

    /// Permutation of the fifteen hyperplanes: H_i ↦ H_j when the form of
    /// H_j pulled back through the parameter matrix is proportional to the
    /// form of H_i.
    pub fn action_on_hyperplanes(&self) -> Result<Perm> {
        let pulled: Vec<Vec<BigInt>> = HyperplaneId::all()
            .map(|h| {
                let f = h.form();
                (0..5)
                    .map(|c| {
                        (0..5)
                            .map(|r| BigInt::from(f[r]) * &self.m5[5 * r + c])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let mut images = vec![usize::MAX; 15];
        for (j, w) in pulled.iter().enumerate() {
            let Some(i) = HyperplaneId::all().position(|h| proportional(w, &h.form())) else {
                return Err(Error::Internal(format!(
                    "pullback of hyperplane {} is not one of the fifteen",
                    HyperplaneId::from_index(j).unwrap().name()
                )));
            };
            images[i] = j;
        }
        Perm::from_images(images)
    }
}

fn proportional(v: &[BigInt], w: &[i64]) -> bool {
    // v ∝ w over Q, both nonzero
    let mut ratio: Option<(BigInt, BigInt)> = None; // (num, den) of v/w
    for (a, &b) in v.iter().zip(w.iter()) {
        let b = BigInt::from(b);
        match (&ratio, a.is_zero(), b.is_zero()) {
            (_, true, true) => {}
            (_, false, true) | (_, true, false) => return false,
            (None, false, false) => ratio = Some((a.clone(), b)),
            (Some((n, d)), false, false) => {
                if a * d != n * &b {
                    return false;
                }
            }
        }
    }
    ratio.is_some()
}

// ---------------------------------------------------------------------
// Generators and closure
// ---------------------------------------------------------------------

/// The five projective generators beyond Γ, indexed 1 through 5.
pub fn phi(k: usize) -> GroupElement {
    let (rows3, rows5): ([[(i64, i64); 4]; 4], [[i64; 5]; 5]) = match k {
        // w ↦ −w; negates B
        1 => (
            [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(1,0),(0,0),(0,0)],
             [(0,0),(0,0),(1,0),(0,0)], [(0,0),(0,0),(0,0),(-1,0)]],
            [[1,0,0,0,0],[0,-1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1]],
        ),
        // z ↔ w; swaps D and E
        2 => (
            [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(1,0),(0,0),(0,0)],
             [(0,0),(0,0),(0,0),(1,0)], [(0,0),(0,0),(1,0),(0,0)]],
            [[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,0,1],[0,0,0,1,0]],
        ),
        // y ↔ z; swaps C and D
        3 => (
            [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(0,0),(1,0),(0,0)],
             [(0,0),(1,0),(0,0),(0,0)], [(0,0),(0,0),(0,0),(1,0)]],
            [[1,0,0,0,0],[0,1,0,0,0],[0,0,0,1,0],[0,0,1,0,0],[0,0,0,0,1]],
        ),
        // (z, w) ↦ (iz, iw); negates B, D, E
        4 => (
            [[(1,0),(0,0),(0,0),(0,0)], [(0,0),(1,0),(0,0),(0,0)],
             [(0,0),(0,0),(0,1),(0,0)], [(0,0),(0,0),(0,0),(0,1)]],
            [[1,0,0,0,0],[0,-1,0,0,0],[0,0,1,0,0],[0,0,0,-1,0],[0,0,0,0,-1]],
        ),
        // the non-monomial generator
        5 => (
            [[(1,0),(-1,0),(0,0),(0,0)], [(1,0),(1,0),(0,0),(0,0)],
             [(0,0),(0,0),(1,0),(-1,0)], [(0,0),(0,0),(1,0),(1,0)]],
            [[2,0,1,0,0],[0,0,0,8,-8],[12,0,-2,0,0],[0,1,0,2,2],[0,-1,0,2,2]],
        ),
        _ => panic!("generator index must be 1..=5"),
    };
    let m5 = rows5
        .iter()
        .flat_map(|r| r.iter().map(|&e| BigInt::from(e)))
        .collect();
    GroupElement::new(gi_mat_from_rows(rows3), m5)
}

/// Γ generators followed by the five φ's.
pub fn standard_generators() -> Vec<GroupElement> {
    let mut gens: Vec<GroupElement> = (0..4).map(|j| GroupElement::gamma(1 << j)).collect();
    gens.extend((1..=5).map(phi));
    gens
}

/// Closure of the standard generators; errors if it exceeds `cap` elements.
pub fn full_group(cap: usize) -> Result<Vec<GroupElement>> {
    let gens = standard_generators();
    let mut seen = HashSet::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    let id = GroupElement::identity();
    seen.insert(id.clone());
    elements.push(id.clone());
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for gen in &gens {
            let h = gen.compose(&g);
            if seen.insert(h.clone()) {
                if elements.len() >= cap {
                    return Err(Error::Internal(format!(
                        "group closure exceeded cap {cap}"
                    )));
                }
                elements.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(elements)
}

// ---------------------------------------------------------------------
// Structure verification
// ---------------------------------------------------------------------

/// Summary invariants of the symmetry group.
#[derive(Clone, Debug)]
pub struct GroupAnalysis {
    pub order: usize,
    /// Size of the kernel of the parameter action; the kernel must be Γ.
    pub kernel_order: usize,
    pub kernel_is_gamma: bool,
    pub gamma_is_normal: bool,
    pub quotient_order: usize,
    /// element order → count, over the quotient by Γ.
    pub quotient_order_statistics: BTreeMap<usize, usize>,
    pub centre_order: usize,
}

impl GroupAnalysis {
    /// The order statistics of the symmetric group on six letters.
    pub fn s6_order_statistics() -> BTreeMap<usize, usize> {
        BTreeMap::from([(1, 1), (2, 75), (3, 80), (4, 180), (5, 144), (6, 240)])
    }

    pub fn quotient_is_s6(&self) -> bool {
        self.quotient_order == 720
            && self.quotient_order_statistics == Self::s6_order_statistics()
    }
}

/// Verifies the group skeleton on an explicit element list.
pub fn analyze_group(elements: &[GroupElement]) -> Result<GroupAnalysis> {
    let order = elements.len();
    let kernel: Vec<&GroupElement> = elements
        .iter()
        .filter(|g| g.acts_trivially_on_parameters())
        .collect();
    let kernel_order = kernel.len();
    let kernel_is_gamma = kernel_order == GAMMA_ORDER
        && kernel.iter().all(|g| g.as_gamma().is_some());

    // Γ ⊲ Ω: conjugating each γ by each generator lands back in Γ
    let gamma_set: HashSet<GroupElement> =
        (0..GAMMA_ORDER as u8).map(GroupElement::gamma).collect();
    let mut gamma_is_normal = true;
    'outer: for gen in standard_generators() {
        let inv = gen.inverse();
        for g in &gamma_set {
            let conj = gen.compose(g).compose(&inv);
            if !gamma_set.contains(&conj) {
                gamma_is_normal = false;
                break 'outer;
            }
        }
    }

    // the quotient is faithfully represented by the parameter matrices
    let mut quotient: HashMap<Vec<BigInt>, usize> = HashMap::new();
    for g in elements {
        *quotient.entry(g.m5.clone()).or_insert(0) += 1;
    }
    let quotient_order = quotient.len();
    if quotient.values().any(|&c| c != kernel_order) {
        return Err(Error::Internal(
            "parameter-action fibres have unequal sizes".into(),
        ));
    }
    let id5 = canon_m5(m5_identity());
    let mut quotient_order_statistics = BTreeMap::new();
    for m in quotient.keys() {
        let mut pow = m.clone();
        let mut k = 1usize;
        while pow != id5 {
            pow = canon_m5(m5_mul(&pow, m));
            k += 1;
            if k > order {
                return Err(Error::Internal("element order runaway".into()));
            }
        }
        *quotient_order_statistics.entry(k).or_insert(0) += 1;
    }

    let gens = standard_generators();
    let centre_order = elements
        .iter()
        .filter(|g| gens.iter().all(|h| g.compose(h) == h.compose(g)))
        .count();

    Ok(GroupAnalysis {
        order,
        kernel_order,
        kernel_is_gamma,
        gamma_is_normal,
        quotient_order,
        quotient_order_statistics,
        centre_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_basics() {
        let p = Perm::from_images(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(p.order(), 3);
        assert_eq!(p.cycle_notation(), "(0 1 2)");
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        let q = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        // compose applies the right factor first
        assert_eq!(p.compose(&q).images(), &[2, 1, 0, 3]);
        assert_eq!(q.compose(&p).images(), &[0, 2, 1, 3]);
    }

    #[test]
    fn generate_symmetric_group_on_four_letters() {
        let s = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        let c = Perm::from_images(vec![1, 2, 3, 0]).unwrap();
        let g = generate_group(&[s, c], 100).unwrap();
        assert_eq!(g.len(), 24);
    }

    #[test]
    fn gamma_elements_and_recognition() {
        for mask in 0..16u8 {
            let g = GroupElement::gamma(mask);
            assert!(g.acts_trivially_on_parameters());
            assert_eq!(g.as_gamma(), Some(mask));
            assert!(g.action_on_nodes().unwrap().is_identity());
            assert!(g.action_on_hyperplanes().unwrap().is_identity());
        }
        assert_eq!(phi(5).as_gamma(), None);
    }

    #[test]
    fn inverse_composes_to_identity() {
        for k in 1..=5 {
            let g = phi(k);
            assert!(g.compose(&g.inverse()).is_identity(), "phi{k}");
            assert!(g.inverse().compose(&g).is_identity(), "phi{k}");
        }
        let mixed = phi(5).compose(&phi(2)).compose(&GroupElement::gamma(7));
        assert!(mixed.compose(&mixed.inverse()).is_identity());
    }

    #[test]
    fn phi1_swaps_odd_hyperplane_signs() {
        let p = phi(1).action_on_hyperplanes().unwrap();
        let idx = |n: &str| HyperplaneId::by_name(n).unwrap().index();
        for k in 0..4 {
            let plus = idx(&format!("p+{k}"));
            let minus = idx(&format!("p-{k}"));
            assert_eq!(p.apply(plus), minus);
            assert_eq!(p.apply(minus), plus);
        }
        for n in ["A", "q+C", "q-C", "q+D", "q-D", "q+E", "q-E"] {
            assert_eq!(p.apply(idx(n)), idx(n));
        }
    }

    #[test]
    fn phi2_node_action() {
        let p = phi(2).action_on_nodes().unwrap();
        assert_eq!(p.cycle_notation(), "(0 1)(6 8)(7 9)");
    }

    #[test]
    fn phi5_hyperplane_action() {
        let p = phi(5).action_on_hyperplanes().unwrap();
        let idx = |n: &str| HyperplaneId::by_name(n).unwrap().index();
        let pairs = [
            ("A", "q+C"),
            ("q+D", "p+0"),
            ("q-D", "p-1"),
            ("q+E", "p-0"),
            ("q-E", "p+1"),
            ("p+2", "p-3"),
        ];
        for (a, b) in pairs {
            assert_eq!(p.apply(idx(a)), idx(b), "{a} -> {b}");
            assert_eq!(p.apply(idx(b)), idx(a), "{b} -> {a}");
        }
        for n in ["q-C", "p-2", "p+3"] {
            assert_eq!(p.apply(idx(n)), idx(n), "{n} fixed");
        }
    }

    #[test]
    fn phi5_squares_into_gamma() {
        let sq = phi(5).compose(&phi(5));
        assert_eq!(sq.as_gamma(), Some(0b1001)); // γ₁γ₄
    }

    #[test]
    fn phi2_conjugates_gamma4_to_gamma3_gamma4() {
        let conj = phi(2)
            .inverse()
            .compose(&GroupElement::gamma(0b1000))
            .compose(&phi(2));
        assert_eq!(conj.as_gamma(), Some(0b1100)); // γ₃γ₄
    }

    #[test]
    fn full_group_order_and_structure() {
        let g = full_group(20000).unwrap();
        assert_eq!(g.len(), 11520);
        let analysis = analyze_group(&g).unwrap();
        assert_eq!(analysis.kernel_order, 16);
        assert!(analysis.kernel_is_gamma);
        assert!(analysis.gamma_is_normal);
        assert_eq!(analysis.quotient_order, 720);
        assert!(analysis.quotient_is_s6());
        assert_eq!(analysis.centre_order, 1);
    }

    #[test]
    fn actions_are_homomorphisms() {
        let a = phi(5);
        let b = phi(3).compose(&phi(2));
        let ab = a.compose(&b);
        assert_eq!(
            ab.action_on_nodes().unwrap(),
            a.action_on_nodes()
                .unwrap()
                .compose(&b.action_on_nodes().unwrap())
        );
        assert_eq!(
            ab.action_on_hyperplanes().unwrap(),
            a.action_on_hyperplanes()
                .unwrap()
                .compose(&b.action_on_hyperplanes().unwrap())
        );
    }
}
