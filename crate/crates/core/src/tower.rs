//! Multiquadratic towers Q(√d_1, …, √d_n) with exact arithmetic.
//!
//! Elements are stored sparsely: a subset S ⊆ {1..n} indexes the basis
//! monomial ∏_{j∈S} √d_j, encoded as a bitmask, and the element is a finite
//! map from bitmasks to rational coordinates. The generators are signed
//! squarefree integers whose square classes are independent over F_2, which
//! makes the 2^n monomials a Q-basis and every nonzero element invertible.
//!
//! Inversion and square root both recurse on the top generator: writing
//! x = u + v√d_n with u, v in the subfield, the norm u² − d_n v² lives one
//! level down, and both operations reduce to subfield instances plus a
//! division. The square root tries both sign branches of every subfield root
//! before giving up, so `tower_sqrt` is a decision procedure for squareness.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, ClassVector, SquareClass};
use crate::error::{Error, Result};

/// The generator list of a tower, shared by all its elements.
#[derive(Debug)]
pub struct TowerDescriptor {
    generators: Vec<BigInt>,
    vectors: Vec<ClassVector>,
}

impl PartialEq for TowerDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}
impl Eq for TowerDescriptor {}

impl TowerDescriptor {
    /// The trivial tower: plain rationals.
    pub fn rationals() -> Arc<TowerDescriptor> {
        Arc::new(TowerDescriptor {
            generators: Vec::new(),
            vectors: Vec::new(),
        })
    }

    /// Builds a tower from the given square classes, which must be
    /// independent.
    pub fn new(classes: &[SquareClass]) -> Result<Arc<TowerDescriptor>> {
        let mut generators = Vec::new();
        let mut vectors: Vec<ClassVector> = Vec::new();
        for c in classes {
            if c.is_trivial() {
                return Err(Error::DependentGenerators("1 is not a generator".into()));
            }
            let value = BigRational::from_integer(c.to_bigint());
            let v = arith::class_vector(&value)?;
            if arith::class_in_span_vectors(&v, &vectors).is_some() {
                return Err(Error::DependentGenerators(format!(
                    "{} lies in the span of earlier generators",
                    c.to_bigint()
                )));
            }
            generators.push(c.to_bigint());
            vectors.push(v);
        }
        Ok(Arc::new(TowerDescriptor {
            generators,
            vectors,
        }))
    }

    /// Builds a tower from arbitrary nonzero values, keeping the earliest
    /// independent subsequence of their square classes. Returns the kept
    /// input indices alongside the tower.
    pub fn from_values(values: &[BigRational]) -> Result<(Arc<TowerDescriptor>, Vec<usize>)> {
        let mut kept = Vec::new();
        let mut classes = Vec::new();
        let mut vectors: Vec<ClassVector> = Vec::new();
        for (i, value) in values.iter().enumerate() {
            let class = arith::squarefree_part(value)?;
            if class.is_trivial() {
                continue;
            }
            let v = arith::class_vector(value)?;
            if arith::class_in_span_vectors(&v, &vectors).is_some() {
                continue;
            }
            kept.push(i);
            vectors.push(v);
            classes.push(class);
        }
        Ok((TowerDescriptor::new(&classes)?, kept))
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[BigInt] {
        &self.generators
    }

    fn generator_rational(&self, j: usize) -> BigRational {
        BigRational::from_integer(self.generators[j].clone())
    }

    /// Expresses the class of `r` over the generator classes, as a bitmask.
    fn span_mask(&self, r: &BigRational) -> Result<Option<u32>> {
        let v = arith::class_vector(r)?;
        Ok(arith::class_in_span_vectors(&v, &self.vectors).map(|s| {
            let mut mask = 0u32;
            for j in s {
                mask |= 1 << j;
            }
            mask
        }))
    }
}

type Coords = BTreeMap<u32, BigRational>;

/// An element of a multiquadratic tower.
#[derive(Clone)]
pub struct TowerElement {
    desc: Arc<TowerDescriptor>,
    coords: Coords,
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_tower(other) && self.coords == other.coords
    }
}
impl Eq for TowerElement {}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TowerElement({})", self.render())
    }
}

// ---- raw coordinate-map arithmetic, recursing on the generator slice ----

fn raw_insert(acc: &mut Coords, mask: u32, value: BigRational) {
    if value.is_zero() {
        return;
    }
    match acc.entry(mask) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get() + value;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

fn raw_add(a: &Coords, b: &Coords) -> Coords {
    let mut out = a.clone();
    for (m, c) in b {
        raw_insert(&mut out, *m, c.clone());
    }
    out
}

fn raw_neg(a: &Coords) -> Coords {
    a.iter().map(|(m, c)| (*m, -c)).collect()
}

fn raw_scale(a: &Coords, s: &BigRational) -> Coords {
    if s.is_zero() {
        return Coords::new();
    }
    a.iter().map(|(m, c)| (*m, c * s)).collect()
}

fn raw_mul(gens: &[BigInt], a: &Coords, b: &Coords) -> Coords {
    let mut out = Coords::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let overlap = ma & mb;
            let mut coeff = ca * cb;
            let mut bits = overlap;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                coeff *= BigRational::from_integer(gens[j].clone());
                bits &= bits - 1;
            }
            raw_insert(&mut out, ma ^ mb, coeff);
        }
    }
    out
}

/// Splits off the top generator: x = u + v√d_top.
fn raw_split(top_bit: u32, a: &Coords) -> (Coords, Coords) {
    let mut u = Coords::new();
    let mut v = Coords::new();
    for (m, c) in a {
        if m & top_bit == 0 {
            u.insert(*m, c.clone());
        } else {
            v.insert(m ^ top_bit, c.clone());
        }
    }
    (u, v)
}

fn raw_join(top_bit: u32, u: Coords, v: &Coords) -> Coords {
    let mut out = u;
    for (m, c) in v {
        out.insert(m | top_bit, c.clone());
    }
    out
}

/// Multiplicative inverse; `None` exactly when the element is zero.
fn raw_inv(gens: &[BigInt], a: &Coords) -> Option<Coords> {
    if a.is_empty() {
        return None;
    }
    if gens.is_empty() {
        let c = a.get(&0).expect("rank-0 element");
        return Some([(0u32, c.recip())].into_iter().collect());
    }
    let top = gens.len() - 1;
    let top_bit = 1u32 << top;
    let sub = &gens[..top];
    let (u, v) = raw_split(top_bit, a);
    if v.is_empty() {
        return Some(raw_join(top_bit, raw_inv(sub, &u)?, &Coords::new()));
    }
    if u.is_empty() {
        // (v√d)^{-1} = v^{-1} d^{-1} √d
        let d = BigRational::from_integer(gens[top].clone());
        let vi = raw_inv(sub, &v)?;
        return Some(raw_join(top_bit, Coords::new(), &raw_scale(&vi, &d.recip())));
    }
    let d = BigRational::from_integer(gens[top].clone());
    let norm = raw_add(
        &raw_mul(sub, &u, &u),
        &raw_scale(&raw_mul(sub, &v, &v), &(-d)),
    );
    // independence of the generators keeps the norm nonzero for nonzero x
    let ninv = raw_inv(sub, &norm).expect("norm of a nonzero tower element vanished");
    let u_part = raw_mul(sub, &u, &ninv);
    let v_part = raw_scale(&raw_mul(sub, &v, &ninv), &-BigRational::one());
    Some(raw_join(top_bit, u_part, &v_part))
}

/// In-tower square root; `None` when the element is not a square here.
fn raw_sqrt(gens: &[BigInt], a: &Coords) -> Option<Coords> {
    if a.is_empty() {
        return Some(Coords::new());
    }
    if gens.is_empty() {
        let c = a.get(&0).expect("rank-0 element");
        let r = arith::rational_sqrt_exact(c)?;
        return Some([(0u32, r)].into_iter().collect());
    }
    let top = gens.len() - 1;
    let top_bit = 1u32 << top;
    let sub = &gens[..top];
    let d = BigRational::from_integer(gens[top].clone());
    let (u, v) = raw_split(top_bit, a);
    if v.is_empty() {
        // either √u lives below, or √(u/d)·√d does
        if let Some(s) = raw_sqrt(sub, &u) {
            return Some(raw_join(top_bit, s, &Coords::new()));
        }
        let scaled = raw_scale(&u, &d.recip());
        if let Some(b) = raw_sqrt(sub, &scaled) {
            return Some(raw_join(top_bit, Coords::new(), &b));
        }
        return None;
    }
    // s = a' + b'√d with 2a'b' = v and a'² + b'²d = u forces
    // a'² = (u ± √(u² − dv²))/2.
    let norm = raw_add(
        &raw_mul(sub, &u, &u),
        &raw_scale(&raw_mul(sub, &v, &v), &(-d.clone())),
    );
    let m = raw_sqrt(sub, &norm)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for m_signed in [m.clone(), raw_neg(&m)] {
        let cand = raw_scale(&raw_add(&u, &m_signed), &half);
        if cand.is_empty() {
            continue;
        }
        if let Some(a_root) = raw_sqrt(sub, &cand) {
            let two_a = raw_scale(&a_root, &BigRational::from_integer(BigInt::from(2)));
            let inv2a = raw_inv(sub, &two_a).expect("nonzero by construction");
            let b_root = raw_mul(sub, &v, &inv2a);
            return Some(raw_join(top_bit, a_root, &b_root));
        }
    }
    None
}

impl TowerElement {
    pub fn zero(desc: &Arc<TowerDescriptor>) -> TowerElement {
        TowerElement {
            desc: desc.clone(),
            coords: Coords::new(),
        }
    }

    pub fn one(desc: &Arc<TowerDescriptor>) -> TowerElement {
        TowerElement::from_rational(desc, BigRational::one())
    }

    pub fn from_rational(desc: &Arc<TowerDescriptor>, q: BigRational) -> TowerElement {
        let mut coords = Coords::new();
        if !q.is_zero() {
            coords.insert(0, q);
        }
        TowerElement {
            desc: desc.clone(),
            coords,
        }
    }

    pub fn from_int(desc: &Arc<TowerDescriptor>, n: i64) -> TowerElement {
        TowerElement::from_rational(desc, arith::big_rational_from_i64(n))
    }

    /// The basis monomial `q·∏_{j∈mask} √d_j`.
    pub fn monomial(desc: &Arc<TowerDescriptor>, mask: u32, q: BigRational) -> Result<TowerElement> {
        if mask >= (1u32 << desc.rank()) {
            return Err(Error::Internal(format!(
                "monomial mask {mask:#b} outside tower of rank {}",
                desc.rank()
            )));
        }
        let mut coords = Coords::new();
        if !q.is_zero() {
            coords.insert(mask, q);
        }
        Ok(TowerElement {
            desc: desc.clone(),
            coords,
        })
    }

    pub fn descriptor(&self) -> &Arc<TowerDescriptor> {
        &self.desc
    }

    pub fn coords(&self) -> &BTreeMap<u32, BigRational> {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Rational value when the element has no radical part.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords.is_empty() {
            return Some(BigRational::zero());
        }
        if self.coords.len() == 1 {
            if let Some(c) = self.coords.get(&0) {
                return Some(c.clone());
            }
        }
        None
    }

    fn same_tower(&self, other: &TowerElement) -> bool {
        Arc::ptr_eq(&self.desc, &other.desc) || self.desc == other.desc
    }

    fn check_tower(&self, other: &TowerElement) -> Result<()> {
        if self.same_tower(other) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch)
        }
    }

    pub fn add(&self, other: &TowerElement) -> Result<TowerElement> {
        self.check_tower(other)?;
        Ok(TowerElement {
            desc: self.desc.clone(),
            coords: raw_add(&self.coords, &other.coords),
        })
    }

    pub fn sub(&self, other: &TowerElement) -> Result<TowerElement> {
        self.check_tower(other)?;
        Ok(TowerElement {
            desc: self.desc.clone(),
            coords: raw_add(&self.coords, &raw_neg(&other.coords)),
        })
    }

    pub fn neg(&self) -> TowerElement {
        TowerElement {
            desc: self.desc.clone(),
            coords: raw_neg(&self.coords),
        }
    }

    pub fn mul(&self, other: &TowerElement) -> Result<TowerElement> {
        self.check_tower(other)?;
        Ok(TowerElement {
            desc: self.desc.clone(),
            coords: raw_mul(&self.desc.generators, &self.coords, &other.coords),
        })
    }

    pub fn scale(&self, s: &BigRational) -> TowerElement {
        TowerElement {
            desc: self.desc.clone(),
            coords: raw_scale(&self.coords, s),
        }
    }

    /// Norm-descent inversion.
    pub fn invert(&self) -> Result<TowerElement> {
        match raw_inv(&self.desc.generators, &self.coords) {
            Some(coords) => Ok(TowerElement {
                desc: self.desc.clone(),
                coords,
            }),
            None => Err(Error::ZeroInput),
        }
    }

    pub fn div(&self, other: &TowerElement) -> Result<TowerElement> {
        self.mul(&other.invert()?)
    }

    /// The automorphism sending √d_j to signs[j]·√d_j.
    pub fn apply_sign_automorphism(&self, signs: &[i8]) -> Result<TowerElement> {
        if signs.len() != self.desc.rank() {
            return Err(Error::ArityMismatch {
                expected: self.desc.rank(),
                got: signs.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .map(|(m, c)| {
                let mut flip = false;
                let mut bits = *m;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    if signs[j] < 0 {
                        flip = !flip;
                    }
                    bits &= bits - 1;
                }
                (*m, if flip { -c } else { c.clone() })
            })
            .collect();
        Ok(TowerElement {
            desc: self.desc.clone(),
            coords,
        })
    }

    /// Some square root of the element inside its own tower, or `None` when
    /// no such root exists.
    pub fn tower_sqrt(&self) -> Option<TowerElement> {
        raw_sqrt(&self.desc.generators, &self.coords).map(|coords| TowerElement {
            desc: self.desc.clone(),
            coords,
        })
    }

    /// √r as a tower element when the class of r is spanned by the
    /// generators: the result is q·∏_{j∈S} √d_j with q rational and q > 0.
    pub fn embed_rational_sqrt(
        r: &BigRational,
        desc: &Arc<TowerDescriptor>,
    ) -> Result<Option<TowerElement>> {
        if r.is_zero() {
            return Err(Error::ZeroInput);
        }
        let Some(mask) = desc.span_mask(r)? else {
            return Ok(None);
        };
        let mut ratio = r.clone();
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            ratio /= desc.generator_rational(j);
            bits &= bits - 1;
        }
        let q = arith::rational_sqrt_exact(&ratio).ok_or_else(|| {
            Error::Internal("class arithmetic produced a non-square ratio".into())
        })?;
        Ok(Some(TowerElement::monomial(desc, mask, q)?))
    }

    /// Rewrites the element over a larger tower whose generators span this
    /// one's. Each source generator embeds as a canonical positive monomial,
    /// so the map is a fixed field embedding.
    pub fn embed_into(&self, target: &Arc<TowerDescriptor>) -> Result<TowerElement> {
        if self.desc == *target {
            return Ok(TowerElement {
                desc: target.clone(),
                coords: self.coords.clone(),
            });
        }
        let mut images = Vec::with_capacity(self.desc.rank());
        for d in self.desc.generators() {
            let r = BigRational::from_integer(d.clone());
            let img = TowerElement::embed_rational_sqrt(&r, target)?.ok_or_else(|| {
                Error::TowerInsufficient(format!("generator {d} does not embed"))
            })?;
            images.push(img);
        }
        let mut out = TowerElement::zero(target);
        for (m, c) in &self.coords {
            let mut term = TowerElement::from_rational(target, c.clone());
            let mut bits = *m;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                term = term.mul(&images[j])?;
                bits &= bits - 1;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Human-readable rendering like `1/2 + 3·√2·√-7`.
    pub fn render(&self) -> String {
        render_coords(&self.desc, &self.coords)
    }
}

/// √r inside the tower, erroring with the missing class when the tower
/// cannot express it. √0 is 0.
pub fn sqrt_rational(desc: &Arc<TowerDescriptor>, r: &BigRational) -> Result<TowerElement> {
    if r.is_zero() {
        return Ok(TowerElement::zero(desc));
    }
    TowerElement::embed_rational_sqrt(r, desc)?.ok_or_else(|| {
        Error::TowerInsufficient(format!(
            "the square class of {r} is outside the span of the tower generators"
        ))
    })
}

fn render_coords(desc: &Arc<TowerDescriptor>, coords: &BTreeMap<u32, BigRational>) -> String {
    if coords.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (m, c) in coords {
        let mut s = c.to_string();
        let mut bits = *m;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            s.push_str(&format!("·√{}", desc.generators[j]));
            bits &= bits - 1;
        }
        parts.push(s);
    }
    parts.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        arith::big_rational_from_i64(n)
    }

    fn desc(gens: &[i64]) -> Arc<TowerDescriptor> {
        let classes: Vec<SquareClass> = gens
            .iter()
            .map(|&g| arith::squarefree_part(&q(g)).unwrap())
            .collect();
        TowerDescriptor::new(&classes).unwrap()
    }

    #[test]
    fn rejects_dependent_generators() {
        let classes: Vec<SquareClass> = [2i64, 3, 6]
            .iter()
            .map(|&g| arith::squarefree_part(&q(g)).unwrap())
            .collect();
        assert!(matches!(
            TowerDescriptor::new(&classes),
            Err(Error::DependentGenerators(_))
        ));
    }

    #[test]
    fn conjugate_product_in_sqrt2() {
        let d = desc(&[2]);
        let one = TowerElement::one(&d);
        let root = TowerElement::monomial(&d, 1, BigRational::one()).unwrap();
        let a = one.add(&root).unwrap(); // 1 + √2
        let b = one.sub(&root).unwrap(); // 1 − √2
        let p = a.mul(&b).unwrap();
        assert_eq!(p.as_rational(), Some(q(-1)));
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        let d = desc(&[2]);
        let a = TowerElement::one(&d)
            .add(&TowerElement::monomial(&d, 1, BigRational::one()).unwrap())
            .unwrap();
        let inv = a.invert().unwrap();
        // (1+√2)^{-1} = −1+√2
        let expected = TowerElement::from_int(&d, -1)
            .add(&TowerElement::monomial(&d, 1, BigRational::one()).unwrap())
            .unwrap();
        assert_eq!(inv, expected);
        assert_eq!(a.mul(&inv).unwrap(), TowerElement::one(&d));
    }

    #[test]
    fn sqrt_of_three_plus_two_sqrt2() {
        let d = desc(&[2]);
        let x = TowerElement::from_int(&d, 3)
            .add(&TowerElement::monomial(&d, 1, q(2)).unwrap())
            .unwrap();
        let s = x.tower_sqrt().expect("3+2√2 is a square");
        assert_eq!(s.mul(&s).unwrap(), x);
    }

    #[test]
    fn sqrt_of_plain_generator() {
        let d = desc(&[2, 3]);
        let six = TowerElement::from_int(&d, 6);
        let s = six.tower_sqrt().expect("6 is a square in Q(√2,√3)");
        assert_eq!(s.mul(&s).unwrap(), six);
        // √6 = √2·√3 is the monomial with mask 0b11
        assert_eq!(s.coords().len(), 1);
        assert!(s.coords().contains_key(&0b11));
    }

    #[test]
    fn sqrt_absent() {
        let d = desc(&[2]);
        assert!(TowerElement::from_int(&d, 3).tower_sqrt().is_none());
        assert!(TowerElement::from_int(&d, -2).tower_sqrt().is_none());
    }

    #[test]
    fn sign_automorphism_multiplicativity_and_fixed_product() {
        let d = desc(&[2, 3]);
        // √2·√3 is fixed by the automorphism flipping both roots
        let m = TowerElement::monomial(&d, 0b11, BigRational::one()).unwrap();
        assert_eq!(m.apply_sign_automorphism(&[-1, -1]).unwrap(), m);
        let flipped = m.apply_sign_automorphism(&[-1, 1]).unwrap();
        assert_eq!(flipped, m.neg());
    }

    #[test]
    fn embed_rational_sqrt_with_cofactor() {
        let d = desc(&[2]);
        let e = TowerElement::embed_rational_sqrt(&q(8), &d).unwrap().unwrap();
        // √8 = 2√2
        assert_eq!(e, TowerElement::monomial(&d, 1, q(2)).unwrap());
        assert!(TowerElement::embed_rational_sqrt(&q(3), &d)
            .unwrap()
            .is_none());
    }

    #[test]
    fn embedding_into_a_larger_tower() {
        let small = desc(&[6]);
        let big = desc(&[2, 3]);
        let x = TowerElement::from_int(&small, 5)
            .add(&TowerElement::monomial(&small, 1, q(7)).unwrap())
            .unwrap(); // 5 + 7√6
        let y = x.embed_into(&big).unwrap();
        let expected = TowerElement::from_int(&big, 5)
            .add(&TowerElement::monomial(&big, 0b11, q(7)).unwrap())
            .unwrap();
        assert_eq!(y, expected);
    }

    #[test]
    fn descriptor_mismatch_detected() {
        let a = TowerElement::one(&desc(&[2]));
        let b = TowerElement::one(&desc(&[3]));
        assert!(matches!(a.mul(&b), Err(Error::DescriptorMismatch)));
    }

    #[test]
    fn from_values_keeps_earliest_basis() {
        let (d, kept) =
            TowerDescriptor::from_values(&[q(4), q(2), q(18), q(3), q(6)]).unwrap();
        // 4 is a square, 18 ~ 2, 6 ~ 2·3
        assert_eq!(kept, vec![1, 3]);
        assert_eq!(d.generators(), &[BigInt::from(2), BigInt::from(3)]);
    }
}
