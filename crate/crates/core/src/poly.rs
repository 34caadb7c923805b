//! Sparse multivariate polynomials over a pluggable coefficient field.
//!
//! Everything downstream works over one of three coefficient fields: the
//! rationals, a multiquadratic tower, or machine complex numbers for the
//! numeric continuation. The `Field` trait is the ring-object pattern: a
//! field value carries whatever context its elements need (the tower
//! descriptor, say) and the polynomial stores one alongside its terms.
//!
//! Monomials live in at most [`MAX_VARS`] variables and are ordered by
//! graded lex, so leading-term division is compatible with multiplication
//! and `exact_divide` terminates on genuine factors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::tower::{TowerDescriptor, TowerElement};

/// Upper bound on the number of variables; 4 for ambient coordinates plus
/// one spare for the parameter space of the family.
pub const MAX_VARS: usize = 5;

/// Coefficient field interface.
pub trait Field: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.invert(b)?))
    }
}

/// The rational numbers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: i64) -> BigRational {
        arith::big_rational_from_i64(n)
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn invert(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::ZeroInput)
        } else {
            Ok(a.recip())
        }
    }
}

/// A multiquadratic tower as a coefficient field.
#[derive(Clone, Debug)]
pub struct TowerField(pub Arc<TowerDescriptor>);

impl PartialEq for TowerField {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Field for TowerField {
    type Elem = TowerElement;

    fn zero(&self) -> TowerElement {
        TowerElement::zero(&self.0)
    }
    fn one(&self) -> TowerElement {
        TowerElement::one(&self.0)
    }
    fn from_int(&self, n: i64) -> TowerElement {
        TowerElement::from_int(&self.0, n)
    }
    fn is_zero(&self, a: &TowerElement) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.add(b).expect("tower mismatch in polynomial arithmetic")
    }
    fn sub(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.sub(b).expect("tower mismatch in polynomial arithmetic")
    }
    fn neg(&self, a: &TowerElement) -> TowerElement {
        a.neg()
    }
    fn mul(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.mul(b).expect("tower mismatch in polynomial arithmetic")
    }
    fn invert(&self, a: &TowerElement) -> Result<TowerElement> {
        a.invert()
    }
}

/// Machine complex numbers, for numeric continuation only. `is_zero` tests
/// exact zero, so term pruning never hides a small coefficient.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct Complexes;

impl Field for Complexes {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(&self, n: i64) -> Complex64 {
        Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self, a: &Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }
    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }
    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }
    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
    fn invert(&self, a: &Complex64) -> Result<Complex64> {
        if self.is_zero(a) {
            Err(Error::ZeroInput)
        } else {
            Ok(a.inv())
        }
    }
}

/// Exponent vector in graded lex order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub [u8; MAX_VARS]);

impl Mono {
    pub fn unit() -> Mono {
        Mono([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Mono {
        let mut e = [0u8; MAX_VARS];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.0[i] + other.0[i];
        }
        Mono(e)
    }

    /// Componentwise quotient; `None` if any exponent would go negative.
    pub fn try_div(&self, other: &Mono) -> Option<Mono> {
        let mut e = [0u8; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(Mono(e))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with coefficients in `F`.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<F: Field> {
    field: F,
    nvars: usize,
    terms: BTreeMap<Mono, F::Elem>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(field: F, nvars: usize) -> MultiPoly<F> {
        assert!(nvars <= MAX_VARS);
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: F, nvars: usize, c: F::Elem) -> MultiPoly<F> {
        let mut p = MultiPoly::zero(field, nvars);
        p.add_term(Mono::unit(), c);
        p
    }

    pub fn variable(field: F, nvars: usize, i: usize) -> MultiPoly<F> {
        assert!(i < nvars);
        let one = field.one();
        let mut p = MultiPoly::zero(field, nvars);
        p.add_term(Mono::var(i), one);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs with integer
    /// coefficients; exponent slices shorter than `MAX_VARS` are padded.
    pub fn from_integer_terms(field: F, nvars: usize, terms: &[(&[u8], i64)]) -> MultiPoly<F> {
        let mut p = MultiPoly::zero(field.clone(), nvars);
        for (exps, c) in terms {
            let mut e = [0u8; MAX_VARS];
            e[..exps.len()].copy_from_slice(exps);
            p.add_term(Mono(e), field.from_int(*c));
        }
        p
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Mono) -> F::Elem {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Mono, &F::Elem)> {
        self.terms.iter().next_back()
    }

    /// Adds `c·mono` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, mono: Mono, c: F::Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = self.field.add(e.get(), &c);
                if self.field.is_zero(&sum) {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly<F>) -> MultiPoly<F> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly<F>) -> MultiPoly<F> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, self.field.neg(c));
        }
        out
    }

    pub fn neg(&self) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(self.field.clone(), self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(*m, self.field.neg(c));
        }
        out
    }

    pub fn scale(&self, s: &F::Elem) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(self.field.clone(), self.nvars);
        for (m, c) in &self.terms {
            out.add_term(*m, self.field.mul(c, s));
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly<F>) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(self.field.clone(), self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly<F> {
        let mut out = MultiPoly::constant(self.field.clone(), self.nvars, self.field.one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn evaluate(&self, point: &[F::Elem]) -> F::Elem {
        assert!(point.len() >= self.nvars);
        // cache powers of each coordinate up to the needed degree
        let mut powers: Vec<Vec<F::Elem>> = point
            .iter()
            .take(self.nvars)
            .map(|x| vec![self.field.one(), x.clone()])
            .collect();
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, pw) in powers.iter_mut().enumerate().take(self.nvars) {
                let e = m.0[i] as usize;
                while pw.len() <= e {
                    let next = self.field.mul(&pw[pw.len() - 1], &pw[1]);
                    pw.push(next);
                }
                if e > 0 {
                    term = self.field.mul(&term, &pw[e]);
                }
            }
            acc = self.field.add(&acc, &term);
        }
        acc
    }

    /// Substitutes `images[i]` for variable `i`. All images must share a
    /// variable count, which becomes the result's.
    pub fn substitute(&self, images: &[MultiPoly<F>]) -> MultiPoly<F> {
        assert!(images.len() >= self.nvars);
        let out_vars = images.first().map_or(self.nvars, |p| p.nvars);
        let one = MultiPoly::constant(self.field.clone(), out_vars, self.field.one());
        // cache powers of each image
        let mut powers: Vec<Vec<MultiPoly<F>>> =
            images.iter().map(|p| vec![one.clone(), p.clone()]).collect();
        let mut acc = MultiPoly::zero(self.field.clone(), out_vars);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(self.field.clone(), out_vars, c.clone());
            for (i, pw) in powers.iter_mut().enumerate().take(self.nvars) {
                let e = m.0[i] as usize;
                while pw.len() <= e {
                    let next = pw[pw.len() - 1].mul(&pw[1]);
                    pw.push(next);
                }
                if e > 0 {
                    term = term.mul(&pw[e]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Applies the linear change of coordinates x_i ↦ Σ_j m[i][j]·x_j.
    pub fn act_linear(&self, m: &[Vec<F::Elem>]) -> MultiPoly<F> {
        assert!(m.len() >= self.nvars);
        let images: Vec<MultiPoly<F>> = m
            .iter()
            .map(|row| {
                let mut p = MultiPoly::zero(self.field.clone(), self.nvars);
                for (j, c) in row.iter().enumerate() {
                    p.add_term(Mono::var(j), c.clone());
                }
                p
            })
            .collect();
        self.substitute(&images)
    }

    pub fn partial_derivative(&self, i: usize) -> MultiPoly<F> {
        let mut out = MultiPoly::zero(self.field.clone(), self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut lowered = *m;
            lowered.0[i] -= 1;
            out.add_term(lowered, self.field.mul(c, &self.field.from_int(e as i64)));
        }
        out
    }

    /// Eliminates the highest-index variable with a nonzero coefficient in
    /// the linear form `plane`, substituting the solved expression into
    /// `self`. Returns the restricted polynomial and the eliminated index.
    pub fn restrict_to_plane(&self, plane: &[F::Elem]) -> Result<(MultiPoly<F>, usize)> {
        let pivot = (0..plane.len())
            .rev()
            .find(|&i| !self.field.is_zero(&plane[i]))
            .ok_or(Error::ZeroObject("plane"))?;
        let pivot_inv = self.field.invert(&plane[pivot])?;
        let mut images = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            if i == pivot {
                // x_pivot = −(Σ_{j≠pivot} plane_j x_j)/plane_pivot
                let mut p = MultiPoly::zero(self.field.clone(), self.nvars);
                for (j, c) in plane.iter().enumerate().take(self.nvars) {
                    if j == pivot {
                        continue;
                    }
                    let coeff = self.field.neg(&self.field.mul(c, &pivot_inv));
                    p.add_term(Mono::var(j), coeff);
                }
                images.push(p);
            } else {
                images.push(MultiPoly::variable(self.field.clone(), self.nvars, i));
            }
        }
        Ok((self.substitute(&images), pivot))
    }

    /// Restricts to the line s·p + t·q, producing a binary form in (s, t).
    pub fn restrict_to_line(&self, p: &[F::Elem], q: &[F::Elem]) -> MultiPoly<F> {
        let images: Vec<MultiPoly<F>> = (0..self.nvars)
            .map(|i| {
                let mut l = MultiPoly::zero(self.field.clone(), 2);
                l.add_term(Mono::var(0), p[i].clone());
                l.add_term(Mono::var(1), q[i].clone());
                l
            })
            .collect();
        self.substitute(&images)
    }

    /// Quotient when `divisor` divides exactly; errors on any remainder.
    pub fn exact_divide(&self, divisor: &MultiPoly<F>) -> Result<MultiPoly<F>> {
        let (dm, dc) = divisor.leading().ok_or(Error::ZeroInput)?;
        let dc_inv = self.field.invert(dc)?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.field.clone(), self.nvars);
        while let Some((rm, rc)) = rem.leading() {
            let Some(qm) = rm.try_div(dm) else {
                return Err(Error::Internal(format!(
                    "exact division left remainder of degree {}",
                    rem.total_degree()
                )));
            };
            let qc = self.field.mul(rc, &dc_inv);
            quot.add_term(qm, qc.clone());
            let mut piece = MultiPoly::zero(self.field.clone(), self.nvars);
            piece.add_term(qm, qc);
            rem = rem.sub(&piece.mul(divisor));
        }
        Ok(quot)
    }

    /// Rewrites over another field through a coefficient map.
    pub fn map_coeffs<G: Field>(
        &self,
        field: G,
        f: impl Fn(&F::Elem) -> G::Elem,
    ) -> MultiPoly<G> {
        let mut out = MultiPoly::zero(field, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Renders with the given variable names, leading term first.
    pub fn render(&self, names: &[&str]) -> String
    where
        F::Elem: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let mut s = format!("({c})");
            for i in 0..self.nvars {
                match m.0[i] {
                    0 => {}
                    1 => s.push_str(&format!("·{}", names[i])),
                    e => s.push_str(&format!("·{}^{}", names[i], e)),
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl MultiPoly<Rationals> {
    /// Clears denominators and divides by the integer content, negating so
    /// the leading coefficient is positive. Zero maps to an empty list.
    pub fn primitive_integer_terms(&self) -> Vec<(Mono, BigInt)> {
        if self.terms.is_empty() {
            return Vec::new();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut ints: Vec<(Mono, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.numer() * (&lcm / c.denom())))
            .collect();
        let mut content = BigInt::zero();
        for (_, c) in &ints {
            content = content.gcd(c);
        }
        if ints.last().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            content = -content;
        }
        for (_, c) in &mut ints {
            *c /= &content;
        }
        ints
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = c.to_f64().expect("rational out of f64 range");
            for (i, &x) in point.iter().enumerate().take(self.nvars) {
                term *= x.powi(m.0[i] as i32);
            }
            acc += term;
        }
        acc
    }

    pub fn evaluate_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut term = Complex64::new(c.to_f64().expect("rational out of f64 range"), 0.0);
            for (i, &x) in point.iter().enumerate().take(self.nvars) {
                term *= x.powu(m.0[i] as u32);
            }
            acc += term;
        }
        acc
    }

    pub fn to_complex(&self) -> MultiPoly<Complexes> {
        self.map_coeffs(Complexes, |c| {
            Complex64::new(c.to_f64().expect("rational out of f64 range"), 0.0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        arith::big_rational_from_i64(n)
    }

    fn qq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn grlex_ordering() {
        let x4 = Mono([4, 0, 0, 0, 0]);
        let y4 = Mono([0, 4, 0, 0, 0]);
        let x2y2 = Mono([2, 2, 0, 0, 0]);
        let x3 = Mono([3, 0, 0, 0, 0]);
        assert!(x4 > y4);
        assert!(x4 > x2y2);
        assert!(x2y2 > y4);
        assert!(x3 < y4); // degree dominates
    }

    #[test]
    fn product_and_evaluation() {
        // (x + y)(x − y) = x² − y²
        let sum = MultiPoly::from_integer_terms(Rationals, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let diff = MultiPoly::from_integer_terms(Rationals, 2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        let prod = sum.mul(&diff);
        let expect = MultiPoly::from_integer_terms(Rationals, 2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        assert_eq!(prod, expect);
        assert_eq!(prod.evaluate(&[q(5), q(3)]), q(16));
    }

    #[test]
    fn linear_action_swap() {
        // x² − y² under (x,y) ↦ (y,x) becomes y² − x²
        let p = MultiPoly::from_integer_terms(Rationals, 2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(p.act_linear(&m), p.neg());
    }

    #[test]
    fn exact_division_recovers_factor() {
        let a = MultiPoly::from_integer_terms(
            Rationals,
            3,
            &[(&[1, 0, 0], 2), (&[0, 1, 0], -3), (&[0, 0, 1], 1)],
        );
        let b = MultiPoly::from_integer_terms(
            Rationals,
            3,
            &[(&[2, 0, 0], 1), (&[0, 1, 1], 5), (&[0, 0, 0], -7)],
        );
        let prod = a.mul(&b);
        assert_eq!(prod.exact_divide(&a).unwrap(), b);
        assert_eq!(prod.exact_divide(&b).unwrap(), a);
        let off = prod.add(&MultiPoly::constant(Rationals, 3, q(1)));
        assert!(off.exact_divide(&a).is_err());
    }

    #[test]
    fn plane_restriction_eliminates_pivot() {
        // restrict x² + y² + z² to the plane x + 2y + 3z = 0 (pivot z)
        let p = MultiPoly::from_integer_terms(
            Rationals,
            3,
            &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)],
        );
        let (r, pivot) = p.restrict_to_plane(&[q(1), q(2), q(3)]).unwrap();
        assert_eq!(pivot, 2);
        // z = −(x + 2y)/3, so the restriction is x² + y² + (x+2y)²/9
        let expect = MultiPoly::from_integer_terms(Rationals, 3, &[])
            .add(&MultiPoly::from_integer_terms(
                Rationals,
                3,
                &[(&[2, 0, 0], 1), (&[0, 2, 0], 1)],
            ))
            .add(
                &MultiPoly::from_integer_terms(
                    Rationals,
                    3,
                    &[(&[2, 0, 0], 1), (&[1, 1, 0], 4), (&[0, 2, 0], 4)],
                )
                .scale(&qq(1, 9)),
            );
        assert_eq!(r, expect);
        // every surviving monomial avoids the pivot variable
        assert!(r.terms().all(|(m, _)| m.0[2] == 0));
    }

    #[test]
    fn line_restriction_gives_binary_form() {
        // x·y on the line s(1,0) + t(1,1) is s·t + t²
        let p = MultiPoly::from_integer_terms(Rationals, 2, &[(&[1, 1], 1)]);
        let b = p.restrict_to_line(&[q(1), q(0)], &[q(1), q(1)]);
        let expect = MultiPoly::from_integer_terms(Rationals, 2, &[(&[1, 1], 1), (&[0, 2], 1)]);
        assert_eq!(b, expect);
    }

    #[test]
    fn primitive_form_normalizes_scale_and_sign() {
        let p = MultiPoly::from_integer_terms(Rationals, 2, &[(&[2, 0], -4), (&[0, 1], 6)])
            .scale(&qq(1, 10));
        let ints = p.primitive_integer_terms();
        // leading term is x², normalized positive: [3·y... ] wait, grlex puts x² last
        assert_eq!(
            ints,
            vec![
                (Mono([0, 1, 0, 0, 0]), BigInt::from(-3)),
                (Mono([2, 0, 0, 0, 0]), BigInt::from(2)),
            ]
        );
    }

    #[test]
    fn derivative_rule() {
        let p = MultiPoly::from_integer_terms(Rationals, 2, &[(&[3, 1], 2)]);
        let dx = p.partial_derivative(0);
        assert_eq!(
            dx,
            MultiPoly::from_integer_terms(Rationals, 2, &[(&[2, 1], 6)])
        );
    }

    #[test]
    fn tower_coefficients_work() {
        let desc = TowerDescriptor::from_values(&[q(2)]).unwrap().0;
        let f = TowerField(desc.clone());
        let root = TowerElement::monomial(&desc, 1, BigRational::one()).unwrap();
        // (x + √2)(x − √2) = x² − 2
        let mut a = MultiPoly::zero(f.clone(), 1);
        a.add_term(Mono::var(0), f.one());
        a.add_term(Mono::unit(), root.clone());
        let mut b = MultiPoly::zero(f.clone(), 1);
        b.add_term(Mono::var(0), f.one());
        b.add_term(Mono::unit(), root.neg());
        let prod = a.mul(&b);
        let mut expect = MultiPoly::zero(f.clone(), 1);
        expect.add_term(Mono([2, 0, 0, 0, 0]), f.one());
        expect.add_term(Mono::unit(), f.from_int(-2));
        assert_eq!(prod, expect);
    }

    #[test]
    fn complex_evaluation_matches_rational() {
        let p = MultiPoly::from_integer_terms(Rationals, 2, &[(&[2, 0], 3), (&[1, 1], -1)]);
        let exact = p.evaluate(&[qq(1, 2), q(4)]);
        let approx = p.evaluate_f64(&[0.5, 4.0]);
        assert!((exact.to_f64().unwrap() - approx).abs() < 1e-12);
        let c = p
            .to_complex()
            .evaluate(&[Complex64::new(0.5, 0.0), Complex64::new(4.0, 0.0)]);
        assert!((c.re - approx).abs() < 1e-12 && c.im.abs() < 1e-14);
    }
}
