//! Square classes of nonzero rationals and F_2 linear algebra on them.
//!
//! The square class of r ∈ Q* is its image in Q*/(Q*)², encoded as a sign
//! together with a positive squarefree integer. Multiplication of classes is
//! XOR on exponent vectors over the "primes" {−1, 2, 3, 5, …}, so membership
//! and rank questions are plain linear algebra over F_2.
//!
//! Factorization is trial division by all primes below 10^6 followed by
//! Brent's variant of Pollard rho on whatever survives; every value this
//! crate classifies is a product of a handful of desk-size integers, which
//! that combination factors instantly.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        let mut primes = Vec::with_capacity(78_498);
        for p in 2..=n {
            if sieve[p] {
                primes.push(p as u32);
                let mut q = p * p;
                while q <= n {
                    sieve[q] = false;
                    q += p;
                }
            }
        }
        primes
    })
}

/// Strong probable-prime test to the given base.
fn sprp(n: &BigUint, base: u32) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let b = BigUint::from(base);
    if &b % n == BigUint::zero() {
        return true;
    }
    let mut x = b.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&two, n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Deterministic for every n < 3.3·10^24, which covers everything the
/// pipeline ever needs to classify; larger inputs get a strong probabilistic
/// verdict from the same bases.
fn is_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in &[2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == &BigUint::from(p) {
            return true;
        }
        if (n % BigUint::from(p)).is_zero() {
            return false;
        }
    }
    [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&b| sprp(n, b))
}

/// Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n.
fn pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    for c in 1u32..64 {
        let cc = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cc) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut count = 0u64;
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break; // cycle without factor; try next c
            }
            d = diff.gcd(n);
            count += 1;
            if count > 10_000_000 {
                break;
            }
        }
        if d != one && &d != n {
            return d;
        }
    }
    panic!("pollard rho exhausted on {n}");
}

/// Prime factorization of a positive integer.
pub fn factorize(n: &BigUint) -> BTreeMap<BigUint, u32> {
    let mut out = BTreeMap::new();
    if n.is_zero() {
        return out;
    }
    let mut m = n.clone();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        while (&m % &pb).is_zero() {
            m /= &pb;
            *out.entry(pb.clone()).or_insert(0) += 1;
        }
    }
    let mut stack = vec![m];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m < BigUint::from(TRIAL_LIMIT).pow(2) || is_prime(&m) {
            // below the trial bound squared anything left is prime
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let r = m.sqrt();
        if &r * &r == m {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_brent(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out
}

/// Image of a nonzero rational in Q*/(Q*)².
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareClass {
    /// +1 or −1.
    pub sign: i8,
    /// Positive squarefree integer.
    pub squarefree: BigUint,
}

impl SquareClass {
    pub fn is_trivial(&self) -> bool {
        self.sign == 1 && self.squarefree.is_one()
    }

    /// Signed representative, e.g. −3 for the class of −12.
    pub fn to_bigint(&self) -> BigInt {
        let v = BigInt::from(self.squarefree.clone());
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

/// Exponent vector over F_2; −1 participates as a formal prime so that sign
/// is just one more coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassVector {
    primes: BTreeSet<BigInt>,
}

impl ClassVector {
    pub fn is_trivial(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn xor(&self, other: &ClassVector) -> ClassVector {
        ClassVector {
            primes: self
                .primes
                .symmetric_difference(&other.primes)
                .cloned()
                .collect(),
        }
    }

    /// Largest prime present, used as the elimination pivot.
    fn pivot(&self) -> Option<&BigInt> {
        self.primes.iter().next_back()
    }

    pub fn contains(&self, p: &BigInt) -> bool {
        self.primes.contains(p)
    }
}

/// Squarefree part with sign: −12 ↦ −3, 45/7 ↦ 35.
pub fn squarefree_part(r: &BigRational) -> Result<SquareClass> {
    let (class, _) = class_of(r)?;
    Ok(class)
}

/// Square class as an F_2 exponent vector.
pub fn class_vector(r: &BigRational) -> Result<ClassVector> {
    let (_, vector) = class_of(r)?;
    Ok(vector)
}

fn class_of(r: &BigRational) -> Result<(SquareClass, ClassVector)> {
    if r.is_zero() {
        return Err(Error::ZeroInput);
    }
    // numerator times denominator is in the same class as the quotient
    let n = (r.numer() * r.denom()).abs().to_biguint().unwrap();
    let sign: i8 = if r.is_negative() { -1 } else { 1 };
    let mut squarefree = BigUint::one();
    let mut primes = BTreeSet::new();
    if sign < 0 {
        primes.insert(BigInt::from(-1));
    }
    for (p, e) in factorize(&n) {
        if e % 2 == 1 {
            squarefree *= &p;
            primes.insert(BigInt::from(p));
        }
    }
    Ok((SquareClass { sign, squarefree }, ClassVector { primes }))
}

/// Row-echelon basis over F_2 with provenance: each surviving row remembers
/// which input indices combine to it.
struct Echelon {
    rows: Vec<(BigInt, ClassVector, BTreeSet<usize>)>,
    basis_indices: Vec<usize>,
}

impl Echelon {
    fn build(vectors: &[ClassVector]) -> Echelon {
        let mut rows: Vec<(BigInt, ClassVector, BTreeSet<usize>)> = Vec::new();
        let mut basis_indices = Vec::new();
        for (i, v) in vectors.iter().enumerate() {
            let mut cur = v.clone();
            let mut combo: BTreeSet<usize> = BTreeSet::new();
            combo.insert(i);
            for (pivot, row, row_combo) in &rows {
                if cur.contains(pivot) {
                    cur = cur.xor(row);
                    combo = combo.symmetric_difference(row_combo).cloned().collect();
                }
            }
            if let Some(p) = cur.pivot() {
                rows.push((p.clone(), cur.clone(), combo));
                basis_indices.push(i);
            }
        }
        Echelon {
            rows,
            basis_indices,
        }
    }

    /// Expresses `target` over the original vectors, if possible.
    fn solve(&self, target: &ClassVector) -> Option<BTreeSet<usize>> {
        let mut cur = target.clone();
        let mut combo: BTreeSet<usize> = BTreeSet::new();
        for (pivot, row, row_combo) in &self.rows {
            if cur.contains(pivot) {
                cur = cur.xor(row);
                combo = combo.symmetric_difference(row_combo).cloned().collect();
            }
        }
        if cur.is_trivial() {
            Some(combo)
        } else {
            None
        }
    }
}

/// Rank of the span of the square classes of `values` together with the
/// earliest subsequence realizing a basis.
pub fn square_class_rank(values: &[BigRational]) -> Result<(usize, Vec<usize>)> {
    let vectors = values
        .iter()
        .map(class_vector)
        .collect::<Result<Vec<_>>>()?;
    let ech = Echelon::build(&vectors);
    Ok((ech.rows.len(), ech.basis_indices))
}

/// Writes the class of `target` as a product of basis classes; `Some(empty)`
/// means the target is itself a square.
pub fn class_in_span(
    target: &BigRational,
    basis: &[BigRational],
) -> Result<Option<BTreeSet<usize>>> {
    let vectors = basis.iter().map(class_vector).collect::<Result<Vec<_>>>()?;
    let t = class_vector(target)?;
    Ok(Echelon::build(&vectors).solve(&t))
}

/// Same as [`class_in_span`] but with pre-computed class vectors, so callers
/// holding many targets against one basis factor each value once.
pub fn class_in_span_vectors(
    target: &ClassVector,
    basis: &[ClassVector],
) -> Option<BTreeSet<usize>> {
    Echelon::build(basis).solve(target)
}

/// Exact integer square root when `n` is a perfect square.
pub fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact rational square root (nonnegative branch) when one exists.
pub fn rational_sqrt_exact(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = integer_sqrt_exact(r.numer())?;
    let d = integer_sqrt_exact(r.denom())?;
    Some(BigRational::new(n, d))
}

pub fn big_rational_from_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Basis of the right nullspace of a small rational matrix.
pub fn rational_nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols);
            r.clone()
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for c in 0..ncols {
        let Some(pr) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = m[rank][c].recip();
        for x in &mut m[rank] {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                for j in 0..ncols {
                    let delta = &m[rank][j] * &factor;
                    m[r][j] -= delta;
                }
            }
        }
        pivot_of_col[c] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for f in 0..ncols {
        if pivot_of_col[f].is_some() {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[f] = BigRational::one();
        for (c, pivot) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pivot {
                v[c] = -m[*r][f].clone();
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        big_rational_from_i64(n)
    }
    fn qq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn squarefree_part_of_negative() {
        let c = squarefree_part(&q(-12)).unwrap();
        assert_eq!(c.sign, -1);
        assert_eq!(c.squarefree, BigUint::from(3u32));
        assert_eq!(c.to_bigint(), BigInt::from(-3));
    }

    #[test]
    fn squarefree_part_of_fraction() {
        let c = squarefree_part(&qq(45, 7)).unwrap();
        assert_eq!(c.to_bigint(), BigInt::from(35));
    }

    #[test]
    fn squarefree_part_of_square_is_one() {
        let c = squarefree_part(&qq(36, 25)).unwrap();
        assert!(c.is_trivial());
    }

    #[test]
    fn zero_has_no_class() {
        assert!(matches!(squarefree_part(&q(0)), Err(Error::ZeroInput)));
    }

    #[test]
    fn rank_of_dependent_triple() {
        let (rank, basis) = square_class_rank(&[q(2), q(3), q(6)]).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(basis, vec![0, 1]);
    }

    #[test]
    fn sign_is_a_formal_prime() {
        let (rank, basis) = square_class_rank(&[q(-1), q(-2), q(2)]).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(basis, vec![0, 1]);
        let span = class_in_span(&q(2), &[q(-1), q(-2)]).unwrap();
        assert_eq!(span, Some([0usize, 1].into_iter().collect()));
    }

    #[test]
    fn span_membership() {
        let basis = [q(2), q(3)];
        assert_eq!(
            class_in_span(&q(6), &basis).unwrap(),
            Some([0usize, 1].into_iter().collect())
        );
        assert_eq!(class_in_span(&q(5), &basis).unwrap(), None);
        assert_eq!(class_in_span(&q(36), &basis).unwrap(), Some(BTreeSet::new()));
    }

    #[test]
    fn factors_a_semiprime_past_the_trial_bound() {
        // 1000003 and 1000033 are both prime and above 10^6 squared is not,
        // so this exercises the rho path.
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
        let f = factorize(&n);
        assert_eq!(f.len(), 2);
        assert_eq!(f[&BigUint::from(1_000_003u64)], 1);
        assert_eq!(f[&BigUint::from(1_000_033u64)], 1);
    }

    #[test]
    fn factors_a_large_square() {
        let p = BigUint::from(1_000_003u64);
        let f = factorize(&(&p * &p));
        assert_eq!(f[&p], 2);
        let c = squarefree_part(&BigRational::from_integer(BigInt::from(
            1_000_003i64 * 1_000_003,
        )))
        .unwrap();
        assert!(c.is_trivial());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(
            rational_sqrt_exact(&qq(49, 9)),
            Some(BigRational::new(BigInt::from(7), BigInt::from(3)))
        );
        assert_eq!(rational_sqrt_exact(&qq(2, 1)), None);
        assert_eq!(rational_sqrt_exact(&qq(-4, 1)), None);
    }
}
