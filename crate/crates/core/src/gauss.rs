//! Gaussian integers and Gaussian rationals.
//!
//! The symmetry group of the family contains coordinate maps with entries in
//! Z[i], so its matrices live over the Gaussian integers. Group enumeration
//! wants a cheap canonical representative of each projective matrix class:
//! for the groups at hand every scalar that can divide all sixteen entries
//! has norm a power of two (the determinant norms are powers of two, so odd
//! Gaussian primes never divide the content). Stripping factors of (1 + i),
//! the rational integer content, and a unit is therefore a complete
//! normalization, and it keeps entries in `i64` range forever.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Field;

/// A Gaussian integer with machine-size parts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Gi {
    pub re: i64,
    pub im: i64,
}

impl Gi {
    pub const ZERO: Gi = Gi { re: 0, im: 0 };
    pub const ONE: Gi = Gi { re: 1, im: 0 };
    pub const I: Gi = Gi { re: 0, im: 1 };

    pub fn new(re: i64, im: i64) -> Gi {
        Gi { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn add(self, o: Gi) -> Gi {
        Gi::new(self.re + o.re, self.im + o.im)
    }

    pub fn sub(self, o: Gi) -> Gi {
        Gi::new(self.re - o.re, self.im - o.im)
    }

    pub fn neg(self) -> Gi {
        Gi::new(-self.re, -self.im)
    }

    pub fn mul(self, o: Gi) -> Gi {
        Gi::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    pub fn conj(self) -> Gi {
        Gi::new(self.re, -self.im)
    }

    pub fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    /// True when (1 + i) divides, i.e. re + im is even.
    fn even_trace(self) -> bool {
        (self.re + self.im) % 2 == 0
    }

    /// Exact quotient by (1 + i).
    fn div_one_plus_i(self) -> Gi {
        debug_assert!(self.even_trace());
        Gi::new((self.re + self.im) / 2, (self.im - self.re) / 2)
    }

    fn to_rational(self) -> GaussRat {
        GaussRat {
            re: BigRational::from_integer(self.re.into()),
            im: BigRational::from_integer(self.im.into()),
        }
    }
}

/// 4×4 matrix over the Gaussian integers, acting on column vectors.
pub type GiMat = [[Gi; 4]; 4];

pub const GI_IDENTITY: GiMat = {
    let mut m = [[Gi::ZERO; 4]; 4];
    m[0][0] = Gi::ONE;
    m[1][1] = Gi::ONE;
    m[2][2] = Gi::ONE;
    m[3][3] = Gi::ONE;
    m
};

pub fn gi_mat_mul(a: &GiMat, b: &GiMat) -> GiMat {
    let mut out = [[Gi::ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = Gi::ZERO;
            for (k, bk) in b.iter().enumerate() {
                s = s.add(a[i][k].mul(bk[j]));
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn gi_mat_from_rows(rows: [[(i64, i64); 4]; 4]) -> GiMat {
    let mut m = [[Gi::ZERO; 4]; 4];
    for (i, row) in rows.iter().enumerate() {
        for (j, &(re, im)) in row.iter().enumerate() {
            m[i][j] = Gi::new(re, im);
        }
    }
    m
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Canonical representative of the projective class of a nonzero matrix:
/// strips all factors of (1 + i), then the rational integer content, then
/// rotates by the unit putting the first nonzero entry into the quadrant
/// re > 0, im ≥ 0.
pub fn gi_mat_canonical(m: &GiMat) -> GiMat {
    let mut m = *m;
    let entries = |m: &GiMat| -> Vec<Gi> {
        m.iter().flatten().copied().filter(|g| !g.is_zero()).collect()
    };
    assert!(!entries(&m).is_empty(), "zero matrix has no projective class");
    loop {
        if m.iter().flatten().all(|g| g.even_trace()) {
            for row in &mut m {
                for g in row {
                    *g = g.div_one_plus_i();
                }
            }
        } else {
            break;
        }
    }
    let mut content = 0i64;
    for g in m.iter().flatten() {
        content = gcd_i64(content, gcd_i64(g.re, g.im));
    }
    if content > 1 {
        for row in &mut m {
            for g in row {
                g.re /= content;
                g.im /= content;
            }
        }
    }
    let first = *m
        .iter()
        .flatten()
        .find(|g| !g.is_zero())
        .expect("nonzero matrix");
    // exactly one unit rotation lands in {re > 0, im ≥ 0}
    let mut unit = Gi::ONE;
    let mut probe = first;
    while !(probe.re > 0 && probe.im >= 0) {
        unit = unit.mul(Gi::I);
        probe = first.mul(unit);
    }
    if unit != Gi::ONE {
        for row in &mut m {
            for g in row {
                *g = g.mul(unit);
            }
        }
    }
    m
}

pub fn gi_mat_to_rational(m: &GiMat) -> Vec<Vec<GaussRat>> {
    m.iter()
        .map(|row| row.iter().map(|g| g.to_rational()).collect())
        .collect()
}

/// An element of Q(i).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn from_rational(re: BigRational) -> GaussRat {
        GaussRat {
            re,
            im: BigRational::zero(),
        }
    }

    /// The rational part, provided the imaginary part vanishes.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.im.is_zero() {
            Some(self.re.clone())
        } else {
            None
        }
    }
}

impl std::fmt::Display for GaussRat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

/// Q(i) as a coefficient field.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct GaussianRationals;

impl Field for GaussianRationals {
    type Elem = GaussRat;

    fn zero(&self) -> GaussRat {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    fn one(&self) -> GaussRat {
        GaussRat::from_rational(BigRational::from_integer(1.into()))
    }
    fn from_int(&self, n: i64) -> GaussRat {
        GaussRat::from_rational(BigRational::from_integer(n.into()))
    }
    fn is_zero(&self, a: &GaussRat) -> bool {
        a.re.is_zero() && a.im.is_zero()
    }
    fn add(&self, a: &GaussRat, b: &GaussRat) -> GaussRat {
        GaussRat {
            re: &a.re + &b.re,
            im: &a.im + &b.im,
        }
    }
    fn sub(&self, a: &GaussRat, b: &GaussRat) -> GaussRat {
        GaussRat {
            re: &a.re - &b.re,
            im: &a.im - &b.im,
        }
    }
    fn neg(&self, a: &GaussRat) -> GaussRat {
        GaussRat {
            re: -&a.re,
            im: -&a.im,
        }
    }
    fn mul(&self, a: &GaussRat, b: &GaussRat) -> GaussRat {
        GaussRat {
            re: &a.re * &b.re - &a.im * &b.im,
            im: &a.re * &b.im + &a.im * &b.re,
        }
    }
    fn invert(&self, a: &GaussRat) -> Result<GaussRat> {
        let n = &a.re * &a.re + &a.im * &a.im;
        if n.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(GaussRat {
            re: &a.re / &n,
            im: -&a.im / &n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_product() {
        let a = Gi::new(1, 2);
        let b = Gi::new(3, -1);
        assert_eq!(a.mul(b), Gi::new(5, 5));
        assert_eq!(a.mul(a.conj()), Gi::new(a.norm(), 0));
    }

    #[test]
    fn canonical_class_collapses_scalars() {
        let mut m = GI_IDENTITY;
        m[0][1] = Gi::new(1, 1);
        let base = gi_mat_canonical(&m);
        for scalar in [Gi::new(2, 0), Gi::new(0, 1), Gi::new(1, 1), Gi::new(-2, 2)] {
            let mut scaled = m;
            for row in &mut scaled {
                for g in row {
                    *g = g.mul(scalar);
                }
            }
            assert_eq!(gi_mat_canonical(&scaled), base);
        }
    }

    #[test]
    fn canonical_distinguishes_classes() {
        let mut a = GI_IDENTITY;
        a[3][3] = Gi::new(0, 1);
        let b = GI_IDENTITY;
        assert_ne!(gi_mat_canonical(&a), gi_mat_canonical(&b));
    }

    #[test]
    fn matrix_product_associates() {
        let a = gi_mat_from_rows([
            [(1, 0), (-1, 0), (0, 0), (0, 0)],
            [(1, 0), (1, 0), (0, 0), (0, 0)],
            [(0, 0), (0, 0), (1, 0), (-1, 0)],
            [(0, 0), (0, 0), (1, 0), (1, 0)],
        ]);
        let b = gi_mat_from_rows([
            [(1, 0), (0, 0), (0, 0), (0, 0)],
            [(0, 0), (1, 0), (0, 0), (0, 0)],
            [(0, 0), (0, 0), (0, 1), (0, 0)],
            [(0, 0), (0, 0), (0, 0), (0, 1)],
        ]);
        let ab_c = gi_mat_mul(&gi_mat_mul(&a, &b), &a);
        let a_bc = gi_mat_mul(&a, &gi_mat_mul(&b, &a));
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn gauss_rational_inverse() {
        let f = GaussianRationals;
        let a = GaussRat {
            re: BigRational::from_integer(3.into()),
            im: BigRational::from_integer(4.into()),
        };
        let inv = f.invert(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
        assert!(f.invert(&f.zero()).is_err());
    }
}
