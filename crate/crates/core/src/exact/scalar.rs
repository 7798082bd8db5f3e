//! Exact field elements: rationals, or elements of one real-embedded number
//! field. An element whose value is rational is always stored as `Rat`, so
//! structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use super::field::NumberField;
use super::poly::Poly;
use super::rat::{dyadic_ceil, dyadic_floor, fmt_rat, pow2_rat, Rat};
use super::ExactError;

#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(Rat),
    Alg(AlgElem),
}

/// Σ coords[i]·θ^i with at least one non-constant coordinate nonzero.
#[derive(Clone)]
pub struct AlgElem {
    field: Arc<NumberField>,
    coords: Vec<Rat>,
}

impl PartialEq for AlgElem {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coords == other.coords
    }
}
impl Eq for AlgElem {}

impl std::hash::Hash for Scalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Scalar::Rat(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Scalar::Alg(a) => {
                1u8.hash(state);
                a.coords.hash(state);
            }
        }
    }
}

pub fn same_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Closed real interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RealInterval {
    pub fn point(v: Rat) -> Self {
        RealInterval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        super::rat::rat_to_f64(&((&self.lo + &self.hi) / Rat::from_integer(2.into())))
    }

    pub fn abs(&self) -> RealInterval {
        if self.lo.is_negative() && self.hi.is_positive() {
            RealInterval { lo: Rat::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        } else if self.hi <= Rat::zero() {
            RealInterval { lo: -&self.hi, hi: -&self.lo }
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, o: &RealInterval) -> RealInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        RealInterval { lo: c.iter().min().unwrap().clone(), hi: c.iter().max().unwrap().clone() }
    }

    pub fn add(&self, o: &RealInterval) -> RealInterval {
        RealInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn scale(&self, k: &Rat) -> RealInterval {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if a <= b { RealInterval { lo: a, hi: b } } else { RealInterval { lo: b, hi: a } }
    }

    /// Outward rounding of both endpoints to multiples of 2^-bits.
    pub fn round_out(&self, bits: u32) -> RealInterval {
        RealInterval { lo: dyadic_floor(&self.lo, bits), hi: dyadic_ceil(&self.hi, bits) }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rat::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Scalar::Rat(Rat::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rat(Rat::from_integer(n))
    }

    /// The generator θ of `field`.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        let mut coords = vec![Rat::zero(); field.degree()];
        if field.degree() == 1 {
            // θ is the rational root of x + c
            return Scalar::Rat(-field.minpoly().coeffs()[0].clone());
        }
        coords[1] = Rat::one();
        Scalar::Alg(AlgElem { field: field.clone(), coords })
    }

    /// Element with the given power-basis coordinates.
    pub fn from_coords(field: &Arc<NumberField>, coords: Vec<Rat>) -> Self {
        let p = Poly::new(coords).rem(field.minpoly());
        Self::from_poly(field, p)
    }

    fn from_poly(field: &Arc<NumberField>, p: Poly) -> Self {
        if p.degree().unwrap_or(0) == 0 {
            return Scalar::Rat(p.coeffs().first().cloned().unwrap_or_else(Rat::zero));
        }
        let mut coords = p.coeffs().to_vec();
        coords.resize(field.degree(), Rat::zero());
        Scalar::Alg(AlgElem { field: field.clone(), coords })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Alg(_) => None,
        }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Alg(a) => Some(&a.field),
        }
    }

    /// Power-basis coordinates, padded to the field degree when given.
    pub fn coords(&self, deg: usize) -> Vec<Rat> {
        match self {
            Scalar::Rat(r) => {
                let mut v = vec![Rat::zero(); deg.max(1)];
                v[0] = r.clone();
                v
            }
            Scalar::Alg(a) => a.coords.clone(),
        }
    }

    fn to_poly(&self) -> Poly {
        match self {
            Scalar::Rat(r) => Poly::constant(r.clone()),
            Scalar::Alg(a) => Poly::new(a.coords.clone()),
        }
    }

    fn common_field(&self, other: &Scalar) -> Result<Option<Arc<NumberField>>, ExactError> {
        match (self.field(), other.field()) {
            (None, None) => Ok(None),
            (Some(f), None) | (None, Some(f)) => Ok(Some(f.clone())),
            (Some(f), Some(g)) => {
                if same_field(f, g) {
                    Ok(Some(f.clone()))
                } else {
                    Err(ExactError::FieldMismatch)
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ExactError> {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, other) {
            return Ok(Scalar::Rat(a + b));
        }
        let f = self.common_field(other)?.unwrap();
        Ok(Self::from_poly(&f, self.to_poly().add(&other.to_poly())))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, ExactError> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ExactError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Rat(a), Scalar::Alg(e)) | (Scalar::Alg(e), Scalar::Rat(a)) => {
                if a.is_zero() {
                    return Ok(Scalar::zero());
                }
                Ok(Scalar::Alg(AlgElem { field: e.field.clone(), coords: e.coords.iter().map(|c| c * a).collect() }))
            }
            _ => {
                let f = self.common_field(other)?.unwrap();
                let prod = self.to_poly().mul(&other.to_poly()).rem(f.minpoly());
                Ok(Self::from_poly(&f, prod))
            }
        }
    }

    pub fn inv(&self) -> Result<Scalar, ExactError> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    Err(ExactError::DivisionByZero)
                } else {
                    Ok(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Alg(a) => {
                let (g, s) = self.to_poly().gcd_cofactor(a.field.minpoly());
                debug_assert!(g.degree() == Some(0), "minimal polynomial not irreducible");
                Ok(Self::from_poly(&a.field, s.rem(a.field.minpoly())))
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ExactError> {
        self.checked_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Alg(a) => Scalar::Alg(AlgElem { field: a.field.clone(), coords: a.coords.iter().map(|c| -c).collect() }),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Enclosure of the real embedding of width ≤ 2^-bits. Rationals are
    /// returned exactly; irrational values get dyadic endpoints.
    pub fn real_value(&self, bits: u32) -> RealInterval {
        match self {
            Scalar::Rat(r) => RealInterval::point(r.clone()),
            Scalar::Alg(a) => {
                let poly = Poly::new(a.coords.clone());
                let target = pow2_rat(-(bits as i64));
                let field = &a.field;
                let (lo0, hi0) = field.isolating_interval();
                let (mut lo, mut hi) = (lo0.clone(), hi0.clone());
                let prec = bits + 2;
                // root precision grows until the large coefficients are absorbed
                let mut root_bits = bits + 2 * field.degree() as u32 + 8;
                loop {
                    let (vlo, vhi) = poly.eval_interval(&lo, &hi);
                    let iv = RealInterval { lo: vlo, hi: vhi }.round_out(prec);
                    if iv.width() <= target {
                        return iv;
                    }
                    (lo, hi) = field.refine(lo, hi, root_bits);
                    root_bits += root_bits / 2 + 16;
                }
            }
        }
    }

    /// Exact sign: zero test first, then interval refinement.
    pub fn signum(&self) -> Sign {
        match self {
            Scalar::Rat(r) => super::rat::sign_of(r),
            Scalar::Alg(_) => {
                let mut bits = 16;
                loop {
                    let iv = self.real_value(bits);
                    if iv.lo.is_positive() {
                        return Sign::Plus;
                    }
                    if iv.hi.is_negative() {
                        return Sign::Minus;
                    }
                    bits *= 2;
                }
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.signum() == Sign::Minus { -self } else { self.clone() }
    }

    /// Compare real embeddings exactly.
    pub fn cmp_real(&self, other: &Scalar) -> Ordering {
        match (self - other).signum() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.real_value(60).mid_f64()
    }

    /// Renders the element as a polynomial in the field symbol.
    pub fn to_literal(&self) -> String {
        match self {
            Scalar::Rat(r) => fmt_rat(r),
            Scalar::Alg(a) => {
                let sym = a.field.symbol();
                let mut terms = Vec::new();
                for (i, c) in a.coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mon = match i {
                        0 => String::new(),
                        1 => sym.to_string(),
                        _ => format!("{sym}^{i}"),
                    };
                    let t = if i == 0 {
                        fmt_rat(c)
                    } else if c.is_one() {
                        mon
                    } else if *c == -Rat::one() {
                        format!("-{mon}")
                    } else {
                        format!("{}*{mon}", fmt_rat(c))
                    };
                    terms.push(t);
                }
                terms.join(" + ").replace("+ -", "- ")
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_i64(n)
    }
}

// Operator forms panic on mixed field contexts; validated containers
// (matrices, families) guarantee a single context before arithmetic runs.
impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("mixed field contexts")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_sub(rhs).expect("mixed field contexts")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("mixed field contexts")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat, rat_to_f64};

    fn sqrt2() -> (Arc<NumberField>, Scalar) {
        let k = NumberField::sqrt(2, "t").unwrap();
        let s = Scalar::generator(&k);
        (k, s)
    }

    #[test]
    fn rational_sum() {
        let a = Scalar::Rat(rat(1, 2));
        let b = Scalar::Rat(rat(1, 3));
        assert_eq!(&a + &b, Scalar::Rat(rat(5, 6)));
    }

    #[test]
    fn sqrt2_squared_is_rational() {
        let (_, s) = sqrt2();
        assert_eq!(&s * &s, Scalar::from_i64(2));
    }

    #[test]
    fn conjugate_product() {
        let (_, s) = sqrt2();
        let one = Scalar::one();
        assert_eq!(&(&one + &s) * &(&one - &s), Scalar::from_i64(-1));
    }

    #[test]
    fn inverse_and_division() {
        let (_, s) = sqrt2();
        let x = &Scalar::one() + &s;
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, Scalar::one());
        assert_eq!(Scalar::zero().inv(), Err(ExactError::DivisionByZero));
        assert!(s.checked_div(&Scalar::zero()).is_err());
    }

    #[test]
    fn mixed_fields_rejected() {
        let (_, s) = sqrt2();
        let k3 = NumberField::sqrt(3, "u").unwrap();
        let u = Scalar::generator(&k3);
        assert_eq!(s.checked_add(&u), Err(ExactError::FieldMismatch));
        assert_eq!(s.checked_mul(&u), Err(ExactError::FieldMismatch));
    }

    #[test]
    fn real_value_exact_rational() {
        let v = Scalar::Rat(rat(3, 4)).real_value(10);
        assert_eq!(v, RealInterval::point(rat(3, 4)));
    }

    #[test]
    fn real_value_sqrt2() {
        let (_, s) = sqrt2();
        let iv = s.real_value(20);
        assert!(iv.width() <= pow2_rat(-20));
        let r = std::f64::consts::SQRT_2;
        assert!(rat_to_f64(&iv.lo) <= r && r <= rat_to_f64(&iv.hi));
    }

    #[test]
    fn zero_in_field_is_exact() {
        let (_, s) = sqrt2();
        let z = &s - &s;
        assert!(z.is_zero());
        assert_eq!(z.real_value(5), RealInterval::point(int(0)));
    }

    #[test]
    fn signs() {
        let (_, s) = sqrt2();
        // 99/70 > √2 > 140/99
        let a = &s - &Scalar::Rat(rat(99, 70));
        let b = &s - &Scalar::Rat(rat(140, 99));
        assert_eq!(a.signum(), Sign::Minus);
        assert_eq!(b.signum(), Sign::Plus);
    }

    #[test]
    fn literal_rendering() {
        let (_, s) = sqrt2();
        let x = &Scalar::one() + &(&Scalar::from_i64(2) * &s);
        assert_eq!(x.to_literal(), "1 + 2*t");
        assert_eq!((-&s).to_literal(), "-t");
    }
}
