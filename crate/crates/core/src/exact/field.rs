//! Real-embedded number fields ℚ(θ), θ the unique root of a monic minimal
//! polynomial inside a rational isolating interval.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::Poly;
use super::rat::{dyadic_ceil, dyadic_floor, fmt_rat, pow2_rat, Rat};
use super::ExactError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Irreducibility {
    /// Checked by the rational-root test (degree ≤ 3).
    Verified,
    /// Degree ≥ 4, accepted on the caller's attestation.
    Attested,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    minpoly: Poly,
    lo: Rat,
    hi: Rat,
    symbol: String,
    irreducibility: Irreducibility,
}

impl NumberField {
    /// Builds a field from minimal-polynomial coefficients (constant term
    /// first) and an isolating interval for the chosen real embedding.
    pub fn new(
        coeffs: Vec<Rat>,
        lo: Rat,
        hi: Rat,
        symbol: &str,
        attest_irreducible: bool,
    ) -> Result<Arc<NumberField>, ExactError> {
        let p = Poly::new(coeffs);
        let deg = p.degree().ok_or_else(|| invalid("minimal polynomial is zero"))?;
        if deg == 0 {
            return Err(invalid("minimal polynomial must have degree ≥ 1"));
        }
        if !p.leading().unwrap().is_one() {
            return Err(invalid("minimal polynomial must be monic"));
        }
        if lo >= hi {
            return Err(invalid("isolating interval needs lo < hi"));
        }
        if p.eval(&lo).is_zero() || p.eval(&hi).is_zero() {
            return Err(invalid("isolating interval endpoint is a root"));
        }
        let n = p.count_roots_open(&lo, &hi);
        if n != 1 {
            return Err(invalid(&format!("interval contains {n} real roots, expected exactly 1")));
        }
        let irreducibility = if deg <= 3 {
            if !p.rational_roots().is_empty() && deg > 1 {
                return Err(invalid("minimal polynomial has a rational root"));
            }
            Irreducibility::Verified
        } else if attest_irreducible {
            Irreducibility::Attested
        } else {
            return Err(invalid("irreducibility of degree ≥ 4 needs an attestation flag"));
        };
        Ok(Arc::new(NumberField { minpoly: p, lo, hi, symbol: symbol.to_string(), irreducibility }))
    }

    /// ℚ(√n) embedded at the positive root.
    pub fn sqrt(n: i64, symbol: &str) -> Result<Arc<NumberField>, ExactError> {
        let hi = Rat::from_integer((n.max(1) + 1).into());
        NumberField::new(vec![Rat::from_integer((-n).into()), Rat::zero(), Rat::one()], Rat::zero(), hi, symbol, false)
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap()
    }

    pub fn minpoly(&self) -> &Poly {
        &self.minpoly
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn isolating_interval(&self) -> (&Rat, &Rat) {
        (&self.lo, &self.hi)
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    /// Enclosure of θ of width ≤ 2^-bits, endpoints dyadic once refined.
    pub fn root_interval(&self, bits: u32) -> (Rat, Rat) {
        let target = pow2_rat(-(bits as i64));
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        while &hi - &lo > target {
            (lo, hi) = self.refine(lo, hi, bits);
        }
        (lo, hi)
    }

    /// One refinement step: an interval-Newton contraction when it at least
    /// halves the width, otherwise bisection.
    pub(crate) fn refine(&self, lo: Rat, hi: Rat, bits: u32) -> (Rat, Rat) {
        let p = &self.minpoly;
        let width = &hi - &lo;
        let mid = (&lo + &hi) / Rat::from_integer(2.into());
        let pm = p.eval(&mid);
        if pm.is_zero() {
            return (mid.clone(), mid);
        }
        let (dlo, dhi) = p.derivative().eval_interval(&lo, &hi);
        if dlo.is_positive() || dhi.is_negative() {
            // N(X) = mid − p(mid)/p'(X)
            let q1 = &pm / &dlo;
            let q2 = &pm / &dhi;
            let (qa, qb) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            let nlo = (&mid - qb).max(lo.clone());
            let nhi = (&mid - qa).min(hi.clone());
            if nlo <= nhi && (&nhi - &nlo) * Rat::from_integer(2.into()) <= width {
                // keep endpoints short; outward rounding preserves the enclosure
                let prec = bits + 8;
                return (dyadic_floor(&nlo, prec).max(lo), dyadic_ceil(&nhi, prec).min(hi));
            }
        }
        let plo = p.eval(&lo);
        if (plo.is_positive() && pm.is_positive()) || (plo.is_negative() && pm.is_negative()) {
            (mid, hi)
        } else {
            (lo, mid)
        }
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.minpoly.coeffs().iter().map(fmt_rat).collect();
        write!(f, "Q({}) minpoly [{}] root in ({}, {})", self.symbol, coeffs.join(", "), fmt_rat(&self.lo), fmt_rat(&self.hi))
    }
}

fn invalid(msg: &str) -> ExactError {
    ExactError::InvalidField(msg.to_string())
}
