//! Dense univariate polynomials over ℚ, coefficients stored low degree first.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Interval Horner evaluation on [lo, hi].
    pub fn eval_interval(&self, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        for c in self.coeffs.iter().rev() {
            let cands = [&a * lo, &a * hi, &b * lo, &b * hi];
            let mn = cands.iter().min().unwrap().clone();
            let mx = cands.iter().max().unwrap().clone();
            a = mn + c;
            b = mx + c;
        }
        (a, b)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rat::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&(Rat::one() / l)),
            None => Poly::zero(),
        }
    }

    /// Returns (g, s) with g = gcd(self, m) monic and s·self ≡ g (mod m).
    pub fn gcd_cofactor(&self, m: &Poly) -> (Poly, Poly) {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Poly::zero(), Poly::constant(Rat::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let l = Rat::one() / r0.leading().expect("gcd of zero polynomials");
        (r0.scale(&l), s0.scale(&l))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = std::mem::replace(&mut b, r);
        }
        a.monic()
    }

    /// Number of distinct real roots in the open interval (lo, hi) via a Sturm
    /// sequence. Requires p(lo) ≠ 0 and p(hi) ≠ 0.
    pub fn count_roots_open(&self, lo: &Rat, hi: &Rat) -> usize {
        let seq = self.sturm_sequence();
        let changes = |x: &Rat| {
            let mut last: Option<bool> = None;
            let mut n: usize = 0;
            for p in &seq {
                let v = p.eval(x);
                if v.is_zero() {
                    continue;
                }
                let pos = v.is_positive();
                if last.is_some_and(|l| l != pos) {
                    n += 1;
                }
                last = Some(pos);
            }
            n
        };
        changes(lo).saturating_sub(changes(hi))
    }

    fn sturm_sequence(&self) -> Vec<Poly> {
        // square-free part so repeated roots count once
        let g = self.gcd(&self.derivative());
        let p = self.div_rem(&g).0;
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Rational roots via the rational-root theorem (content cleared first).
    pub fn rational_roots(&self) -> Vec<Rat> {
        let Some(deg) = self.degree() else { return Vec::new() };
        if deg == 0 {
            return Vec::new();
        }
        let den = super::rat::lcm_of_denominators(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
            .collect();
        // strip factors of x
        let shift = ints.iter().take_while(|c| c.is_zero()).count();
        let mut roots = Vec::new();
        if shift > 0 {
            roots.push(Rat::zero());
        }
        let ints = &ints[shift..];
        if ints.len() <= 1 {
            return roots;
        }
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        for p in divisors(&a0) {
            for q in divisors(&an) {
                for sgn in [1, -1] {
                    let r = Rat::new(BigInt::from(sgn) * &p, q.clone());
                    if self.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // fixtures use small coefficients; trial division is fine
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}
