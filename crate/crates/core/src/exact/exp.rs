//! Certified enclosures of e^q for rational q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::rat::{ceil_rat, floor_rat, pow2_rat, Rat};
use super::scalar::RealInterval;

fn shr_ceil(x: &BigInt, k: usize) -> BigInt {
    let q = x >> k;
    if (&q << k) == *x { q } else { q + 1 }
}

/// Fixed-point bounds (lo, hi) with lo·2^-w ≤ e^q ≤ hi·2^-w, for q ≥ 0.
fn exp_fixed(q: &Rat, w: usize) -> (BigInt, BigInt) {
    debug_assert!(!q.is_negative());
    let half = Rat::new(1.into(), 2.into());
    let mut s = 0usize;
    let mut x = q.clone();
    while x > half {
        x /= Rat::from_integer(2.into());
        s += 1;
    }
    let one = BigInt::one() << w;
    let scaled = &x * Rat::from_integer(one.clone());
    let (xlo, xhi) = (floor_rat(&scaled), ceil_rat(&scaled));
    let (mut tlo, mut thi) = (one.clone(), one.clone());
    let (mut slo, mut shi) = (one.clone(), one.clone());
    let mut n = 1u64;
    loop {
        tlo = (&tlo * &xlo).div_floor(&(&one * BigInt::from(n)));
        thi = (&thi * &xhi + &one * BigInt::from(n) - BigInt::one()).div_floor(&(&one * BigInt::from(n)));
        slo += &tlo;
        shi += &thi;
        n += 1;
        if thi <= BigInt::one() {
            // tail ≤ last term for x ≤ 1/2
            shi += &thi + 1;
            break;
        }
    }
    for _ in 0..s {
        slo = (&slo * &slo) >> w;
        shi = shr_ceil(&(&shi * &shi), w);
    }
    (slo, shi)
}

/// Interval of width ≤ 2^-bits containing e^q.
pub fn exp_interval(q: &Rat, bits: u32) -> RealInterval {
    let neg = q.is_negative();
    let a = q.abs();
    // log2(e^|q|) < 1.45·|q| + 1
    let mag = (super::rat::rat_to_f64(&a) * 1.45).ceil() as usize + 1;
    let mut w = bits as usize + 2 * mag + 64;
    loop {
        let (lo, hi) = exp_fixed(&a, w);
        let scale = BigInt::one() << w;
        let iv = if neg {
            RealInterval { lo: Rat::new(scale.clone(), hi), hi: Rat::new(scale, lo) }
        } else {
            RealInterval { lo: Rat::new(lo, scale.clone()), hi: Rat::new(hi, scale) }
        };
        let iv = iv.round_out(bits + 2);
        if iv.width() <= pow2_rat(-(bits as i64)) {
            return iv;
        }
        w *= 2;
    }
}

/// e^q·2^p as fixed-point integer bounds.
pub fn exp_scaled_bounds(q: &Rat, p: u32) -> (BigInt, BigInt) {
    let iv = exp_interval(q, p + 2);
    let s = Rat::from_integer(BigInt::one() << p as usize);
    (floor_rat(&(&iv.lo * &s)), ceil_rat(&(&iv.hi * &s)))
}
