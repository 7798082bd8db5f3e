//! Vertices p_{a,b} of the polytope
//! c_1 ≥ … ≥ c_f ≥ 0, 0 ≤ d_1 ≤ … ≤ d_g ≤ 1, Σd ≥ Σc.

use serde::{Serialize, Serializer};

use crate::exact::rat::{fmt_rat, int};
use crate::exact::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeVertex {
    pub a: usize,
    pub b: usize,
    pub c: Vec<Rat>,
    pub d: Vec<Rat>,
}

impl Serialize for PolytopeVertex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let c: Vec<String> = self.c.iter().map(fmt_rat).collect();
        let d: Vec<String> = self.d.iter().map(fmt_rat).collect();
        (self.a, self.b, c, d).serialize(s)
    }
}

impl PolytopeVertex {
    /// All three inequality groups, exactly.
    pub fn in_polytope(&self) -> bool {
        let zero = int(0);
        let one = int(1);
        let c_ok = self.c.windows(2).all(|w| w[0] >= w[1]) && self.c.last().map_or(true, |c| *c >= zero);
        let d_ok = self.d.windows(2).all(|w| w[0] <= w[1])
            && self.d.first().map_or(true, |d| *d >= zero)
            && self.d.last().map_or(true, |d| *d <= one);
        let sc: Rat = self.c.iter().sum();
        let sd: Rat = self.d.iter().sum();
        c_ok && d_ok && sd >= sc
    }
}

/// The g·f vertices, a ∈ 0..g, b ∈ 1..=f, in (a, b) order.
pub fn polytope_vertices(f: usize, g: usize) -> Vec<PolytopeVertex> {
    assert!(f >= 1 && g >= 1, "f and g must be positive");
    let mut out = Vec::with_capacity(f * g);
    for a in 0..g {
        for b in 1..=f {
            let level = Rat::new((g - a).into(), b.into());
            let c = (0..f).map(|l| if l < b { level.clone() } else { int(0) }).collect();
            let d = (0..g).map(|l| if l < a { int(0) } else { int(1) }).collect();
            let v = PolytopeVertex { a, b, c, d };
            debug_assert!(v.in_polytope());
            out.push(v);
        }
    }
    out
}
