use diagflow::exact::rat::{int, rat, rat_to_f64};
use diagflow::exact::{Mat, NumberField, Rat, Scalar, Subspace};
use diagflow::exponents::*;
use diagflow::slopes::GraysonPolygon;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use std::sync::Arc;

fn sqrt2_field() -> Arc<NumberField> {
    NumberField::sqrt(2, "s").unwrap()
}

fn quad(a: i64, b: i64) -> Scalar {
    Scalar::from_coords(&sqrt2_field(), vec![int(a), int(b)])
}

/// ℚ(θ) with θ³ = 2.
fn cbrt2() -> Scalar {
    let k = NumberField::new(vec![int(-2), int(0), int(0), int(1)], int(1), int(2), "c", false).unwrap();
    Scalar::generator(&k)
}

#[test]
fn beta_examples() {
    let row = HomFamily::new(vec![Mat::from_rows(vec![vec![Scalar::one(), quad(0, 1)]]).unwrap()], "r2").unwrap();
    assert_eq!(beta_formula(&row, &height_candidates(2, 5)).unwrap().value, ExtRat::Finite(int(1)));

    // 1, θ, θ² are independent over ℚ: every rational line gets rank 1
    let t = cbrt2();
    let row = HomFamily::new(vec![Mat::from_rows(vec![vec![Scalar::one(), t.clone(), &t * &t]]).unwrap()], "c").unwrap();
    let b = beta_formula(&row, &height_candidates(3, 1)).unwrap();
    assert_eq!(b.value, ExtRat::Finite(int(2)));
    assert_eq!((b.dim, b.rank), (3, 1));

    let e2 = HomFamily::new(vec![Mat::from_i64(&[&[0, 1]])], "e2").unwrap();
    let b = beta_formula(&e2, &height_candidates(2, 1)).unwrap();
    assert_eq!(b.value, ExtRat::Infinite);
    assert_eq!(height_candidates(2, 1)[b.argmax], Subspace::coordinate(2, &[0]));

    // a second sample kills the rational kernel
    let two = HomFamily::new(vec![Mat::from_i64(&[&[0, 1]]), Mat::from_i64(&[&[1, 0]])], "pair").unwrap();
    assert_eq!(beta_formula(&two, &height_candidates(2, 2)).unwrap().value, ExtRat::Finite(int(1)));
    assert!(HomFamily::new(vec![Mat::from_i64(&[&[0, 1]]), Mat::from_i64(&[&[1]])], "bad").is_err());
    assert!(HomFamily::new(vec![], "empty").is_err());
}

#[test]
fn rank_image_examples() {
    let fam = HomFamily::new(vec![Mat::from_i64(&[&[1, 0, 0], &[0, 1, 0]])], "proj").unwrap();
    assert_eq!(rank_image(&fam, &Subspace::coordinate(3, &[2])).unwrap(), 0);
    assert_eq!(rank_image(&fam, &Subspace::coordinate(3, &[1, 2])).unwrap(), 1);
    assert_eq!(rank_image(&fam, &Subspace::full(3)).unwrap(), 2);
    assert!(rank_image(&fam, &Subspace::full(2)).is_err());
}

#[test]
fn omega_examples() {
    let c = height_candidates(2, 6);
    let y = Mat::from_rows(vec![vec![quad(0, 1)]]).unwrap();
    let o = omega_formula(std::slice::from_ref(&y), &c).unwrap();
    assert_eq!(o.value, ExtRat::Finite(int(1)));
    assert_eq!(o.certificates_checked, c.len() - 1);

    let y = Mat::from_i64(&[&[3]]);
    let o = omega_formula(std::slice::from_ref(&y), &c).unwrap();
    assert_eq!(o.value, ExtRat::Infinite);
    // p = 3q
    assert_eq!(c[o.certificate.w], Subspace::from_int_rows(2, &[vec![3, 1]]));
    assert!(omega_formula(&[], &c).is_err());
    assert!(matches!(omega_formula(&[y], &[Subspace::zero(2)]), Err(ExponentError::MissingFull)));
}

#[test]
fn l_y_layout() {
    let y = Mat::from_i64(&[&[2, 3]]);
    assert_eq!(l_y(&y), Mat::from_i64(&[&[-1, 2, 3], &[0, 1, 0], &[0, 0, 1]]));
    assert_eq!(s_rank(&y, &[0], &Subspace::from_int_rows(3, &[vec![2, 1, 0], vec![3, 0, 1]])).unwrap(), 0);
    assert_eq!(s_rank(&y, &[0, 1, 2], &Subspace::full(3)).unwrap(), 3);
}

#[test]
fn dirichlet_examples() {
    let y = Mat::from_rows(vec![vec![quad(0, 1)]]).unwrap();
    let w = dirichlet_witness(&y, &Subspace::full(2), &[0], &[0], &int(10)).unwrap();
    assert_eq!(w.v, vec![BigInt::from(7), BigInt::from(5)]);
    assert_eq!(w.bounds, vec![rat(1, 10), int(10)]);
    assert_eq!(w.ratio, Some(int(1)));
    // |5√2 − 7|·5 = 0.355…
    let c = w.log_c.unwrap().exp();
    assert!((c - (5.0 * std::f64::consts::SQRT_2 - 7.0) * 5.0).abs() < 1e-12);

    let w = dirichlet_witness(&Mat::from_i64(&[&[0]]), &Subspace::coordinate(2, &[1]), &[0], &[0], &int(10)).unwrap();
    assert!(matches!(w.kind, WitnessKind::Kernel));
    assert_eq!(w.v, vec![BigInt::from(0), BigInt::from(1)]);
    assert!(dirichlet_witness(&y, &Subspace::full(2), &[0], &[0], &int(0)).is_err());
    assert!(dirichlet_witness(&y, &Subspace::full(3), &[0], &[0], &int(2)).is_err());
}

#[test]
fn polytope_examples() {
    let v = polytope_vertices(1, 1);
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].c.clone(), v[0].d.clone()), (vec![int(1)], vec![int(1)]));
    let v = polytope_vertices(2, 1);
    let cs: Vec<Vec<Rat>> = v.iter().map(|p| p.c.clone()).collect();
    assert_eq!(cs, vec![vec![int(1), int(0)], vec![rat(1, 2), rat(1, 2)]]);
    let v = polytope_vertices(1, 2);
    let ds: Vec<Vec<Rat>> = v.iter().map(|p| p.d.clone()).collect();
    assert_eq!(ds, vec![vec![int(1), int(1)], vec![int(0), int(1)]]);
    assert_eq!(v[0].c, vec![int(2)]);
}

#[test]
fn alpha_examples() {
    let qn = QuasiNorm::standard(vec![int(1), int(2)]).unwrap();
    assert_eq!(alpha_growth(&Subspace::coordinate(2, &[1]), &qn).unwrap().value, int(2));
    assert_eq!(alpha_growth(&Subspace::coordinate(2, &[0]), &qn).unwrap().value, int(1));
    // the first dual form is nonzero on the diagonal
    assert_eq!(alpha_growth(&Subspace::from_int_rows(2, &[vec![1, 1]]), &qn).unwrap().value, int(1));
    assert!(QuasiNorm::standard(vec![int(1), int(0)]).is_err());
    assert!(QuasiNorm::new(vec![int(1), int(1)], Mat::from_i64(&[&[1, 1], &[2, 2]])).is_err());

    let row = HomFamily::new(vec![Mat::from_rows(vec![vec![Scalar::one(), quad(0, 1)]]).unwrap()], "r2").unwrap();
    let c = height_candidates(2, 4);
    let ones = QuasiNorm::standard(vec![int(1), int(1)]).unwrap();
    assert_eq!(beta_alpha_formula(&row, &c, &ones).unwrap().value, ExtRat::Finite(int(1)));
    // e_1* is nonzero on the kernel line, so the weight 3 never enters
    let b = beta_alpha_formula(&row, &c, &QuasiNorm::standard(vec![int(1), int(3)]).unwrap()).unwrap();
    assert_eq!(b.value, ExtRat::Finite(int(1)));
    let e2 = HomFamily::new(vec![Mat::from_i64(&[&[0, 1]])], "e2").unwrap();
    assert_eq!(beta_alpha_formula(&e2, &c, &ones).unwrap().value, ExtRat::Infinite);
}

#[test]
fn gamma_bridge_examples() {
    let flat = GraysonPolygon::new(vec![(0, int(0)), (3, int(0))]).unwrap();
    assert_eq!(gamma_bridge(&flat, 2, 1).unwrap(), int(2));
    assert_eq!(gamma_bridge(&flat, 1, 2).unwrap(), rat(1, 2));
    // slopes −1/2 then 1
    let bent = GraysonPolygon::new(vec![(0, int(0)), (2, int(-1)), (3, int(0))]).unwrap();
    assert_eq!(gamma_bridge(&bent, 1, 2).unwrap(), int(3) / rat(3, 2) - int(1));
    assert!(gamma_bridge(&flat, 1, 1).is_err());
}

/// Normals of the tight constraints at a polytope point, over (c, d).
fn tight_rows(c: &[Rat], d: &[Rat]) -> Vec<Vec<Rat>> {
    let (f, g) = (c.len(), d.len());
    let mut rows = Vec::new();
    let unit = |i: usize| (0..f + g).map(|j| int((i == j) as i64)).collect::<Vec<Rat>>();
    let diff = |a: usize, b: usize| (0..f + g).map(|j| int((j == a) as i64 - (j == b) as i64)).collect::<Vec<Rat>>();
    for l in 0..f - 1 {
        if c[l] == c[l + 1] {
            rows.push(diff(l, l + 1));
        }
    }
    if c[f - 1] == int(0) {
        rows.push(unit(f - 1));
    }
    if d[0] == int(0) {
        rows.push(unit(f));
    }
    for l in 0..g - 1 {
        if d[l] == d[l + 1] {
            rows.push(diff(f + l + 1, f + l));
        }
    }
    if d[g - 1] == int(1) {
        rows.push(unit(f + g - 1));
    }
    if c.iter().sum::<Rat>() == d.iter().sum::<Rat>() {
        rows.push((0..f + g).map(|j| int(if j < f { -1 } else { 1 })).collect());
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polytope_points_are_vertices(f in 1usize..=6, g in 1usize..=6) {
        let vs = polytope_vertices(f, g);
        prop_assert_eq!(vs.len(), f * g);
        for (i, p) in vs.iter().enumerate() {
            prop_assert!(p.in_polytope());
            prop_assert!(vs[..i].iter().all(|q| q != p));
            // a vertex has f + g linearly independent tight constraints
            prop_assert_eq!(Mat::from_rats(&tight_rows(&p.c, &p.d)).rank(), f + g);
        }
    }

    #[test]
    fn rational_pencils_have_infinite_omega(a in -4i64..=4) {
        let c = height_candidates(2, 4);
        let y = Mat::from_i64(&[&[a]]);
        let o = omega_formula(std::slice::from_ref(&y), &c).unwrap();
        prop_assert_eq!(&o.value, &ExtRat::Infinite);
        prop_assert!(certificate_holds(&[y], &c, &o.certificate).unwrap());
    }

    #[test]
    fn quadratic_omega_is_at_least_one(a in -3i64..=3, b in 1i64..=3) {
        let c = height_candidates(2, 5);
        let y = Mat::from_rows(vec![vec![quad(a, b)]]).unwrap();
        let o = omega_formula(std::slice::from_ref(&y), &c).unwrap();
        prop_assert!(o.value >= ExtRat::Finite(int(1)));
        prop_assert!(certificate_holds(&[y], &c, &o.certificate).unwrap());
    }

    #[test]
    fn dirichlet_witness_lies_in_box(a in -3i64..=3, b in 1i64..=3, q in 2i64..=30) {
        let y = Mat::from_rows(vec![vec![quad(a, b)]]).unwrap();
        let w = dirichlet_witness(&y, &Subspace::full(2), &[0], &[0], &int(q)).unwrap();
        let (p, qq) = (w.v[0].to_f64().unwrap(), w.v[1].to_f64().unwrap());
        let yv = a as f64 + b as f64 * std::f64::consts::SQRT_2;
        prop_assert!(p != 0.0 || qq != 0.0);
        prop_assert!((yv * qq - p).abs() <= 1.0 / q as f64 + 1e-12);
        prop_assert!(qq.abs() <= q as f64);
        // |qY − p|·|q| ≤ 1 whenever q ≠ 0
        if qq != 0.0 {
            prop_assert!((yv * qq - p).abs() * qq.abs() <= 1.0 + 1e-9);
        }
        prop_assert!(w.bounds.iter().zip([rat(1, q), int(q)]).all(|(x, y)| *x == y));
    }

    #[test]
    fn alpha_is_monotone(alphas in prop::collection::vec(1i64..=5, 3), a in prop::collection::vec(-2i64..=2, 3), b in prop::collection::vec(-2i64..=2, 3)) {
        let qn = QuasiNorm::standard(alphas.iter().map(|&x| int(x)).collect()).unwrap();
        let small = Subspace::from_int_rows(3, &[a.clone()]);
        prop_assume!(!small.is_zero());
        let big = Subspace::from_int_rows(3, &[a, b]);
        let (s, l) = (alpha_growth(&small, &qn).unwrap(), alpha_growth(&big, &qn).unwrap());
        prop_assert!(s.value <= l.value);
        prop_assert_eq!(l.indices.len(), big.dim());
        let total: i64 = alphas.iter().sum();
        prop_assert_eq!(alpha_growth(&Subspace::full(3), &qn).unwrap().value, int(total));
        prop_assert!(rat_to_f64(&s.value) >= *alphas.iter().min().unwrap() as f64);
    }

    #[test]
    fn unit_weights_recover_beta(row in prop::collection::vec(-3i64..=3, 3), irr in 0i64..=2) {
        let mut entries: Vec<Scalar> = row.iter().map(|&x| Scalar::from_i64(x)).collect();
        entries[2] = &entries[2] + &quad(0, irr);
        let fam = HomFamily::new(vec![Mat::from_rows(vec![entries]).unwrap()], "row").unwrap();
        let c = height_candidates(3, 1);
        let ones = QuasiNorm::standard(vec![int(1); 3]).unwrap();
        prop_assert_eq!(beta_alpha_formula(&fam, &c, &ones).unwrap().value, beta_formula(&fam, &c).unwrap().value);
    }
}
