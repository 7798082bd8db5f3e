use diagflow::exact::rat::{int, rat, rat_to_f64};
use diagflow::exact::{Mat, NumberField, Rat, Scalar, Subspace};
use diagflow::scanner::scan::{form_product, product_log, satisfies_exact};
use diagflow::scanner::reduce::round_zero_sum;
use diagflow::scanner::*;
use diagflow::slopes::sweep::CandidateRecipe;
use diagflow::slopes::{Flow, MatrixFamily};
use num_bigint::BigInt;
use proptest::prelude::*;

fn shear_sqrt2() -> Mat {
    let k = NumberField::sqrt(2, "s").unwrap();
    Mat::from_rows(vec![vec![Scalar::one(), Scalar::generator(&k)], vec![Scalar::zero(), Scalar::one()]]).unwrap()
}

fn xs(sols: &[Solution]) -> Vec<Vec<i64>> {
    sols.iter().map(Solution::x_i64).collect()
}

/// ‖a_t L x‖ in doubles, as an independent check of the certified verdict.
fn flowed_norm(l: &Mat, x: &[i64], n: &[i64], t: i64) -> f64 {
    let xb: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
    l.mul_int_vec(&xb)
        .unwrap()
        .iter()
        .zip(n)
        .map(|(v, &ni)| (v.to_f64() * ((ni * t) as f64).exp()).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn identity_axes_only() {
    let sols = scan_solutions(&ScanConfig::new(Mat::identity(2), rat(1, 2), 100).unwrap()).unwrap();
    assert_eq!(xs(&sols), vec![vec![0, 1], vec![1, 0]]);
}

#[test]
fn sqrt2_convergents_are_solutions() {
    let sols = scan_solutions(&ScanConfig::new(shear_sqrt2(), rat(1, 2), 60).unwrap()).unwrap();
    let found = xs(&sols);
    // |7 − 5√2|·5 exceeds ‖(7, −5)‖^{−1/2} in the Euclidean norm
    assert_eq!(found, vec![vec![1, -1], vec![1, 0], vec![2, -1], vec![3, -2]]);
    for a in 0..=60i64 {
        for b in -60..=60i64 {
            if a == 0 && b <= 0 {
                continue;
            }
            let p = ((a as f64 + b as f64 * std::f64::consts::SQRT_2) * b as f64).abs();
            let r = ((a * a + b * b) as f64).powf(-0.25);
            let primitive = num_integer::gcd(a, b) == 1;
            if primitive && p > 0.0 && (p - r).abs() > 1e-9 {
                assert_eq!(p < r, found.contains(&vec![a, b]), "{a} {b}");
            }
        }
    }
    for s in &sols {
        // decisive again at doubled precision
        let Some((lo, hi)) = product_log(&form_product(&shear_sqrt2(), &s.x_i64()), 128) else { continue };
        assert!(lo <= hi && hi <= -0.5 * s.norm.ln() + 1e-12, "{:?}", s.x);
    }
}

#[test]
fn classify_examples() {
    let mut axes = scan_solutions(&ScanConfig::new(Mat::identity(2), rat(1, 2), 50).unwrap()).unwrap();
    let c = classify(&mut axes, &[Subspace::coordinate(2, &[0]), Subspace::coordinate(2, &[1])]).unwrap();
    assert!(c.outliers.is_empty());
    assert_eq!(c.groups, vec![vec![1], vec![0]]);

    let mut root = scan_solutions(&ScanConfig::new(shear_sqrt2(), rat(1, 2), 60).unwrap()).unwrap();
    let c = classify(&mut root, &[Subspace::coordinate(2, &[0])]).unwrap();
    let outliers: Vec<Vec<i64>> = c.outliers.iter().map(|(i, _)| root[*i].x_i64()).collect();
    assert_eq!(outliers, vec![vec![1, -1], vec![2, -1], vec![3, -2]]);
    assert_eq!(c.groups[0].len(), 1);

    let n = root.len();
    let c = classify(&mut root, &[]).unwrap();
    assert_eq!(c.outliers.len(), n);
    assert!(classify(&mut root, &[Subspace::full(2)]).is_err());
}

#[test]
fn reduction_of_a_small_solution() {
    let l = shear_sqrt2();
    let c = operator_bound(&l);
    assert_eq!(c, int(2));
    let f = solution_to_flow(&[-7, 5], &l, &int(4), &c).unwrap();
    assert_eq!((f.t, f.n.clone()), (1, vec![2, -2]));
    let norm = flowed_norm(&l, &[-7, 5], &f.n, f.t);
    let bound = 2.0 * (-1.0f64).exp();
    // the construction only guarantees the bound for large ‖x‖; here it is exceeded
    assert!(norm > bound);
    assert_eq!(f.aas.holds, Some(norm <= bound));
    assert!(matches!(solution_to_flow(&[3, -2], &l, &rat(1, 2), &c), Err(ScanError::TooSmall(0))));
    assert!(matches!(solution_to_flow(&[1, 0], &Mat::identity(2), &int(4), &int(1)), Err(ScanError::ZeroForm(1))));
}

#[test]
fn reduction_without_rounding() {
    let l = Mat::identity(3);
    let f = solution_to_flow(&[5000, 5000, 5000], &l, &int(8), &int(2)).unwrap();
    assert!(f.t >= 1);
    assert_eq!(f.n, vec![0, 0, 0]);
    assert!(f.clamped.iter().all(|c| !c));
}

#[test]
fn clamped_coordinate_in_dim_three() {
    let tiny = Rat::new(1.into(), BigInt::from(10).pow(200));
    let l = Mat::from_rats(&[vec![tiny, int(0), int(0)], vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]]);
    let eps = int(48);
    let x = [1, 30, 30];
    let f = solution_to_flow(&x, &l, &eps, &operator_bound(&l)).unwrap();
    assert_eq!(f.clamped, vec![true, false, false]);
    assert_eq!(f.n.iter().sum::<i64>(), 0);
    assert!(f.n.iter().all(|&v| (v.abs() as f64) <= 3.0 * f.big_d + 1.5));
    assert_eq!(f.aas.holds, Some(true));
}

#[test]
fn exceptional_examples() {
    let id = MatrixFamily::singleton(Mat::identity(2)).unwrap();
    let recipe = CandidateRecipe::default();
    let got = exceptional_subspaces(&id, &int(1), &[Flow::from_i64(&[1, -1]), Flow::from_i64(&[-1, 1])], &recipe).unwrap();
    assert_eq!(got, vec![Subspace::coordinate(2, &[1]), Subspace::coordinate(2, &[0])]);
    let root = MatrixFamily::singleton(shear_sqrt2()).unwrap();
    assert!(exceptional_subspaces(&root, &int(1), &[Flow::from_i64(&[1, -1])], &recipe).unwrap().is_empty());
    assert!(exceptional_subspaces(&id, &int(1), &[Flow::from_i64(&[0, 0])], &recipe).unwrap().is_empty());
    assert!(exceptional_subspaces(&id, &int(1), &[Flow::from_i64(&[1, 1])], &recipe).is_err());
}

#[test]
fn exceptions_cover_all_but_finitely_many() {
    // rational forms x1 + x2 and x2: nonzero products are integers, so beyond
    // ‖x‖ = 1 only kernel solutions remain
    let l = Mat::from_i64(&[&[1, 1], &[0, 1]]);
    let eps = rat(1, 2);
    let mut sols = scan_solutions(&ScanConfig::new(l.clone(), eps.clone(), 200).unwrap()).unwrap();
    let c = operator_bound(&l);
    let mut catalog: Vec<Flow> = Vec::new();
    for s in &sols {
        if let Ok(f) = solution_to_flow(&s.x_i64(), &l, &eps, &c) {
            catalog.push(Flow::from_i64(&f.n));
        }
    }
    for k in 1..=2 {
        catalog.push(Flow::from_i64(&[k, -k]));
        catalog.push(Flow::from_i64(&[-k, k]));
    }
    let fam = MatrixFamily::singleton(l).unwrap();
    let subs = exceptional_subspaces(&fam, &eps, &catalog, &CandidateRecipe::default()).unwrap();
    assert!(subs.contains(&Subspace::from_int_rows(2, &[vec![-1, 1]])));
    let cls = classify(&mut sols, &subs).unwrap();
    assert_eq!(cls.max_outlier_norm, Some(1.0));
    assert!(cls.outliers.iter().all(|(_, n)| *n <= 1.0));
}

#[test]
fn vwma_examples() {
    let hits = vwma_test(&[Scalar::zero()], &rat(1, 5), 12);
    assert!(hits.iter().all(|h| h.p == 0 && h.zero) && hits.len() == 12);
    let third = vwma_test(&[Scalar::Rat(rat(1, 3))], &int(1), 9);
    assert!(third.iter().any(|h| h.q == vec![3] && h.p == -1 && h.zero));
    let k = NumberField::sqrt(2, "s").unwrap();
    let mut qs: Vec<i64> = vwma_test(&[Scalar::generator(&k)], &rat(1, 5), 100).iter().map(|h| h.q[0]).collect();
    qs.sort();
    assert_eq!(qs, vec![1, 2, 3, 5, 12, 29, 70]);
}

#[test]
fn distinct_flows_within_bound() {
    let l = Mat::from_i64(&[&[2, 1], &[1, 3]]);
    let eps = int(8);
    let c = operator_bound(&l);
    let mut flows: Vec<Vec<i64>> = Vec::new();
    let mut big_d: f64 = 0.0;
    for x1 in (-3000..=3000).step_by(97) {
        for x2 in (-3000..=3000).step_by(89) {
            if let Ok(f) = solution_to_flow(&[x1, x2], &l, &eps, &c) {
                big_d = big_d.max(f.big_d);
                if !flows.contains(&f.n) {
                    flows.push(f.n);
                }
            }
        }
    }
    assert!(flows.len() > 1);
    assert!((flows.len() as f64) <= (6.0 * big_d).powi(2));
}

fn rational_form_matrix(d: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec((-4i64..=4, 1i64..=3), d * d)
        .prop_map(move |e| Mat::from_rats(&e.chunks(d).map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect()).collect::<Vec<_>>()))
        .prop_filter("invertible", move |m| m.rank() == d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn solutions_are_sign_symmetric(l in (2usize..=3).prop_flat_map(rational_form_matrix), x in prop::collection::vec(-30i64..=30, 3), e in 1i64..=8) {
        let d = l.rows();
        let x = &x[..d];
        prop_assume!(x.iter().any(|&v| v != 0));
        let neg: Vec<i64> = x.iter().map(|v| -v).collect();
        let n2 = BigInt::from(x.iter().map(|v| v * v).sum::<i64>());
        let eps = rat(e, 4);
        prop_assert_eq!(
            satisfies_exact(&form_product(&l, x), &n2, &eps),
            satisfies_exact(&form_product(&l, &neg), &n2, &eps)
        );
    }

    #[test]
    fn scans_store_canonical_primitive_vectors(l in (2usize..=3).prop_flat_map(rational_form_matrix), e in 1i64..=4) {
        let n = if l.rows() == 2 { 25 } else { 6 };
        let sols = scan_solutions(&ScanConfig::new(l, rat(e, 4), n).unwrap()).unwrap();
        for s in &sols {
            let x = s.x_i64();
            prop_assert!(*x.iter().find(|v| **v != 0).unwrap() > 0);
            prop_assert_eq!(x.iter().fold(0i64, |g, &v| num_integer::gcd(g, v)), 1);
        }
    }

    #[test]
    fn zero_sum_rounding(r in prop::collection::vec(-50.0f64..50.0, 1..6)) {
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        let r: Vec<f64> = r.iter().map(|v| v - mean).collect();
        let n = round_zero_sum(&r);
        prop_assert_eq!(n.iter().sum::<i64>(), 0);
        for (a, b) in n.iter().zip(&r) {
            prop_assert!((*a as f64 - b).abs() <= 1.5);
        }
    }

    #[test]
    fn reduced_flows_respect_bounds(l in (2usize..=3).prop_flat_map(rational_form_matrix), x in prop::collection::vec(-5000i64..=5000, 3), e in 4i64..=40) {
        let d = l.rows();
        let x = &x[..d];
        let eps = int(e);
        let c = operator_bound(&l);
        let c_f = rat_to_f64(&c);
        let xb: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
        let lx: Vec<f64> = l.mul_int_vec(&xb).unwrap().iter().map(Scalar::to_f64).collect();
        let xn = x.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
        prop_assert!(lx.iter().map(|v| v * v).sum::<f64>().sqrt() <= c_f * xn * (1.0 + 1e-12));
        if let Ok(f) = solution_to_flow(x, &l, &eps, &c) {
            prop_assert_eq!(f.n.iter().sum::<i64>(), 0);
            prop_assert!(f.n.iter().all(|&v| v.abs() as f64 <= 3.0 * f.big_d + 1.5));
        }
    }
}
