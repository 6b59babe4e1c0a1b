mod oracle;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use toric_mori::classify::{
    build_weighted_projective, is_projective_space, recognize_p112, rho_one_check,
};
use toric_mori::contraction::{build_bundle_fan, non_saturated_fibration, weighted_fiber_product};
use toric_mori::fan::{fans_isomorphic, hirzebruch, product, projective_space, Fan};
use toric_mori::intersection::curve_class;
use toric_mori::io::{parse_fan, serialize_fan};
use toric_mori::lattice::{smith_normal_form, IntMatrix};
use toric_mori::mori::mori_cone;

fn matrix(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
            IntMatrix::from_rows(&rows)
        })
    })
}

/// Unimodular matrix as a product of elementary row operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut m = IntMatrix::identity(n);
        for (i, j, k, neg) in ops {
            if i != j {
                m.add_row_multiple(i, j, &BigInt::from(k));
            } else if neg {
                m.negate_row(i);
            }
        }
        m
    })
}

fn sample_fans() -> Vec<Fan> {
    let p1 = projective_space(1);
    vec![
        projective_space(2),
        hirzebruch(1),
        hirzebruch(2),
        product(&p1, &p1),
        build_weighted_projective(&[1, 1, 2]).unwrap(),
        build_weighted_projective(&[1, 2, 3]).unwrap(),
        non_saturated_fibration(2, 1).unwrap(),
        non_saturated_fibration(3, 1).unwrap(),
        weighted_fiber_product(&p1, 2).unwrap(),
        build_bundle_fan(&projective_space(2), 1, &[vec![2], vec![0], vec![-1]]).unwrap(),
    ]
}

fn sorted_lengths(f: &Fan) -> Vec<BigRational> {
    let mut v: Vec<_> = mori_cone(f)
        .unwrap()
        .rays
        .into_iter()
        .map(|r| r.length)
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_reconstructs(m in matrix(5)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.left.mul(&m).unwrap().mul(&s.right).unwrap(), s.diagonal_matrix());
        prop_assert!(s.left.determinant().unwrap().abs().is_one());
        prop_assert!(s.right.determinant().unwrap().abs().is_one());
        for w in s.diag[..s.rank].windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert_eq!(s.rank, m.rank());
    }

    #[test]
    fn minor_gcd_matches_divisors(m in matrix(4)) {
        let s = smith_normal_form(&m);
        for k in 1..=m.rows().min(m.cols()) {
            let expected: BigInt = if k <= s.rank { s.diag[..k].iter().product() } else { BigInt::zero() };
            prop_assert_eq!(m.minor_gcd(k).unwrap(), expected);
        }
    }

    #[test]
    fn adjugate_and_solve(n in 1usize..=4, entries in proptest::collection::vec(-9i64..=9, 16), z in proptest::collection::vec(-9i64..=9, 4)) {
        let rows: Vec<Vec<i64>> = entries.chunks(4).take(n).map(|r| r[..n].to_vec()).collect();
        let a = IntMatrix::from_rows(&rows);
        let det = a.determinant().unwrap();
        prop_assert_eq!(a.mul(&a.adjugate().unwrap()).unwrap(), IntMatrix::identity(n).scale(&det));
        if !det.is_zero() {
            let z: Vec<BigInt> = z[..n].iter().map(|&x| BigInt::from(x)).collect();
            let x = a.solve_rational(&z).unwrap();
            for (i, zi) in z.iter().enumerate() {
                let lhs: BigRational = (0..n).map(|j| BigRational::from_integer(a.get(i, j).clone()) * &x[j]).sum();
                prop_assert_eq!(lhs, BigRational::from_integer(zi.clone()));
            }
        }
    }

    #[test]
    fn conjugation_preserves_everything(k in 0usize..10, m in unimodular(2)) {
        let fans = sample_fans();
        let f = &fans[k];
        if f.dim() != 2 {
            return Ok(());
        }
        let g = f.transform(&m).unwrap();
        prop_assert_eq!(f.multiplicity_profile().unwrap(), g.multiplicity_profile().unwrap());
        prop_assert_eq!(f.is_projective(), g.is_projective());
        let witness = fans_isomorphic(f, &g).unwrap();
        prop_assert!(witness.is_some());
        prop_assert_eq!(f.transform(&witness.unwrap()).unwrap(), g.clone());
        prop_assert_eq!(sorted_lengths(f), sorted_lengths(&g));
        prop_assert_eq!(is_projective_space(f), is_projective_space(&g));
        prop_assert_eq!(recognize_p112(f), recognize_p112(&g));
        prop_assert_eq!(parse_fan(&serialize_fan(&g)).unwrap(), g);
    }

    #[test]
    fn conjugation_in_three_dimensions(k in 0usize..10, m in unimodular(3)) {
        let fans = sample_fans();
        let f = &fans[k];
        if f.dim() != 3 {
            return Ok(());
        }
        let g = f.transform(&m).unwrap();
        prop_assert_eq!(sorted_lengths(f), sorted_lengths(&g));
        prop_assert!(fans_isomorphic(f, &g).unwrap().is_some());
    }

    #[test]
    fn degrees_agree_with_oracle_after_conjugation(k in 0usize..10, m2 in unimodular(2), m3 in unimodular(3)) {
        let fans = sample_fans();
        let f = &fans[k];
        let g = if f.dim() == 2 { f.transform(&m2).unwrap() } else { f.transform(&m3).unwrap() };
        for w in g.walls().unwrap() {
            prop_assert_eq!(curve_class(&g, &w).unwrap().degrees, oracle::wall_degrees(&g, &w));
        }
    }

    #[test]
    fn weighted_length_invariant(weights in proptest::collection::vec(1u64..=6, 2..=3), m in unimodular(3)) {
        let mut w = vec![1u64];
        w.extend(&weights);
        let Ok(f) = build_weighted_projective(&w) else { return Ok(()) };
        let g = if f.dim() == 3 { f.transform(&m).unwrap() } else { f.clone() };
        let (a, b) = (rho_one_check(&f).unwrap(), rho_one_check(&g).unwrap());
        prop_assert_eq!(&a.length, &b.length);
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!(b.holds());
    }
}
