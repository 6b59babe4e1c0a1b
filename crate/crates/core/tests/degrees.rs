mod oracle;

use num_bigint::BigInt;
use num_rational::BigRational;

use toric_mori::classify::build_weighted_projective;
use toric_mori::contraction::{non_saturated_fibration, weighted_fiber_product};
use toric_mori::fan::{hirzebruch, product, projective_space, Fan};
use toric_mori::fuzz::{generate_instance, FuzzConfig, FuzzMode};
use toric_mori::intersection::{anticanonical_degree, curve_class, divisor_curve_degree};
use toric_mori::mori::mori_cone;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn assert_matches_oracle(f: &Fan) {
    for w in f.walls().unwrap() {
        let expected = oracle::wall_degrees(f, &w);
        assert_eq!(
            curve_class(f, &w).unwrap().degrees,
            expected,
            "wall {}",
            w.tau
        );
        for (v, e) in expected.iter().enumerate() {
            assert_eq!(&divisor_curve_degree(f, v, &w).unwrap(), e);
        }
        assert_eq!(
            anticanonical_degree(f, &w).unwrap(),
            oracle::anticanonical(f, &w)
        );
    }
    for c in f.max_cones() {
        let cols: Vec<Vec<i64>> = c
            .indices()
            .iter()
            .map(|&i| f.ray(i).coords().to_vec())
            .collect();
        let index = oracle::lattice_index(&cols, f.dim());
        assert_eq!(f.multiplicity(c).unwrap(), BigInt::from(index));
    }
}

#[test]
fn weighted_plane_values() {
    // rays in canonical order: (-2,-3), (0,1), (1,0) with weights 1, 3, 2
    let f = build_weighted_projective(&[1, 2, 3]).unwrap();
    let walls = f.walls().unwrap();
    let degrees: Vec<Vec<BigRational>> = walls
        .iter()
        .map(|w| curve_class(&f, w).unwrap().degrees)
        .collect();
    assert_eq!(
        degrees,
        vec![
            vec![q(1, 6), q(1, 2), q(1, 3)],
            vec![q(1, 2), q(3, 2), q(1, 1)],
            vec![q(1, 3), q(1, 1), q(2, 3)],
        ]
    );
    let nc = mori_cone(&f).unwrap();
    assert_eq!(nc.rays.len(), 1);
    assert_eq!(nc.rays[0].length, q(1, 1));
}

#[test]
fn standard_fans_match_oracle() {
    let p1 = projective_space(1);
    let mut fans = vec![
        projective_space(2),
        projective_space(4),
        hirzebruch(1),
        hirzebruch(3),
        product(&p1, &p1),
        product(&projective_space(2), &hirzebruch(2)),
        build_weighted_projective(&[1, 1, 2]).unwrap(),
        build_weighted_projective(&[1, 2, 5, 3]).unwrap(),
        weighted_fiber_product(&p1, 2).unwrap(),
        weighted_fiber_product(&p1, 3).unwrap(),
    ];
    for (n, d) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 3)] {
        fans.push(non_saturated_fibration(n, d).unwrap());
    }
    for f in &fans {
        assert_matches_oracle(f);
    }
}

#[test]
fn generated_fans_match_oracle() {
    for mode in [
        FuzzMode::Bundle,
        FuzzMode::Ex32Like,
        FuzzMode::WeightedProjective,
    ] {
        let config = FuzzConfig::new(99, 40, 4, mode).unwrap();
        for i in 0..config.count {
            let inst = generate_instance(&config, i).unwrap();
            assert_matches_oracle(inst.fan());
        }
    }
}

#[test]
fn member_degrees_may_differ_on_one_ray() {
    // the fiber ray of the non-saturated surface has member walls of degree 1 and 2
    let f = non_saturated_fibration(2, 1).unwrap();
    let walls = f.walls().unwrap();
    let mut fiber_walls: Vec<BigRational> = walls
        .iter()
        .filter(|w| {
            f.ray(w.tau.indices()[0]).coords()[0] == 0
                || f.ray(w.tau.indices()[0]).coords() == [1, 2]
        })
        .map(|w| oracle::anticanonical(&f, w))
        .collect();
    fiber_walls.sort();
    assert_eq!(fiber_walls, vec![q(1, 1), q(2, 1)]);
}
