//! Independent reference computations, in machine integers, sharing no code
//! with the library beyond the fan data structure.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use toric_mori::fan::{Fan, Wall};

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Bareiss elimination over `i128`.
pub fn det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn primitive(mut v: Vec<i128>) -> Vec<i128> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    v
}

/// Primitive normal of `n-1` independent vectors in `Z^n` (generalized cross product).
pub fn normal(vectors: &[Vec<i64>], n: usize) -> Vec<i128> {
    let v: Vec<i128> = (0..n)
        .map(|i| {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| vectors.iter().map(|c| i128::from(c[r])).collect())
                .collect();
            if i % 2 == 0 {
                det(minor)
            } else {
                -det(minor)
            }
        })
        .collect();
    primitive(v)
}

/// Primitive kernel vector of `n+1` vectors in `Z^n` spanning `Q^n`.
pub fn kernel(columns: &[Vec<i64>], n: usize) -> Vec<i128> {
    let v: Vec<i128> = (0..columns.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> = (0..n)
                .map(|r| {
                    columns
                        .iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, col)| i128::from(col[r]))
                        .collect()
                })
                .collect();
            if j % 2 == 0 {
                det(minor)
            } else {
                -det(minor)
            }
        })
        .collect();
    primitive(v)
}

fn q(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `D_ρ · C` for every ray, via linear equivalence.
///
/// `N / (span(τ) ∩ N) ≅ Z` through the primitive normal `m`, so the
/// opposite ray `u` meets the curve with degree `1 / |<m, u>|`. The other
/// degrees follow from `Σ (D_ρ · C) v_ρ = 0`, i.e. they are proportional to
/// the kernel of the `n + 1` rays.
pub fn wall_degrees(fan: &Fan, wall: &Wall) -> Vec<BigRational> {
    let n = fan.dim();
    let cones = fan.max_cones();
    let outside = |k: usize| {
        *cones[k]
            .indices()
            .iter()
            .find(|&&i| !wall.tau.contains(i))
            .expect("wall has an opposite ray")
    };
    let (u, u2) = (outside(wall.left), outside(wall.right));
    let tau: Vec<usize> = wall.tau.indices().to_vec();
    let coords = |i: usize| fan.ray(i).coords().to_vec();

    let m = normal(&tau.iter().map(|&i| coords(i)).collect::<Vec<_>>(), n);
    let pair = |i: usize| -> i128 {
        m.iter()
            .zip(coords(i))
            .map(|(a, b)| a * i128::from(b))
            .sum()
    };
    let (mu, mu2) = (pair(u).abs(), pair(u2).abs());
    assert!(
        mu > 0 && mu2 > 0,
        "opposite rays must leave the wall hyperplane"
    );

    let mut order = vec![u, u2];
    order.extend(&tau);
    let mut lambda = kernel(&order.iter().map(|&i| coords(i)).collect::<Vec<_>>(), n);
    if lambda[0] < 0 {
        lambda.iter_mut().for_each(|x| *x = -*x);
    }
    // the relation paired with m forces λ_u' / λ_u = |<m,u>| / |<m,u'>|
    assert_eq!(
        lambda[1] * mu2,
        lambda[0] * mu,
        "relation disagrees with the normal"
    );

    let mut out = vec![q(0, 1); fan.num_rays()];
    for (pos, &ray) in order.iter().enumerate() {
        out[ray] = q(lambda[pos], lambda[0] * mu);
    }
    out
}

/// `-K · C` from the oracle degrees.
pub fn anticanonical(fan: &Fan, wall: &Wall) -> BigRational {
    wall_degrees(fan, wall).into_iter().sum()
}

/// Index of the sublattice generated by the columns inside its saturation,
/// as the gcd of maximal minors by brute force.
pub fn lattice_index(columns: &[Vec<i64>], n: usize) -> i128 {
    let k = columns.len();
    let mut g = 0;
    for rows in combinations(n, k) {
        let minor: Vec<Vec<i128>> = rows
            .iter()
            .map(|&r| columns.iter().map(|c| i128::from(c[r])).collect())
            .collect();
        g = gcd(g, det(minor));
    }
    g
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[test]
fn oracle_self_checks() {
    assert_eq!(det(vec![vec![2, 1], vec![1, 1]]), 1);
    assert_eq!(det(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]]), -3);
    assert_eq!(normal(&[vec![1, 0, 0], vec![0, 1, 0]], 3), vec![0, 0, 1]);
    let k = kernel(&[vec![1, 0], vec![0, 1], vec![-1, -2]], 2);
    assert_eq!(k.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 2, 1]);
    assert_eq!(lattice_index(&[vec![1, 1, 2]], 3), 1);
    assert_eq!(lattice_index(&[vec![2, 0], vec![0, 3]], 2), 6);
}
