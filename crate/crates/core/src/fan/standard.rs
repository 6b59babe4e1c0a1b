use itertools::Itertools;

use super::Fan;

/// Fan of `P^n`: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`, every `n`-subset a cone.
pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    rays.push(vec![-1; n]);
    let cones = (0..=n).combinations(n).collect();
    Fan::new(n, rays, cones).expect("projective space fan is well formed")
}

/// Product fan in `Z^{n1} x Z^{n2}`, first factor in the leading coordinates.
pub fn product(first: &Fan, second: &Fan) -> Fan {
    let (n1, n2) = (first.dim(), second.dim());
    let mut rays = Vec::with_capacity(first.num_rays() + second.num_rays());
    for r in first.rays() {
        let mut v = r.coords().to_vec();
        v.resize(n1 + n2, 0);
        rays.push(v);
    }
    for r in second.rays() {
        let mut v = vec![0; n1];
        v.extend_from_slice(r.coords());
        rays.push(v);
    }
    let offset = first.num_rays();
    let cones = first
        .max_cones()
        .iter()
        .cartesian_product(second.max_cones())
        .map(|(a, b)| {
            a.indices()
                .iter()
                .copied()
                .chain(b.indices().iter().map(|&i| i + offset))
                .collect()
        })
        .collect();
    Fan::new(n1 + n2, rays, cones).expect("product of fans is well formed")
}

/// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
pub fn hirzebruch(a: i64) -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .expect("Hirzebruch fan is well formed")
}
