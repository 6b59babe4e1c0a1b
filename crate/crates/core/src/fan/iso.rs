use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Cone, Fan};
use crate::error::{Error, Result};
use crate::lattice::{to_i64, IntMatrix};

/// Searches for `M` in `GL(n, Z)` mapping the rays of `first` onto the rays of
/// `second` and maximal cones onto maximal cones.
///
/// Any isomorphism sends a fixed anchor cone of `first` to some maximal cone
/// of `second` with some ordering of its rays, and that choice determines `M`.
/// The search therefore visits `#cones * n!` candidates; exponential in `n`,
/// fine for desk-sized fans.
pub fn fans_isomorphic(first: &Fan, second: &Fan) -> Result<Option<IntMatrix>> {
    if first.dim() != second.dim() {
        return Err(Error::Argument(format!(
            "dimension mismatch: {} vs {}",
            first.dim(),
            second.dim()
        )));
    }
    let n = first.dim();
    if first.num_rays() != second.num_rays()
        || first.max_cones().len() != second.max_cones().len()
        || first.max_cones().iter().any(|c| c.len() != n)
        || second.max_cones().iter().any(|c| c.len() != n)
    {
        return Ok(None);
    }
    let Some(anchor) = first.max_cones().first() else {
        return Ok(Some(IntMatrix::identity(n)));
    };
    if first.multiplicity_profile()? != second.multiplicity_profile()? {
        return Ok(None);
    }
    let anchor_matrix = first.ray_matrix(anchor.indices());
    let anchor_det = anchor_matrix.determinant()?;
    if anchor_det.is_zero() {
        return Ok(None);
    }
    let anchor_adj = anchor_matrix.adjugate()?;

    let target_rays: HashMap<&[i64], usize> = second
        .rays()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.coords(), i))
        .collect();
    let target_cones: BTreeSet<&Cone> = second.max_cones().iter().collect();

    for cone in second.max_cones() {
        let det = second.ray_matrix(cone.indices()).determinant()?;
        if det.abs() != anchor_det.abs() {
            continue;
        }
        for perm in cone.indices().iter().copied().permutations(n) {
            // M * A = B  =>  M = B * adj(A) / det(A)
            let b = second.ray_matrix(&perm);
            let scaled = b.mul(&anchor_adj)?;
            if scaled
                .entries()
                .iter()
                .any(|x| !x.is_multiple_of(&anchor_det))
            {
                continue;
            }
            let entries = scaled.entries().iter().map(|x| x / &anchor_det).collect();
            let m = IntMatrix::from_vec(n, n, entries)?;
            if let Some(found) = check_candidate(first, &m, &target_rays, &target_cones)? {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

fn check_candidate(
    first: &Fan,
    m: &IntMatrix,
    target_rays: &HashMap<&[i64], usize>,
    target_cones: &BTreeSet<&Cone>,
) -> Result<Option<IntMatrix>> {
    if !m.determinant()?.abs().is_one() {
        return Ok(None);
    }
    let mut image = Vec::with_capacity(first.num_rays());
    for r in first.rays() {
        let v = m.mul_i64(r.coords())?;
        let Ok(v) = v.iter().map(to_i64).collect::<Result<Vec<i64>>>() else {
            return Ok(None);
        };
        match target_rays.get(v.as_slice()) {
            Some(&j) => image.push(j),
            None => return Ok(None),
        }
    }
    for c in first.max_cones() {
        let mapped = Cone::new(c.indices().iter().map(|&i| image[i]).collect());
        if !target_cones.contains(&mapped) {
            return Ok(None);
        }
    }
    Ok(Some(m.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::projective_space;

    fn p112() -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -2]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn projective_plane_with_permuted_rays() {
        let f = projective_space(2);
        let g = Fan::new(
            2,
            vec![vec![-1, -1], vec![0, 1], vec![1, 0]],
            vec![vec![2, 0], vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert!(fans_isomorphic(&f, &g).unwrap().is_some());
    }

    #[test]
    fn projective_plane_vs_weighted() {
        assert!(fans_isomorphic(&projective_space(2), &p112())
            .unwrap()
            .is_none());
    }

    #[test]
    fn recovers_applied_matrix() {
        let m = IntMatrix::from_rows(&[[1, 1], [0, 1]]);
        let f = projective_space(2);
        let g = Fan::new(
            2,
            vec![vec![1, 0], vec![1, 1], vec![-2, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(f.transform(&m).unwrap(), g);
        let found = fans_isomorphic(&f, &g).unwrap().unwrap();
        // P^2 has a symmetric group of automorphisms; any witness must map f onto g
        assert_eq!(f.transform(&found).unwrap(), g);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        assert!(fans_isomorphic(&projective_space(2), &projective_space(3)).is_err());
    }
}
