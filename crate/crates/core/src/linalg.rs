//! Exact null spaces over a field.

use crate::number::Field;

/// Basis of `{x : A x = 0}` for a dense `rows × ncols` matrix, one vector
/// per free column of the reduced row echelon form (free entry 1).
#[allow(clippy::needless_range_loop)]
pub fn nullspace<F: Field>(mut a: Vec<Vec<F>>, ncols: usize) -> Vec<Vec<F>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = F::one().div_ref(&a[r][c]);
        for x in a[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        for i in 0..a.len() {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for k in c..ncols {
                let sub = f.mul_ref(&a[r][k]);
                a[i][k] = a[i][k].sub_ref(&sub);
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![F::zero(); ncols];
            x[free] = F::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = a[row][free].neg_ref();
            }
            x
        })
        .collect()
}

/// `A x`.
pub fn mat_vec<F: Field>(a: &[Vec<F>], x: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(F::zero(), |acc, (p, q)| acc.add_ref(&p.mul_ref(q)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{rat, Rational};
    use num::Zero;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect()
    }

    #[test]
    fn rank_deficient() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let basis = nullspace(a.clone(), 3);
        assert_eq!(basis.len(), 1);
        assert!(mat_vec(&a, &basis[0]).iter().all(Rational::is_zero));
    }

    #[test]
    fn full_rank_and_empty() {
        assert!(nullspace(m(&[&[1, 0], &[0, 1]]), 2).is_empty());
        assert_eq!(nullspace::<Rational>(vec![], 2).len(), 2);
    }
}
