//! Row-style Hermite normal form over the integers, with the unimodular
//! transform that produced it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Result of [`hermite_form`].
///
/// `rows[k] = sum_j transform[k][j] * input[j]`; the rows of `kernel` are
/// the integer combinations of the input rows that vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub transform: Vec<Vec<BigInt>>,
    pub kernel: Vec<Vec<BigInt>>,
}

fn sub_scaled(target: &mut [BigInt], source: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Computes the Hermite normal form of the row lattice of `input`
/// (`cols` columns). Pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, and pivot columns strictly increase.
pub fn hermite_form(input: &[Vec<BigInt>], cols: usize) -> HermiteForm {
    let n = input.len();
    let mut a: Vec<Vec<BigInt>> = input.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        loop {
            let best = (r..n)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(best) = best else { break };
            a.swap(r, best);
            u.swap(r, best);
            let mut clean = true;
            for i in (r + 1)..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                let (head, tail) = a.split_at_mut(i);
                sub_scaled(&mut tail[0], &head[r], &q);
                let (uh, ut) = u.split_at_mut(i);
                sub_scaled(&mut ut[0], &uh[r], &q);
                if !a[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            a[r].iter_mut().for_each(|x| *x = -&*x);
            u[r].iter_mut().for_each(|x| *x = -&*x);
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            let (head, tail) = a.split_at_mut(r);
            sub_scaled(&mut head[i], &tail[0], &q);
            let (uh, ut) = u.split_at_mut(r);
            sub_scaled(&mut uh[i], &ut[0], &q);
        }
        pivots.push(c);
        r += 1;
    }
    let kernel = u.split_off(r);
    a.truncate(r);
    HermiteForm {
        rows: a,
        pivots,
        transform: u,
        kernel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn diagonal_input_is_already_reduced() {
        let h = hermite_form(&m(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(h.rows, m(&[&[2, 0], &[0, 3]]));
        assert_eq!(h.pivots, vec![0, 1]);
        assert!(h.kernel.is_empty());
    }

    #[test]
    fn dependent_rows_land_in_kernel() {
        let input = m(&[&[2, 4], &[1, 2], &[3, 5]]);
        let h = hermite_form(&input, 2);
        assert_eq!(h.rows.len(), 2);
        assert_eq!(h.kernel.len(), 1);
        for k in &h.kernel {
            for c in 0..2 {
                let s: BigInt = k.iter().zip(&input).map(|(x, row)| x * &row[c]).sum();
                assert!(s.is_zero());
            }
        }
        for (k, row) in h.rows.iter().enumerate() {
            for c in 0..2 {
                let s: BigInt = h.transform[k]
                    .iter()
                    .zip(&input)
                    .map(|(x, r)| x * &r[c])
                    .sum();
                assert_eq!(s, row[c]);
            }
        }
    }

    #[test]
    fn entries_above_pivots_are_reduced() {
        let h = hermite_form(&m(&[&[1, 7], &[0, 3]]), 2);
        assert_eq!(h.rows, m(&[&[1, 1], &[0, 3]]));
    }
}
