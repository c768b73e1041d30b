//! Dense exact-rational simplex for small LPs in the form
//! `max c·x  s.t.  A x ≤ b,  x ≥ 0` with `b ≥ 0`, so the slack basis is
//! feasible and no phase-1 is needed. Bland's rule prevents cycling.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

#[derive(Debug, Clone)]
pub struct SimplexSolution {
    pub objective: Rat,
    /// Primal solution, length n.
    pub x: Vec<Rat>,
    /// Dual prices on the ≤ constraints, length m.
    pub dual: Vec<Rat>,
}

pub fn simplex_max(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<SimplexSolution> {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m);
    assert!(a.iter().all(|row| row.len() == n));
    assert!(b.iter().all(|bi| !bi.is_negative()));

    // tableau rows: [A | I | b], objective row tracks z_j - c_j.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rat> = Vec::with_capacity(width);
            row.extend(a[i].iter().cloned());
            for j in 0..m {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut obj: Vec<Rat> = c.iter().map(|cj| -cj.clone()).collect();
    obj.extend(std::iter::repeat_with(Rat::zero).take(m + 1));
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 10_000usize;
    for _ in 0..max_pivots {
        // Bland: entering = lowest index with negative objective coefficient
        let Some(enter) = (0..n + m).find(|&j| obj[j] < Rat::zero()) else {
            // optimal
            let mut x = vec![Rat::zero(); n];
            for (row, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t[row][width - 1].clone();
                }
            }
            let dual = (0..m).map(|i| obj[n + i].clone()).collect();
            return Ok(SimplexSolution {
                objective: basis
                    .iter()
                    .enumerate()
                    .map(|(row, &bv)| {
                        if bv < n {
                            c[bv].clone() * t[row][width - 1].clone()
                        } else {
                            Rat::zero()
                        }
                    })
                    .sum(),
                x,
                dual,
            });
        };
        // ratio test, ties broken by lowest basis index (Bland)
        let mut leave: Option<(usize, Rat)> = None;
        for row in 0..m {
            if t[row][enter] > Rat::zero() {
                let ratio = t[row][width - 1].clone() / t[row][enter].clone();
                let replace = match &leave {
                    None => true,
                    Some((lrow, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[row] < basis[*lrow])
                    }
                };
                if replace {
                    leave = Some((row, ratio));
                }
            }
        }
        let Some((lrow, _)) = leave else {
            return Err(Error::Malformed("LP is unbounded".into()));
        };
        // pivot
        let pivot = t[lrow][enter].clone();
        for v in t[lrow].iter_mut() {
            *v /= pivot.clone();
        }
        for row in 0..m {
            if row != lrow && !t[row][enter].is_zero() {
                let factor = t[row][enter].clone();
                for j in 0..width {
                    let delta = factor.clone() * t[lrow][j].clone();
                    t[row][j] -= delta;
                }
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for j in 0..width - 1 {
                let delta = factor.clone() * t[lrow][j].clone();
                obj[j] -= delta;
            }
            let delta = factor * t[lrow][width - 1].clone();
            obj[width - 1] -= delta;
        }
        basis[lrow] = enter;
    }
    Err(Error::Malformed("simplex pivot limit reached".into()))
}
