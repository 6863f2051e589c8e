//! Invariant factors from determinantal divisors.
//!
//! Over a valuation ring the `k`-th determinantal divisor is the minimum
//! valuation over all `k × k` minors, and the `k`-th invariant factor has
//! valuation `D_k − D_{k−1}`. Entries are treated as exact elements.

use torsionlab_core::novikov::NovikovElement;
use torsionlab_core::rational::{Extended, Q};

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn det(m: &[Vec<NovikovElement>]) -> NovikovElement {
    match m.len() {
        0 => NovikovElement::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = NovikovElement::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<NovikovElement>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][c] * &det(&minor);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Valuations of the nonzero invariant factors of an exact matrix.
pub fn invariant_factors(rows: &[Vec<NovikovElement>]) -> Vec<Q> {
    let exact: Vec<Vec<NovikovElement>> =
        rows.iter().map(|r| r.iter().map(|x| x.clone().into_exact()).collect()).collect();
    let nrows = exact.len();
    let ncols = exact.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut previous = Q::from_integer(0.into());
    for k in 1..=nrows.min(ncols) {
        let mut best = Extended::Infinity;
        for rs in combinations(nrows, k) {
            for cs in combinations(ncols, k) {
                let sub: Vec<Vec<NovikovElement>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| exact[r][c].clone()).collect()).collect();
                best = best.min(det(&sub).valuation());
            }
        }
        match best {
            Extended::Finite(d) => {
                out.push(&d - &previous);
                previous = d;
            }
            Extended::Infinity => break,
        }
    }
    out
}
