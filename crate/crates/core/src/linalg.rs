//! Exact Gaussian elimination over Gaussian rationals.

use crate::error::{Error, Result};
use crate::scalar::{Gaussian, Rational};

/// Row-reduces `[a | b]` and returns one solution of `a x = b`, or `None`
/// when the system is inconsistent. Free variables are set to zero.
pub fn solve(a: &[Vec<Gaussian>], b: &[Gaussian]) -> Option<Vec<Gaussian>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Gaussian>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is non-zero");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=cols {
                    let t = &m[r][k] * &f;
                    m[i][k] = &m[i][k] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Gaussian::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

pub fn rank(a: &[Vec<Gaussian>]) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is non-zero");
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for k in c..cols {
                    let t = &m[r][k] * &f;
                    m[i][k] = &m[i][k] - &t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Inverse and determinant of a square rational matrix given row-major.
pub fn inverse_rational(n: usize, a: &[Rational]) -> Result<(Vec<Rational>, Rational)> {
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = a[i * n..(i + 1) * n].to_vec();
            row.extend((0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::default() }));
            row
        })
        .collect();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let p = (c..n).find(|&i| m[i][c] != Rational::default()).ok_or(Error::Singular)?;
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for x in m[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..n {
            if i != c && m[i][c] != Rational::default() {
                let f = m[i][c].clone();
                for k in 0..2 * n {
                    let t = &m[c][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
    }
    let inv = m.into_iter().flat_map(|row| row[n..].to_vec()).collect();
    Ok((inv, det))
}
