#![allow(dead_code)]

use jordan_core::fieldfn::{Field, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Point {
    Point::from_u(&(0..n).map(|_| r.random_range(lo..hi)).collect::<Vec<_>>())
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0.0;
    for j in 0..n {
        if m[0][j] == 0.0 {
            continue;
        }
        let minor: Vec<Vec<f64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][j] * cofactor_det(&minor);
    }
    det
}

/// Coefficients of det(λI − A) by sampling the determinant at n+1 nodes and
/// solving the Vandermonde system.
pub fn char_poly_by_cofactors(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let nodes: Vec<f64> = (0..=n).map(|k| k as f64 - n as f64 / 2.0).collect();
    let vals: Vec<f64> = nodes
        .iter()
        .map(|&l| {
            let m: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { l - a[i][j] } else { -a[i][j] }).collect())
                .collect();
            cofactor_det(&m) - l.powi(n as i32)
        })
        .collect();
    // remaining polynomial has degree n−1 with unknowns f1..fn: Σ f_k λ^{n−k}
    let mut mat: Vec<Vec<f64>> = nodes.iter().take(n).map(|&l| (1..=n).map(|k| l.powi((n - k) as i32)).collect()).collect();
    let mut rhs: Vec<f64> = vals.iter().take(n).copied().collect();
    gauss_solve(&mut mat, &mut rhs)
}

pub fn gauss_solve(m: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    x
}

/// Centered-difference gradient `(∂t, ∂x, ∂u…)` with one Richardson step.
pub fn fd_grad_fn(f: impl Fn(&Point) -> f64, p: &Point, h: f64) -> Vec<f64> {
    let d = |dir: usize, h: f64| {
        let shift = |s: f64| {
            let mut q = p.clone();
            match dir {
                0 => q.t += s,
                1 => q.x += s,
                _ => q.u[dir - 2] += s,
            }
            f(&q)
        };
        (shift(h) - shift(-h)) / (2.0 * h)
    };
    (0..p.u.len() + 2).map(|dir| (4.0 * d(dir, h / 2.0) - d(dir, h)) / 3.0).collect()
}

pub fn fd_grad(f: &dyn Field, p: &Point, h: f64) -> Vec<f64> {
    fd_grad_fn(|q| f.eval(q).unwrap(), p, h)
}
