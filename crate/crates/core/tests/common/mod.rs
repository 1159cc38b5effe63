//! Independent oracles shared by the integration tests. None of these reuse
//! library algorithms beyond `ParityCheckMatrix` accessors.
#![allow(dead_code)]

use polylp::ParityCheckMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

/// Even-weight vertices of the unit cube in dimension `d`.
pub fn even_vertices(d: usize) -> Vec<Vec<f64>> {
    (0u32..1 << d)
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| (0..d).map(|k| f64::from((m >> k) & 1)).collect())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-14 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        let bc = b[c];
        let (upper, lower) = a.split_at_mut(c + 1);
        let pivot = &upper[c];
        for (row, br) in lower.iter_mut().zip(&mut b[c + 1..]) {
            let f = row[c] / pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * p;
            }
            *br -= f * bc;
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Nearest point to `u` in the convex hull of `points`, by Wolfe's
/// minimum-norm-point algorithm on the translated set `points - u`. Stops
/// when the Frank-Wolfe gap falls below `tol`.
pub fn min_norm_hull_projection(u: &[f64], points: &[Vec<f64>], tol: f64) -> Vec<f64> {
    let d = u.len();
    let p: Vec<Vec<f64>> = points
        .iter()
        .map(|v| v.iter().zip(u).map(|(a, b)| a - b).collect())
        .collect();
    let combo = |s: &[usize], w: &[f64]| {
        let mut x = vec![0.0; d];
        for (&k, &wk) in s.iter().zip(w) {
            for (xi, pi) in x.iter_mut().zip(&p[k]) {
                *xi += wk * pi;
            }
        }
        x
    };
    let first = (0..p.len())
        .min_by(|&a, &b| dot(&p[a], &p[a]).total_cmp(&dot(&p[b], &p[b])))
        .unwrap();
    let mut s = vec![first];
    let mut w = vec![1.0];
    let mut x = p[first].clone();
    for _ in 0..10_000 {
        let j = (0..p.len())
            .min_by(|&a, &b| dot(&x, &p[a]).total_cmp(&dot(&x, &p[b])))
            .unwrap();
        if dot(&x, &x) - dot(&x, &p[j]) <= tol || s.contains(&j) {
            break;
        }
        s.push(j);
        w.push(0.0);
        loop {
            // Affine minimizer over span of S: [0 1'; 1 G][mu; a] = [1; 0].
            let m = s.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            b[0] = 1.0;
            for r in 0..m {
                a[0][r + 1] = 1.0;
                a[r + 1][0] = 1.0;
                for c in 0..m {
                    a[r + 1][c + 1] = dot(&p[s[r]], &p[s[c]]);
                }
            }
            let alpha = match solve(a, b) {
                Some(sol) => sol[1..].to_vec(),
                None => {
                    // Affinely dependent: drop the newest point and stop.
                    s.pop();
                    w.pop();
                    break;
                }
            };
            if alpha.iter().all(|&v| v > 1e-15) {
                w = alpha;
                x = combo(&s, &w);
                break;
            }
            let theta = w
                .iter()
                .zip(&alpha)
                .filter(|(_, &al)| al <= 1e-15)
                .map(|(&wk, &al)| wk / (wk - al))
                .fold(f64::INFINITY, f64::min);
            for (wk, al) in w.iter_mut().zip(&alpha) {
                *wk += theta * (al - *wk);
            }
            let keep: Vec<bool> = w.iter().map(|&wk| wk > 1e-15).collect();
            let mut k = 0;
            s.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            w.retain(|&wk| wk > 1e-15);
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|wk| *wk /= total);
            x = combo(&s, &w);
        }
    }
    x.iter().zip(u).map(|(a, b)| a + b).collect()
}

/// Euclidean projection onto the parity polytope by hull enumeration.
pub fn oracle_projection(u: &[f64]) -> Vec<f64> {
    min_norm_hull_projection(u, &even_vertices(u.len()), 1e-13)
}

/// Largest value of `c . x` over even-weight binary `x`.
pub fn max_linear_by_enumeration(c: &[f64]) -> f64 {
    even_vertices(c.len())
        .iter()
        .map(|v| dot(v, c))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every codeword of `code`, by exhaustive search over `{0,1}^N`.
pub fn codebook(code: &ParityCheckMatrix) -> Vec<Vec<u8>> {
    let n = code.n_vars();
    assert!(n <= 24);
    (0u32..1 << n)
        .map(|m| (0..n).map(|k| ((m >> k) & 1) as u8).collect::<Vec<u8>>())
        .filter(|c| {
            code.checks()
                .iter()
                .all(|nb| nb.iter().map(|&i| c[i]).sum::<u8>() % 2 == 0)
        })
        .collect()
}

pub fn cost(gamma: &[f64], c: &[u8]) -> f64 {
    gamma.iter().zip(c).map(|(g, &b)| g * f64::from(b)).sum()
}

/// Bitwise log-ratios `ln P(x_i = 0) / P(x_i = 1)` under the weights
/// `exp(-gamma . c)` over the codebook.
pub fn exact_marginals(code: &ParityCheckMatrix, gamma: &[f64]) -> Vec<f64> {
    let n = code.n_vars();
    let mut p0 = vec![0.0; n];
    let mut p1 = vec![0.0; n];
    for c in codebook(code) {
        let w = (-cost(gamma, &c)).exp();
        for k in 0..n {
            if c[k] == 0 {
                p0[k] += w
            } else {
                p1[k] += w
            }
        }
    }
    p0.iter().zip(&p1).map(|(a, b)| (a / b).ln()).collect()
}

/// Random code whose Tanner graph is a tree with exactly `n` variables.
pub fn random_tree_code<R: Rng>(n: usize, rng: &mut R) -> ParityCheckMatrix {
    assert!(n >= 2);
    let mut checks = Vec::new();
    let mut placed = 1;
    while placed < n {
        let anchor = rng.gen_range(0..placed);
        let fresh = rng.gen_range(1..=3).min(n - placed);
        let mut nb = vec![anchor];
        nb.extend(placed..placed + fresh);
        placed += fresh;
        checks.push(nb);
    }
    // Relabel so the tree is not laid out in index order.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let checks = checks
        .into_iter()
        .map(|nb| nb.into_iter().map(|i| perm[i]).collect())
        .collect();
    ParityCheckMatrix::from_check_neighborhoods(n, checks).unwrap()
}

/// Random sparse code with `n` variables, every variable in at least one
/// check, and dimension at most `max_dim`.
pub fn random_small_code<R: Rng>(n: usize, max_dim: usize, rng: &mut R) -> ParityCheckMatrix {
    loop {
        let m = rng.gen_range(n / 2..n);
        let mut checks: Vec<Vec<usize>> = (0..m)
            .map(|_| {
                let deg = rng.gen_range(2..=5.min(n));
                let mut all: Vec<usize> = (0..n).collect();
                all.shuffle(rng);
                all.truncate(deg);
                all.sort_unstable();
                all
            })
            .collect();
        for i in 0..n {
            if !checks.iter().any(|c| c.contains(&i)) {
                let j = rng.gen_range(0..m);
                checks[j].push(i);
                checks[j].sort_unstable();
            }
        }
        let code = ParityCheckMatrix::from_check_neighborhoods(n, checks).unwrap();
        if n - code.rank_gf2() <= max_dim && n - code.rank_gf2() >= 1 {
            return code;
        }
    }
}

/// Optimal value of the decoding LP, with each check's parity polytope
/// written as its odd-set inequalities and solved by a simplex solver.
pub fn lp_optimum(code: &ParityCheckMatrix, gamma: &[f64]) -> f64 {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = gamma.iter().map(|&g| lp.add_var(g, (0.0, 1.0))).collect();
    for nb in code.checks() {
        let d = nb.len();
        for m in 0u32..1 << d {
            if m.count_ones() % 2 == 0 {
                continue;
            }
            let row: Vec<_> = nb
                .iter()
                .enumerate()
                .map(|(k, &i)| (vars[i], if (m >> k) & 1 == 1 { 1.0 } else { -1.0 }))
                .collect();
            lp.add_constraint(row.as_slice(), ComparisonOp::Le, f64::from(m.count_ones()) - 1.0);
        }
    }
    lp.solve().expect("decoding LP is feasible and bounded").objective()
}

/// The (7,4) Hamming code.
pub fn hamming() -> ParityCheckMatrix {
    ParityCheckMatrix::from_dense(&[
        vec![1, 1, 0, 1, 1, 0, 0],
        vec![1, 0, 1, 1, 0, 1, 0],
        vec![0, 1, 1, 1, 0, 0, 1],
    ])
    .unwrap()
}
