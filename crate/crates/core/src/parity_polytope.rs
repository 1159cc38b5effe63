//! The parity polytope `PP_d`: the convex hull of the even-weight vertices
//! of the unit hypercube `[0,1]^d`.
//!
//! Every point of `PP_d` lies between two adjacent "slices": it is a convex
//! combination of a point in the permutahedron of weight-`r` binary vectors
//! and one in the permutahedron of weight-`r + 2` vectors, where `r` is an
//! even integer. Membership in such a two-slice combination reduces to
//! prefix-sum (majorization) bounds on the sorted coordinates.
//!
//! # Projection
//!
//! For `u` sorted into `v` (descending), the projection onto `PP_d` is
//!
//! ```text
//! z* = clamp01(v - beta_opt * f_r),   f_r = (+1 x (r+1), -1 x (d-r-1))
//! ```
//!
//! where `r` is the even floor of `|clamp01(v)|_1` (the constituent parity)
//! and `beta_opt` in `[0, beta_max]` solves `f_r . z(beta) = r`. The function
//! `g(beta) = f_r . clamp01(v - beta f_r)` is continuous, non-increasing and
//! piecewise linear with slope `-|active set|`, where the active set is the
//! set of coordinates strictly inside `(0, 1)`. Its breakpoints are where a
//! coordinate enters or leaves the active set:
//!
//! | coordinates | enters (`E`) | leaves (`L`) |
//! |-------------|--------------|--------------|
//! | `k <= r+1`  | `v_k - 1`    | `v_k`        |
//! | `k >= r+2`  | `-v_k`       | `1 - v_k`    |
//!
//! Each of the four lists is already monotone in `k` because `v` is sorted,
//! so they are merged in linear time and `g` is marched forward from
//! `g(0) = f_r . clamp01(v)` keeping the active count as the slope. The whole
//! projection costs one sort plus a linear pass.
//!
//! [`project_by_direct_evaluation`] locates the same root by evaluating `g`
//! from scratch at every breakpoint. It is quadratic and exists as an
//! independent cross-check of the march.

use crate::error::{Error, Result};

/// Absolute tolerance for comparisons against the constituent parity.
pub const PARITY_TOL: f64 = 1e-9;

/// Largest even integer `<= a`.
pub fn even_floor(a: f64) -> Result<i64> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("even_floor of non-finite value {a}")));
    }
    let f = a.floor() as i64;
    Ok(f - f.rem_euclid(2))
}

/// Smallest even integer `>= a`.
pub fn even_ceil(a: f64) -> Result<i64> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("even_ceil of non-finite value {a}")));
    }
    let c = a.ceil() as i64;
    Ok(c + c.rem_euclid(2))
}

/// Componentwise clamp to `[0, 1]`.
pub fn project_hypercube(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x.clamp(0.0, 1.0)).collect()
}

/// Even floor of the l1 norm of the hypercube projection of `v`.
pub fn constituent_parity(v: &[f64]) -> Result<usize> {
    check_finite(v)?;
    let s: f64 = v.iter().map(|&x| x.clamp(0.0, 1.0)).sum();
    Ok(even_floor(s)? as usize)
}

/// `(r, alpha)` such that `|u|_1 = alpha r + (1 - alpha)(r + 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSliceDecomposition {
    pub r: usize,
    pub alpha: f64,
}

/// Decomposes a member of `PP_d` into its two adjacent slices.
pub fn two_slice_decompose(u: &[f64], tol: f64) -> Result<TwoSliceDecomposition> {
    if !membership(u, tol) {
        return Err(Error::Precondition(
            "point does not lie in the parity polytope".into(),
        ));
    }
    let s: f64 = u.iter().sum();
    let r = even_floor(s.max(0.0))? as usize;
    let alpha = ((2.0 + r as f64 - s) / 2.0).clamp(0.0, 1.0);
    Ok(TwoSliceDecomposition { r, alpha })
}

/// Tests `u in PP_d` up to absolute tolerance `tol`.
///
/// Checks the box, then the prefix bounds
/// `sum_{k<=q} u_(k) <= alpha min(q, r) + (1 - alpha) min(q, r + 2)` for
/// every `q`, with `u_(k)` the sorted coordinates.
pub fn membership(u: &[f64], tol: f64) -> bool {
    if u.iter().any(|x| !x.is_finite() || *x < -tol || *x > 1.0 + tol) {
        return false;
    }
    let d = u.len();
    let s: f64 = u.iter().sum();
    if s > d as f64 + tol {
        return false;
    }
    let Ok(r) = even_floor(s.max(0.0)) else {
        return false;
    };
    let r = r as usize;
    let alpha = (2.0 + r as f64 - s) / 2.0;
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    for (q, x) in sorted.iter().enumerate() {
        let q = q + 1;
        prefix += x;
        let bound = alpha * q.min(r) as f64 + (1.0 - alpha) * q.min(r + 2) as f64;
        if prefix > bound + tol {
            return false;
        }
    }
    true
}

/// Result of a projection onto `PP_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// The projected point, in the input's coordinate order.
    pub z: Vec<f64>,
    /// The root `beta_opt` of `f_r . z(beta) = r`; zero when the hypercube
    /// projection already lies in `PP_d`.
    pub beta_opt: f64,
    /// Constituent parity of the input.
    pub r: usize,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    beta: f64,
    delta: i32,
}

/// Reusable buffers for repeated projections.
///
/// `perm[k]` is the input index of the `k`-th largest entry, `v_sorted` is
/// the input in that order, `z_sorted` the result in that order, and
/// `events` the merged breakpoint list of the last call. Owned by one caller
/// at a time.
#[derive(Debug, Default, Clone)]
pub struct ProjectionWorkspace {
    pub perm: Vec<usize>,
    pub v_sorted: Vec<f64>,
    pub z_sorted: Vec<f64>,
    keys: Vec<u128>,
    scratch: Vec<u128>,
    events: Vec<Event>,
    lists: [Vec<f64>; 4],
}

impl ProjectionWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Projects `u` onto `PP_d`, writing `z*` into `out` (input order).
    /// Returns `(beta_opt, r)`.
    pub fn project_into(&mut self, u: &[f64], out: &mut [f64]) -> Result<(f64, usize)> {
        let d = u.len();
        if d == 0 {
            return Err(Error::Domain("cannot project a zero-length vector".into()));
        }
        if out.len() != d {
            return Err(Error::Dimension(format!(
                "output has length {} but input has {d}",
                out.len()
            )));
        }
        check_finite(u)?;

        self.sort_input(u);
        let (beta, r) = self.solve_sorted();
        for (k, &i) in self.perm.iter().enumerate() {
            out[i] = self.z_sorted[k];
        }
        Ok((beta, r))
    }

    pub fn project(&mut self, u: &[f64]) -> Result<Projection> {
        let mut z = vec![0.0; u.len()];
        let (beta_opt, r) = self.project_into(u, &mut z)?;
        Ok(Projection { z, beta_opt, r })
    }

    fn sort_input(&mut self, u: &[f64]) {
        // Sort integer keys (descending value, then ascending index): the
        // index tie-break makes the unstable sort stable, and integer
        // comparisons are much cheaper than float ones.
        self.keys.clear();
        self.keys
            .extend(u.iter().enumerate().map(|(i, &x)| (u128::from(descending_key(x)) << 64) | i as u128));
        if self.keys.len() >= RADIX_MIN_LEN {
            radix_sort_high(&mut self.keys, &mut self.scratch);
        } else {
            self.keys.sort_unstable();
        }
        self.perm.clear();
        self.perm.extend(self.keys.iter().map(|&k| k as u64 as usize));
        self.v_sorted.clear();
        self.v_sorted.extend(self.perm.iter().map(|&i| u[i]));
    }

    fn solve_sorted(&mut self) -> (f64, usize) {
        let v = &self.v_sorted;
        let d = v.len();
        self.z_sorted.clear();
        self.z_sorted.extend(v.iter().map(|&x| x.clamp(0.0, 1.0)));

        let norm: f64 = self.z_sorted.iter().sum();
        let r = (norm.floor() as usize) & !1;
        if r >= d {
            return (0.0, r);
        }
        let head = r + 1;
        let g0: f64 =
            self.z_sorted[..head].iter().sum::<f64>() - self.z_sorted[head..].iter().sum::<f64>();
        let target = r as f64;
        if g0 <= target + PARITY_TOL {
            return (0.0, r);
        }

        let beta_max = if r + 2 <= d {
            0.5 * (v[r] - v[r + 1])
        } else {
            v[r]
        };

        // Slope of g just to the right of beta = 0.
        let mut active: i64 = v[..head].iter().filter(|&&x| x > 0.0 && x <= 1.0).count() as i64
            + v[head..].iter().filter(|&&x| (0.0..1.0).contains(&x)).count() as i64;

        self.merge_events(head, beta_max);

        let mut beta = 0.0;
        let mut g = g0;
        let mut beta_opt = None;
        for ev in self.events.iter() {
            let g_next = g - active as f64 * (ev.beta - beta);
            if g_next <= target {
                beta_opt = Some(beta + (g - target) / active as f64);
                break;
            }
            beta = ev.beta;
            g = g_next;
            active += i64::from(ev.delta);
        }
        let beta_opt = match beta_opt {
            Some(b) => b,
            None if active > 0 => beta + (g - target) / active as f64,
            None => beta_max,
        }
        .clamp(0.0, beta_max.max(0.0));

        let v = &self.v_sorted;
        for (k, z) in self.z_sorted.iter_mut().enumerate() {
            let shifted = if k < head { v[k] - beta_opt } else { v[k] + beta_opt };
            *z = shifted.clamp(0.0, 1.0);
        }
        (beta_opt, r)
    }

    /// Fills `events` with every breakpoint in `(0, beta_max]`, ascending.
    fn merge_events(&mut self, head: usize, beta_max: f64) {
        let v = &self.v_sorted;
        let [enter_hi, leave_hi, enter_lo, leave_lo] = &mut self.lists;
        enter_hi.clear();
        leave_hi.clear();
        enter_lo.clear();
        leave_lo.clear();
        // v is descending, so the head lists ascend when walked backwards and
        // the tail lists ascend when walked forwards.
        enter_hi.extend(v[..head].iter().rev().map(|&x| x - 1.0));
        leave_hi.extend(v[..head].iter().rev().copied());
        enter_lo.extend(v[head..].iter().map(|&x| -x));
        leave_lo.extend(v[head..].iter().map(|&x| 1.0 - x));

        const DELTAS: [i32; 4] = [1, -1, 1, -1];
        let lists = &self.lists;
        let mut pos = [0usize; 4];
        for (p, list) in pos.iter_mut().zip(lists) {
            *p = list.partition_point(|&b| b <= 0.0);
        }
        self.events.clear();
        loop {
            let mut best: Option<(usize, f64)> = None;
            for (s, list) in lists.iter().enumerate() {
                if let Some(&b) = list.get(pos[s]) {
                    if best.is_none_or(|(_, bb)| b < bb) {
                        best = Some((s, b));
                    }
                }
            }
            match best {
                Some((s, b)) if b <= beta_max => {
                    self.events.push(Event {
                        beta: b,
                        delta: DELTAS[s],
                    });
                    pos[s] += 1;
                }
                _ => break,
            }
        }
    }
}

/// Euclidean projection of `u` onto `PP_d`.
pub fn project_parity_polytope(u: &[f64]) -> Result<Vec<f64>> {
    Ok(ProjectionWorkspace::new().project(u)?.z)
}

/// Projection that also reports `beta_opt` and `r`.
pub fn project_detailed(u: &[f64]) -> Result<Projection> {
    ProjectionWorkspace::new().project(u)
}

/// Same projection, locating `beta_opt` by evaluating
/// `f_r . clamp01(v - beta f_r)` afresh at every breakpoint. Quadratic in `d`.
pub fn project_by_direct_evaluation(u: &[f64]) -> Result<Projection> {
    let d = u.len();
    if d == 0 {
        return Err(Error::Domain("cannot project a zero-length vector".into()));
    }
    check_finite(u)?;
    let mut perm: Vec<usize> = (0..d).collect();
    perm.sort_by(|&a, &b| u[b].total_cmp(&u[a]));
    let v: Vec<f64> = perm.iter().map(|&i| u[i]).collect();

    let r = constituent_parity(&v)?;
    let head = r + 1;
    let z_at = |beta: f64| -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(k, &x)| if k < head { x - beta } else { x + beta }.clamp(0.0, 1.0))
            .collect()
    };
    let g_at = |beta: f64| -> f64 {
        z_at(beta)
            .iter()
            .enumerate()
            .map(|(k, &z)| if k < head { z } else { -z })
            .sum()
    };

    let beta_opt = if r >= d || g_at(0.0) <= r as f64 + PARITY_TOL {
        0.0
    } else {
        let beta_max = if r + 2 <= d {
            0.5 * (v[r] - v[r + 1])
        } else {
            v[r]
        };
        let mut points: Vec<f64> = v[..head]
            .iter()
            .flat_map(|&x| [x - 1.0, x])
            .chain(v[head..].iter().flat_map(|&x| [-x, 1.0 - x]))
            .filter(|&b| b > 0.0 && b < beta_max)
            .chain(std::iter::once(beta_max))
            .collect();
        points.sort_by(f64::total_cmp);

        let target = r as f64;
        let (mut lo, mut g_lo) = (0.0, g_at(0.0));
        let mut found = beta_max;
        for &b in &points {
            let g_b = g_at(b);
            if g_b <= target {
                // g is linear on [lo, b].
                found = if g_lo > g_b {
                    lo + (b - lo) * (g_lo - target) / (g_lo - g_b)
                } else {
                    b
                };
                break;
            }
            lo = b;
            g_lo = g_b;
        }
        found
    };

    let zs = z_at(beta_opt);
    let mut z = vec![0.0; d];
    for (k, &i) in perm.iter().enumerate() {
        z[i] = zs[k];
    }
    Ok(Projection { z, beta_opt, r })
}

/// Maximizes `c . z` over `PP_d`, returning an optimal even-weight vertex.
///
/// Picks the positive entries of `c`; if there is an odd number of them,
/// either adds the largest non-positive entry or drops the smallest positive
/// one, whichever costs less.
pub fn maximize_linear(c: &[f64]) -> Vec<u8> {
    let mut z: Vec<u8> = c.iter().map(|&x| u8::from(x > 0.0)).collect();
    let positives = z.iter().filter(|&&b| b == 1).count();
    if positives % 2 == 0 {
        return z;
    }
    let smallest_pos = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("odd count implies a positive entry");
    let largest_nonpos = c
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= 0.0)
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    match largest_nonpos {
        Some(i_n) if c[smallest_pos] + c[i_n] > 0.0 => z[i_n] = 1,
        _ => z[smallest_pos] = 0,
    }
    z
}

/// Input length from which sorting switches to radix sort.
const RADIX_MIN_LEN: usize = 1024;

/// Stable LSD radix sort on the high 64 bits, eight bits per pass. The low
/// bits must already be ascending, which holds for the index payload.
fn radix_sort_high(keys: &mut Vec<u128>, scratch: &mut Vec<u128>) {
    let mut counts = [[0usize; 256]; 8];
    for &k in keys.iter() {
        let hi = (k >> 64) as u64;
        for (pass, c) in counts.iter_mut().enumerate() {
            c[((hi >> (8 * pass)) & 0xff) as usize] += 1;
        }
    }
    scratch.clear();
    scratch.resize(keys.len(), 0);
    for (pass, c) in counts.iter_mut().enumerate() {
        if c.contains(&keys.len()) {
            continue;
        }
        let mut offset = 0;
        for n in c.iter_mut() {
            let here = *n;
            *n = offset;
            offset += here;
        }
        for &k in keys.iter() {
            let digit = (((k >> 64) as u64 >> (8 * pass)) & 0xff) as usize;
            scratch[c[digit]] = k;
            c[digit] += 1;
        }
        std::mem::swap(keys, scratch);
    }
}

/// Order-reversing map from finite floats to integers.
fn descending_key(x: f64) -> u64 {
    let bits = x.to_bits();
    let ascending = if bits >> 63 == 1 { !bits } else { bits | (1 << 63) };
    !ascending
}

fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(k) => Err(Error::Domain(format!("entry {k} is {}", v[k]))),
        None => Ok(()),
    }
}
