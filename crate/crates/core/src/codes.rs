//! Sparse parity-check matrices, the alist exchange format, and random
//! regular LDPC ensembles.
//!
//! Indices are 0-based in memory and 1-based in alist text. Every edge of the
//! Tanner graph gets a flat id: the edges of check `j` occupy the contiguous
//! range `edge_range(j)`, listed in the same order as `check(j)`. Decoders
//! store their per-edge state (replicas, duals, messages) in flat arrays
//! indexed by these ids.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Maximum number of socket permutations tried before giving up on a
/// parallel-edge-free regular code.
pub const MAX_GENERATION_ATTEMPTS: usize = 1000;

/// Binary linear code given by a sparse parity-check matrix.
///
/// Immutable after construction; share freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n_vars: usize,
    check_nbrs: Vec<Vec<usize>>,
    var_nbrs: Vec<Vec<usize>>,
    edge_offsets: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from the variable list of each check.
    ///
    /// Lists may come in any order; they are sorted. Duplicate entries
    /// (parallel edges), out-of-range indices and empty checks are rejected.
    pub fn from_check_neighborhoods(n_vars: usize, checks: Vec<Vec<usize>>) -> Result<Self> {
        let mut check_nbrs = checks;
        let mut var_nbrs = vec![Vec::new(); n_vars];
        for (j, nbrs) in check_nbrs.iter_mut().enumerate() {
            if nbrs.is_empty() {
                return Err(Error::Dimension(format!("check {j} has no variables")));
            }
            nbrs.sort_unstable();
            for w in nbrs.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Dimension(format!(
                        "check {j} lists variable {} twice",
                        w[0]
                    )));
                }
            }
            for &i in nbrs.iter() {
                if i >= n_vars {
                    return Err(Error::Dimension(format!(
                        "check {j} references variable {i} but n = {n_vars}"
                    )));
                }
                var_nbrs[i].push(j);
            }
        }

        let mut edge_offsets = Vec::with_capacity(check_nbrs.len() + 1);
        let mut var_edges = vec![Vec::new(); n_vars];
        let mut edge = 0;
        edge_offsets.push(0);
        for nbrs in &check_nbrs {
            for &i in nbrs {
                var_edges[i].push(edge);
                edge += 1;
            }
            edge_offsets.push(edge);
        }

        Ok(Self {
            n_vars,
            check_nbrs,
            var_nbrs,
            edge_offsets,
            var_edges,
        })
    }

    /// Builds a matrix from dense 0/1 rows.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut checks = Vec::with_capacity(rows.len());
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {j} has length {} but row 0 has {n}",
                    row.len()
                )));
            }
            checks.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        Self::from_check_neighborhoods(n, checks)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.check_nbrs.len()
    }

    pub fn n_edges(&self) -> usize {
        *self.edge_offsets.last().unwrap_or(&0)
    }

    /// Sorted variable indices of check `j`.
    pub fn check(&self, j: usize) -> &[usize] {
        &self.check_nbrs[j]
    }

    /// Sorted check indices containing variable `i`.
    pub fn var(&self, i: usize) -> &[usize] {
        &self.var_nbrs[i]
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.check_nbrs
    }

    pub fn vars(&self) -> &[Vec<usize>] {
        &self.var_nbrs
    }

    /// Flat edge ids of check `j`, aligned with `check(j)`.
    pub fn edge_range(&self, j: usize) -> Range<usize> {
        self.edge_offsets[j]..self.edge_offsets[j + 1]
    }

    /// Flat edge ids touching variable `i`, aligned with `var(i)`.
    pub fn var_edges(&self, i: usize) -> &[usize] {
        &self.var_edges[i]
    }

    pub fn max_check_degree(&self) -> usize {
        self.check_nbrs.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_var_degree(&self) -> usize {
        self.var_nbrs.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `true` iff every check of `x` has even parity.
    pub fn is_codeword(&self, x: &[u8]) -> Result<bool> {
        if x.len() != self.n_vars {
            return Err(Error::Dimension(format!(
                "word has length {} but code has n = {}",
                x.len(),
                self.n_vars
            )));
        }
        Ok(self
            .check_nbrs
            .iter()
            .all(|nbrs| nbrs.iter().fold(0u8, |acc, &i| acc ^ (x[i] & 1)) == 0))
    }

    /// Rank of H over GF(2).
    pub fn rank_gf2(&self) -> usize {
        let words = self.n_vars.div_ceil(64);
        let mut rows: Vec<Vec<u64>> = self
            .check_nbrs
            .iter()
            .map(|nbrs| {
                let mut r = vec![0u64; words];
                for &i in nbrs {
                    r[i / 64] |= 1 << (i % 64);
                }
                r
            })
            .collect();
        let mut rank = 0;
        for col in 0..self.n_vars {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Code dimension over code length, `(n - rank H) / n`.
    pub fn rate(&self) -> f64 {
        if self.n_vars == 0 {
            return 0.0;
        }
        (self.n_vars - self.rank_gf2()) as f64 / self.n_vars as f64
    }

    /// Serializes to canonical alist text (zero-padded to the max degrees).
    pub fn to_alist(&self) -> String {
        let max_col = self.max_var_degree();
        let max_row = self.max_check_degree();
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_vars, self.n_checks());
        let _ = writeln!(out, "{max_col} {max_row}");
        let join = |it: &mut dyn Iterator<Item = usize>| {
            it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "{}", join(&mut self.var_nbrs.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.check_nbrs.iter().map(Vec::len)));
        for (lists, width) in [(&self.var_nbrs, max_col), (&self.check_nbrs, max_row)] {
            for list in lists {
                let padded = list
                    .iter()
                    .map(|&k| k + 1)
                    .chain(std::iter::repeat(0))
                    .take(width.max(list.len()));
                let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
            }
        }
        out
    }
}

/// Reads and parses an alist file.
pub fn read_alist(path: &Path) -> Result<ParityCheckMatrix> {
    let text = std::fs::read_to_string(path).map_err(|cause| Error::Io {
        path: path.to_path_buf(),
        cause,
    })?;
    parse_alist(&text)
}

/// Parses alist text. Zero entries are treated as padding and must trail
/// the real entries of their line.
pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut last_line = 0;

    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(last_line + 1, format!("unexpected end of input, expected {what}")))?;
        last_line = no;
        let nums = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::parse(no, format!("invalid integer {tok:?} in {what}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((no, nums))
    };

    let (no, dims) = next_numbers("header \"N M\"")?;
    let [n, m] = dims[..] else {
        return Err(Error::parse(no, "header must contain exactly N and M"));
    };
    let (no, maxes) = next_numbers("max degrees")?;
    let [max_col, max_row] = maxes[..] else {
        return Err(Error::parse(no, "second line must contain exactly two max degrees"));
    };
    let (no, col_degs) = next_numbers("column degrees")?;
    if col_degs.len() != n {
        return Err(Error::parse(
            no,
            format!("header says N = {n} but {} column degrees given", col_degs.len()),
        ));
    }
    let (no, row_degs) = next_numbers("row degrees")?;
    if row_degs.len() != m {
        return Err(Error::parse(
            no,
            format!("header says M = {m} but {} row degrees given", row_degs.len()),
        ));
    }

    let mut read_lists = |count: usize,
                          degs: &[usize],
                          max_deg: usize,
                          bound: usize,
                          what: &str|
     -> Result<Vec<(usize, Vec<usize>)>> {
        let mut out = Vec::with_capacity(count);
        for (k, &deg) in degs.iter().enumerate().take(count) {
            let (no, nums) = next_numbers(what)?;
            if deg > max_deg {
                return Err(Error::parse(
                    no,
                    format!("{what} {} has degree {deg} above declared max {max_deg}", k + 1),
                ));
            }
            let real: Vec<usize> = nums.iter().copied().take_while(|&v| v != 0).collect();
            if nums[real.len()..].iter().any(|&v| v != 0) {
                return Err(Error::parse(no, "non-zero entry after zero padding"));
            }
            if real.len() != deg {
                return Err(Error::parse(
                    no,
                    format!("{what} {} lists {} entries but degree is {deg}", k + 1, real.len()),
                ));
            }
            if let Some(&bad) = real.iter().find(|&&v| v > bound) {
                return Err(Error::parse(no, format!("index {bad} out of range 1..={bound}")));
            }
            let mut sorted = real.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::parse(no, format!("{what} {} repeats an index", k + 1)));
            }
            out.push((no, real.into_iter().map(|v| v - 1).collect()));
        }
        Ok(out)
    };

    let cols = read_lists(n, &col_degs, max_col, m, "column")?;
    let rows = read_lists(m, &row_degs, max_row, n, "row")?;
    if let Some((no, _)) = rows.iter().find(|(_, vars)| vars.is_empty()) {
        return Err(Error::parse(*no, "row with no variables"));
    }

    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(no, "trailing data after row section"));
    }

    // Transpose the column section and compare with the row section.
    let mut from_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, (_, checks)) in cols.iter().enumerate() {
        for &j in checks {
            from_cols[j].push(i);
        }
    }
    for (j, (no, vars)) in rows.iter().enumerate() {
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        if sorted != from_cols[j] {
            return Err(Error::parse(
                *no,
                format!("row {} is inconsistent with the column section", j + 1),
            ));
        }
    }

    ParityCheckMatrix::from_check_neighborhoods(n, rows.into_iter().map(|(_, v)| v).collect())
}

/// Samples a `(var_deg, check_deg)`-regular code from the configuration
/// model, rejecting samples with parallel edges. Short cycles are kept.
pub fn gen_regular_ldpc(
    n: usize,
    var_deg: usize,
    check_deg: usize,
    seed: u64,
) -> Result<ParityCheckMatrix> {
    if n == 0 || var_deg == 0 || check_deg == 0 {
        return Err(Error::Generation(
            "length and degrees must be positive".into(),
        ));
    }
    if !(n * var_deg).is_multiple_of(check_deg) {
        return Err(Error::Generation(format!(
            "n * var_deg = {} is not divisible by check_deg = {check_deg}",
            n * var_deg
        )));
    }
    if check_deg > n {
        return Err(Error::Generation(format!(
            "check degree {check_deg} exceeds code length {n}"
        )));
    }
    let m = n * var_deg / check_deg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sockets: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, var_deg)).collect();

    for _ in 0..MAX_GENERATION_ATTEMPTS {
        sockets.shuffle(&mut rng);
        let checks: Vec<Vec<usize>> = sockets
            .chunks(check_deg)
            .map(|c| {
                let mut c = c.to_vec();
                c.sort_unstable();
                c
            })
            .collect();
        if checks.iter().all(|c| c.windows(2).all(|w| w[0] != w[1])) {
            debug_assert_eq!(checks.len(), m);
            return ParityCheckMatrix::from_check_neighborhoods(n, checks);
        }
    }
    Err(Error::Generation(format!(
        "no parallel-edge-free ({var_deg},{check_deg}) code of length {n} after {MAX_GENERATION_ATTEMPTS} attempts"
    )))
}

/// Binary word known to satisfy every check of its code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword(Vec<u8>);

impl Codeword {
    pub fn new(code: &ParityCheckMatrix, bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain("codeword bits must be 0 or 1".into()));
        }
        if !code.is_codeword(&bits)? {
            return Err(Error::Precondition("word violates a parity check".into()));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";

    fn assert_transpose_consistent(h: &ParityCheckMatrix) {
        for j in 0..h.n_checks() {
            for &i in h.check(j) {
                assert!(h.var(i).contains(&j));
            }
        }
        for i in 0..h.n_vars() {
            for &j in h.var(i) {
                assert!(h.check(j).contains(&i));
            }
        }
        let sv: usize = h.vars().iter().map(Vec::len).sum();
        let sc: usize = h.checks().iter().map(Vec::len).sum();
        assert_eq!(sv, sc);
        assert_eq!(sv, h.n_edges());
    }

    #[test]
    fn parse_small_fixture() {
        let h = parse_alist(FIXTURE).unwrap();
        assert_eq!(h.n_vars(), 3);
        assert_eq!(h.n_checks(), 2);
        assert_eq!(h.check(0), &[0, 1]);
        assert_eq!(h.check(1), &[1, 2]);
        assert_eq!(h.var(1), &[0, 1]);
        assert_transpose_consistent(&h);
    }

    #[test]
    fn emit_is_canonical() {
        let h = parse_alist(FIXTURE).unwrap();
        assert_eq!(h.to_alist(), FIXTURE);
        // Non-canonical spacing and no padding still parses to the same matrix.
        let loose = "3   2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n2 1\n3 2\n\n";
        assert_eq!(parse_alist(loose).unwrap().to_alist(), FIXTURE);
    }

    #[test]
    fn parse_rejects_wrong_row_degree_count() {
        let bad = "3 2\n2 2\n1 2 1\n2 2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        match parse_alist(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_out_of_range_and_inconsistent() {
        let oob = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 3\n2 0\n1 2\n2 3\n";
        assert!(matches!(parse_alist(oob), Err(Error::Parse { line: 6, .. })));
        let inconsistent = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 3\n2 3\n";
        assert!(matches!(
            parse_alist(inconsistent),
            Err(Error::Parse { line: 8, .. })
        ));
        let truncated = "3 2\n2 2\n1 2 1\n2 2\n1 0\n";
        assert!(matches!(parse_alist(truncated), Err(Error::Parse { .. })));
    }

    #[test]
    fn is_codeword_examples() {
        let h = ParityCheckMatrix::from_dense(&[vec![1, 1, 1, 1]]).unwrap();
        assert!(h.is_codeword(&[1, 1, 0, 0]).unwrap());
        assert!(!h.is_codeword(&[1, 0, 0, 0]).unwrap());
        assert!(h.is_codeword(&[0, 0, 0, 0]).unwrap());
        assert!(matches!(h.is_codeword(&[0, 0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn regular_code_degrees() {
        let h = gen_regular_ldpc(1002, 3, 6, 1).unwrap();
        assert_eq!(h.n_checks(), 501);
        assert!(h.checks().iter().all(|c| c.len() == 6));
        assert!(h.vars().iter().all(|v| v.len() == 3));
        assert_eq!(h.n_edges(), 1002 * 3);
        assert_transpose_consistent(&h);
    }

    #[test]
    fn tiny_regular_code() {
        let h = gen_regular_ldpc(6, 3, 6, 5).unwrap();
        assert_eq!(h.n_checks(), 3);
        assert!(h.checks().iter().all(|c| c == &[0, 1, 2, 3, 4, 5]));
        assert!(h.vars().iter().all(|v| v.len() == 3));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_regular_ldpc(96, 3, 6, 42).unwrap();
        let b = gen_regular_ldpc(96, 3, 6, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_regular_ldpc(96, 3, 6, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generation_errors() {
        assert!(matches!(
            gen_regular_ldpc(10, 3, 4, 0),
            Err(Error::Generation(_))
        ));
        assert!(matches!(
            gen_regular_ldpc(4, 3, 6, 0),
            Err(Error::Generation(_))
        ));
    }

    #[test]
    fn hamming_rank_and_rate() {
        let h = ParityCheckMatrix::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .unwrap();
        assert_eq!(h.rank_gf2(), 3);
        assert!((h.rate() - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn edge_ids_align_with_neighborhoods() {
        let h = gen_regular_ldpc(24, 3, 6, 9).unwrap();
        let mut owner = vec![(usize::MAX, usize::MAX); h.n_edges()];
        for j in 0..h.n_checks() {
            for (e, &i) in h.edge_range(j).zip(h.check(j)) {
                owner[e] = (j, i);
            }
        }
        for i in 0..h.n_vars() {
            for (&e, &j) in h.var_edges(i).iter().zip(h.var(i)) {
                assert_eq!(owner[e], (j, i));
            }
        }
    }

    #[test]
    fn read_alist_names_missing_path() {
        let err = read_alist(Path::new("no/such/code.alist")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("no/such/code.alist"));
    }
}
