//! Covering codes: parameters, verification, duality with subspace packings,
//! and exhaustive search for small instances.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, GfError};
use crate::matrix::{MatrixError, MatrixGF, RowEchelon};
use crate::subspace::{enumerate_grassmannian, gaussian_binomial, Subspace, SubspaceError};

/// Default ceiling on the number of candidate subspaces for [`exact_max`].
pub const DEFAULT_SEARCH_CAP: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    InvalidSpec(String),
    #[error("codeword {index} is a {dim}-subspace of F^{ambient}, expected a {k}-subspace of F^{n}")]
    WrongShape {
        index: usize,
        dim: usize,
        ambient: usize,
        k: usize,
        n: usize,
    },
    #[error("codeword {index} is defined over a different field")]
    WrongField { index: usize },
    #[error("codeword {index} repeats codeword {first}")]
    Duplicate { index: usize, first: usize },
    #[error("matrix set is not closed under subtraction")]
    NotClosed,
    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, count: BigUint, cap: u64 },
    #[error("malformed code file: {0}")]
    Parse(String),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

impl CodeError {
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            CodeError::CapExceeded { .. } | CodeError::Subspace(SubspaceError::CapExceeded { .. })
        )
    }
}

/// Parameters (q, n, k, δ, α) of a covering code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeSpec {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub alpha: usize,
}

impl CodeSpec {
    pub fn new(q: u64, n: usize, k: usize, delta: usize, alpha: usize) -> Result<Self, CodeError> {
        Field::from_order(q)?;
        if !(1 <= k && k < n) {
            return Err(CodeError::InvalidSpec(format!("need 1 <= k < n, got k={k}, n={n}")));
        }
        if !(1 <= delta && delta <= n - k) {
            return Err(CodeError::InvalidSpec(format!(
                "need 1 <= delta <= n-k = {}, got delta={delta}",
                n - k
            )));
        }
        if alpha < 2 {
            return Err(CodeError::InvalidSpec(format!("need alpha >= 2, got {alpha}")));
        }
        Ok(CodeSpec { q, n, k, delta, alpha })
    }

    pub fn field(&self) -> Field {
        Field::from_order(self.q).expect("validated at construction")
    }

    /// Minimum dimension every α codewords must span.
    pub fn target_dim(&self) -> usize {
        self.k + self.delta
    }

    pub fn grassmannian_size(&self) -> BigUint {
        gaussian_binomial(self.n, self.k, self.q).expect("k < n")
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-({},{},{})_{}",
            self.alpha, self.n, self.k, self.delta, self.q
        )
    }
}

/// An α-subset of codewords spanning too little.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub indices: Vec<usize>,
    pub achieved_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Violated(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Valid => None,
            Verdict::Violated(v) => Some(v),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => f.write_str("ok"),
            Verdict::Violated(v) => {
                let idx: Vec<String> = v.indices.iter().map(ToString::to_string).collect();
                write!(f, "violation indices={} dim={}", idx.join(","), v.achieved_dim)
            }
        }
    }
}

/// A duplicate-free list of k-subspaces of F_q^n claimed to satisfy a spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringCode {
    spec: CodeSpec,
    field: Field,
    words: Vec<Subspace>,
}

fn check_words(spec: &CodeSpec, field: &Field, words: &[Subspace]) -> Result<(), CodeError> {
    let mut seen: HashMap<&Subspace, usize> = HashMap::new();
    for (index, w) in words.iter().enumerate() {
        if w.field() != field {
            return Err(CodeError::WrongField { index });
        }
        if w.dim() != spec.k || w.ambient_dim() != spec.n {
            return Err(CodeError::WrongShape {
                index,
                dim: w.dim(),
                ambient: w.ambient_dim(),
                k: spec.k,
                n: spec.n,
            });
        }
        if let Some(&first) = seen.get(w) {
            return Err(CodeError::Duplicate { index, first });
        }
        seen.insert(w, index);
    }
    Ok(())
}

impl CoveringCode {
    pub fn new(spec: CodeSpec, words: Vec<Subspace>) -> Result<Self, CodeError> {
        let field = spec.field();
        check_words(&spec, &field, &words)?;
        Ok(CoveringCode { spec, field, words })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn words(&self) -> &[Subspace] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Same codewords checked against different parameters.
    pub fn with_spec(&self, spec: CodeSpec) -> Result<Self, CodeError> {
        CoveringCode::new(spec, self.words.clone())
    }

    /// Checks every α-subset, returning the lexicographically first failure.
    pub fn verify(&self) -> Verdict {
        first_low_span(&self.words, self.spec.alpha, self.spec.target_dim(), None)
            .map_or(Verdict::Valid, Verdict::Violated)
    }

    /// Parallel over the first index; returns the same violation as [`verify`].
    ///
    /// [`verify`]: CoveringCode::verify
    pub fn verify_parallel(&self) -> Verdict {
        let alpha = self.spec.alpha;
        let target = self.spec.target_dim();
        if self.words.len() < alpha {
            return Verdict::Valid;
        }
        (0..=self.words.len() - alpha)
            .into_par_iter()
            .find_map_first(|first| first_low_span(&self.words, alpha, target, Some(first)))
            .map_or(Verdict::Valid, Verdict::Violated)
    }

    pub fn to_text(&self) -> String {
        let s = &self.spec;
        let mut out = format!("{} {} {} {} {}\n{}\n", s.q, s.n, s.k, s.delta, s.alpha, self.words.len());
        for w in &self.words {
            out.push_str(&format!("{}\n", w.dim()));
            out.push_str(&w.basis().to_text());
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, CodeError> {
        let (header, words) = parse_blocks(text)?;
        let [q, n, k, delta, alpha] = header;
        let spec = CodeSpec::new(q, n as usize, k as usize, delta as usize, alpha as usize)?;
        CoveringCode::new(spec, words)
    }
}

/// Verifies a raw word list against `spec`, rejecting malformed codewords.
pub fn verify_words(spec: &CodeSpec, words: &[Subspace]) -> Result<Verdict, CodeError> {
    check_words(spec, &spec.field(), words)?;
    Ok(first_low_span(words, spec.alpha, spec.target_dim(), None)
        .map_or(Verdict::Valid, Verdict::Violated))
}

fn echelon_for(words: &[Subspace]) -> Option<RowEchelon> {
    words
        .first()
        .map(|w| RowEchelon::new(w.field(), w.ambient_dim()))
}

/// First `size`-subset (in lexicographic index order) spanning fewer than
/// `min_dim` dimensions. `first` restricts the search to subsets starting at
/// that index.
pub(crate) fn first_low_span(
    words: &[Subspace],
    size: usize,
    min_dim: usize,
    first: Option<usize>,
) -> Option<Violation> {
    if words.len() < size || size == 0 {
        return None;
    }
    let base = echelon_for(words)?;
    let mut prefix = Vec::with_capacity(size);
    let alive = vec![true; words.len()];
    let mut found = None;
    let range = match first {
        Some(f) => f..f + 1,
        None => 0..words.len(),
    };
    for i in range {
        let mut e = base.clone();
        e.insert_matrix(words[i].basis());
        prefix.push(i);
        if scan(words, &alive, size, min_dim, &mut prefix, &e, &mut |idx, dim| {
            found = Some(Violation {
                indices: idx.to_vec(),
                achieved_dim: dim,
            });
            ScanAction::Stop
        }) {
            return found;
        }
        prefix.pop();
    }
    None
}

enum ScanAction {
    Continue,
    /// Mark the last member of the reported subset as deleted and continue.
    DeleteLast,
    Stop,
}

/// Depth-first walk over subsets extending `prefix` in lexicographic order.
/// Returns true if the callback asked to stop.
fn scan(
    words: &[Subspace],
    alive: &[bool],
    size: usize,
    min_dim: usize,
    prefix: &mut Vec<usize>,
    span: &RowEchelon,
    on_low: &mut dyn FnMut(&[usize], usize) -> ScanAction,
) -> bool {
    let mut alive = alive.to_vec();
    scan_mut(words, &mut alive, size, min_dim, prefix, span, on_low)
}

fn scan_mut(
    words: &[Subspace],
    alive: &mut [bool],
    size: usize,
    min_dim: usize,
    prefix: &mut Vec<usize>,
    span: &RowEchelon,
    on_low: &mut dyn FnMut(&[usize], usize) -> ScanAction,
) -> bool {
    if span.dim() >= min_dim {
        // every extension spans at least as much
        return false;
    }
    if prefix.len() == size {
        return match on_low(prefix, span.dim()) {
            ScanAction::Stop => true,
            ScanAction::DeleteLast => {
                alive[*prefix.last().unwrap()] = false;
                false
            }
            ScanAction::Continue => false,
        };
    }
    let start = prefix.last().map_or(0, |&l| l + 1);
    let remaining = size - prefix.len();
    for j in start..words.len() {
        if words.len() - j < remaining {
            break;
        }
        if !alive[j] {
            continue;
        }
        // a deeper deletion can only remove the leaf itself
        if prefix.iter().any(|&p| !alive[p]) {
            break;
        }
        let mut e = span.clone();
        e.insert_matrix(words[j].basis());
        prefix.push(j);
        let stop = scan_mut(words, alive, size, min_dim, prefix, &e, on_low);
        prefix.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Repeatedly removes the last member of the lexicographically first
/// `size`-subset of live words spanning fewer than `min_dim` dimensions,
/// until none is left. Done as a single ordered pass: removing words never
/// creates a new low-span subset, and subsets already passed stay good.
pub(crate) fn delete_low_spans(words: &[Subspace], alive: &mut [bool], size: usize, min_dim: usize) {
    let Some(base) = echelon_for(words) else {
        return;
    };
    if size == 0 {
        return;
    }
    let mut prefix = Vec::with_capacity(size);
    for i in 0..words.len() {
        if !alive[i] {
            continue;
        }
        let mut e = base.clone();
        e.insert_matrix(words[i].basis());
        prefix.push(i);
        scan_mut(words, alive, size, min_dim, &mut prefix, &e, &mut |_, _| ScanAction::DeleteLast);
        prefix.pop();
    }
}

/// Every `size`-subset of live words spanning fewer than `min_dim` dimensions.
pub(crate) fn all_low_spans(
    words: &[Subspace],
    alive: &[bool],
    size: usize,
    min_dim: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let Some(base) = echelon_for(words) else {
        return out;
    };
    let mut prefix = Vec::with_capacity(size);
    let mut alive = alive.to_vec();
    for i in 0..words.len() {
        if !alive[i] {
            continue;
        }
        let mut e = base.clone();
        e.insert_matrix(words[i].basis());
        prefix.push(i);
        scan_mut(words, &mut alive, size, min_dim, &mut prefix, &e, &mut |idx, _| {
            out.push(idx.to_vec());
            ScanAction::Continue
        });
        prefix.pop();
    }
    out
}

/// How [`verify_lifted_linear`] reduces the triple condition on lifted words
/// to a rank condition on matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftedMode {
    /// The set is closed under subtraction; check pairs of distinct nonzero
    /// matrices.
    PairsOfNonzero,
    /// General sets; check `rank(M2 - M1; M3 - M1)` over all triples.
    PairsOfDifferences,
}

/// Rank test on the matrix set behind a lifted code, equivalent to verifying
/// the lifted code with δ = k + γ and α = 3. Violation indices refer to the
/// matrix list, and the reported dimension is that of the lifted span.
pub fn verify_lifted_linear(
    mats: &[MatrixGF],
    gamma: usize,
    mode: LiftedMode,
) -> Result<Verdict, CodeError> {
    let Some(first) = mats.first() else {
        return Ok(Verdict::Valid);
    };
    let k = first.rows();
    let target = k + gamma;
    for m in mats {
        if m.rows() != k || m.cols() != first.cols() || m.field() != first.field() {
            return Err(CodeError::Matrix(MatrixError::Dimension(
                "matrix set has mixed shapes".into(),
            )));
        }
    }
    let stacked_rank = |a: &MatrixGF, b: &MatrixGF| MatrixGF::vstack(&[a, b]).unwrap().rank();
    match mode {
        LiftedMode::PairsOfNonzero => {
            let set: HashSet<&[u8]> = mats.iter().map(|m| m.data()).collect();
            for a in mats {
                for b in mats {
                    if !set.contains(a.sub(b)?.data()) {
                        return Err(CodeError::NotClosed);
                    }
                }
            }
            for i in 0..mats.len() {
                if mats[i].is_zero() {
                    continue;
                }
                for j in i + 1..mats.len() {
                    if mats[j].is_zero() {
                        continue;
                    }
                    let r = stacked_rank(&mats[i], &mats[j]);
                    if r < target {
                        return Ok(Verdict::Violated(Violation {
                            indices: vec![i, j],
                            achieved_dim: k + r,
                        }));
                    }
                }
            }
        }
        LiftedMode::PairsOfDifferences => {
            for i in 0..mats.len() {
                for j in i + 1..mats.len() {
                    let dj = mats[j].sub(&mats[i])?;
                    for l in j + 1..mats.len() {
                        let dl = mats[l].sub(&mats[i])?;
                        let r = stacked_rank(&dj, &dl);
                        if r < target {
                            return Ok(Verdict::Violated(Violation {
                                indices: vec![i, j, l],
                                achieved_dim: k + r,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::Valid)
}

/// Parameters t-(n,k,λ)_q of a subspace packing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingSpec {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub lambda: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingViolation {
    /// The least over-covered t-subspace.
    pub subspace: Subspace,
    /// Indices of all blocks containing it.
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PackingVerdict {
    Valid,
    Violated(PackingViolation),
}

impl PackingVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PackingVerdict::Valid)
    }
}

/// Dual packing: each codeword replaced by its orthogonal complement, with
/// parameters (q, n, n−k, n−k−δ+1, α−1).
pub fn dualize(code: &CoveringCode) -> (PackingSpec, Vec<Subspace>) {
    let s = code.spec();
    let ps = PackingSpec {
        q: s.q,
        n: s.n,
        k: s.n - s.k,
        t: s.n - s.k - s.delta + 1,
        lambda: s.alpha - 1,
    };
    (ps, code.words().iter().map(Subspace::dual).collect())
}

/// Checks that no t-subspace lies in more than λ blocks.
///
/// Only t-subspaces contained in some block can be over-covered, so those are
/// enumerated block by block; `cap` bounds the total number enumerated.
pub fn verify_packing(
    ps: &PackingSpec,
    blocks: &[Subspace],
    cap: u64,
) -> Result<PackingVerdict, CodeError> {
    let field = Field::from_order(ps.q)?;
    for (index, b) in blocks.iter().enumerate() {
        if b.field() != &field {
            return Err(CodeError::WrongField { index });
        }
        if b.dim() != ps.k || b.ambient_dim() != ps.n {
            return Err(CodeError::WrongShape {
                index,
                dim: b.dim(),
                ambient: b.ambient_dim(),
                k: ps.k,
                n: ps.n,
            });
        }
    }
    if ps.t > ps.k {
        return Ok(PackingVerdict::Valid);
    }
    let per_block = gaussian_binomial(ps.k, ps.t, ps.q)?;
    let total = &per_block * BigUint::from(blocks.len());
    if total > BigUint::from(cap) {
        return Err(CodeError::CapExceeded {
            what: "t-subspaces to enumerate",
            count: total,
            cap,
        });
    }
    let mut cover: HashMap<Subspace, Vec<usize>> = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        for s in b.subspaces_of_dim(ps.t)? {
            cover.entry(s).or_default().push(i);
        }
    }
    Ok(cover
        .into_iter()
        .filter(|(_, v)| v.len() > ps.lambda)
        .min_by(|a, b| a.0.cmp(&b.0))
        .map_or(PackingVerdict::Valid, |(subspace, blocks)| {
            PackingVerdict::Violated(PackingViolation { subspace, blocks })
        }))
}

/// Writes a packing in the code file layout with header `q n k t lambda`.
pub fn packing_to_text(ps: &PackingSpec, blocks: &[Subspace]) -> String {
    let mut out = format!("{} {} {} {} {}\n{}\n", ps.q, ps.n, ps.k, ps.t, ps.lambda, blocks.len());
    for b in blocks {
        out.push_str(&format!("{}\n", b.dim()));
        out.push_str(&b.basis().to_text());
    }
    out
}

pub fn packing_from_text(text: &str) -> Result<(PackingSpec, Vec<Subspace>), CodeError> {
    let (header, blocks) = parse_blocks(text)?;
    let [q, n, k, t, lambda] = header;
    let ps = PackingSpec {
        q,
        n: n as usize,
        k: k as usize,
        t: t as usize,
        lambda: lambda as usize,
    };
    Ok((ps, blocks))
}

/// Shared parser: five-number header, a count, then blocks of `dim` + rows.
/// Bases are canonicalised; each must have full rank.
fn parse_blocks(text: &str) -> Result<([u64; 5], Vec<Subspace>), CodeError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| CodeError::Parse(format!("unexpected end of input, expected {what}")))
    };
    let numbers = |line: &str| -> Result<Vec<u64>, CodeError> {
        line.split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| CodeError::Parse(format!("not a number: {t:?}")))
            })
            .collect()
    };
    let header_line = next("header")?;
    let header: [u64; 5] = numbers(header_line)?
        .try_into()
        .map_err(|_| CodeError::Parse(format!("header needs five numbers: {header_line:?}")))?;
    let field = Field::from_order(header[0])?;
    let n = header[1] as usize;
    let count_line = next("codeword count")?;
    let [count] = numbers(count_line)?[..] else {
        return Err(CodeError::Parse(format!("bad count line {count_line:?}")));
    };
    let mut words = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let dim_line = next("dimension")?;
        let [dim] = numbers(dim_line)?[..] else {
            return Err(CodeError::Parse(format!("bad dimension line {dim_line:?}")));
        };
        let mut rows = Vec::with_capacity(dim as usize);
        for _ in 0..dim {
            rows.push(next("basis row")?);
        }
        let m = MatrixGF::parse_rows(&field, n, rows)?;
        let s = Subspace::from_generators(&m);
        if s.dim() != dim as usize {
            return Err(CodeError::Parse(format!(
                "basis rows of codeword {} are linearly dependent",
                words.len()
            )));
        }
        words.push(s);
    }
    if let Some(extra) = lines.next() {
        return Err(CodeError::Parse(format!("trailing content {extra:?}")));
    }
    Ok((header, words))
}

/// Maximum size of a code with the given parameters, by depth-first
/// branch-and-bound over the Grassmannian in enumeration order.
///
/// Candidates are filtered forward: after a word joins, every remaining
/// candidate that would complete a low-span α-subset is dropped. The first
/// maximum found is the lexicographically least one.
pub fn exact_max(spec: &CodeSpec, cap: u64) -> Result<(usize, CoveringCode), CodeError> {
    let field = spec.field();
    let count = spec.grassmannian_size();
    if count > BigUint::from(cap) {
        return Err(CodeError::CapExceeded {
            what: "candidate subspaces",
            count,
            cap,
        });
    }
    let all = enumerate_grassmannian(&field, spec.n, spec.k, cap)?;
    let incidence = Incidence::new(spec, &all)?;
    let mut search = Search {
        words: &all,
        alpha: spec.alpha,
        target: spec.target_dim(),
        best: Vec::new(),
        chosen: Vec::new(),
        incidence,
    };
    if !all.is_empty() {
        // The general linear group is transitive on k-subspaces, so some
        // optimum contains subspace 0, and the lexicographically least one does.
        let cands: Vec<usize> = (1..all.len()).filter(|&c| search.compatible(0, c)).collect();
        search.push(0);
        search.run(cands);
    }
    let best = search.best;
    let words = best.iter().map(|&i| all[i].clone()).collect();
    Ok((best.len(), CoveringCode::new(*spec, words)?))
}

/// h-subspaces contained in each candidate, for h chosen so that no h-subspace
/// can lie in α codewords of a valid code.
struct Incidence {
    members: Vec<Vec<usize>>,
    per_word: usize,
    used: Vec<usize>,
    seen: Vec<usize>,
}

impl Incidence {
    fn new(spec: &CodeSpec, all: &[Subspace]) -> Result<Option<Incidence>, CodeError> {
        let per = spec.delta.div_ceil(spec.alpha - 1);
        if per > spec.k || per <= 1 {
            return Ok(None);
        }
        let h = spec.k + 1 - per;
        let mut ids: HashMap<BigUint, usize> = HashMap::new();
        let mut members = Vec::with_capacity(all.len());
        for w in all {
            let mut list = Vec::new();
            for s in w.subspaces_of_dim(h)? {
                let next = ids.len();
                list.push(*ids.entry(s.enumeration_index()).or_insert(next));
            }
            members.push(list);
        }
        let per_word = members.first().map_or(1, Vec::len);
        Ok(Some(Incidence {
            members,
            per_word,
            used: vec![0; ids.len()],
            seen: vec![0; ids.len()],
        }))
    }

    /// Upper bound on how many of `cands` can still be added.
    fn room(&mut self, cands: &[usize], alpha: usize) -> usize {
        let mut total = 0;
        for &c in cands {
            for &h in &self.members[c] {
                if self.used[h] + self.seen[h] < alpha - 1 {
                    total += 1;
                }
                self.seen[h] += 1;
            }
        }
        for &c in cands {
            for &h in &self.members[c] {
                self.seen[h] = 0;
            }
        }
        total / self.per_word
    }
}

struct Search<'a> {
    words: &'a [Subspace],
    alpha: usize,
    target: usize,
    best: Vec<usize>,
    chosen: Vec<usize>,
    incidence: Option<Incidence>,
}

impl Search<'_> {
    fn push(&mut self, v: usize) {
        self.chosen.push(v);
        if let Some(inc) = &mut self.incidence {
            for &h in &inc.members[v] {
                inc.used[h] += 1;
            }
        }
    }

    fn pop(&mut self) {
        let v = self.chosen.pop().expect("non-empty");
        if let Some(inc) = &mut self.incidence {
            for &h in &inc.members[v] {
                inc.used[h] -= 1;
            }
        }
    }

    fn run(&mut self, mut cands: Vec<usize>) {
        loop {
            if self.chosen.len() + cands.len() <= self.best.len() {
                return;
            }
            if cands.is_empty() {
                self.best = self.chosen.clone();
                return;
            }
            let alpha = self.alpha;
            if let Some(inc) = &mut self.incidence {
                if self.chosen.len() + inc.room(&cands, alpha) <= self.best.len() {
                    return;
                }
            }
            let v = cands.remove(0);
            let filtered: Vec<usize> = cands
                .iter()
                .copied()
                .filter(|&c| self.compatible(v, c))
                .collect();
            self.push(v);
            self.run(filtered);
            self.pop();
        }
    }

    /// Whether `c` can join `chosen + [v]`: every α-subset containing both
    /// `v` and `c` must span enough.
    fn compatible(&self, v: usize, c: usize) -> bool {
        let need = self.alpha - 2;
        if self.chosen.len() < need {
            return true;
        }
        let mut base = RowEchelon::new(self.words[v].field(), self.words[v].ambient_dim());
        base.insert_matrix(self.words[v].basis());
        base.insert_matrix(self.words[c].basis());
        if base.dim() >= self.target {
            return true;
        }
        let mut prefix = Vec::with_capacity(need);
        self.subsets_ok(&base, 0, need, &mut prefix)
    }

    fn subsets_ok(&self, span: &RowEchelon, start: usize, need: usize, prefix: &mut Vec<usize>) -> bool {
        if span.dim() >= self.target {
            return true;
        }
        if need == 0 {
            return false;
        }
        for i in start..self.chosen.len() {
            if self.chosen.len() - i < need {
                break;
            }
            let mut e = span.clone();
            e.insert_matrix(self.words[self.chosen[i]].basis());
            prefix.push(i);
            let ok = self.subsets_ok(&e, i + 1, need - 1, prefix);
            prefix.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::lift;

    fn gf2() -> Field {
        Field::new(2, 1).unwrap()
    }

    fn word(f: &Field, rows: &[Vec<u8>]) -> Subspace {
        Subspace::from_generators(&MatrixGF::from_rows(f, rows).unwrap())
    }

    #[test]
    fn spec_validation() {
        assert!(CodeSpec::new(2, 5, 2, 3, 3).is_ok());
        assert!(CodeSpec::new(6, 5, 2, 3, 3).is_err());
        assert!(CodeSpec::new(2, 5, 5, 1, 3).is_err());
        assert!(CodeSpec::new(2, 5, 2, 4, 3).is_err());
        assert!(CodeSpec::new(2, 5, 2, 0, 3).is_err());
        assert!(CodeSpec::new(2, 5, 2, 1, 1).is_err());
    }

    #[test]
    fn construction_rejects_bad_words() {
        let f = gf2();
        let spec = CodeSpec::new(2, 4, 2, 1, 3).unwrap();
        let a = word(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        assert_eq!(
            CoveringCode::new(spec, vec![a.clone(), a.clone()]).unwrap_err(),
            CodeError::Duplicate { index: 1, first: 0 }
        );
        let line = word(&f, &[vec![1, 0, 0, 0]]);
        assert!(matches!(
            CoveringCode::new(spec, vec![line.clone()]),
            Err(CodeError::WrongShape { index: 0, .. })
        ));
        assert!(verify_words(&spec, &[a, line]).is_err());
    }

    #[test]
    fn vacuous_when_fewer_than_alpha() {
        let f = gf2();
        let spec = CodeSpec::new(2, 4, 2, 2, 3).unwrap();
        let a = word(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        let b = word(&f, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]);
        let c = CoveringCode::new(spec, vec![a, b]).unwrap();
        assert_eq!(c.verify(), Verdict::Valid);
    }

    #[test]
    fn violation_is_lexicographically_first() {
        // lift(O), lift(I) and a word inside their sum: with k=2 the first two
        // span 4 = 2k; a third word inside that span is a violation for δ=3.
        let f = gf2();
        let o = lift(&MatrixGF::zeros(&f, 2, 3));
        let i = lift(&MatrixGF::hconcat(&[&MatrixGF::identity(&f, 2), &MatrixGF::zeros(&f, 2, 1)]).unwrap());
        let inside = word(&f, &[vec![1, 0, 1, 0, 0], vec![0, 0, 0, 1, 0]]);
        let far = lift(&MatrixGF::from_rows(&f, &[vec![0, 0, 1], vec![0, 0, 0]]).unwrap());
        assert_eq!(sum_dim(&[&o, &i]), 4);
        let ok = CoveringCode::new(CodeSpec::new(2, 5, 2, 2, 3).unwrap(), vec![o.clone(), i.clone(), inside.clone()]).unwrap();
        assert!(ok.verify().is_valid());
        let bad = CoveringCode::new(
            CodeSpec::new(2, 5, 2, 3, 3).unwrap(),
            vec![far, o, i, inside],
        )
        .unwrap();
        let v = bad.verify();
        assert_eq!(v, brute_first(&bad));
        assert_eq!(v.violation().unwrap().achieved_dim, 4);
        assert_eq!(bad.verify_parallel(), v);
    }

    fn brute_first(code: &CoveringCode) -> Verdict {
        let w = code.words();
        let t = code.spec().target_dim();
        for a in 0..w.len() {
            for b in a + 1..w.len() {
                for c in b + 1..w.len() {
                    let d = sum_dim(&[&w[a], &w[b], &w[c]]);
                    if d < t {
                        return Verdict::Violated(Violation { indices: vec![a, b, c], achieved_dim: d });
                    }
                }
            }
        }
        Verdict::Valid
    }

    #[test]
    fn verify_matches_brute_force_on_slices() {
        let f = gf2();
        let all = enumerate_grassmannian(&f, 5, 2, 1000).unwrap();
        for start in 0..20 {
            let words: Vec<Subspace> = all.iter().skip(start).step_by(7).cloned().collect();
            let code = CoveringCode::new(CodeSpec::new(2, 5, 2, 3, 3).unwrap(), words).unwrap();
            let expected = brute_first(&code);
            assert_eq!(code.verify(), expected);
            assert_eq!(code.verify_parallel(), expected);
        }
    }

    fn sum_dim(s: &[&Subspace]) -> usize {
        crate::subspace::sum_dimension(s).unwrap()
    }

    #[test]
    fn deletion_pass_leaves_valid_code() {
        let f = gf2();
        let all = enumerate_grassmannian(&f, 4, 2, 100).unwrap();
        let mut alive = vec![true; all.len()];
        delete_low_spans(&all, &mut alive, 3, 4);
        let kept: Vec<Subspace> = all.iter().zip(&alive).filter(|(_, &a)| a).map(|(s, _)| s.clone()).collect();
        let code = CoveringCode::new(CodeSpec::new(2, 4, 2, 2, 3).unwrap(), kept).unwrap();
        assert!(code.verify().is_valid());
        assert!(all_low_spans(code.words(), &vec![true; code.len()], 3, 4).is_empty());
    }

    #[test]
    fn lifted_modes() {
        let f = gf2();
        assert_eq!(
            verify_lifted_linear(&[MatrixGF::zeros(&f, 2, 3)], 1, LiftedMode::PairsOfNonzero).unwrap(),
            Verdict::Valid
        );
        let a = MatrixGF::from_rows(&f, &[vec![1, 0], vec![0, 0]]).unwrap();
        let z = MatrixGF::zeros(&f, 2, 2);
        assert_eq!(
            verify_lifted_linear(&[z, a], 1, LiftedMode::PairsOfNonzero).unwrap(),
            Verdict::Valid
        );
        let b = MatrixGF::from_rows(&f, &[vec![0, 1], vec![0, 0]]).unwrap();
        let z = MatrixGF::zeros(&f, 2, 2);
        let a = MatrixGF::from_rows(&f, &[vec![1, 0], vec![0, 0]]).unwrap();
        assert_eq!(
            verify_lifted_linear(&[z, a, b], 1, LiftedMode::PairsOfNonzero).unwrap_err(),
            CodeError::NotClosed
        );
    }

    #[test]
    fn packing_violation_witness() {
        // three 3-subspaces of F_2^4 through a common line, λ = 2
        let f = gf2();
        let blocks = vec![
            word(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]]),
            word(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 0, 1]]),
            word(&f, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]),
        ];
        let ps = PackingSpec { q: 2, n: 4, k: 3, t: 1, lambda: 2 };
        match verify_packing(&ps, &blocks, 1000).unwrap() {
            PackingVerdict::Violated(v) => {
                assert_eq!(v.blocks, vec![0, 1, 2]);
                assert_eq!(v.subspace, word(&f, &[vec![1, 0, 0, 0]]));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        let one = PackingSpec { lambda: 1, ..ps };
        assert!(verify_packing(&one, &blocks[..1], 1000).unwrap().is_valid());
        assert!(verify_packing(&ps, &blocks, 5).unwrap_err().is_cap());
    }

    #[test]
    fn exact_max_spread_case() {
        let spec = CodeSpec::new(2, 4, 2, 2, 2).unwrap();
        let (size, code) = exact_max(&spec, 1000).unwrap();
        assert_eq!(size, 5);
        assert!(code.verify().is_valid());
        assert!(exact_max(&CodeSpec::new(2, 6, 3, 1, 3).unwrap(), 1000).unwrap_err().is_cap());
    }

    #[test]
    fn file_round_trip() {
        let f = Field::new(3, 1).unwrap();
        let spec = CodeSpec::new(3, 4, 2, 2, 2).unwrap();
        let words = enumerate_grassmannian(&f, 4, 2, 1000).unwrap().into_iter().step_by(17).collect();
        let code = CoveringCode::new(spec, words).unwrap();
        let text = code.to_text();
        let back = CoveringCode::parse_text(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.to_text(), text);
        assert!(CoveringCode::parse_text("2 4 2 2 2\n1\n2\n1 0 0 0\n1 0 0 0\n").is_err());
        assert!(CoveringCode::parse_text("2 4 2 2\n0\n").is_err());
    }
}
