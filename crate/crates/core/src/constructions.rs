//! Explicit constructions of covering codes from lifted matrix sets, the
//! spread-based greedy procedure, and two randomized deletion procedures.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::code::{all_low_spans, delete_low_spans, CodeError, CodeSpec, CoveringCode};
use crate::gf::{Field, GfError};
use crate::hypergraph::{greedy_independent_set, Hypergraph};
use crate::matrix::{MatrixError, MatrixGF};
use crate::subspace::{enumerate_grassmannian, lift, make_spread, Subspace, SubspaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

impl ConstructionError {
    pub fn is_cap(&self) -> bool {
        match self {
            ConstructionError::Code(e) => e.is_cap(),
            ConstructionError::Subspace(SubspaceError::CapExceeded { .. }) => true,
            _ => false,
        }
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), ConstructionError> {
    if cond {
        Ok(())
    } else {
        Err(ConstructionError::Precondition(msg()))
    }
}

fn binary() -> Field {
    Field::new(2, 1).expect("GF(2)")
}

/// Lifts each matrix after padding it with zero columns to width n − k.
fn lift_padded(mats: &[MatrixGF], n: usize) -> Vec<Subspace> {
    mats.iter()
        .map(|m| lift(&m.pad_cols(n - m.rows() - m.cols())))
        .collect()
}

/// Every (B_1 | … | B_t) with B_i from `blocks`, shifted, then padded to
/// k × (n − k). Tuples run in lexicographic order of block indices.
fn shifted_products(blocks: &[MatrixGF], t: usize, n: usize) -> Result<Vec<MatrixGF>, ConstructionError> {
    let k = blocks[0].rows();
    let mut digits = vec![0usize; t];
    let mut out = Vec::new();
    loop {
        let parts: Vec<&MatrixGF> = digits.iter().map(|&d| &blocks[d]).collect();
        let sh = MatrixGF::hconcat(&parts)?.shift()?;
        out.push(sh.pad_cols(n - k - sh.cols()));
        let mut carry = true;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < blocks.len() {
                carry = false;
                break;
            }
            *d = 0;
        }
        if carry {
            return Ok(out);
        }
    }
}

/// Number of shifted blocks that fit: ⌊(n − 2k + 1)/(k + 1)⌋.
fn block_count(n: usize, k: usize) -> usize {
    (n + 1).saturating_sub(2 * k) / (k + 1)
}

/// Matrices Σ a_i E_i over GF(2), where E_i is I_k placed at column offset i
/// inside a k × (n − k) zero matrix.
pub fn construction1_matrices(n: usize, k: usize) -> Result<Vec<MatrixGF>, ConstructionError> {
    require(k >= 2, || format!("need k >= 2, got {k}"))?;
    require(n > 2 * k, || format!("need n >= 2k+1, got n={n}, k={k}"))?;
    let f = binary();
    let terms = n - 2 * k + 1;
    let mut out = Vec::with_capacity(1 << terms);
    for mask in 0u64..(1 << terms) {
        let mut m = MatrixGF::zeros(&f, k, n - k);
        for i in (0..terms).filter(|i| mask >> i & 1 == 1) {
            for r in 0..k {
                m.set(r, r + i, f.add(m.get(r, r + i), 1));
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// 3-(n, k, k+1) code over GF(2) of size 2^(n−2k+1).
pub fn construction1(n: usize, k: usize) -> Result<CoveringCode, ConstructionError> {
    let mats = construction1_matrices(n, k)?;
    let spec = CodeSpec::new(2, n, k, k + 1, 3)?;
    Ok(CoveringCode::new(spec, lift_padded(&mats, n))?)
}

/// Rows all equal to (a_1 … a_k | b_i); `a` and `b` are 0-based here.
fn repeated_row_block(f: &Field, a: &[u8], b: &[u8]) -> MatrixGF {
    let k = a.len();
    let mut m = MatrixGF::zeros(f, k, k + 1);
    for r in 0..k {
        for (c, &v) in a.iter().enumerate() {
            m.set(r, c, v);
        }
        m.set(r, k, b[r]);
    }
    m
}

/// Block set with free entries a_{1+jm}, j < ℓ, and last column
/// b_i = g(a_{jm+1}) for jm+1 ≤ i ≤ min((j+1)m, k). 1-based indices as in
/// the defining display; a_i with i > k reads as 0.
fn indicator_blocks(f: &Field, k: usize, m: usize, l: usize, g: impl Fn(u8) -> u8) -> Vec<MatrixGF> {
    let q = f.order();
    let mut out = Vec::new();
    let mut vals = vec![0u8; l];
    loop {
        let mut a = vec![0u8; k];
        for (j, &v) in vals.iter().enumerate() {
            a[j * m] = v;
        }
        let mut b = vec![0u8; k];
        for j in 0..=l {
            let src = if j * m < k { a[j * m] } else { 0 };
            for i in (j * m + 1)..=((j + 1) * m).min(k) {
                b[i - 1] = g(src);
            }
        }
        out.push(repeated_row_block(f, &a, &b));
        let mut carry = true;
        for v in vals.iter_mut().rev() {
            *v += 1;
            if (*v as usize) < q {
                carry = false;
                break;
            }
            *v = 0;
        }
        if carry {
            return out;
        }
    }
}

/// Shifted block products for k ≥ 3⌈γ/2⌉ over GF(2).
pub fn construction2_matrices(n: usize, k: usize, gamma: usize) -> Result<Vec<MatrixGF>, ConstructionError> {
    require(gamma >= 1, || "need gamma >= 1".into())?;
    let m = gamma.div_ceil(2);
    require(k >= 3 * m, || format!("need k >= 3*ceil(gamma/2) = {}, got k={k}", 3 * m))?;
    require(n >= 2 * k + gamma, || format!("need n >= 2k+gamma = {}, got {n}", 2 * k + gamma))?;
    let t = block_count(n, k);
    require(t >= 1, || format!("need floor((n-2k+1)/(k+1)) >= 1 for n={n}, k={k}"))?;
    let f = binary();
    let blocks = indicator_blocks(&f, k, m, k / m, |x| x);
    shifted_products(&blocks, t, n)
}

/// 3-(n, k, k+γ) code over GF(2) of size 2^(tℓ), ℓ = ⌊k/⌈γ/2⌉⌋.
pub fn construction2(n: usize, k: usize, gamma: usize) -> Result<CoveringCode, ConstructionError> {
    let mats = construction2_matrices(n, k, gamma)?;
    let spec = CodeSpec::new(2, n, k, k + gamma, 3)?;
    Ok(CoveringCode::new(spec, lift_padded(&mats, n))?)
}

/// The two generators C, D of the block space used when γ+1 ≤ k < 3⌈γ/2⌉.
pub fn construction3_generators(k: usize) -> (MatrixGF, MatrixGF) {
    let f = binary();
    let mut c = MatrixGF::zeros(&f, k, k + 1);
    let mut d = MatrixGF::zeros(&f, k, k + 1);
    for i in 0..k {
        c.set(i, 0, 1);
        d.set(i, 1, 1);
    }
    for i in 0..k.saturating_sub(2) {
        c.set(i, k, 1);
    }
    for i in 1..k.saturating_sub(1) {
        d.set(i, k, 1);
    }
    (c, d)
}

pub fn construction3_matrices(n: usize, k: usize, gamma: usize) -> Result<Vec<MatrixGF>, ConstructionError> {
    require(gamma >= 1, || "need gamma >= 1".into())?;
    let m = gamma.div_ceil(2);
    require(gamma < k && k < 3 * m, || {
        format!("need gamma+1 <= k < 3*ceil(gamma/2), got k={k}, gamma={gamma}")
    })?;
    require(n >= 2 * k + gamma, || format!("need n >= 2k+gamma = {}, got {n}", 2 * k + gamma))?;
    let t = block_count(n, k);
    require(t >= 1, || format!("need floor((n-2k+1)/(k+1)) >= 1 for n={n}, k={k}"))?;
    let (c, d) = construction3_generators(k);
    let f = binary();
    let blocks = vec![MatrixGF::zeros(&f, k, k + 1), c.clone(), d.clone(), c.add(&d)?];
    shifted_products(&blocks, t, n)
}

/// 3-(n, k, k+γ) code over GF(2) of size 2^(2t).
pub fn construction3(n: usize, k: usize, gamma: usize) -> Result<CoveringCode, ConstructionError> {
    let mats = construction3_matrices(n, k, gamma)?;
    let spec = CodeSpec::new(2, n, k, k + gamma, 3)?;
    Ok(CoveringCode::new(spec, lift_padded(&mats, n))?)
}

/// Concatenations of t = ⌊(n−k)/k⌋ blocks from {O_k, I_k}.
pub fn construction4_matrices(n: usize, k: usize) -> Result<Vec<MatrixGF>, ConstructionError> {
    require(k >= 1 && n >= 3 * k, || format!("need n >= 3k, got n={n}, k={k}"))?;
    let f = binary();
    let t = (n - k) / k;
    let blocks = [MatrixGF::zeros(&f, k, k), MatrixGF::identity(&f, k)];
    let mut out = Vec::with_capacity(1 << t);
    for mask in 0u64..(1 << t) {
        let parts: Vec<&MatrixGF> = (0..t).rev().map(|i| &blocks[(mask >> i & 1) as usize]).collect();
        out.push(MatrixGF::hconcat(&parts)?.pad_cols(n - k - t * k));
    }
    Ok(out)
}

/// 3-(n, k, 2k) code over GF(2) of size 2^⌊(n−k)/k⌋.
pub fn construction4(n: usize, k: usize) -> Result<CoveringCode, ConstructionError> {
    let mats = construction4_matrices(n, k)?;
    let spec = CodeSpec::new(2, n, k, 2 * k, 3)?;
    Ok(CoveringCode::new(spec, lift_padded(&mats, n))?)
}

/// Shifted block products over GF(q), q > 2, with squared indicators.
/// The set is not closed under subtraction.
pub fn construction5_matrices(q: u64, n: usize, k: usize, gamma: usize) -> Result<Vec<MatrixGF>, ConstructionError> {
    require(q > 2, || format!("need q > 2, got {q}"))?;
    require(gamma >= 1 && k >= gamma, || format!("need 1 <= gamma <= k, got gamma={gamma}, k={k}"))?;
    require(n >= 2 * k + gamma, || format!("need n >= 2k+gamma = {}, got {n}", 2 * k + gamma))?;
    let t = block_count(n, k);
    require(t >= 1, || format!("need floor((n-2k+1)/(k+1)) >= 1 for n={n}, k={k}"))?;
    let f = Field::from_order(q)?;
    let sq = f.clone();
    let blocks = indicator_blocks(&f, k, gamma, k / gamma, move |x| sq.mul(x, x));
    shifted_products(&blocks, t, n)
}

/// 3-(n, k, k+γ) code over GF(q) of size q^(tℓ), ℓ = ⌊k/γ⌋.
pub fn construction5(q: u64, n: usize, k: usize, gamma: usize) -> Result<CoveringCode, ConstructionError> {
    let mats = construction5_matrices(q, n, k, gamma)?;
    let spec = CodeSpec::new(q, n, k, k + gamma, 3)?;
    Ok(CoveringCode::new(spec, lift_padded(&mats, n))?)
}

/// Record of the spread-based greedy procedure.
#[derive(Debug, Clone)]
pub struct GreedyTrace {
    pub spec: CodeSpec,
    pub picked: Vec<Subspace>,
    /// Spread members discarded right after each pick.
    pub removed_counts: Vec<usize>,
}

impl GreedyTrace {
    pub fn code(&self) -> CoveringCode {
        CoveringCode::new(self.spec, self.picked.clone()).expect("picked members are distinct k-subspaces")
    }
}

fn subsets(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..r).collect();
    if r > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..r).rev().find(|&i| idx[i] < n - r + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Picks spread members one at a time. After V_m is picked, every surviving
/// member meeting span(T ∪ {V_m}) nontrivially is discarded, for each set T
/// of min(m−1, α−2) earlier picks. The first survivor is always picked.
pub fn greedy_spread(q: u64, n: usize, k: usize, alpha: usize) -> Result<GreedyTrace, ConstructionError> {
    require(k >= 1 && n % k == 0, || format!("need k | n, got n={n}, k={k}"))?;
    require(alpha >= 3, || format!("need alpha >= 3, got {alpha}"))?;
    require(n >= alpha * k, || format!("need n >= alpha*k = {}, got {n}", alpha * k))?;
    let spec = CodeSpec::new(q, n, k, (alpha - 1) * k, alpha)?;
    let field = spec.field();
    let spread = make_spread(&field, n, k)?;
    // Spread members partition the points, so the members meeting a span are
    // the owners of its points.
    let mut owner: HashMap<Subspace, usize> = HashMap::new();
    for (i, w) in spread.iter().enumerate() {
        for p in w.subspaces_of_dim(1)? {
            owner.insert(p, i);
        }
    }
    let mut alive = vec![true; spread.len()];
    let mut picked: Vec<Subspace> = Vec::new();
    let mut removed_counts = Vec::new();
    while let Some(vi) = alive.iter().position(|&a| a) {
        alive[vi] = false;
        let v = spread[vi].clone();
        let earlier = picked.len();
        let mut spans = Vec::new();
        subsets(earlier, earlier.min(alpha - 2), |t| {
            let mut parts = vec![v.basis()];
            parts.extend(t.iter().map(|&i| picked[i].basis()));
            spans.push(MatrixGF::vstack(&parts));
        });
        let mut removed = 0;
        for gens in spans {
            for p in Subspace::from_generators(&gens?).subspaces_of_dim(1)? {
                let o = owner[&p];
                if alive[o] {
                    alive[o] = false;
                    removed += 1;
                }
            }
        }
        removed_counts.push(removed);
        picked.push(v);
    }
    Ok(GreedyTrace {
        spec,
        picked,
        removed_counts,
    })
}

/// q^e for a rational exponent, as a float.
fn rate(q: u64, num: i64, den: i64) -> f64 {
    (q as f64).powf(num as f64 / den as f64)
}

fn sample(words: &[Subspace], p: f64, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    words.iter().map(|_| rng.gen::<f64>() < p).collect()
}

fn collect(spec: CodeSpec, words: &[Subspace], alive: &[bool]) -> Result<CoveringCode, ConstructionError> {
    let kept = words
        .iter()
        .zip(alive)
        .filter(|(_, &a)| a)
        .map(|(w, _)| w.clone())
        .collect();
    Ok(CoveringCode::new(spec, kept)?)
}

/// Sampling probability min(1, C·q^(−n(δ−1)/(α−1))) used by [`random_deletion`].
pub fn random_deletion_probability(spec: &CodeSpec, c_const: f64) -> f64 {
    let exp = -((spec.n * (spec.delta - 1)) as i64);
    (c_const * rate(spec.q, exp, (spec.alpha - 1) as i64)).clamp(0.0, 1.0)
}

/// Keeps each k-subspace independently with probability
/// [`random_deletion_probability`], walking the Grassmannian in enumeration
/// order with a ChaCha8 stream seeded from `seed`. While a bad α-system
/// remains, the last member of the lexicographically first one is removed.
pub fn random_deletion(spec: &CodeSpec, seed: u64, c_const: f64, cap: u64) -> Result<CoveringCode, ConstructionError> {
    let words = enumerate_grassmannian(&spec.field(), spec.n, spec.k, cap)?;
    let p = random_deletion_probability(spec, c_const);
    let mut alive = sample(&words, p, seed);
    delete_low_spans(&words, &mut alive, spec.alpha, spec.target_dim());
    collect(*spec, &words, &alive)
}

/// f(i) = ⌈(i−1)(k − (δ−1)/(α−1))⌉.
pub fn two_stage_f(spec: &CodeSpec, i: usize) -> i64 {
    let num = (i as i64 - 1) * ((spec.k * (spec.alpha - 1)) as i64 - (spec.delta as i64 - 1));
    Integer::div_ceil(&num, &((spec.alpha - 1) as i64))
}

/// Sampling probability min(1, q^((ε − (δ−1)/(α−1))n)) used by
/// [`two_stage_deletion`].
pub fn two_stage_probability(spec: &CodeSpec, epsilon: f64) -> f64 {
    let a1 = (spec.alpha - 1) as f64;
    let e = (epsilon - (spec.delta as f64 - 1.0) / a1) * spec.n as f64;
    (spec.q as f64).powf(e).clamp(0.0, 1.0)
}

/// Sampling followed by two deletion rounds and an independent set.
///
/// 1. For i = 2..α−1, remove the last member of each i-set of survivors
///    spanning at most ik − f(i).
/// 2. For each pair of intact bad α-systems sharing between 2 and α−1
///    members, remove the largest member of their union.
/// 3. Bad α-systems still intact form an α-uniform hypergraph on the
///    survivors; a greedy independent set of it is returned.
pub fn two_stage_deletion(spec: &CodeSpec, seed: u64, epsilon: f64, cap: u64) -> Result<CoveringCode, ConstructionError> {
    require(spec.alpha >= 3, || format!("need alpha >= 3, got {}", spec.alpha))?;
    require((spec.alpha - 1).gcd(&(spec.delta - 1)) == 1, || {
        format!(
            "need gcd(alpha-1, delta-1) = 1, got gcd({}, {}) = {}",
            spec.alpha - 1,
            spec.delta - 1,
            (spec.alpha - 1).gcd(&(spec.delta - 1))
        )
    })?;
    let words = enumerate_grassmannian(&spec.field(), spec.n, spec.k, cap)?;
    let p = two_stage_probability(spec, epsilon);
    let mut alive = sample(&words, p, seed);
    let k = spec.k as i64;
    for i in 2..spec.alpha {
        let min_dim = i as i64 * k - two_stage_f(spec, i) + 1;
        if min_dim <= 0 {
            continue;
        }
        delete_low_spans(&words, &mut alive, i, min_dim as usize);
    }
    let bad = all_low_spans(&words, &alive, spec.alpha, spec.target_dim());
    // Systems sharing at least two members meet in some pair of codewords.
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, sys) in bad.iter().enumerate() {
        for x in 0..sys.len() {
            for y in x + 1..sys.len() {
                by_pair.entry((sys[x], sys[y])).or_default().push(i);
            }
        }
    }
    let mut overlapping = BTreeSet::new();
    for list in by_pair.values() {
        for x in 0..list.len() {
            for y in x + 1..list.len() {
                overlapping.insert((list[x], list[y]));
            }
        }
    }
    for (a, b) in overlapping {
        let shared = bad[a].iter().filter(|x| bad[b].contains(x)).count();
        if shared < 2 || shared >= spec.alpha {
            continue;
        }
        let intact = |s: &[usize]| s.iter().all(|&x| alive[x]);
        if intact(&bad[a]) && intact(&bad[b]) {
            let last = *bad[a].iter().chain(&bad[b]).max().unwrap();
            alive[last] = false;
        }
    }
    let survivors: Vec<usize> = (0..words.len()).filter(|&i| alive[i]).collect();
    let mut position = vec![usize::MAX; words.len()];
    for (pos, &i) in survivors.iter().enumerate() {
        position[i] = pos;
    }
    let edges: Vec<Vec<usize>> = all_low_spans(&words, &alive, spec.alpha, spec.target_dim())
        .into_iter()
        .map(|s| s.into_iter().map(|i| position[i]).collect())
        .collect();
    let g = Hypergraph::new(survivors.len(), edges).expect("bad systems are distinct subsets of survivors");
    let mut keep = vec![false; words.len()];
    for v in greedy_independent_set(&g) {
        keep[survivors[v]] = true;
    }
    collect(*spec, &words, &keep)
}
