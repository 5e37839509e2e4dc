//! Subspaces of F_q^n in canonical form, Grassmannians and spreads.
//!
//! A [`Subspace`] stores the reduced row echelon basis of its row space, so
//! equality is entry-wise comparison of that basis. The total order used for
//! enumeration compares pivot columns first and then the basis entries in
//! row-major order.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::gf::{Field, GfError};
use crate::matrix::{MatrixError, MatrixGF, RowEchelon};
use crate::poly;

/// Default ceiling on the number of subspaces materialised by enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("subspace dimension {k} exceeds ambient dimension {n}")]
    DimensionTooLarge { n: usize, k: usize },
    #[error("enumeration of {count} subspaces exceeds the cap of {cap}")]
    CapExceeded { count: BigUint, cap: u64 },
    #[error("{k} does not divide {n}")]
    NotDivisible { n: usize, k: usize },
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("malformed subspace text: {0}")]
    Parse(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

#[derive(Clone)]
pub struct Subspace {
    n: usize,
    k: usize,
    basis: MatrixGF,
}

impl Subspace {
    /// Row space of `generators`, canonicalised.
    pub fn from_generators(generators: &MatrixGF) -> Subspace {
        let basis = generators.rref();
        Subspace {
            n: generators.cols(),
            k: basis.rows(),
            basis,
        }
    }

    /// Accepts a basis that must already be in canonical form.
    pub fn from_rref(basis: MatrixGF) -> Result<Subspace, SubspaceError> {
        if basis.rref() != basis {
            return Err(SubspaceError::Parse("basis is not in reduced row echelon form".into()));
        }
        Ok(Subspace {
            n: basis.cols(),
            k: basis.rows(),
            basis,
        })
    }

    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace {
            n,
            k: 0,
            basis: MatrixGF::zeros(field, 0, n),
        }
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        Subspace {
            n,
            k: n,
            basis: MatrixGF::identity(field, n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn basis(&self) -> &MatrixGF {
        &self.basis
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .row_iter()
            .map(|r| r.iter().position(|&v| v != 0).unwrap())
            .collect()
    }

    pub fn contains_vector(&self, v: &[u8]) -> bool {
        let mut e = RowEchelon::new(self.field(), self.n);
        e.insert_matrix(&self.basis);
        e.contains(v)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis.row_iter().all(|r| self.contains_vector(r))
    }

    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize, SubspaceError> {
        Ok(self.k + other.k - sum_dimension(&[self, other])?)
    }

    /// Orthogonal complement under the standard bilinear form.
    pub fn dual(&self) -> Subspace {
        let f = self.field();
        let pivots = self.pivots();
        let mut rows = Vec::with_capacity(self.n - self.k);
        for free in (0..self.n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u8; self.n];
            v[free] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(self.basis.get(r, free));
            }
            rows.push(v);
        }
        if rows.is_empty() {
            return Subspace::zero(f, self.n);
        }
        Subspace::from_generators(&MatrixGF::from_rows(f, &rows).expect("uniform rows"))
    }

    /// All `d`-dimensional subspaces of `self`, in the order induced by
    /// enumerating coefficient subspaces of F_q^k.
    pub fn subspaces_of_dim(&self, d: usize) -> Result<Vec<Subspace>, SubspaceError> {
        let coeffs = enumerate_grassmannian(self.field(), self.k, d, u64::MAX)?;
        coeffs
            .iter()
            .map(|c| {
                if d == 0 {
                    return Ok(Subspace::zero(self.field(), self.n));
                }
                let gens = c.basis.mul(&self.basis)?;
                Ok(Subspace::from_generators(&gens))
            })
            .collect()
    }

    /// Index of `self` in the enumeration order of its Grassmannian, computed
    /// without materialising the Grassmannian.
    pub fn enumeration_index(&self) -> BigUint {
        let q = BigUint::from(self.field().order());
        let pivots = self.pivots();
        let mut index = BigUint::zero();
        for combo in Combinations::new(self.n, self.k) {
            if combo == pivots {
                break;
            }
            index += q.pow(free_count(self.n, &combo) as u32);
        }
        let mut within = BigUint::zero();
        for (r, &p) in pivots.iter().enumerate() {
            for j in p + 1..self.n {
                if !pivots.contains(&j) {
                    within = within * &q + BigUint::from(self.basis.get(r, j));
                }
            }
        }
        index + within
    }

    /// Header line `n k q` followed by the basis rows.
    pub fn to_text(&self) -> String {
        format!("{} {} {}\n{}", self.n, self.k, self.field().order(), self.basis.to_text())
    }

    pub fn parse_text(text: &str) -> Result<Subspace, SubspaceError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| SubspaceError::Parse("empty input".into()))?;
        let nums: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| SubspaceError::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_, _>>()?;
        let [n, k, q] = nums[..] else {
            return Err(SubspaceError::Parse(format!("bad header {header:?}")));
        };
        let field = Field::from_order(q)?;
        let basis = MatrixGF::parse_rows(&field, n as usize, lines.take(k as usize))?;
        if basis.rows() != k as usize {
            return Err(SubspaceError::Parse("too few basis rows".into()));
        }
        Subspace::from_rref(basis)
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.k.hash(state);
        self.basis.data().hash(state);
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.k)
            .cmp(&(other.n, other.k))
            .then_with(|| self.pivots().cmp(&other.pivots()))
            .then_with(|| self.basis.data().cmp(other.basis.data()))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace({}-dim in {}: ", self.k, self.n)?;
        let rows: Vec<String> = self
            .basis
            .row_iter()
            .map(|r| r.iter().map(|&v| self.field().encode(v)).collect::<Vec<_>>().join(""))
            .collect();
        write!(f, "[{}])", rows.join(" "))
    }
}

/// Lexicographic k-combinations of 0..n.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

fn free_count(n: usize, pivots: &[usize]) -> usize {
    let k = pivots.len();
    pivots.iter().enumerate().map(|(r, &p)| n - p - (k - r)).sum()
}

/// Number of k-subspaces of F_q^n, `prod_{i<k} (q^n - q^i) / (q^k - q^i)`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> Result<BigUint, SubspaceError> {
    if k > n {
        return Err(SubspaceError::DimensionTooLarge { n, k });
    }
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    let qk = q.pow(k as u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        let qi = q.pow(i as u32);
        num *= &qn - &qi;
        den *= &qk - &qi;
    }
    Ok(num / den)
}

/// All k-subspaces of F_q^n in canonical order.
pub fn enumerate_grassmannian(
    field: &Field,
    n: usize,
    k: usize,
    cap: u64,
) -> Result<Vec<Subspace>, SubspaceError> {
    let count = gaussian_binomial(n, k, field.order() as u64)?;
    if count > BigUint::from(cap) {
        return Err(SubspaceError::CapExceeded { count, cap });
    }
    let q = field.order();
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    for pivots in Combinations::new(n, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..n).filter(move |j| !pivots.contains(j)).map(move |j| (r, j))
            })
            .collect();
        let mut template = MatrixGF::zeros(field, k, n);
        for (r, &p) in pivots.iter().enumerate() {
            template.set(r, p, 1);
        }
        let mut digits = vec![0u8; free.len()];
        loop {
            let mut m = template.clone();
            for (&(r, j), &v) in free.iter().zip(&digits) {
                m.set(r, j, v);
            }
            out.push(Subspace { n, k, basis: m });
            // odometer step, last free position least significant
            let mut wrapped = true;
            for d in digits.iter_mut().rev() {
                *d += 1;
                if (*d as usize) < q {
                    wrapped = false;
                    break;
                }
                *d = 0;
            }
            if wrapped {
                break;
            }
        }
    }
    Ok(out)
}

/// Row space of `[I_k | A]`.
pub fn lift(a: &MatrixGF) -> Subspace {
    let gens = MatrixGF::hconcat(&[&MatrixGF::identity(a.field(), a.rows()), a])
        .expect("identity block matches row count");
    Subspace::from_generators(&gens)
}

/// Dimension of the span of all given subspaces.
pub fn sum_dimension(subspaces: &[&Subspace]) -> Result<usize, SubspaceError> {
    let Some(first) = subspaces.first() else {
        return Ok(0);
    };
    let mut e = RowEchelon::new(first.field(), first.n);
    for s in subspaces {
        if s.n != first.n || s.field() != first.field() {
            return Err(SubspaceError::AmbientMismatch);
        }
        e.insert_matrix(&s.basis);
    }
    Ok(e.dim())
}

/// Desarguesian k-spread of F_q^n, sorted in canonical order.
///
/// F_q^n is identified with (F_{q^k})^{n/k}, where F_{q^k} = F_q[x]/(g) for
/// the least monic irreducible g of degree k and coordinates are taken in the
/// basis 1, x, ..., x^{k-1}. Each spread member is the F_q-image of a
/// one-dimensional F_{q^k}-subspace.
pub fn make_spread(field: &Field, n: usize, k: usize) -> Result<Vec<Subspace>, SubspaceError> {
    if k == 0 || n % k != 0 {
        return Err(SubspaceError::NotDivisible { n, k });
    }
    let m = n / k;
    let q = field.order();
    let g = poly::least_irreducible(field, k);
    let ext_elems = q.pow(k as u32);
    let coords = |idx: usize| -> Vec<u8> { poly::monic_from_index(q, k, idx)[..k].to_vec() };
    let ext_mul = |a: &[u8], b: &[u8]| -> Vec<u8> {
        let mut r = poly::rem_monic(field, &poly::mul(field, a, b), &g);
        r.resize(k, 0);
        r
    };
    let powers: Vec<Vec<u8>> = (0..k)
        .map(|i| {
            let mut v = vec![0u8; k];
            v[i] = 1;
            v
        })
        .collect();
    let mut out = Vec::new();
    for lead in 0..m {
        let tail = m - 1 - lead;
        let combos = ext_elems.pow(tail as u32);
        for idx in 0..combos {
            let mut beta: Vec<Vec<u8>> = vec![vec![0u8; k]; m];
            beta[lead][0] = 1;
            let mut rest = idx;
            for slot in (lead + 1..m).rev() {
                beta[slot] = coords(rest % ext_elems);
                rest /= ext_elems;
            }
            let rows: Vec<Vec<u8>> = powers
                .iter()
                .map(|lambda| beta.iter().flat_map(|b| ext_mul(lambda, b)).collect())
                .collect();
            out.push(Subspace::from_generators(&MatrixGF::from_rows(field, &rows)?));
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn gf(q: u64) -> Field {
        Field::from_order(q).unwrap()
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_binomial(7, 0, 3).unwrap(), BigUint::one());
        assert_eq!(gaussian_binomial(4, 2, 2).unwrap(), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(6, 3, 2).unwrap(), BigUint::from(1395u32));
        assert!(gaussian_binomial(2, 3, 2).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        let f = gf(2);
        assert_eq!(enumerate_grassmannian(&f, 5, 0, 10).unwrap().len(), 1);
        assert_eq!(enumerate_grassmannian(&f, 3, 1, 100).unwrap().len(), 7);
        let g = enumerate_grassmannian(&f, 4, 2, 100).unwrap();
        assert_eq!(g.len(), 35);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let set: HashSet<_> = g.iter().cloned().collect();
        assert_eq!(set.len(), 35);
        assert!(matches!(
            enumerate_grassmannian(&f, 6, 3, 1000),
            Err(SubspaceError::CapExceeded { .. })
        ));
    }

    #[test]
    fn enumeration_index_matches_position() {
        for q in [2, 3, 4] {
            let f = gf(q);
            for (n, k) in [(4, 2), (3, 1), (4, 3), (4, 0)] {
                let g = enumerate_grassmannian(&f, n, k, 10_000).unwrap();
                for (i, s) in g.iter().enumerate() {
                    assert_eq!(s.enumeration_index(), BigUint::from(i));
                }
            }
        }
    }

    #[test]
    fn lift_examples() {
        let f = gf(2);
        let e0 = MatrixGF::from_rows(&f, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let l = lift(&e0);
        let expect = MatrixGF::from_rows(&f, &[vec![1, 0, 1, 0, 0], vec![0, 1, 0, 1, 0]]).unwrap();
        assert_eq!(l.basis(), &expect);
        let zero = lift(&MatrixGF::zeros(&f, 2, 3));
        assert_eq!(zero.pivots(), vec![0, 1]);
        assert_ne!(l, zero);
    }

    #[test]
    fn dual_examples() {
        let f = gf(2);
        assert_eq!(Subspace::full(&f, 4).dual(), Subspace::zero(&f, 4));
        let u = Subspace::from_generators(&MatrixGF::from_rows(&f, &[vec![1, 0, 0, 0]]).unwrap());
        let d = u.dual();
        let expect = MatrixGF::from_rows(
            &f,
            &[vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        )
        .unwrap();
        assert_eq!(d.basis(), &expect);
        for q in [2, 3, 4] {
            let f = gf(q);
            for s in enumerate_grassmannian(&f, 4, 2, 10_000).unwrap() {
                let d = s.dual();
                assert_eq!(d.dim(), 2);
                assert_eq!(d.dual(), s);
                // orthogonality
                for a in s.basis().row_iter() {
                    for b in d.basis().row_iter() {
                        let dot = a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
                        assert_eq!(dot, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn sum_dimension_examples() {
        let f = gf(2);
        let a = Subspace::from_generators(&MatrixGF::from_rows(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap());
        assert_eq!(sum_dimension(&[&a]).unwrap(), 2);
        let b = Subspace::from_generators(&MatrixGF::from_rows(&f, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap());
        assert_eq!(sum_dimension(&[&a, &b]).unwrap(), 4);
        let c = Subspace::zero(&f, 5);
        assert_eq!(sum_dimension(&[&a, &c]), Err(SubspaceError::AmbientMismatch));
    }

    #[test]
    fn subspaces_of_dim_counts() {
        let f = gf(3);
        let u = Subspace::full(&f, 3);
        assert_eq!(u.subspaces_of_dim(1).unwrap().len(), 13);
        assert_eq!(u.subspaces_of_dim(2).unwrap().len(), 13);
        assert_eq!(u.subspaces_of_dim(0).unwrap(), vec![Subspace::zero(&f, 3)]);
    }

    #[test]
    fn spread_examples() {
        let f = gf(2);
        assert_eq!(make_spread(&f, 4, 2).unwrap().len(), 5);
        assert_eq!(make_spread(&f, 6, 2).unwrap().len(), 21);
        assert_eq!(
            make_spread(&f, 5, 2).unwrap_err(),
            SubspaceError::NotDivisible { n: 5, k: 2 }
        );
    }

    #[test]
    fn spread_partitions_points() {
        for q in [2u64, 3] {
            let f = gf(q);
            for (n, k) in [(4, 2), (6, 2), (6, 3), (3, 1), (4, 4)] {
                let spread = make_spread(&f, n, k).unwrap();
                let expect = (q.pow(n as u32) - 1) / (q.pow(k as u32) - 1);
                assert_eq!(spread.len() as u64, expect);
                for p in enumerate_grassmannian(&f, n, 1, 100_000).unwrap() {
                    let hits = spread.iter().filter(|s| s.contains(&p)).count();
                    assert_eq!(hits, 1, "q={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let f = gf(4);
        for s in enumerate_grassmannian(&f, 3, 2, 1000).unwrap() {
            assert_eq!(Subspace::parse_text(&s.to_text()).unwrap(), s);
        }
    }
}
