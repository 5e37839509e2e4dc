//! Dense univariate polynomials over a finite field.
//!
//! Coefficients are stored lowest degree first as raw field values. Only the
//! handful of routines needed to pick irreducible moduli and to multiply in
//! extension rings live here.

use crate::gf::Field;

pub(crate) fn trim(mut a: Vec<u8>) -> Vec<u8> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn mul(field: &Field, a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    trim(out)
}

/// Remainder of `a` modulo the monic polynomial `m`.
pub(crate) fn rem_monic(field: &Field, a: &[u8], m: &[u8]) -> Vec<u8> {
    let d = m.len() - 1;
    let mut r = trim(a.to_vec());
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        for (j, &c) in m.iter().enumerate() {
            r[shift + j] = field.sub(r[shift + j], field.mul(lead, c));
        }
        r = trim(r);
    }
    r
}

/// Monic polynomial of degree `degree` whose lower coefficients spell `index`
/// in base q, the coefficient of x^(degree-1) being the most significant digit.
pub(crate) fn monic_from_index(q: usize, degree: usize, mut index: usize) -> Vec<u8> {
    let mut coeffs = Vec::with_capacity(degree + 1);
    for _ in 0..degree {
        coeffs.push((index % q) as u8);
        index /= q;
    }
    coeffs.push(1);
    coeffs
}

/// Exhaustive trial division by every monic polynomial of degree 1..=deg/2.
pub(crate) fn is_irreducible(field: &Field, f: &[u8]) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    let q = field.order();
    for d in 1..=deg / 2 {
        for idx in 0..q.pow(d as u32) {
            let g = monic_from_index(q, d, idx);
            if rem_monic(field, f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of the given degree.
pub(crate) fn least_irreducible(field: &Field, degree: usize) -> Vec<u8> {
    let q = field.order();
    (0..q.pow(degree as u32))
        .map(|idx| monic_from_index(q, degree, idx))
        .find(|f| is_irreducible(field, f))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_degree_three_least_irreducible() {
        let f = Field::new(2, 1).unwrap();
        // x^3 + x + 1
        assert_eq!(least_irreducible(&f, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn reducible_detected() {
        let f = Field::new(2, 1).unwrap();
        // x^2 + 1 = (x + 1)^2
        assert!(!is_irreducible(&f, &[1, 0, 1]));
        assert!(is_irreducible(&f, &[1, 1, 1]));
    }
}
