use covgrass::bounds::{bound_report, etzion_bound, gaussian_sandwich_holds, ic_bound, Side};
use covgrass::code::{
    dualize, exact_max, verify_lifted_linear, verify_packing, verify_words, LiftedMode,
};
use covgrass::constructions::{
    construction1, construction1_matrices, construction2, construction2_matrices, construction3,
    construction3_matrices, construction4, construction4_matrices, construction5, construction5_matrices,
    greedy_spread, random_deletion, two_stage_deletion,
};
use covgrass::hypergraph::{
    find_berge_cycle, find_berge_path, find_linear_cycle, greedy_independent_set, Hypergraph, SearchLimits,
};
use covgrass::matrix::RowEchelon;
use covgrass::subspace::{enumerate_grassmannian, gaussian_binomial, lift, make_spread, sum_dimension};
use covgrass::{CodeSpec, CoveringCode, Field, MatrixGF, Subspace};
use proptest::prelude::*;
use proptest::sample::subsequence;

const ORDERS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn field(q: u64) -> Field {
    Field::from_order(q).unwrap()
}

fn spec(q: u64, n: usize, k: usize, d: usize, a: usize) -> CodeSpec {
    CodeSpec::new(q, n, k, d, a).unwrap()
}

fn matrix(q: u64, rows: usize, cols: usize, seed: Vec<u8>) -> MatrixGF {
    let f = field(q);
    let data = seed.iter().take(rows * cols).map(|&x| x % f.order() as u8).collect();
    MatrixGF::new(&f, rows, cols, data).unwrap()
}

prop_compose! {
    fn small_matrix()(q in prop::sample::select(&ORDERS[..]), rows in 0usize..5, cols in 1usize..6,
                      seed in prop::collection::vec(any::<u8>(), 30)) -> MatrixGF {
        matrix(q, rows, cols, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms(q in prop::sample::select(&ORDERS[..]), a in any::<u8>(), b in any::<u8>(), c in any::<u8>()) {
        let f = field(q);
        let m = f.order() as u8;
        let (a, b, c) = (a % m, b % m, c % m);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        } else {
            prop_assert_eq!(f.inv(a), None);
        }
        let p = f.characteristic() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.pow(a, q), a);
    }

    #[test]
    fn rank_of_stack_dominates(a in small_matrix(), seed in prop::collection::vec(any::<u8>(), 30), rows in 0usize..5) {
        let b = matrix(a.field().order() as u64, rows, a.cols(), seed);
        let s = MatrixGF::vstack(&[&a, &b]).unwrap();
        prop_assert!(s.rank() >= a.rank().max(b.rank()));
        prop_assert!(s.rank() <= a.rank() + b.rank());
    }

    #[test]
    fn rref_is_canonical(a in small_matrix()) {
        let r = a.rref();
        prop_assert_eq!(r.rref(), r.clone());
        prop_assert_eq!(r.rank(), a.rank());
        let mut span = RowEchelon::new(a.field(), a.cols());
        span.insert_matrix(&r);
        for row in a.row_iter() {
            prop_assert!(span.contains(row));
        }
    }

    #[test]
    fn shift_keeps_nonzero_rows(a in small_matrix()) {
        prop_assume!(a.rows() > 0);
        let s = a.shift().unwrap();
        prop_assert_eq!(s.nonzero_rows(), a.nonzero_rows());
        prop_assert_eq!(s.rows(), a.rows());
    }

    #[test]
    fn subspace_duality_and_dimensions(a in small_matrix(), seed in prop::collection::vec(any::<u8>(), 30), rows in 0usize..5) {
        let q = a.field().order() as u64;
        let u = Subspace::from_generators(&a);
        let w = Subspace::from_generators(&matrix(q, rows, a.cols(), seed));
        let n = a.cols();
        prop_assert_eq!(u.dual().dim(), n - u.dim());
        prop_assert_eq!(u.dual().dual(), u.clone());
        let sum = sum_dimension(&[&u, &w]).unwrap();
        prop_assert_eq!(u.intersection_dim(&w).unwrap() + sum, u.dim() + w.dim());
        prop_assert_eq!(u.contains(&w), u.intersection_dim(&w).unwrap() == w.dim());
        prop_assert_eq!(Subspace::parse_text(&u.to_text()).unwrap(), u);
    }

    #[test]
    fn gaussian_symmetry(q in prop::sample::select(&ORDERS[..]), n in 0usize..12, k in 0usize..12) {
        prop_assume!(k <= n);
        prop_assert_eq!(gaussian_binomial(n, k, q).unwrap(), gaussian_binomial(n, n - k, q).unwrap());
        if q <= 5 && n <= 10 {
            prop_assert!(gaussian_sandwich_holds(n, k, q));
        }
    }
}

#[test]
fn grassmannian_enumeration_is_exact() {
    for q in [2, 3, 4] {
        for n in 0..=5 {
            for k in 0..=n {
                let all = enumerate_grassmannian(&field(q), n, k, 1_000_000).unwrap();
                assert_eq!(all.len().to_string(), gaussian_binomial(n, k, q).unwrap().to_string());
                let mut seen = std::collections::HashSet::new();
                for (i, s) in all.iter().enumerate() {
                    assert!(seen.insert(s.clone()));
                    assert_eq!(s.enumeration_index().to_string(), i.to_string());
                }
            }
        }
    }
}

#[test]
fn spreads_partition_points() {
    for q in [2, 3] {
        for n in 1..=6 {
            for k in (1..=n).filter(|k| n % k == 0) {
                let f = field(q);
                let spread = make_spread(&f, n, k).unwrap();
                for p in enumerate_grassmannian(&f, n, 1, 1_000_000).unwrap() {
                    assert_eq!(spread.iter().filter(|s| s.contains(&p)).count(), 1);
                }
            }
        }
    }
}

prop_compose! {
    /// A spec with a random subset of its Grassmannian as the candidate code.
    fn random_code()(case in prop::sample::select(vec![
                        (2u64, 4usize, 2usize), (2, 5, 2), (2, 5, 3), (3, 4, 2), (2, 4, 1), (2, 6, 2)]),
                     delta in 1usize..4, alpha in 2usize..5, picks in subsequence((0..60).collect::<Vec<usize>>(), 0..9))
                    -> Option<CoveringCode> {
        let (q, n, k) = case;
        let s = CodeSpec::new(q, n, k, delta, alpha).ok()?;
        let all = enumerate_grassmannian(&field(q), n, k, 100_000).unwrap();
        let words = picks.iter().filter(|&&i| i < all.len()).map(|&i| all[i].clone()).collect();
        Some(CoveringCode::new(s, words).unwrap())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verify_agrees_with_dual_packing(code in random_code()) {
        let Some(code) = code else { return Ok(()) };
        let (ps, blocks) = dualize(&code);
        let lhs = code.verify().is_valid();
        prop_assert_eq!(lhs, verify_packing(&ps, &blocks, 5_000_000).unwrap().is_valid());
        prop_assert_eq!(code.verify(), code.verify_parallel());
        prop_assert_eq!(CoveringCode::parse_text(&code.to_text()).unwrap(), code.clone());
    }

    #[test]
    fn violation_is_first_failing_subset(code in random_code()) {
        let Some(code) = code else { return Ok(()) };
        let s = *code.spec();
        let words = code.words();
        let mut first = None;
        let mut idx: Vec<usize> = (0..s.alpha).collect();
        if words.len() >= s.alpha {
            'outer: loop {
                let parts: Vec<&Subspace> = idx.iter().map(|&i| &words[i]).collect();
                if sum_dimension(&parts).unwrap() < s.target_dim() {
                    first = Some(idx.clone());
                    break;
                }
                let mut i = s.alpha;
                loop {
                    if i == 0 { break 'outer; }
                    i -= 1;
                    if idx[i] < words.len() - s.alpha + i {
                        idx[i] += 1;
                        for j in i + 1..s.alpha { idx[j] = idx[j - 1] + 1; }
                        break;
                    }
                }
            }
        }
        prop_assert_eq!(code.verify().violation().map(|v| v.indices.clone()), first);
    }

    #[test]
    fn lifted_rank_test_matches_verify(q in prop::sample::select(vec![2u64, 3]), k in 1usize..3, extra in 1usize..4,
                                       gamma in 1usize..3, seeds in prop::collection::vec(prop::collection::vec(any::<u8>(), 12), 3..7)) {
        let n = 2 * k + extra;
        prop_assume!(k + gamma <= n - k);
        let mut mats: Vec<MatrixGF> = Vec::new();
        for s in seeds {
            let m = matrix(q, k, n - k, s);
            if !mats.contains(&m) {
                mats.push(m);
            }
        }
        let words: Vec<Subspace> = mats.iter().map(lift).collect();
        let direct = verify_words(&spec(q, n, k, k + gamma, 3), &words).unwrap();
        let lifted = verify_lifted_linear(&mats, gamma, LiftedMode::PairsOfDifferences).unwrap();
        prop_assert_eq!(direct, lifted);
    }

    #[test]
    fn greedy_independent_set_has_no_edge(v in 1usize..12, raw in prop::collection::vec(prop::collection::vec(0usize..12, 1..4), 0..15)) {
        let mut edges: Vec<Vec<usize>> = Vec::new();
        for e in raw {
            let mut e: Vec<usize> = e.into_iter().map(|x| x % v).collect();
            e.sort_unstable();
            e.dedup();
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
        let h = Hypergraph::new(v, edges.clone()).unwrap();
        let set = greedy_independent_set(&h);
        for e in &edges {
            prop_assert!(!e.iter().all(|x| set.contains(x)));
        }
        prop_assert_eq!(Hypergraph::parse_text(&h.to_text()).unwrap(), h.clone());
        let limits = SearchLimits::default();
        for len in 2..=3 {
            if let Some(w) = find_berge_path(&h, len, limits).unwrap() {
                prop_assert!(w.is_valid_in(&h, false));
            }
        }
        if let Some(w) = find_berge_cycle(&h, 3, limits).unwrap() {
            prop_assert!(w.is_valid_in(&h, true));
        }
        if let Some(w) = find_linear_cycle(&h, 3, limits).unwrap() {
            prop_assert!(w.is_valid_in(&h, true));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn randomized_constructors_verify(seed in any::<u64>(), c in 0.5f64..2.0, eps in 0.05f64..0.3) {
        for s in [spec(2, 6, 2, 2, 3), spec(2, 5, 2, 2, 3), spec(3, 4, 2, 2, 3)] {
            let r = random_deletion(&s, seed, c, 1_000_000).unwrap();
            prop_assert!(r.verify().is_valid());
            let t = two_stage_deletion(&s, seed, eps, 1_000_000).unwrap();
            prop_assert!(t.verify().is_valid());
        }
        let s = spec(2, 6, 2, 3, 4);
        prop_assert!(random_deletion(&s, seed, c, 1_000_000).unwrap().verify().is_valid());
    }
}

#[test]
fn randomized_constructors_are_seeded() {
    let s = spec(2, 6, 2, 2, 3);
    for seed in 0..20 {
        assert_eq!(random_deletion(&s, seed, 1.0, 1_000_000), random_deletion(&s, seed, 1.0, 1_000_000));
        assert_eq!(two_stage_deletion(&s, seed, 0.25, 1_000_000), two_stage_deletion(&s, seed, 0.25, 1_000_000));
    }
}

#[test]
fn lifted_rank_test_agrees_on_constructions() {
    let mut checked = 0;
    for n in 5..=9 {
        for k in 1..=3 {
            if let (Ok(c), Ok(m)) = (construction1(n, k), construction1_matrices(n, k)) {
                assert_eq!(c.verify(), verify_lifted_linear(&m, 1, LiftedMode::PairsOfNonzero).unwrap());
                checked += 1;
            }
            if let (Ok(c), Ok(m)) = (construction4(n, k), construction4_matrices(n, k)) {
                assert_eq!(c.verify(), verify_lifted_linear(&m, k, LiftedMode::PairsOfNonzero).unwrap());
                checked += 1;
            }
            for g in 1..=k {
                if let (Ok(c), Ok(m)) = (construction2(n, k, g), construction2_matrices(n, k, g)) {
                    assert_eq!(c.verify(), verify_lifted_linear(&m, g, LiftedMode::PairsOfNonzero).unwrap());
                    checked += 1;
                }
                if let (Ok(c), Ok(m)) = (construction3(n, k, g), construction3_matrices(n, k, g)) {
                    assert_eq!(c.verify(), verify_lifted_linear(&m, g, LiftedMode::PairsOfNonzero).unwrap());
                    checked += 1;
                }
                if let (Ok(c), Ok(m)) = (construction5(3, n, k, g), construction5_matrices(3, n, k, g)) {
                    assert_eq!(c.verify(), verify_lifted_linear(&m, g, LiftedMode::PairsOfDifferences).unwrap());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 10, "{checked}");
}

#[test]
fn construction_outputs_are_distinct_and_sized() {
    for n in 5..=10 {
        for k in 2..=4 {
            if let Ok(c) = construction1(n, k) {
                assert_eq!(c.len(), 1 << (n - 2 * k + 1));
            }
            if let Ok(c) = construction4(n, k) {
                assert_eq!(c.len(), 1 << ((n - k) / k));
            }
        }
    }
    // CoveringCode::new rejects duplicates, so a successful build is already
    // duplicate-free; check the sizes of the block constructions as well.
    let t = |n: usize, k: usize| (n + 1 - 2 * k) / (k + 1);
    assert_eq!(construction2(10, 3, 2).unwrap().len(), 1 << (t(10, 3) * 3));
    assert_eq!(construction3(9, 2, 1).unwrap().len(), 1 << (2 * t(9, 2)));
    assert_eq!(construction5(3, 10, 2, 1).unwrap().len(), 3usize.pow((t(10, 2) * 2) as u32));
}

#[test]
fn greedy_prefixes_verify() {
    for (q, n, k, a) in [(2, 6, 2, 3), (2, 8, 2, 3), (2, 8, 2, 4), (3, 6, 2, 3), (2, 9, 3, 3)] {
        let trace = greedy_spread(q, n, k, a).unwrap();
        let spec = trace.spec;
        for m in a..=trace.picked.len() {
            assert!(verify_words(&spec, &trace.picked[..m]).unwrap().is_valid(), "{spec} prefix {m}");
        }
    }
}

#[test]
fn exact_max_is_monotone() {
    let mut table = std::collections::HashMap::new();
    let grid = [(2, 4, 2), (2, 4, 1), (3, 4, 2), (2, 5, 2)];
    for &(q, n, k) in &grid {
        for d in 1..=(n - k) {
            for a in 2..=3 {
                // These three take seconds each; the rest are instant.
                if [(2, 5, 2, 2, 3), (2, 5, 2, 3, 3), (3, 4, 2, 2, 3)].contains(&(q, n, k, d, a)) {
                    continue;
                }
                let (size, code) = exact_max(&spec(q, n, k, d, a), 1_000).unwrap();
                assert!(code.verify().is_valid());
                table.insert((q, n, k, d, a), size);
            }
        }
    }
    for (&(q, n, k, d, a), &v) in &table {
        if let Some(&w) = table.get(&(q, n, k, d + 1, a)) {
            assert!(w <= v, "delta monotonicity at ({q},{n},{k},{d},{a})");
        }
        if let Some(&w) = table.get(&(q, n, k, d, a + 1)) {
            assert!(w >= v, "alpha monotonicity at ({q},{n},{k},{d},{a})");
        }
    }
}

/// Bound families whose stated formulas are known to conflict with exact
/// optima at small parameters; see the decisions ledger.
fn conflicting(id: &str) -> bool {
    id == "liu" || id.starts_with("rank-metric")
}

#[test]
fn bounds_are_consistent_on_grid() {
    let mut checked = 0;
    for q in [2, 3] {
        for n in 2..=10 {
            for k in 1..=4.min(n - 1) {
                for d in 1..=(n - k) {
                    for a in 2..=6 {
                        let Ok(s) = CodeSpec::new(q, n, k, d, a) else { continue };
                        let r = bound_report(&s);
                        let values = |side: Side| {
                            r.entries
                                .iter()
                                .filter(move |e| e.side == side && e.applicable && !conflicting(e.id))
                                .filter_map(|e| e.exact().map(|v| (e.id, v.clone())))
                        };
                        for (lid, lo) in values(Side::Lower) {
                            for (uid, up) in values(Side::Upper) {
                                assert!(lo <= up, "{s}: {lid} {lo} > {uid} {up}");
                            }
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn known_formula_conflicts_are_pinned() {
    let r = bound_report(&spec(2, 4, 2, 2, 2));
    assert_eq!(r.value("liu").unwrap().to_string(), "3");
    assert_eq!(exact_max(&spec(2, 4, 2, 2, 2), 1_000).unwrap().0, 5);
    let r = bound_report(&spec(2, 4, 2, 1, 4));
    assert_eq!(r.value("rank-metric").unwrap().to_string(), "48");
    assert!(!r.consistent);
}

#[test]
fn ic_improves_on_etzion_for_spread_parameters() {
    let mut compared = 0;
    for q in [2, 3] {
        for n in 2..=10 {
            for k in (1..=4).filter(|k| n % k == 0) {
                for a in 2..=6 {
                    let Ok(s) = CodeSpec::new(q, n, k, (a - 1) * k, a) else { continue };
                    if let (Ok(ic), Ok(et)) = (ic_bound(&s), etzion_bound(&s)) {
                        assert!(ic <= et, "{s}: ic {ic} > etzion {et}");
                        compared += 1;
                    }
                }
            }
        }
    }
    assert!(compared > 0);
}
