use std::collections::BTreeMap;

use proptest::prelude::*;
use virasoro_core::scalar::rational;
use virasoro_core::verma::rank_of;
use virasoro_core::*;

/// Naive oracle: a state is a map from words (modes applied right to left to
/// the lowest-weight vector, all negative) to coefficients. `L_n` is pushed
/// right one commutator at a time with no memoization and no partition
/// normal form until the end.
type Words = BTreeMap<Vec<i64>, Rational>;

fn add(out: &mut Words, w: Vec<i64>, c: Rational) {
    if c == rational(0, 1) {
        return;
    }
    let e = out.entry(w).or_insert_with(|| rational(0, 1));
    *e += c;
}

fn oracle_act(n: i64, word: &[i64], c: &Rational, h: &Rational) -> Words {
    let mut out = Words::new();
    match word.split_first() {
        None => {
            if n == 0 {
                add(&mut out, vec![], h.clone());
            } else if n < 0 {
                add(&mut out, vec![n], rational(1, 1));
            }
        }
        Some((&first, rest)) => {
            if n < 0 {
                let mut w = vec![n];
                w.extend_from_slice(word);
                add(&mut out, w, rational(1, 1));
                return out;
            }
            // L_n L_first X = L_first L_n X + [L_n, L_first] X
            for (w, coeff) in oracle_act(n, rest, c, h) {
                for (w2, c2) in oracle_act(first, &w, c, h) {
                    add(&mut out, w2, coeff.clone() * c2);
                }
            }
            let s = n + first;
            let bracket = rational(n - first, 1);
            for (w, coeff) in oracle_act(s, rest, c, h) {
                add(&mut out, w, coeff * bracket.clone());
            }
            if s == 0 {
                let central = c.clone() * rational(n * n * n - n, 12);
                add(&mut out, rest.to_vec(), central);
            }
        }
    }
    out
}

/// Sorts each word into a partition (modes commute only up to lower terms,
/// so the oracle normal-orders by repeated adjacent swaps).
fn normal_order(words: Words, c: &Rational, h: &Rational) -> BTreeMap<Partition, Rational> {
    let mut out: BTreeMap<Partition, Rational> = BTreeMap::new();
    let mut todo: Vec<(Vec<i64>, Rational)> = words.into_iter().collect();
    while let Some((w, coeff)) = todo.pop() {
        // Words hold negative modes; a partition wants |w₀| ≥ |w₁| ≥ ….
        match (0..w.len().saturating_sub(1)).find(|&i| -w[i] < -w[i + 1]) {
            None => {
                let parts: Vec<u32> = w.iter().map(|&m| (-m) as u32).collect();
                let p = Partition::new(parts);
                let e = out.entry(p).or_insert_with(|| rational(0, 1));
                *e += coeff;
            }
            Some(i) => {
                let (a, b) = (w[i], w[i + 1]);
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                todo.push((swapped, coeff.clone()));
                let mut merged = w[..i].to_vec();
                merged.push(a + b);
                merged.extend_from_slice(&w[i + 2..]);
                todo.push((merged, coeff * rational(a - b, 1)));
            }
        }
    }
    let _ = (c, h);
    out.retain(|_, v| *v != rational(0, 1));
    out
}

fn oracle_gram(c: &Rational, h: &Rational, k: u32) -> Vec<Vec<Rational>> {
    let basis = enumerate_partitions(k as usize);
    basis
        .iter()
        .map(|lambda| {
            basis
                .iter()
                .map(|mu| {
                    // ⟨L_{-λ}Φ, L_{-μ}Φ⟩: apply L_{λ_i} (adjoints, reversed) to L_{-μ}Φ.
                    let mut state: Words = BTreeMap::from([(mu.parts().iter().map(|&p| -(p as i64)).collect(), rational(1, 1))]);
                    for &p in lambda.parts() {
                        let mut next = Words::new();
                        for (w, coeff) in state {
                            for (w2, c2) in oracle_act(p as i64, &w, c, h) {
                                add(&mut next, w2, coeff.clone() * c2);
                            }
                        }
                        state = next;
                    }
                    state.get(&Vec::new()).cloned().unwrap_or_else(|| rational(0, 1))
                })
                .collect()
        })
        .collect()
}

fn module(c: Rational, h: Rational) -> VermaModule<Rational> {
    VermaModule::new(&CentralCharge::new(c).unwrap(), &LowestWeight::new(h).unwrap())
}

fn brute_partitions(k: u32, max_part: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=k.min(max_part)).rev() {
        for mut rest in brute_partitions(k - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn partitions_match_brute_force_in_reverse_lex_order() {
    for k in 0..=14 {
        let ours: Vec<Vec<u32>> = enumerate_partitions(k).iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(ours, brute_partitions(k as u32, k as u32), "k = {k}");
    }
    let four: Vec<String> = enumerate_partitions(4).iter().map(|p| p.to_string()).collect();
    assert_eq!(four, ["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
    assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
    assert_eq!(partition_count(12), 77);
}

#[test]
fn act_examples() {
    let (c, h) = (rational(7, 10), rational(3, 5));
    let m = module(c.clone(), h.clone());
    let v1 = VermaVector::monomial(Partition::new(vec![1]));
    assert_eq!(m.act(1, &v1), VermaVector::lowest().scaled(&(rational(2, 1) * h.clone())));
    let v2 = VermaVector::monomial(Partition::new(vec![2]));
    assert_eq!(m.act(0, &v2), v2.scaled(&(h.clone() + rational(2, 1))));
    assert_eq!(
        m.act(2, &v2),
        VermaVector::lowest().scaled(&(rational(4, 1) * h + c / rational(2, 1)))
    );
    assert!(m.act(3, &v2).is_zero());
}

#[test]
fn act_agrees_with_naive_oracle() {
    let (c, h) = (rational(4, 5), rational(1, 3));
    let m = module(c.clone(), h.clone());
    for k in 0..=5 {
        for p in enumerate_partitions(k) {
            let word: Vec<i64> = p.parts().iter().map(|&x| -(x as i64)).collect();
            for n in -3..=4 {
                let ours = m.act(n, &VermaVector::monomial(p.clone()));
                let expected = normal_order(oracle_act(n, &word, &c, &h), &c, &h);
                let got: BTreeMap<Partition, Rational> = ours.terms().map(|(p, v)| (p.clone(), v.clone())).collect();
                if k as i64 - n < 0 {
                    assert!(ours.is_zero());
                } else {
                    assert_eq!(got, expected, "L_{n} on {p}");
                }
            }
        }
    }
}

#[test]
fn gram_matrices_agree_with_naive_oracle() {
    for (c, h) in [(rational(1, 2), rational(0, 1)), (rational(2, 1), rational(1, 1)), (rational(7, 10), rational(3, 80))] {
        let m = module(c.clone(), h.clone());
        for k in 0..=5u32 {
            let g = m.gram_matrix(k as usize);
            let expected = oracle_gram(&c, &h, k);
            for (i, row) in expected.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(&g.entries[(i, j)], v, "c={c} h={h} level {k} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn gram_low_levels_closed_form() {
    let (c, h) = (rational(9, 7), rational(2, 3));
    let m = module(c.clone(), h.clone());
    assert_eq!(m.gram_matrix(1).entries[(0, 0)], rational(2, 1) * h.clone());
    let g2 = m.gram_matrix(2).entries;
    let two = rational(2, 1);
    assert_eq!(g2[(0, 0)], rational(4, 1) * h.clone() + c.clone() / two.clone());
    assert_eq!(g2[(0, 1)], rational(6, 1) * h.clone());
    assert_eq!(g2[(1, 0)], rational(6, 1) * h.clone());
    assert_eq!(g2[(1, 1)], rational(8, 1) * h.clone() * h.clone() + rational(4, 1) * h);
    let vac = module(c.clone(), rational(0, 1)).gram_matrix(2).entries;
    assert_eq!(vac[(0, 0)], c / two);
    assert_eq!(vac[(0, 1)], rational(0, 1));
    assert_eq!(vac[(1, 1)], rational(0, 1));
}

#[test]
fn inner_product_route_matches_recursive_gram() {
    let m = module(rational(1, 2), rational(1, 16));
    for k in 0..=6 {
        let g = m.gram_matrix(k);
        let basis = enumerate_partitions(k);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                assert_eq!(m.inner_product(a, b), g.entries[(i, j)]);
            }
        }
    }
}

#[test]
fn rank_examples() {
    for c in [rational(1, 2), rational(1, 1), rational(25, 1)] {
        let m = module(c, rational(0, 1));
        let r1 = m.level_rank(1);
        assert_eq!(r1.rank, 0);
        assert_eq!(r1.null_basis.len(), 1);
        assert_eq!(r1.null_basis[0].terms().count(), 1);
        assert_eq!(m.level_rank(2).rank, 1);
    }
    assert_eq!(module(rational(2, 1), rational(1, 1)).level_rank(2).rank, 2);
}

#[test]
fn kac_determinant_vanishes_at_ising_weights() {
    let c = rational(1, 2);
    for h in [rational(0, 1), rational(1, 16), rational(1, 2)] {
        assert_eq!(module(c.clone(), h.clone()).gram_matrix(2).entries.determinant(), rational(0, 1), "h = {h}");
    }
    assert_ne!(module(c, rational(1, 3)).gram_matrix(2).entries.determinant(), rational(0, 1));
}

#[test]
fn null_vectors_are_in_the_kernel() {
    let m = module(rational(1, 2), rational(0, 1));
    for k in 1..=8 {
        let g = m.gram_matrix(k);
        for v in m.level_rank(k).null_basis {
            let x = v.to_coordinates();
            assert!(g.entries.mul_vec(&x).iter().all(|e| *e == rational(0, 1)));
        }
    }
}

#[test]
fn vacuum_dimensions_for_generic_charge() {
    let m = module(rational(3, 2), rational(0, 1));
    let grams = m.gram_matrices(10);
    for (k, g) in grams.iter().enumerate() {
        let expected = partition_count(k) - if k > 0 { partition_count(k - 1) } else { 0 };
        assert_eq!(rank_of(g).rank, expected, "level {k}");
    }
}

#[test]
fn ising_vacuum_has_extra_null_vector_at_level_six() {
    let m = module(rational(1, 2), rational(0, 1));
    let ranks: Vec<usize> = m.gram_matrices(8).iter().map(|g| rank_of(g).rank).collect();
    assert_eq!(ranks, [1, 0, 1, 1, 2, 2, 3, 3, 5]);
}

#[test]
fn float_and_exact_ranks_agree() {
    let exact = module(rational(7, 10), rational(0, 1));
    let float = VermaModule::new(&CentralCharge::new(0.7).unwrap(), &LowestWeight::vacuum());
    for k in 0..=9 {
        let fr = float.level_rank(k);
        assert_eq!(fr.rank, exact.level_rank(k).rank, "level {k}");
        assert_eq!(fr.tolerance, Some(virasoro_core::verma::FLOAT_RANK_TOLERANCE));
    }
}

#[test]
fn induction_identity_in_the_verma_module() {
    let m = module(rational(1, 2), rational(0, 1));
    for n in 2..=11u32 {
        let lhs = m.act(-1, &VermaVector::monomial(Partition::new(vec![n])));
        let rhs = VermaVector::monomial(Partition::new(vec![n + 1])).scaled(&rational(n as i64 - 1, 1));
        // L₋₁L₋ₙΩ = L₋ₙL₋₁Ω + (n−1)L₋ₙ₋₁Ω, and L₋₁Ω spans the level-1 kernel.
        let diff = lhs.minus(&rhs);
        assert_eq!(diff.terms().count(), 1);
        assert!(diff.coefficient(&Partition::new(vec![n, 1])) == rational(1, 1));
    }
}

#[test]
fn gram_format_round_trip() {
    let m = module(rational(1, 2), rational(1, 16));
    let g = m.gram_matrix(4);
    let text = virasoro_core::format::write_gram(&g);
    assert!(text.starts_with("VIRASORO-GRAM v1 c=1/2 h=1/16 N=4 order=reverse-lex"));
    assert_eq!(virasoro_core::format::read_gram(&text).unwrap().entries, g.entries);
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (1i64..40, 1i64..12).prop_map(|(n, d)| rational(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn level_two_determinant_formula(c in small_rational(), h in small_rational()) {
        let det = module(c.clone(), h.clone()).gram_matrix(2).entries.determinant();
        let expected = rational(2, 1) * h.clone()
            * (rational(16, 1) * h.clone() * h.clone() + rational(2, 1) * (c.clone() - rational(5, 1)) * h + c);
        prop_assert_eq!(det, expected);
    }

    #[test]
    fn gram_is_symmetric(c in small_rational(), h in small_rational(), k in 0usize..6) {
        prop_assert!(module(c, h).gram_matrix(k).entries.is_symmetric());
    }

    #[test]
    fn gram_is_positive_semidefinite_in_the_unitary_region(
        c in (0i64..30).prop_map(|n| rational(1, 1) + rational(n, 7)),
        h in (0i64..30).prop_map(|n| rational(n, 5)),
        k in 0usize..6,
    ) {
        let basis = virasoro_core::linalg::orthogonal_basis(&module(c, h).gram_matrix(k).entries);
        prop_assert!(basis.norms.iter().all(|d| *d > rational(0, 1)));
    }
}

#[test]
fn discrete_series_vacuum_grams_are_semidefinite() {
    for m in 1..=6 {
        let c = virasoro_core::params::discrete_series_charge(m);
        let verma = module(c, rational(0, 1));
        for g in verma.gram_matrices(8) {
            let basis = virasoro_core::linalg::orthogonal_basis(&g.entries);
            assert!(basis.norms.iter().all(|d| *d > rational(0, 1)), "m = {m} level {}", g.level);
        }
    }
}
