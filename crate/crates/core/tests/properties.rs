mod common;

use catdistort::distortion::LengthExpr;
use catdistort::folding::{certify_injective, fold, fold_in_random_order, rank, rose_from_words};
use catdistort::linkgeom::{build_link_cells, check_large_link, Scheme};
use catdistort::navigator::Navigator;
use catdistort::presentations::{build_block, build_double, BlockParams, GroupSpec};
use catdistort::words::{check_pair_uniqueness, chop, free_reduce, sigma, Gen, Letter, PositiveWord, Word};
use num_bigint::BigUint;
use proptest::prelude::*;
use std::sync::OnceLock;

fn block122() -> &'static GroupSpec {
    static G: OnceLock<GroupSpec> = OnceLock::new();
    G.get_or_init(|| build_block(BlockParams::new(1, 2, 2).unwrap()).unwrap())
}

fn block2() -> &'static GroupSpec {
    static G: OnceLock<GroupSpec> = OnceLock::new();
    G.get_or_init(|| build_block(BlockParams::new(2, 6, 3).unwrap()).unwrap())
}

fn double() -> &'static GroupSpec {
    static G: OnceLock<GroupSpec> = OnceLock::new();
    G.get_or_init(|| build_double(9, 27, 3).unwrap())
}

fn letters(ngens: u32, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..ngens, any::<bool>()), 0..=max)
        .prop_map(|v| v.into_iter().map(|(g, p)| Letter::new(g, p)).collect())
}

fn inverse(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sigma_pairs_are_unique(m in 2u32..60) {
        let gens: Vec<Gen> = (0..m).collect();
        let s = sigma(&gens).unwrap();
        prop_assert_eq!(s.len(), (m * m) as usize);
        prop_assert!(check_pair_uniqueness(&[s]).ok);
    }

    #[test]
    fn chop_partitions_sigma(n in 1u32..5, len in 2u32..8) {
        let m = len * n;
        let gens: Vec<Gen> = (0..m).collect();
        let s = sigma(&gens).unwrap();
        let k = (m * n) as usize;
        let pieces = chop(&s, len as usize, k).unwrap();
        prop_assert_eq!(pieces.len(), k);
        prop_assert!(pieces.iter().all(|p| p.len() == len as usize));
        let joined: Vec<Gen> = pieces.iter().flat_map(|p| p.gens().to_vec()).collect();
        prop_assert_eq!(&joined[..], &s.gens()[..joined.len()]);
        prop_assert!(check_pair_uniqueness(&pieces).ok);
    }

    #[test]
    fn folding_is_confluent(words in prop::collection::vec(letters(4, 6), 1..5), seed in any::<u64>()) {
        let words: Vec<Word> = words.iter().map(|w| free_reduce(w)).filter(|w| !w.is_empty()).collect();
        prop_assume!(!words.is_empty());
        let rose = rose_from_words(&words).unwrap();
        let a = fold(&rose);
        let b = fold_in_random_order(&rose, seed);
        prop_assert_eq!(a.canonical_form(), b.canonical_form());
        prop_assert_eq!(rank(&a).unwrap(), rank(&b).unwrap());
    }

    #[test]
    fn preimage_round_trip(raw in letters(6, 30), t in 0usize..2) {
        let g = block2();
        let phi = g.endomorphism(g.levels()[0].stable[t]).unwrap();
        let cert = certify_injective(&phi);
        let raw: Vec<Letter> = raw.iter().map(|l| Letter::new(phi.domain()[l.gen() as usize], l.is_positive())).collect();
        let v = free_reduce(&raw);
        let w = phi.apply(v.letters()).unwrap();
        prop_assert_eq!(cert.preimage(&w).unwrap(), v);
    }

    #[test]
    fn britton_preserves_invariants(raw in letters(3, 12)) {
        let g = block122();
        let nav = Navigator::new(g);
        let red = nav.reduce(&raw).unwrap();
        prop_assert_eq!(nav.abelian_invariant(&raw), nav.abelian_invariant(red.letters()));
        prop_assert_eq!(nav.outer_image(&raw), nav.outer_image(red.letters()));
        prop_assert_eq!(nav.reduce(red.letters()).unwrap(), red);
    }

    #[test]
    fn britton_matches_ascending_oracle(raw in letters(3, 10)) {
        let g = block122();
        let nav = Navigator::new(g);
        let oracle = common::Ascending::new(g);
        prop_assert_eq!(nav.is_trivial(&raw).unwrap(), oracle.is_trivial(&raw));
        prop_assert_eq!(nav.to_base(&raw).unwrap().map(|w| w.len()), oracle.base_length(&raw));
    }

    #[test]
    fn double_equality_is_symmetric(u in letters(4, 6), v in letters(4, 6)) {
        // a1, a2, t1 and s of the (9, 27, 3) double
        let g = double();
        let al = g.alphabet();
        let pick = ["a1", "a2", "t1", "s"].map(|n| al.gen(&n.parse().unwrap()).unwrap());
        let map = |w: &[Letter]| -> Vec<Letter> { w.iter().map(|l| Letter::new(pick[l.gen() as usize], l.is_positive())).collect() };
        let (u, v) = (map(&u), map(&v));
        let nav = Navigator::new(g);
        let mut uvu = u.clone();
        uvu.extend(&v);
        uvu.extend(inverse(&u));
        let conj = nav.reduce(&uvu).unwrap();
        prop_assert_eq!(nav.equal(&u, &v).unwrap(), nav.equal(&v, &u).unwrap());
        prop_assert!(nav.equal(conj.letters(), &uvu).unwrap());
        prop_assert!(nav.is_trivial(&[&u[..], &inverse(&u)[..]].concat()).unwrap());
    }

    #[test]
    fn normal_form_is_sound(raw in letters(3, 10)) {
        let g = block122();
        let nav = Navigator::new(g);
        let nf = nav.normal_form(&raw).unwrap().unwrap();
        prop_assert!(nav.equal(&nf, &raw).unwrap());
        prop_assert_eq!(nav.normal_form(&nf).unwrap().unwrap(), nf);
    }

    #[test]
    fn girth_never_grows_with_cells(mask in prop::collection::vec(any::<bool>(), 12), len in prop::sample::select(vec![2u32, 5, 14])) {
        let g = &build_block(BlockParams::new(2, 2 * len, len).unwrap()).unwrap();
        let all: Vec<usize> = (0..g.relators().len()).collect();
        let sub: Vec<usize> = all.iter().copied().filter(|&i| mask[i % mask.len()]).collect();
        let small = check_large_link(&build_link_cells(g, &sub, Scheme::Ladder).unwrap());
        let full = check_large_link(&build_link_cells(g, &all, Scheme::Ladder).unwrap());
        prop_assert!(small.girth_at_least() >= full.girth_at_least());
    }

    #[test]
    fn length_expr_matches_materialized(base in 2u32..6, mult in 1u64..4, e in 0u64..8, x in 0u64..1000) {
        let tower = LengthExpr::tower(base, mult, LengthExpr::exact(e));
        let value = BigUint::from(base).pow((mult * e) as u32);
        let norm = tower.clone().normalize();
        prop_assert_eq!(norm.as_exact(), Some(&value));
        let y = LengthExpr::exact(x);
        prop_assert_eq!(tower.compare(&y), value.cmp(&BigUint::from(x)));
    }
}

#[test]
fn positive_images_stay_positive() {
    let g = block2();
    for r in g.relators() {
        assert!(r.image.to_word().is_positive());
        assert_eq!(r.image.len(), 3);
    }
    let w = PositiveWord::new(vec![0, 1]).concat(&PositiveWord::new(vec![2]));
    assert_eq!(w.gens(), &[0, 1, 2]);
}
