mod common;

use std::collections::{HashMap, HashSet};

use catdistort::navigator::{ball, Navigator};
use catdistort::presentations::{build_block, build_chain, build_double, BlockParams, DEFAULT_GENERATOR_CAP};
use catdistort::words::{free_reduce, Letter};

use common::{reduced_words, Ascending};

fn inv(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

#[test]
fn word_problem_matches_ascending_normal_form() {
    for (len, r) in [(2u32, 6usize), (5, 4)] {
        let g = build_block(BlockParams::new(1, len, len).unwrap()).unwrap();
        let nav = Navigator::new(&g);
        let oracle = Ascending::new(&g);
        let gens: Vec<_> = g.alphabet().gens().collect();
        let mut trivial = 0;
        for w in reduced_words(&gens, r) {
            let t = oracle.is_trivial(&w);
            assert_eq!(nav.is_trivial(&w).unwrap(), t, "L = {len}: {}", g.alphabet().format(&w));
            trivial += t as usize;
            assert_eq!(
                nav.to_base(&w).unwrap().map(|b| b.len()),
                oracle.base_length(&w),
                "L = {len}: {}",
                g.alphabet().format(&w)
            );
        }
        assert!(trivial >= 1);
    }
}

#[test]
fn relators_are_trivial_everywhere() {
    let specs = [
        build_block(BlockParams::new(2, 4, 2).unwrap()).unwrap(),
        build_chain(2, 2, DEFAULT_GENERATOR_CAP).unwrap(),
        build_double(9, 27, 3).unwrap(),
    ];
    for g in &specs {
        let nav = Navigator::new(g);
        for r in g.relators() {
            let b = r.boundary();
            assert!(nav.is_trivial(&b).unwrap());
            // cyclic conjugates too
            for k in 1..b.len() {
                let rot: Vec<Letter> = b[k..].iter().chain(&b[..k]).copied().collect();
                assert!(nav.is_trivial(&rot).unwrap());
            }
            let mut broken = b.clone();
            broken.pop();
            assert!(!nav.is_trivial(&broken).unwrap());
        }
    }
}

#[test]
fn pairwise_equality_agrees_with_oracle() {
    let g = build_block(BlockParams::new(1, 2, 2).unwrap()).unwrap();
    let nav = Navigator::new(&g);
    let oracle = Ascending::new(&g);
    let gens: Vec<_> = g.alphabet().gens().collect();
    let words = reduced_words(&gens, 4);
    let keys: Vec<_> = words.iter().map(|w| oracle.key(w, 4)).collect();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            assert_eq!(nav.equal(&words[i], &words[j]).unwrap(), keys[i] == keys[j]);
        }
    }
}

#[test]
fn block_ball_matches_exhaustive_enumeration() {
    let g = build_block(BlockParams::new(1, 2, 2).unwrap()).unwrap();
    let oracle = Ascending::new(&g);
    let gens: Vec<_> = g.alphabet().gens().collect();
    let r = 5;
    let mut first: HashMap<_, usize> = HashMap::new();
    for w in reduced_words(&gens, r) {
        let len = w.len();
        first.entry(oracle.key(&w, r as u32)).and_modify(|l| *l = (*l).min(len)).or_insert(len);
    }
    let expect: Vec<usize> = (0..=r).map(|rho| first.values().filter(|&&l| l <= rho).count()).collect();
    let rec = ball(&g, r, 1_000_000).unwrap();
    assert!(rec.complete);
    assert_eq!(rec.sizes, expect);
}

/// Exhaustive dedup by pairwise word-problem calls, no normal forms.
fn pairwise_ball_sizes(g: &catdistort::presentations::GroupSpec, r: usize) -> Vec<usize> {
    let nav = Navigator::new(g);
    let gens: Vec<_> = g.alphabet().gens().collect();
    let mut reps: Vec<(Vec<Letter>, usize)> = Vec::new();
    let mut buckets: HashMap<_, Vec<usize>> = HashMap::new();
    for w in reduced_words(&gens, r) {
        // the abelianization is a homomorphism, so equal elements share a bucket
        let key = nav.abelian_invariant(&w);
        let bucket = buckets.entry(key).or_default();
        let known = bucket.iter().any(|&i| {
            let mut q = reps[i].0.clone();
            q.extend(inv(&w));
            nav.is_trivial(&q).unwrap()
        });
        if !known {
            bucket.push(reps.len());
            reps.push((w.clone(), w.len()));
        }
    }
    (0..=r).map(|rho| reps.iter().filter(|(_, l)| *l <= rho).count()).collect()
}

#[test]
fn multi_level_balls_match_pairwise_enumeration() {
    let chain = build_chain(2, 2, DEFAULT_GENERATOR_CAP).unwrap();
    assert_eq!(ball(&chain, 3, 1_000_000).unwrap().sizes, pairwise_ball_sizes(&chain, 3));
    let block = build_block(BlockParams::new(2, 4, 2).unwrap()).unwrap();
    assert_eq!(ball(&block, 3, 1_000_000).unwrap().sizes, pairwise_ball_sizes(&block, 3));
}

#[test]
fn ball_elements_are_distinct_and_geodesic() {
    let g = build_chain(2, 2, DEFAULT_GENERATOR_CAP).unwrap();
    let rec = ball(&g, 2, 1_000_000).unwrap();
    let nav = Navigator::new(&g);
    let words: Vec<Vec<Letter>> =
        rec.elements.iter().map(|e| g.alphabet().parse_raw(&e.word).unwrap()).collect();
    for (w, e) in words.iter().zip(&rec.elements) {
        assert_eq!(w.len(), e.length);
        assert_eq!(free_reduce(w).len(), w.len());
    }
    let mut seen = HashSet::new();
    for i in 0..words.len() {
        assert!(seen.insert(g.alphabet().format(&words[i])));
        for j in 0..i {
            assert!(!nav.equal(&words[i], &words[j]).unwrap());
        }
    }
}
