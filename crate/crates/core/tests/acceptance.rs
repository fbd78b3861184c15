// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use catdistort::distortion::{
    chain_bound, chain_lengths, tower_f_length, tower_g_lengths, upper_bound_audit, witness_block_in, witness_chain,
    witness_tower, LengthExpr,
};
use catdistort::folding::{certify_injective, PositiveEndomorphism};
use catdistort::linkgeom::{
    build_link, check_chain_gluing, check_large_link, check_separation, Direction, LinkGraph, Scheme, Strand,
};
use catdistort::navigator::{measure_distortion, Navigator};
use catdistort::presentations::{
    build_block, build_chain, build_double, build_double_uncertified, check_double_params, BlockParams, GroupSpec,
    DEFAULT_GENERATOR_CAP,
};
use catdistort::words::{check_pair_uniqueness, free_reduce, sigma, Alphabet, GenName, Letter, PositiveWord};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{reduced_words, Ascending};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let took = start.elapsed();
    let res = match (res, limit) {
        (Ok(d), Some(l)) if took > l => Err(format!("{d}; took {:.1} s, limit {} s", took.as_secs_f64(), l.as_secs())),
        (r, _) => r,
    };
    let (tag, detail) = match &res {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("{tag} {id:>2} {name} ({:.2} s): {detail}", took.as_secs_f64());
    res.is_ok()
}

fn block(n: u32, len: u32) -> GroupSpec {
    build_block(BlockParams::new(n, len * n, len).unwrap()).unwrap()
}

fn stable_set(g: &GroupSpec, level: usize) -> Vec<Direction> {
    g.levels()[level].stable.iter().flat_map(|&x| [Direction::Out(x), Direction::In(x)]).collect()
}

fn c1_sigma() -> Outcome {
    for m in 2..=200u32 {
        let gens: Vec<u32> = (0..m).collect();
        let s = sigma(&gens).map_err(|e| e.to_string())?;
        ensure!(s.len() == (m * m) as usize, "m = {m}: length {}", s.len());
        ensure!(check_pair_uniqueness(&[s.clone()]).ok, "m = {m}: a pair repeats");
        let pairs: HashSet<(u32, u32)> = s.gens().windows(2).map(|w| (w[0], w[1])).collect();
        ensure!(pairs.len() == s.len() - 1, "m = {m}: only {} distinct pairs", pairs.len());
    }
    Ok("m = 2..200: length m², all ordered pairs distinct".into())
}

fn c2_arithmetic() -> Outcome {
    for n in 1..=10u32 {
        let m = 14 * n;
        let g = build_block(BlockParams::new(n, m, 14).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let used: usize = g.relators().iter().map(|r| r.image.len()).sum();
        ensure!(used == (14 * m * n) as usize, "n = {n}: {used} letters used");
        ensure!(used <= (m * m) as usize, "n = {n}: {used} > m²");
    }
    check_double_params(196, 2744, 14).map_err(|e| e.to_string())?;
    let err = match check_double_params(3, 14, 14) {
        Ok(()) => return Err("(n=3, m=14) accepted".into()),
        Err(e) => e.to_string(),
    };
    ensure!(err.contains("14m ≤ n²"), "rejection does not cite 14m ≤ n²: {err}");
    Ok(format!("blocks n ≤ 10 use exactly 14mn letters; double (196, 2744) accepted; (3, 14) rejected: {err}"))
}

fn c3_injectivity(big: &GroupSpec) -> Outcome {
    for n in 1..=10 {
        let g = block(n, 14);
        for &t in &g.levels()[0].stable {
            let c = certify_injective(&g.endomorphism(t).map_err(|e| e.to_string())?);
            ensure!(c.injective, "block n = {n}: φ for generator {t} not injective");
        }
    }
    let mut counts = Vec::new();
    for (k, lv) in big.levels().iter().enumerate() {
        use rayon::prelude::*;
        let bad = lv
            .stable
            .par_iter()
            .filter(|&&x| !certify_injective(&big.endomorphism(x).unwrap()).injective)
            .count();
        ensure!(bad == 0, "full-size double level {k}: {bad} endomorphisms fail");
        counts.push(lv.stable.len());
    }
    Ok(format!("blocks n ≤ 10 certified; full-size double families of sizes {counts:?} certified"))
}

fn c4_round_trip() -> Outcome {
    let g = block(2, 14);
    let mut total = 0;
    for &t in &g.levels()[0].stable {
        let phi = g.endomorphism(t).map_err(|e| e.to_string())?;
        let cert = certify_injective(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(4 + t as u64);
        for _ in 0..5000 {
            let len = rng.gen_range(0..=30);
            let raw: Vec<Letter> = (0..len)
                .map(|_| Letter::new(phi.domain()[rng.gen_range(0..phi.rank())], rng.gen_bool(0.5)))
                .collect();
            let v = free_reduce(&raw);
            let w = phi.apply(v.letters()).map_err(|e| e.to_string())?;
            let back = cert.preimage(&w).map_err(|e| e.to_string())?;
            ensure!(back == v, "round trip failed for a word of length {}", v.len());
            total += 1;
        }
    }
    Ok(format!("{total} random reduced words of length ≤ 30 recovered"))
}

fn c5_link(big: &GroupSpec) -> Outcome {
    let mut notes = Vec::new();
    for n in 1..=4 {
        let r = check_large_link(&build_link(&block(n, 14), Scheme::Ladder).map_err(|e| e.to_string())?);
        ensure!(r.ok, "block n = {n}: cycle of length {:?}", r.short_cycle);
    }
    notes.push("blocks n ≤ 4 ok".to_string());
    let link = build_link(big, Scheme::Ladder).map_err(|e| e.to_string())?;
    let r = check_large_link(&link);
    ensure!(r.ok, "full-size double: cycle of length {:?}", r.short_cycle);
    notes.push(format!("full-size double ok ({} vertices, {} edges)", r.vertices, r.edges));
    let chain = build_chain(2, 14, DEFAULT_GENERATOR_CAP).map_err(|e| e.to_string())?;
    let r = check_large_link(&build_link(&chain, Scheme::Ladder).map_err(|e| e.to_string())?);
    ensure!(r.ok, "chain l = 2: cycle of length {:?}", r.short_cycle);
    let glue = check_chain_gluing(&chain, Scheme::Ladder).map_err(|e| e.to_string())?;
    ensure!(glue.ok, "chain l = 2 gluing sets not 2π-separated");
    notes.push("chain l = 2 ok with separated gluing sets".into());
    Ok(notes.join("; "))
}

fn c6_separation(big: &GroupSpec) -> Outcome {
    let mut dists = Vec::new();
    for n in 1..=4 {
        let g = block(n, 14);
        let link = build_link(&g, Scheme::Ladder).map_err(|e| e.to_string())?;
        let r = check_separation(&link, &stable_set(&g, 0)).map_err(|e| e.to_string())?;
        ensure!(r.ok, "block n = {n}: t-directions at distance {:?}", r.min_distance);
        dists.push(r.min_distance);
    }
    let link = build_link(big, Scheme::Ladder).map_err(|e| e.to_string())?;
    let r = check_separation(&link, &stable_set(big, 0)).map_err(|e| e.to_string())?;
    ensure!(r.ok, "full-size double: s± at distance {:?}", r.min_distance);
    Ok(format!("blocks n ≤ 4 t-distances {dists:?}; full-size double s-distance {:?} (2π = 4)", r.min_distance))
}

fn c7_exponential() -> Outcome {
    for (len, n_max) in [(14u32, 5u32), (2, 12)] {
        let g = block(1, len);
        let nav = Navigator::new(&g);
        for n in 1..=n_max {
            let (_, letters) = witness_block_in(&g, n).map_err(|e| e.to_string())?;
            let b = nav.to_base(&letters).map_err(|e| e.to_string())?.ok_or("witness left the base group")?;
            let want = (len as usize).pow(n);
            ensure!(b.len() == want && b.is_positive(), "L = {len}, n = {n}: length {} (want {want})", b.len());
        }
    }
    Ok("|t₁ⁿa₁t₁⁻ⁿ|_F = 14ⁿ for n ≤ 5 and 2ⁿ for n ≤ 12, positive words".into())
}

fn c8_audit() -> Outcome {
    let mut notes = Vec::new();
    for len in [2u32, 14] {
        let g = block(1, len);
        let rep = upper_bound_audit(&g, 12, 84, 8).map_err(|e| e.to_string())?;
        ensure!(rep.samples() >= 1000, "only {} samples", rep.samples());
        ensure!(rep.violations() == 0, "L = {len}: {} violations", rep.violations());
        notes.push(format!("L = {len}: {} samples, 0 violations", rep.samples()));
    }
    Ok(notes.join("; "))
}

fn c9_chain() -> Outcome {
    for l in 1..=10u32 {
        for n in 1..=4u32 {
            let w = witness_chain(l, 2, n).map_err(|e| e.to_string())?;
            let bound = (BigUint::from(1u32) << l as usize) * n + (BigUint::from(1u32) << l as usize) - 1u32;
            ensure!(chain_bound(l, n) == bound, "bound formula l = {l}");
            let lens = chain_lengths(l, n);
            ensure!(lens[0] == BigUint::from(2 * n + 1), "ℓ_1 for n = {n}");
            ensure!(lens.windows(2).all(|p| p[1] == &p[0] * 2u32 + 1u32), "recurrence l = {l}");
            ensure!(BigUint::from(w.word.len()) == *lens.last().unwrap(), "word length l = {l}");
            ensure!(BigUint::from(w.word.len()) <= bound, "l = {l}, n = {n}: {} > bound", w.word.len());
            let mut f = LengthExpr::exact(n as u64);
            for _ in 0..l {
                f = LengthExpr::f(2, f);
            }
            ensure!(w.f_length.compare(&f).is_eq(), "l = {l}, n = {n}: F-length is not f^l(n)");
        }
    }
    let chain = build_chain(2, 2, DEFAULT_GENERATOR_CAP).map_err(|e| e.to_string())?;
    let nav = Navigator::new(&chain);
    for n in 1..=3u32 {
        let w = witness_chain(2, 2, n).map_err(|e| e.to_string())?;
        let letters = w.respell(chain.alphabet()).map_err(|e| e.to_string())?;
        let b = nav.to_base(&letters).map_err(|e| e.to_string())?.ok_or("chain witness left the base")?;
        let want = w.f_length.as_exact().cloned().ok_or("not exact")?;
        ensure!(BigUint::from(b.len()) == want, "n = {n}: materialized {} vs {want}", b.len());
    }
    Ok("l ≤ 10: word length 2ˡn + 2ˡ − 1 and F-length f^l(n); chain(2, 2) materialized for n ≤ 3".into())
}

fn c10_tower() -> Outcome {
    ensure!(witness_tower(14, 1).unwrap().f_length.as_exact() == Some(&BigUint::from(14u32)), "ℓ_H(w₁) ≠ 14");
    let w2 = tower_f_length(14, 2);
    let want = BigUint::from(14u32).pow(196);
    ensure!(w2.as_exact() == Some(&want), "ℓ_H(w₂) ≠ 14^196");
    for k in 1..=10u32 {
        let h = tower_f_length(14, k);
        let lower = LengthExpr::f_iter(14, k, LengthExpr::exact(1));
        ensure!(!lower.compare(&h).is_gt(), "k = {k}: f^k(1) exceeds ℓ_H(w_k)");
    }
    let g = tower_g_lengths(60);
    let mut prev: Option<&BigUint> = None;
    for (i, l) in g.iter().enumerate() {
        let k = i as u32 + 1;
        let expect = match prev {
            None => BigUint::from(3u32),
            Some(p) => p * 2u32 + 5u32,
        };
        ensure!(*l == expect, "ℓ_G recurrence at k = {k}");
        ensure!(*l <= BigUint::from(4u32).pow(k), "ℓ_G(w_{k}) > 4^{k}");
        if k <= 12 {
            let w = witness_tower(14, k).map_err(|e| e.to_string())?;
            ensure!(BigUint::from(w.word.len()) == *l, "k = {k}: word length {}", w.word.len());
        }
        prev = Some(l);
    }
    // L = n = m = 2 breaks the size constraints, so the smallest admissible double stands in.
    let d = build_double(9, 27, 3).map_err(|e| e.to_string())?;
    let nav = Navigator::new(&d);
    for k in 1..=2 {
        let w = witness_tower(3, k).map_err(|e| e.to_string())?;
        let b = nav
            .to_base(&w.respell(d.alphabet()).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .ok_or("tower witness left the base")?;
        let want = tower_f_length(3, k).as_exact().cloned().ok_or("not exact")?;
        ensure!(BigUint::from(b.len()) == want, "down-scale k = {k}: {} vs {want}", b.len());
    }
    let s = want.to_str_radix(10);
    Ok(format!(
        "ℓ_H(w₂) = 14^196 ({} digits, {}…); ℓ_G ≤ 4^k for k ≤ 60; double(9, 27, 3) materializes 3 and 3^9",
        s.len(),
        &s[..3]
    ))
}

fn c11_empirical() -> Outcome {
    let g = block(1, 2);
    let (curve, rec) = measure_distortion(&g, 6, 1_000_000).map_err(|e| e.to_string())?;
    ensure!(rec.complete, "ball capped");
    let oracle = Ascending::new(&g);
    let words = reduced_words(&g.alphabet().gens().collect::<Vec<_>>(), 6);
    // complete invariant -> (shortest length, base length)
    let mut seen: BTreeMap<(i64, Vec<Letter>), (usize, Option<usize>)> = BTreeMap::new();
    for w in &words {
        let key = oracle.key(w, 6);
        seen.entry(key).or_insert_with(|| (w.len(), oracle.base_length(w)));
    }
    let mut sizes = vec![0usize; 7];
    let mut best = vec![0usize; 7];
    for &(len, base) in seen.values() {
        for rho in len..=6 {
            sizes[rho] += 1;
            best[rho] = best[rho].max(base.unwrap_or(0));
        }
    }
    ensure!(rec.sizes == sizes, "ball sizes {:?} vs exhaustive {:?}", rec.sizes, sizes);
    for p in &curve.points {
        let rho = p.x as usize;
        let v = p.value.as_exact().cloned().ok_or("inexact curve value")?;
        ensure!(v == BigUint::from(best[rho]), "ρ = {rho}: curve {v} vs exhaustive {}", best[rho]);
        for n in (0..).take_while(|&n: &u32| 2 * n as usize + 1 <= rho) {
            ensure!(v >= BigUint::from(2u32).pow(n), "ρ = {rho}: below witness n = {n}");
        }
    }
    Ok(format!("sizes {sizes:?} and max F-lengths {best:?} match exhaustive enumeration"))
}

fn c12_negative() -> Outcome {
    let rep = check_pair_uniqueness(&[PositiveWord::new(vec![0, 1, 0, 1])]);
    ensure!(!rep.ok, "repeated pair not detected");
    let phi = PositiveEndomorphism::new(vec![0, 1], vec![PositiveWord::new(vec![0]), PositiveWord::new(vec![0])])
        .map_err(|e| e.to_string())?;
    let c = certify_injective(&phi);
    ensure!(!c.injective, "duplicate images certified injective");
    let al = Alphabet::new(vec![GenName::a(1), GenName::a(2), GenName::a(3)]).map_err(|e| e.to_string())?;
    let strands = [(0, 2), (2, 4), (4, 0)]
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| Strand { u, v, len: 1, corner: 0, cell: i as u32 })
        .collect();
    let link = LinkGraph::from_strands(al, strands).map_err(|e| e.to_string())?;
    let r = check_large_link(&link);
    ensure!(!r.ok && r.short_cycle == Some(3), "triangle reported as {:?}", r.short_cycle);
    Ok(format!(
        "pair repetition caught; rank {} < {} image; triangle found at 3π/2 ({:.4} rad)",
        c.folded_rank,
        c.domain_rank,
        r.angle.unwrap_or(0.0)
    ))
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let mut ok = true;
    ok &= run(1, "sigma properties", secs(5), c1_sigma);
    ok &= run(2, "construction arithmetic", secs(5), c2_arithmetic);
    let big = build_double_uncertified(196, 2744, 14).expect("full-size double");
    ok &= run(3, "injectivity", secs(600), || c3_injectivity(&big));
    ok &= run(4, "preimage round trip", secs(30), c4_round_trip);
    ok &= run(5, "link condition", secs(600), || c5_link(&big));
    ok &= run(6, "separation", secs(600), || c6_separation(&big));
    drop(big);
    ok &= run(7, "exponential distortion", secs(10), c7_exponential);
    ok &= run(8, "upper-bound audit", None, c8_audit);
    ok &= run(9, "chain recurrences", None, c9_chain);
    ok &= run(10, "tower recurrences", None, c10_tower);
    ok &= run(11, "empirical vs witness", None, c11_empirical);
    ok &= run(12, "negative controls", None, c12_negative);
    if !ok {
        std::process::exit(1);
    }
}
