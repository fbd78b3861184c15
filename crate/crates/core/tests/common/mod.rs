#![allow(dead_code)]

use std::collections::HashMap;

use catdistort::folding::{certify_injective, InjectivityCertificate};
use catdistort::presentations::{GroupSpec, Structure};
use catdistort::words::{free_reduce, Gen, Letter};

/// Word problem for a block with a single stable letter `t`, where
/// `t a t⁻¹ = φ(a)` for every base letter. Every element is `t⁻ᵖ u t^q`
/// with `u` free; this never looks at Britton reduction.
pub struct Ascending {
    pub t: Gen,
    images: HashMap<Gen, Vec<Letter>>,
    pub cert: InjectivityCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Normal {
    pub p: u32,
    pub u: Vec<Letter>,
    pub q: u32,
}

impl Ascending {
    pub fn new(spec: &GroupSpec) -> Self {
        assert!(matches!(spec.structure(), Structure::Block { n: 1, .. }), "needs a one-letter block");
        let t = spec.levels()[0].stable[0];
        let mut images = HashMap::new();
        for r in spec.relators() {
            assert_eq!(r.stable, t);
            images.insert(r.base, r.image.to_word().into_letters());
        }
        let cert = certify_injective(&spec.endomorphism(t).unwrap());
        Ascending { t, images, cert }
    }

    pub fn phi(&self, u: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in u {
            let img = &self.images[&l.gen()];
            if l.is_positive() {
                out.extend_from_slice(img);
            } else {
                out.extend(img.iter().rev().map(|x| x.inverse()));
            }
        }
        free_reduce(&out).into_letters()
    }

    fn phi_pow(&self, u: &[Letter], k: u32) -> Vec<Letter> {
        let mut cur = u.to_vec();
        for _ in 0..k {
            cur = self.phi(&cur);
        }
        cur
    }

    pub fn eval(&self, w: &[Letter]) -> Normal {
        let (mut p, mut u, mut q) = (0u32, Vec::<Letter>::new(), 0u32);
        for &l in w {
            if l.gen() == self.t {
                if l.is_positive() {
                    q += 1;
                } else if q > 0 {
                    q -= 1;
                } else {
                    p += 1;
                    u = self.phi(&u);
                }
            } else {
                // t^q x = φ^q(x) t^q
                let x = self.phi_pow(&[l], q);
                u.extend(x);
                u = free_reduce(&u).into_letters();
            }
        }
        Normal { p, u, q }
    }

    pub fn is_trivial(&self, w: &[Letter]) -> bool {
        let n = self.eval(w);
        n.p == n.q && n.u.is_empty()
    }

    /// Complete invariant, valid for words with at most `depth` letters `t⁻¹`.
    pub fn key(&self, w: &[Letter], depth: u32) -> (i64, Vec<Letter>) {
        let n = self.eval(w);
        assert!(n.p <= depth);
        (n.q as i64 - n.p as i64, self.phi_pow(&n.u, depth - n.p))
    }

    /// Length in the base free group, when the element lies there.
    pub fn base_length(&self, w: &[Letter]) -> Option<usize> {
        let n = self.eval(w);
        if n.p != n.q {
            return None;
        }
        let mut cur = free_reduce(&n.u);
        for _ in 0..n.p {
            cur = self.cert.preimage(&cur).ok()?;
        }
        Some(cur.len())
    }
}

/// All freely reduced words of length at most `r` over `gens` and inverses.
pub fn reduced_words(gens: &[Gen], r: usize) -> Vec<Vec<Letter>> {
    let letters: Vec<Letter> = gens.iter().flat_map(|&g| [Letter::pos(g), Letter::neg(g)]).collect();
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::<Letter>::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
