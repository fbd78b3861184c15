//! Stallings graphs and folding.
//!
//! Every edge carries, besides its codomain label, a *tag*: a word over the
//! petal indices of the rose it came from. Folding keeps the invariant that
//! the tags read along any closed path at the base vertex multiply to a
//! preimage of the path label. Preimage rewriting is then a single trace.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::words::{check_pair_uniqueness, free_reduce, push_reduced, Alphabet, Gen, Letter, PositiveWord, Word};

/// `a_j ↦ images[j]` for the domain generators in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveEndomorphism {
    domain: Vec<Gen>,
    images: Vec<PositiveWord>,
    position: HashMap<Gen, usize>,
}

impl PositiveEndomorphism {
    /// Checks uniform positive image length and pair-uniqueness across the family.
    pub fn new(domain: Vec<Gen>, images: Vec<PositiveWord>) -> Result<Self> {
        if domain.is_empty() || domain.len() != images.len() {
            return Err(Error::InvalidInput(format!(
                "{} domain generators but {} images",
                domain.len(),
                images.len()
            )));
        }
        let len = images[0].len();
        if len == 0 || images.iter().any(|w| w.len() != len) {
            return Err(Error::InvalidInput("images must share one positive length".into()));
        }
        let pairs = check_pair_uniqueness(&images);
        if !pairs.ok {
            let (p, c) = pairs.repeated().next().expect("a repeated pair");
            return Err(Error::InvalidInput(format!(
                "pair ({}, {}) occurs {c} times among the images",
                p.0, p.1
            )));
        }
        let mut position = HashMap::with_capacity(domain.len());
        for (i, &g) in domain.iter().enumerate() {
            if position.insert(g, i).is_some() {
                return Err(Error::InvalidInput(format!("domain generator {g} repeated")));
            }
        }
        Ok(PositiveEndomorphism { domain, images, position })
    }

    pub fn domain(&self) -> &[Gen] {
        &self.domain
    }

    pub fn images(&self) -> &[PositiveWord] {
        &self.images
    }

    pub fn image_len(&self) -> usize {
        self.images[0].len()
    }

    pub fn rank(&self) -> usize {
        self.domain.len()
    }

    pub fn image_of(&self, g: Gen) -> Option<&PositiveWord> {
        self.position.get(&g).map(|&i| &self.images[i])
    }

    /// Image of `w`, freely reduced. Letters outside the domain are rejected.
    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        let mut buf = Vec::with_capacity(w.len() * self.image_len());
        for &l in w {
            let img = self
                .image_of(l.gen())
                .ok_or_else(|| Error::InvalidInput(format!("generator {} outside domain", l.gen())))?;
            if l.is_positive() {
                for &g in img.gens() {
                    push_reduced(&mut buf, Letter::pos(g));
                }
            } else {
                for &g in img.gens().iter().rev() {
                    push_reduced(&mut buf, Letter::neg(g));
                }
            }
        }
        Ok(Word::from_reduced(buf))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub label: Gen,
    /// Petal indices this edge descends from.
    pub provenance: BTreeSet<u32>,
    tag: Word,
}

#[derive(Debug, Clone)]
pub struct StallingsGraph {
    num_vertices: u32,
    base: u32,
    edges: Vec<Edge>,
    /// `(vertex, letter) -> edge`; for folded graphs this is a partial
    /// deterministic transition function.
    index: HashMap<(u32, Letter), u32>,
}

impl StallingsGraph {
    fn from_parts(num_vertices: u32, base: u32, edges: Vec<Edge>) -> Self {
        let mut index = HashMap::with_capacity(edges.len() * 2);
        for (i, e) in edges.iter().enumerate() {
            index.entry((e.src, Letter::pos(e.label))).or_insert(i as u32);
            index.entry((e.dst, Letter::neg(e.label))).or_insert(i as u32);
        }
        StallingsGraph { num_vertices, base, edges, index }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices as usize
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// No vertex has two outgoing, or two incoming, edges with the same label.
    pub fn is_folded(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|e| {
            seen.insert((e.src, Letter::pos(e.label))) && seen.insert((e.dst, Letter::neg(e.label)))
        })
    }

    fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.num_vertices as usize];
        for e in &self.edges {
            adj[e.src as usize].push(e.dst);
            adj[e.dst as usize].push(e.src);
        }
        let mut seen = vec![false; self.num_vertices as usize];
        let mut queue = VecDeque::from([self.base]);
        seen[self.base as usize] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.num_vertices
    }

    /// Follows `letters` from the base vertex. Returns the end vertex and the
    /// product of edge tags, or `None` if the path leaves the graph.
    fn trace(&self, letters: &[Letter]) -> Option<(u32, Word)> {
        let mut v = self.base;
        let mut tag = Vec::new();
        for &l in letters {
            let e = &self.edges[*self.index.get(&(v, l))? as usize];
            if l.is_positive() {
                v = e.dst;
                for &t in e.tag.letters() {
                    push_reduced(&mut tag, t);
                }
            } else {
                v = e.src;
                for &t in e.tag.letters().iter().rev() {
                    push_reduced(&mut tag, t.inverse());
                }
            }
        }
        Some((v, Word::from_reduced(tag)))
    }

    /// Longest readable prefix of `letters`: (end vertex, prefix length).
    pub fn read_prefix(&self, letters: &[Letter]) -> (u32, usize) {
        let mut v = self.base;
        for (i, &l) in letters.iter().enumerate() {
            match self.index.get(&(v, l)) {
                Some(&e) => {
                    let e = &self.edges[e as usize];
                    v = if l.is_positive() { e.dst } else { e.src };
                }
                None => return (v, i),
            }
        }
        (v, letters.len())
    }

    /// Label-preserving canonical form of a folded graph: vertices renumbered
    /// in breadth-first order from the base, exploring letters in sorted order.
    pub fn canonical_form(&self) -> Vec<(u32, u32, Gen)> {
        let mut order = vec![u32::MAX; self.num_vertices as usize];
        let mut queue = VecDeque::from([self.base]);
        order[self.base as usize] = 0;
        let mut next = 1;
        let mut out_letters: Vec<Vec<(Letter, u32)>> = vec![Vec::new(); self.num_vertices as usize];
        for e in &self.edges {
            out_letters[e.src as usize].push((Letter::pos(e.label), e.dst));
            out_letters[e.dst as usize].push((Letter::neg(e.label), e.src));
        }
        for l in &mut out_letters {
            l.sort();
        }
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &out_letters[v as usize] {
                if order[w as usize] == u32::MAX {
                    order[w as usize] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| (order[e.src as usize], order[e.dst as usize], e.label))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Shortlex-least paths from the base to every vertex.
    pub fn shortlex_tree(&self) -> ShortlexTree {
        let mut out_letters: Vec<Vec<(Letter, u32)>> = vec![Vec::new(); self.num_vertices as usize];
        for e in &self.edges {
            out_letters[e.src as usize].push((Letter::pos(e.label), e.dst));
            out_letters[e.dst as usize].push((Letter::neg(e.label), e.src));
        }
        for l in &mut out_letters {
            l.sort();
        }
        let mut parent = vec![None; self.num_vertices as usize];
        let mut seen = vec![false; self.num_vertices as usize];
        seen[self.base as usize] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for &(l, w) in &out_letters[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    parent[w as usize] = Some((v, l));
                    queue.push_back(w);
                }
            }
        }
        ShortlexTree { parent }
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut s = String::from("digraph stallings {\n");
        for v in 0..self.num_vertices {
            if v == self.base {
                let _ = writeln!(s, "  v{v} [shape=doublecircle];");
            } else {
                let _ = writeln!(s, "  v{v} [shape=point];");
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"{}\"];",
                e.src,
                e.dst,
                alphabet.name(e.label)
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Parent pointers of a breadth-first tree rooted at the base vertex.
#[derive(Debug, Clone)]
pub struct ShortlexTree {
    parent: Vec<Option<(u32, Letter)>>,
}

impl ShortlexTree {
    pub fn path_to(&self, mut v: u32) -> Vec<Letter> {
        let mut path = Vec::new();
        while let Some((p, l)) = self.parent[v as usize] {
            path.push(l);
            v = p;
        }
        path.reverse();
        path
    }
}

/// Wedge of subdivided circles at a base vertex; petal `j` spells `words[j]`.
pub fn rose_from_words(words: &[Word]) -> Result<StallingsGraph> {
    if words.is_empty() {
        return Err(Error::InvalidInput("rose needs at least one word".into()));
    }
    let mut edges = Vec::new();
    let mut nv: u32 = 1;
    for (j, w) in words.iter().enumerate() {
        if w.is_empty() {
            return Err(Error::InvalidInput(format!("petal {j} is the empty word")));
        }
        let len = w.len();
        let mut prev = 0u32;
        for (p, &l) in w.letters().iter().enumerate() {
            let next = if p + 1 == len {
                0
            } else {
                nv += 1;
                nv - 1
            };
            let tag = if p == 0 {
                Word::letter(Letter::pos(j as Gen))
            } else {
                Word::empty()
            };
            let (src, dst, tag) = if l.is_positive() {
                (prev, next, tag)
            } else {
                (next, prev, tag.inverse())
            };
            edges.push(Edge {
                src,
                dst,
                label: l.gen(),
                provenance: BTreeSet::from([j as u32]),
                tag,
            });
            prev = next;
        }
    }
    Ok(StallingsGraph::from_parts(nv, 0, edges))
}

enum Order {
    Canonical,
    Random(ChaCha8Rng),
}

struct Folder {
    src: Vec<u32>,
    dst: Vec<u32>,
    label: Vec<Gen>,
    tag: Vec<Word>,
    prov: Vec<BTreeSet<u32>>,
    alive: Vec<bool>,
    parent: Vec<u32>,
    adj: Vec<Vec<u32>>,
    base: u32,
}

impl Folder {
    fn new(g: &StallingsGraph) -> Self {
        let n = g.num_vertices as usize;
        let mut adj = vec![Vec::new(); n];
        for (i, e) in g.edges.iter().enumerate() {
            adj[e.src as usize].push(i as u32);
            if e.dst != e.src {
                adj[e.dst as usize].push(i as u32);
            }
        }
        Folder {
            src: g.edges.iter().map(|e| e.src).collect(),
            dst: g.edges.iter().map(|e| e.dst).collect(),
            label: g.edges.iter().map(|e| e.label).collect(),
            tag: g.edges.iter().map(|e| e.tag.clone()).collect(),
            prov: g.edges.iter().map(|e| e.provenance.clone()).collect(),
            alive: vec![true; g.edges.len()],
            parent: (0..n as u32).collect(),
            adj,
            base: g.base,
        }
    }

    fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let gp = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = gp;
            v = gp;
        }
        v
    }

    fn run(&mut self, mut order: Order) {
        let n = self.parent.len() as u32;
        match &mut order {
            Order::Canonical => {
                let mut work: BTreeSet<u32> = (0..n).collect();
                while let Some(v) = work.pop_first() {
                    if let Some(again) = self.scan(v, None) {
                        work.extend(again);
                    }
                }
            }
            Order::Random(rng) => {
                let mut work: Vec<u32> = (0..n).collect();
                while !work.is_empty() {
                    let i = rng.gen_range(0..work.len());
                    let v = work.swap_remove(i);
                    if let Some(again) = self.scan(v, Some(rng)) {
                        work.extend(again);
                    }
                }
            }
        }
    }

    /// Folds every conflict found at `v`. Returns vertices to revisit.
    fn scan(&mut self, v: u32, rng: Option<&mut ChaCha8Rng>) -> Option<Vec<u32>> {
        if self.find(v) != v {
            return None;
        }
        let mut list = std::mem::take(&mut self.adj[v as usize]);
        list.retain(|&e| self.alive[e as usize]);
        list.sort_unstable();
        list.dedup();
        if let Some(rng) = rng {
            list.shuffle(rng);
        }
        self.adj[v as usize] = list;

        let mut seen: HashMap<(Gen, bool), u32> = HashMap::new();
        let mut touched = Vec::new();
        let mut i = 0;
        while i < self.adj[v as usize].len() {
            let e = self.adj[v as usize][i];
            i += 1;
            if !self.alive[e as usize] {
                continue;
            }
            for outgoing in [true, false] {
                if !self.alive[e as usize] {
                    break;
                }
                let end = if outgoing { self.src[e as usize] } else { self.dst[e as usize] };
                if self.find(end) != v {
                    continue;
                }
                let key = (self.label[e as usize], outgoing);
                match seen.get(&key) {
                    None => {
                        seen.insert(key, e);
                    }
                    Some(&e1) if e1 == e => {}
                    Some(&e1) => {
                        let survivor = self.fold_pair(e1, e, outgoing);
                        // a loop may already sit in `seen` under its other end
                        seen.retain(|_, x| *x != e);
                        touched.push(survivor);
                        if self.find(v) != v {
                            touched.push(self.find(v));
                            return Some(touched);
                        }
                    }
                }
            }
        }
        if touched.is_empty() {
            None
        } else {
            touched.push(v);
            Some(touched)
        }
    }

    /// Identifies `e2` with `e1`; both leave (or both enter) a common vertex.
    fn fold_pair(&mut self, e1: u32, e2: u32, outgoing: bool) -> u32 {
        let far = |f: &mut Self, e: u32| {
            let x = if outgoing { f.dst[e as usize] } else { f.src[e as usize] };
            f.find(x)
        };
        let x1 = far(self, e1);
        let x2 = far(self, e2);
        self.alive[e2 as usize] = false;
        let p = std::mem::take(&mut self.prov[e2 as usize]);
        self.prov[e1 as usize].extend(p);
        if x1 == x2 {
            return x1;
        }
        let g1 = self.tag[e1 as usize].clone();
        let g2 = self.tag[e2 as usize].clone();
        // correction applied when merging x2 into x1
        let c = if outgoing {
            g1.inverse().mul(&g2)
        } else {
            g1.mul(&g2.inverse())
        };
        let base = self.find(self.base);
        let keep_x1 = if x2 == base {
            false
        } else if x1 == base {
            true
        } else {
            self.adj[x1 as usize].len() >= self.adj[x2 as usize].len()
        };
        if keep_x1 {
            self.merge(x2, x1, &c);
            x1
        } else {
            self.merge(x1, x2, &c.inverse());
            x2
        }
    }

    fn merge(&mut self, from: u32, into: u32, c: &Word) {
        let moved = std::mem::take(&mut self.adj[from as usize]);
        let c_inv = c.inverse();
        for &e in &moved {
            if !self.alive[e as usize] {
                continue;
            }
            let s = self.find(self.src[e as usize]);
            let d = self.find(self.dst[e as usize]);
            if s == from {
                self.tag[e as usize] = c.mul(&self.tag[e as usize]);
            }
            if d == from {
                self.tag[e as usize] = self.tag[e as usize].mul(&c_inv);
            }
        }
        self.parent[from as usize] = into;
        self.adj[into as usize].extend(moved);
    }

    fn finish(mut self) -> StallingsGraph {
        let n = self.parent.len();
        let base = self.find(self.base);
        let mut renumber = vec![u32::MAX; n];
        renumber[base as usize] = 0;
        let mut next = 1u32;
        for v in 0..n as u32 {
            if self.find(v) == v && v != base {
                renumber[v as usize] = next;
                next += 1;
            }
        }
        let mut edges = Vec::new();
        for e in 0..self.alive.len() {
            if !self.alive[e] {
                continue;
            }
            let s = self.find(self.src[e]);
            let d = self.find(self.dst[e]);
            edges.push(Edge {
                src: renumber[s as usize],
                dst: renumber[d as usize],
                label: self.label[e],
                provenance: std::mem::take(&mut self.prov[e]),
                tag: std::mem::take(&mut self.tag[e]),
            });
        }
        StallingsGraph::from_parts(next, 0, edges)
    }
}

/// Folds until the immersion property holds, visiting the smallest
/// vertex id with pending work first.
pub fn fold(g: &StallingsGraph) -> StallingsGraph {
    let mut f = Folder::new(g);
    f.run(Order::Canonical);
    f.finish()
}

/// Same as [`fold`] but with a seeded random fold order.
pub fn fold_in_random_order(g: &StallingsGraph, seed: u64) -> StallingsGraph {
    let mut f = Folder::new(g);
    f.run(Order::Random(ChaCha8Rng::seed_from_u64(seed)));
    f.finish()
}

/// First Betti number `E - V + 1`.
pub fn rank(g: &StallingsGraph) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::InvalidInput("graph is not connected".into()));
    }
    Ok(g.edges.len() + 1 - g.num_vertices as usize)
}

/// True iff the reduced form of `w` reads a closed path at the base.
pub fn membership(g: &StallingsGraph, w: &Word) -> bool {
    matches!(g.trace(w.letters()), Some((v, _)) if v == g.base)
}

#[derive(Debug, Clone)]
pub struct InjectivityCertificate {
    pub domain_rank: usize,
    pub folded: StallingsGraph,
    pub folded_rank: usize,
    pub injective: bool,
    domain: Vec<Gen>,
}

impl InjectivityCertificate {
    /// The unique `v` with `φ(v) = w`.
    pub fn preimage(&self, w: &Word) -> Result<Word> {
        if !self.injective {
            return Err(Error::InvalidInput(
                "preimage rewriting needs an injective endomorphism".into(),
            ));
        }
        match self.folded.trace(w.letters()) {
            Some((v, tag)) if v == self.folded.base => Ok(free_reduce(
                &tag.letters()
                    .iter()
                    .map(|l| Letter::new(self.domain[l.gen() as usize], l.is_positive()))
                    .collect::<Vec<_>>(),
            )),
            _ => Err(Error::NotInImage),
        }
    }

    pub fn contains(&self, w: &Word) -> bool {
        membership(&self.folded, w)
    }
}

pub fn certify_injective(phi: &PositiveEndomorphism) -> InjectivityCertificate {
    let words: Vec<Word> = phi.images.iter().map(PositiveWord::to_word).collect();
    let rose = rose_from_words(&words).expect("images are nonempty");
    let folded = fold(&rose);
    let folded_rank = rank(&folded).expect("folding preserves connectivity");
    InjectivityCertificate {
        domain_rank: phi.rank(),
        injective: folded_rank == phi.rank(),
        folded,
        folded_rank,
        domain: phi.domain.clone(),
    }
}

pub fn rewrite_preimage(phi: &PositiveEndomorphism, w: &Word) -> Result<Word> {
    certify_injective(phi).preimage(w)
}
