//! Vertex links of presentation complexes whose relator cells are tiled by
//! right-angled pentagons.
//!
//! A corner of a relator cell subdivided into `k` pentagon angles contributes
//! a path of `k` edges of weight π/2 to the link, running from the direction
//! the boundary arrives along to the direction it leaves along. The `k − 1`
//! inner vertices of that path are the diagonals meeting the corner; they have
//! degree 2. We store each such path once as a [`Strand`], so distances and
//! cycle lengths are all counted in units of π/2.

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::presentations::{GroupSpec, Relator, Structure};
use crate::words::{Alphabet, Gen, GenName, Letter};

/// Combinatorial length corresponding to 2π.
pub const TWO_PI: u32 = 4;

/// Separation searches stop at this many edges.
pub const SEPARATION_HORIZON: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Start of the edge `g`, written `g+`.
    Out(Gen),
    /// End of the edge `g`, written `g-`.
    In(Gen),
}

impl Direction {
    pub fn index(self) -> u32 {
        match self {
            Direction::Out(g) => 2 * g,
            Direction::In(g) => 2 * g + 1,
        }
    }

    pub fn from_index(i: u32) -> Self {
        if i % 2 == 0 {
            Direction::Out(i / 2)
        } else {
            Direction::In(i / 2)
        }
    }

    pub fn gen(self) -> Gen {
        match self {
            Direction::Out(g) | Direction::In(g) => g,
        }
    }

    /// Direction along which a path traversing `l` leaves its start.
    pub fn leave(l: Letter) -> Self {
        if l.is_positive() {
            Direction::Out(l.gen())
        } else {
            Direction::In(l.gen())
        }
    }

    /// Direction along which a path traversing `l` reaches its end.
    pub fn arrive(l: Letter) -> Self {
        Direction::leave(l.inverse())
    }

    pub fn name(self, alphabet: &Alphabet) -> String {
        match self {
            Direction::Out(g) => format!("{}+", alphabet.name(g)),
            Direction::In(g) => format!("{}-", alphabet.name(g)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Ladder,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ladder" => Ok(Scheme::Ladder),
            other => Err(Error::NoScheme(format!("unknown scheme `{other}`"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Ladder => f.write_str("ladder"),
        }
    }
}

/// Pentagons (as corner indices, cyclically ordered) tiling an `n`-gon.
///
/// Corners 0..=3 touch the stable letter of a relator `x d x⁻¹ W⁻¹`; the
/// first rungs fan out from them so each of those corners carries two
/// pentagon angles.
pub fn ladder(n: usize) -> Result<Vec<[u32; 5]>> {
    if n < 5 || n % 3 != 2 {
        return Err(Error::NoScheme(format!(
            "ladder needs boundary length ≡ 2 (mod 3) and at least 5, got {n}"
        )));
    }
    let p = (n - 2) / 3;
    if p == 1 {
        return Ok(vec![[0, 1, 2, 3, 4]]);
    }
    let n = n as u32;
    let mut out = vec![[3, 4, 5, 6, 7]];
    let (mut b, mut a) = (3u32, 7u32);
    for _ in 1..(p - 1).min(4) {
        out.push([b - 1, b, a, a + 1, a + 2]);
        b -= 1;
        a += 2;
    }
    // open rung (b, a): the untiled region runs a, a+1, ..., n-1, 0, ..., b
    let (mut x, mut y) = (a, b);
    let remaining = |x: u32, y: u32| (y + n - x) % n + 1;
    while remaining(x, y) > 5 {
        out.push([x, x + 1, x + 2, (y + n - 1) % n, y]);
        x += 2;
        y = (y + n - 1) % n;
    }
    let last: Vec<u32> = (0..5).map(|i| (x + i) % n).collect();
    out.push([last[0], last[1], last[2], last[3], last[4]]);
    debug_assert_eq!(out.len(), p);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corner {
    #[serde(serialize_with = "ser_dir")]
    pub from: Direction,
    #[serde(serialize_with = "ser_dir")]
    pub to: Direction,
    /// Pentagons meeting this corner; the angle is `pentagons.len()·π/2`.
    pub pentagons: Vec<u32>,
}

fn ser_dir<S: Serializer>(d: &Direction, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&match d {
        Direction::Out(g) => format!("{g}+"),
        Direction::In(g) => format!("{g}-"),
    })
}

impl Corner {
    pub fn angle(&self) -> u32 {
        self.pentagons.len() as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellContract {
    /// Shortest path inside the cell between a stable-letter direction and
    /// any other direction.
    pub stable_to_base: Option<u32>,
    /// Shortest path inside the cell between the two stable-letter directions.
    pub stable_to_stable: Option<u32>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDecomposition {
    pub stable: Gen,
    pub boundary: Vec<Letter>,
    pub pentagons: Vec<[u32; 5]>,
    pub corners: Vec<Corner>,
}

/// Corner `i` sits between boundary sides `i − 1` and `i`.
fn corner_ends(boundary: &[Letter], i: usize) -> (Direction, Direction) {
    let n = boundary.len();
    (Direction::arrive(boundary[(i + n - 1) % n]), Direction::leave(boundary[i]))
}

fn corner_table(pentagons: &[[u32; 5]], n: usize) -> Vec<Vec<u32>> {
    let mut at = vec![Vec::new(); n];
    for (k, p) in pentagons.iter().enumerate() {
        for &c in p {
            at[c as usize].push(k as u32);
        }
    }
    at
}

pub fn decompose_cell(r: &Relator, scheme: Scheme) -> Result<CellDecomposition> {
    let boundary = r.boundary();
    let pentagons = match scheme {
        Scheme::Ladder => ladder(boundary.len())?,
    };
    let corners = corner_table(&pentagons, boundary.len())
        .into_iter()
        .enumerate()
        .map(|(i, pentagons)| {
            let (from, to) = corner_ends(&boundary, i);
            Corner { from, to, pentagons }
        })
        .collect();
    Ok(CellDecomposition { stable: r.stable, boundary, pentagons, corners })
}

/// Dijkstra over weighted edges between small integer vertices.
fn distances(adj: &HashMap<u32, Vec<(u32, u32)>>, src: u32, horizon: u32) -> HashMap<u32, u32> {
    let mut dist = HashMap::new();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u32, src)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist.contains_key(&v) || d > horizon {
            continue;
        }
        dist.insert(v, d);
        for &(w, len) in adj.get(&v).into_iter().flatten() {
            if !dist.contains_key(&w) {
                heap.push(Reverse((d + len, w)));
            }
        }
    }
    dist
}

impl CellDecomposition {
    pub fn contract(&self) -> CellContract {
        let mut adj: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for c in &self.corners {
            let (u, v) = (c.from.index(), c.to.index());
            adj.entry(u).or_default().push((v, c.angle()));
            adj.entry(v).or_default().push((u, c.angle()));
        }
        let plus = Direction::Out(self.stable).index();
        let minus = Direction::In(self.stable).index();
        let mut to_base = None::<u32>;
        let mut to_stable = None::<u32>;
        for src in [plus, minus] {
            for (&v, &d) in &distances(&adj, src, u32::MAX) {
                if v == plus || v == minus {
                    if v != src {
                        to_stable = Some(to_stable.map_or(d, |x| x.min(d)));
                    }
                } else {
                    to_base = Some(to_base.map_or(d, |x| x.min(d)));
                }
            }
        }
        let ok = to_base.map_or(true, |d| d >= 2) && to_stable.map_or(true, |d| d >= TWO_PI);
        CellContract { stable_to_base: to_base, stable_to_stable: to_stable, ok }
    }

    /// Unit edges this cell contributes, with inner vertices named by
    /// `(cell, pentagon, corner)`.
    pub fn contributions(&self, cell: u32) -> Vec<(LinkVertex, LinkVertex)> {
        let mut out = Vec::new();
        for (i, c) in self.corners.iter().enumerate() {
            let mut prev = LinkVertex::Boundary(c.from);
            for &p in &c.pentagons[..c.pentagons.len() - 1] {
                let next = LinkVertex::Interior { cell, pentagon: p, corner: i as u32 };
                out.push((prev, next));
                prev = next;
            }
            out.push((prev, LinkVertex::Boundary(c.to)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkVertex {
    Boundary(Direction),
    Interior { cell: u32, pentagon: u32, corner: u32 },
}

/// One corner's path in the link: `len` unit edges from `u` to `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Strand {
    pub u: u32,
    pub v: u32,
    pub len: u8,
    pub corner: u8,
    pub cell: u32,
}

impl Strand {
    fn other(&self, x: u32) -> u32 {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinkGraph {
    alphabet: Alphabet,
    strands: Vec<Strand>,
    offsets: Vec<u32>,
    adj: Vec<u32>,
    marked: BTreeMap<String, Vec<Direction>>,
    /// Pentagon ids at each corner when all cells share one boundary length.
    table: Option<Vec<Vec<u32>>>,
}

impl LinkGraph {
    /// Link on the directions of `alphabet` from explicit strands.
    pub fn from_strands(alphabet: Alphabet, strands: Vec<Strand>) -> Result<Self> {
        let nb = 2 * alphabet.len() as u32;
        for s in &strands {
            if s.u >= nb || s.v >= nb {
                return Err(Error::InvalidInput(format!("strand endpoint out of range: {s:?}")));
            }
            if s.len == 0 {
                return Err(Error::InvalidInput("strand of length 0".into()));
            }
        }
        let mut deg = vec![0u32; nb as usize + 1];
        for s in &strands {
            deg[s.u as usize + 1] += 1;
            if s.v != s.u {
                deg[s.v as usize + 1] += 1;
            }
        }
        for i in 1..deg.len() {
            deg[i] += deg[i - 1];
        }
        let offsets = deg;
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; *offsets.last().unwrap() as usize];
        for (i, s) in strands.iter().enumerate() {
            adj[fill[s.u as usize] as usize] = i as u32;
            fill[s.u as usize] += 1;
            if s.v != s.u {
                adj[fill[s.v as usize] as usize] = i as u32;
                fill[s.v as usize] += 1;
            }
        }
        Ok(LinkGraph {
            alphabet,
            strands,
            offsets,
            adj,
            marked: BTreeMap::new(),
            table: None,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn num_boundary(&self) -> usize {
        2 * self.alphabet.len()
    }

    pub fn num_interior(&self) -> usize {
        self.strands.iter().map(|s| s.len as usize - 1).sum()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_boundary() + self.num_interior()
    }

    /// Number of unit (π/2) edges.
    pub fn num_edges(&self) -> usize {
        self.strands.iter().map(|s| s.len as usize).sum()
    }

    pub fn marked(&self) -> &BTreeMap<String, Vec<Direction>> {
        &self.marked
    }

    pub fn mark(&mut self, name: impl Into<String>, dirs: Vec<Direction>) {
        self.marked.insert(name.into(), dirs);
    }

    pub fn marked_set(&self, name: &str) -> Option<&[Direction]> {
        self.marked.get(name).map(|v| v.as_slice())
    }

    fn incident(&self, v: u32) -> &[u32] {
        &self.adj[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn direction_name(&self, v: u32) -> String {
        Direction::from_index(v).name(&self.alphabet)
    }

    /// Inner vertices of a strand, from `u` towards `v`.
    pub fn interior_of(&self, strand: u32) -> Vec<LinkVertex> {
        let s = &self.strands[strand as usize];
        let table = self.table.as_ref().map(|t| &t[s.corner as usize]);
        (0..s.len as u32 - 1)
            .map(|k| LinkVertex::Interior {
                cell: s.cell,
                pentagon: table.map_or(k, |t| t[k as usize]),
                corner: s.corner as u32,
            })
            .collect()
    }

    pub fn vertex_name(&self, v: &LinkVertex) -> String {
        match *v {
            LinkVertex::Boundary(d) => d.name(&self.alphabet),
            LinkVertex::Interior { cell, pentagon, corner } => format!("c{cell}.p{pentagon}.k{corner}"),
        }
    }

    /// DOT rendering. With `boundary_only`, each strand is one edge labelled
    /// by its length; otherwise inner vertices are drawn.
    pub fn to_dot(&self, boundary_only: bool) -> String {
        let mut out = String::from("graph link {\n");
        for v in 0..self.num_boundary() as u32 {
            if self.incident(v).is_empty() {
                continue;
            }
            out.push_str(&format!("  \"{}\";\n", self.direction_name(v)));
        }
        for (i, s) in self.strands.iter().enumerate() {
            let (u, v) = (self.direction_name(s.u), self.direction_name(s.v));
            if boundary_only {
                out.push_str(&format!("  \"{u}\" -- \"{v}\" [label={}];\n", s.len));
            } else {
                let mut prev = u;
                for w in self.interior_of(i as u32) {
                    let name = self.vertex_name(&w);
                    out.push_str(&format!("  \"{prev}\" -- \"{name}\";\n"));
                    prev = name;
                }
                out.push_str(&format!("  \"{prev}\" -- \"{v}\";\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn family_label(name: &GenName) -> String {
    let full = name.to_string();
    // a2_5 → a2, t3 → t, s → s
    match (full.find('_'), full.find(|c: char| c.is_ascii_digit())) {
        (Some(i), _) | (None, Some(i)) => full[..i].to_string(),
        (None, None) => full,
    }
}

fn cell_strands(r: &Relator, cell: u32, table: &[Vec<u32>]) -> Vec<Strand> {
    let boundary = r.boundary();
    (0..boundary.len())
        .map(|i| {
            let (from, to) = corner_ends(&boundary, i);
            Strand { u: from.index(), v: to.index(), len: table[i].len() as u8, corner: i as u8, cell }
        })
        .collect()
}

/// Link of the whole presentation complex.
pub fn build_link(spec: &GroupSpec, scheme: Scheme) -> Result<LinkGraph> {
    let all: Vec<usize> = (0..spec.relators().len()).collect();
    build_link_cells(spec, &all, scheme)
}

/// Link of the subcomplex made of the listed relator cells only.
pub fn build_link_cells(spec: &GroupSpec, cells: &[usize], scheme: Scheme) -> Result<LinkGraph> {
    let mut tables = BTreeMap::new();
    for &c in cells {
        let n = spec.relators()[c].boundary_len();
        if let std::collections::btree_map::Entry::Vacant(e) = tables.entry(n) {
            let pentagons = match scheme {
                Scheme::Ladder => ladder(n)?,
            };
            e.insert(corner_table(&pentagons, n));
        }
    }
    let strands: Vec<Strand> = cells
        .par_iter()
        .flat_map_iter(|&c| {
            let r = &spec.relators()[c];
            cell_strands(r, c as u32, &tables[&r.boundary_len()])
        })
        .collect();
    let mut link = LinkGraph::from_strands(spec.alphabet().clone(), strands)?;
    if tables.len() == 1 {
        link.table = tables.into_values().next();
    }
    for lv in spec.levels() {
        let label = family_label(&spec.alphabet().name(lv.stable[0]));
        let dirs = lv.stable.iter().flat_map(|&g| [Direction::Out(g), Direction::In(g)]).collect();
        link.mark(label, dirs);
    }
    Ok(link)
}

/// A closed walk through distinct boundary directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub strands: Vec<u32>,
    /// `vertices[i]` is where `strands[i]` starts.
    pub vertices: Vec<u32>,
    pub length: u32,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GirthReport {
    /// Combinatorial length of the shortest cycle if it is below 2π.
    pub short_cycle: Option<u32>,
    /// `short_cycle` in radians, or `None` when the girth is at least 2π.
    pub angle: Option<f64>,
    pub ok: bool,
    pub witness: Option<Cycle>,
    pub vertices: usize,
    pub edges: usize,
}

impl GirthReport {
    /// Girth lower bound in units of π/2.
    pub fn girth_at_least(&self) -> u32 {
        self.short_cycle.unwrap_or(TWO_PI)
    }
}

fn make_cycle(link: &LinkGraph, strands: Vec<u32>, start: u32) -> Cycle {
    let mut vertices = Vec::with_capacity(strands.len());
    let mut at = start;
    for &s in &strands {
        vertices.push(at);
        at = link.strands[s as usize].other(at);
    }
    let length = strands.iter().map(|&s| link.strands[s as usize].len as u32).sum();
    let names = vertices.iter().map(|&v| link.direction_name(v)).collect();
    Cycle { strands, vertices, length, names }
}

/// Independent check that `c` is an embedded cycle of the link.
pub fn verify_cycle(link: &LinkGraph, c: &Cycle) -> bool {
    if c.strands.is_empty() || c.strands.len() != c.vertices.len() {
        return false;
    }
    let mut seen = c.vertices.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != c.vertices.len() {
        return false;
    }
    let mut ids = c.strands.clone();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != c.strands.len() {
        return false;
    }
    let k = c.strands.len();
    let mut total = 0u32;
    for i in 0..k {
        let Some(s) = link.strands.get(c.strands[i] as usize) else { return false };
        let (a, b) = (c.vertices[i], c.vertices[(i + 1) % k]);
        if !((s.u == a && s.v == b) || (s.u == b && s.v == a)) {
            return false;
        }
        total += s.len as u32;
    }
    total == c.length
}

/// Finds cycles shorter than 2π. Only three shapes exist below length 4: a
/// strand closing on itself, two parallel strands, or a triangle of unit
/// strands.
pub fn check_large_link(link: &LinkGraph) -> GirthReport {
    let mut best: Option<(u32, Vec<u32>, u32)> = None;
    let offer = |len: u32, strands: Vec<u32>, start: u32, best: &mut Option<(u32, Vec<u32>, u32)>| {
        if len < TWO_PI && best.as_ref().map_or(true, |(l, s, _)| (len, &strands) < (*l, s)) {
            *best = Some((len, strands, start));
        }
    };

    for (i, s) in link.strands.iter().enumerate() {
        if s.u == s.v && (s.len as u32) < TWO_PI {
            offer(s.len as u32, vec![i as u32], s.u, &mut best);
        }
    }

    let mut short: Vec<(u32, u32, u8, u32)> = link
        .strands
        .par_iter()
        .enumerate()
        .filter(|(_, s)| s.u != s.v && s.len <= 2)
        .map(|(i, s)| (s.u.min(s.v), s.u.max(s.v), s.len, i as u32))
        .collect();
    short.par_sort_unstable();
    for w in short.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.0, a.1) == (b.0, b.1) {
            let len = (a.2 + b.2) as u32;
            offer(len, vec![a.3, b.3], a.0, &mut best);
        }
    }

    if best.as_ref().map_or(true, |b| b.0 > 3) {
        if let Some((u, v, w)) = find_unit_triangle(link) {
            let pick = |x: u32, y: u32| {
                link.incident(x)
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let s = &link.strands[i as usize];
                        s.len == 1 && s.other(x) == y
                    })
                    .min()
                    .expect("unit strand present")
            };
            offer(3, vec![pick(u, v), pick(v, w), pick(w, u)], u, &mut best);
        }
    }

    let witness = best.map(|(_, strands, start)| make_cycle(link, strands, start));
    let short_cycle = witness.as_ref().map(|c| c.length);
    GirthReport {
        short_cycle,
        angle: short_cycle.map(|k| k as f64 * std::f64::consts::FRAC_PI_2),
        ok: short_cycle.is_none(),
        witness,
        vertices: link.num_vertices(),
        edges: link.num_edges(),
    }
}

/// Smallest triangle `u < v < w` (lexicographically) of unit strands.
fn find_unit_triangle(link: &LinkGraph) -> Option<(u32, u32, u32)> {
    let nb = link.num_boundary();
    let mut nbrs: Vec<Vec<u32>> = (0..nb as u32)
        .into_par_iter()
        .map(|x| {
            let mut v: Vec<u32> = link
                .incident(x)
                .iter()
                .map(|&i| &link.strands[i as usize])
                .filter(|s| s.len == 1 && s.u != s.v)
                .map(|s| s.other(x))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    nbrs.shrink_to_fit();
    let words = nb.div_ceil(64);
    if nb <= 20_000 {
        let mut bits = vec![0u64; nb * words];
        for (x, ns) in nbrs.iter().enumerate() {
            for &y in ns {
                bits[x * words + y as usize / 64] |= 1 << (y % 64);
            }
        }
        let row = |x: usize| &bits[x * words..(x + 1) * words];
        (0..nb).into_par_iter().find_map_first(|u| {
            let ru = row(u);
            nbrs[u].iter().filter(|&&v| v as usize > u).find_map(|&v| {
                let rv = row(v as usize);
                (0..words).find_map(|k| {
                    // only w > v so each triangle is found at its smallest edge
                    let mut m = ru[k] & rv[k];
                    while m != 0 {
                        let w = (k * 64) as u32 + m.trailing_zeros();
                        if w > v {
                            return Some((u as u32, v, w));
                        }
                        m &= m - 1;
                    }
                    None
                })
            })
        })
    } else {
        (0..nb).into_par_iter().find_map_first(|u| {
            nbrs[u].iter().filter(|&&v| v as usize > u).find_map(|&v| {
                let (a, b) = (&nbrs[u], &nbrs[v as usize]);
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            if a[i] > v {
                                return Some((u as u32, v, a[i]));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                }
                None
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub set: Vec<String>,
    /// Smallest distance between two members, if below the search horizon.
    pub min_distance: Option<u32>,
    pub horizon: u32,
    pub closest: Option<(String, String)>,
    pub ok: bool,
}

/// Minimum link distance between distinct members of `set`, in units of π/2.
pub fn check_separation(link: &LinkGraph, set: &[Direction]) -> Result<SeparationReport> {
    if set.is_empty() {
        return Err(Error::InvalidInput("separation needs a nonempty set".into()));
    }
    let mut targets = vec![false; link.num_boundary()];
    for d in set {
        let i = d.index() as usize;
        if i >= targets.len() {
            return Err(Error::InvalidInput(format!("direction {d:?} outside the link")));
        }
        targets[i] = true;
    }
    let horizon = SEPARATION_HORIZON;
    let found: Option<(u32, u32, u32)> = set
        .par_iter()
        .filter_map(|d| {
            let src = d.index();
            let mut dist: HashMap<u32, u32> = HashMap::new();
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0u32, src)));
            while let Some(Reverse((dv, v))) = heap.pop() {
                if dist.contains_key(&v) {
                    continue;
                }
                dist.insert(v, dv);
                if v != src && targets[v as usize] {
                    return Some((dv, src.min(v), src.max(v)));
                }
                for &i in link.incident(v) {
                    let s = &link.strands[i as usize];
                    let w = s.other(v);
                    let dw = dv + s.len as u32;
                    if dw <= horizon && !dist.contains_key(&w) {
                        heap.push(Reverse((dw, w)));
                    }
                }
            }
            None
        })
        .min();
    let mut sorted = set.to_vec();
    sorted.sort_by_key(|d| d.index());
    sorted.dedup();
    let names = sorted.iter().map(|d| d.name(&link.alphabet)).collect();
    Ok(SeparationReport {
        set: names,
        min_distance: found.map(|f| f.0),
        horizon,
        closest: found.map(|(_, a, b)| (link.direction_name(a), link.direction_name(b))),
        ok: found.map_or(true, |f| f.0 >= TWO_PI),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluingLevel {
    /// Index of the rose shared by consecutive blocks (`a^(level)`).
    pub level: usize,
    pub attachment_points: usize,
    pub separation: SeparationReport,
    pub block_girth: GirthReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluingReport {
    pub levels: Vec<GluingLevel>,
    pub union_girth: GirthReport,
    pub ok: bool,
}

/// For each shared rose of a chain, checks that its directions are
/// 2π-separated in the link of the block it is glued into, then checks the
/// girth of the whole link directly.
pub fn check_chain_gluing(chain: &GroupSpec, scheme: Scheme) -> Result<GluingReport> {
    if !matches!(chain.structure(), Structure::Chain { .. }) {
        return Err(Error::InvalidInput("gluing check needs a chain".into()));
    }
    let families = chain.families();
    let mut levels = Vec::new();
    for (k, fam) in families.iter().enumerate().skip(1) {
        let link = build_link_cells(chain, fam, scheme)?;
        let dirs: Vec<Direction> = chain.levels()[k]
            .stable
            .iter()
            .flat_map(|&g| [Direction::Out(g), Direction::In(g)])
            .collect();
        levels.push(GluingLevel {
            level: k,
            attachment_points: dirs.len(),
            separation: check_separation(&link, &dirs)?,
            block_girth: check_large_link(&link),
        });
    }
    let union_girth = check_large_link(&build_link(chain, scheme)?);
    let ok = union_girth.ok && levels.iter().all(|l| l.separation.ok && l.block_girth.ok);
    Ok(GluingReport { levels, union_girth, ok })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractSummary {
    pub cells: usize,
    pub failing: usize,
    pub min_stable_to_base: Option<u32>,
    pub min_stable_to_stable: Option<u32>,
    pub first_failure: Option<usize>,
}

/// Per-cell contract over every relator cell.
pub fn contract_summary(spec: &GroupSpec, scheme: Scheme) -> Result<ContractSummary> {
    let contracts: Vec<CellContract> = spec
        .relators()
        .par_iter()
        .map(|r| decompose_cell(r, scheme).map(|d| d.contract()))
        .collect::<Result<_>>()?;
    let min = |f: fn(&CellContract) -> Option<u32>| contracts.iter().filter_map(f).min();
    Ok(ContractSummary {
        cells: contracts.len(),
        failing: contracts.iter().filter(|c| !c.ok).count(),
        min_stable_to_base: min(|c| c.stable_to_base),
        min_stable_to_stable: min(|c| c.stable_to_stable),
        first_failure: contracts.iter().position(|c| !c.ok),
    })
}
