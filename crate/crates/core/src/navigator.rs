//! Word problem, rewriting into the base free group, and Cayley balls.
//!
//! Reduction works one HNN level at a time from the outside in. At level `i`
//! a stack scan pinches `x u x⁻¹` and `x⁻¹ u x` as soon as the closing letter
//! arrives, so pinches happen innermost first. Whether the enclosed `u` lies
//! in the relevant free subgroup is decided recursively one level further in.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::distortion::{CurveKind, CurvePoint, DistortionCurve, LengthExpr};
use crate::error::{Error, Result};
use crate::folding::{certify_injective, InjectivityCertificate, PositiveEndomorphism, ShortlexTree};
use crate::presentations::{outer_retraction, GroupSpec, Structure, SubgroupRef};
use crate::words::{free_reduce, push_reduced, Gen, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PinchKind {
    /// `x u x⁻¹ ↦ φ_x(u)`
    Forward,
    /// `x⁻¹ u x ↦ φ_x⁻¹(u)`
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub level: usize,
    pub position: usize,
    pub stable: Gen,
    pub kind: PinchKind,
    /// Length of the pinched subword including both stable letters.
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
}

impl ReductionTrace {
    pub fn pinches(&self) -> usize {
        self.steps.len()
    }
}

struct StableData {
    phi: PositiveEndomorphism,
    cert: InjectivityCertificate,
    tree: OnceLock<ShortlexTree>,
}

/// Homomorphic image in `Zʳ × Z/M`, used as a cheap equality filter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianImage {
    pub free: Vec<i64>,
    pub torsion: i64,
    pub modulus: i64,
}

pub struct Navigator<'a> {
    spec: &'a GroupSpec,
    stable: HashMap<Gen, OnceLock<std::result::Result<Arc<StableData>, Error>>>,
    outer: Vec<bool>,
}

impl<'a> Navigator<'a> {
    pub fn new(spec: &'a GroupSpec) -> Self {
        let stable = spec
            .levels()
            .iter()
            .flat_map(|l| l.stable.iter().map(|&g| (g, OnceLock::new())))
            .collect();
        let mut outer = vec![false; spec.alphabet().len()];
        for g in outer_retraction(spec) {
            outer[g as usize] = true;
        }
        Navigator { spec, stable, outer }
    }

    pub fn spec(&self) -> &GroupSpec {
        self.spec
    }

    fn data(&self, x: Gen) -> Result<Arc<StableData>> {
        self.stable[&x]
            .get_or_init(|| {
                let phi = self.spec.endomorphism(x)?;
                let cert = certify_injective(&phi);
                if !cert.injective {
                    return Err(Error::ConstructionFailed(format!(
                        "endomorphism of {} is not injective",
                        self.spec.alphabet().name(x)
                    )));
                }
                Ok(Arc::new(StableData { phi, cert, tree: OnceLock::new() }))
            })
            .clone()
    }

    /// Certifies every stable letter up front, in parallel.
    pub fn warm(&self) -> Result<()> {
        let gens: Vec<Gen> = self.stable.keys().copied().collect();
        gens.par_iter().try_for_each(|&g| self.data(g).map(|_| ()))
    }

    fn level(&self, l: Letter) -> Option<usize> {
        self.spec.level_of(l.gen())
    }

    fn check(&self, w: &[Letter]) -> Result<()> {
        let n = self.spec.alphabet().len() as u32;
        match w.iter().find(|l| l.gen() >= n) {
            Some(l) => Err(Error::InvalidInput(format!("generator index {} outside the alphabet", l.gen()))),
            None => Ok(()),
        }
    }

    /// Britton reduction of `w` with the pinches performed.
    pub fn britton_reduce(&self, w: &[Letter]) -> Result<(Word, ReductionTrace)> {
        self.check(w)?;
        let mut trace = ReductionTrace::default();
        let out = self.reduce_level(0, w, Some(&mut trace))?;
        Ok((Word::from_reduced(out), trace))
    }

    pub fn reduce(&self, w: &[Letter]) -> Result<Word> {
        self.check(w)?;
        Ok(Word::from_reduced(self.reduce_level(0, w, None)?))
    }

    pub fn is_trivial(&self, w: &[Letter]) -> Result<bool> {
        self.check(w)?;
        Ok(self.reduce_level(0, w, None)?.is_empty())
    }

    pub fn equal(&self, u: &[Letter], v: &[Letter]) -> Result<bool> {
        let mut w = u.to_vec();
        w.extend(v.iter().rev().map(|l| l.inverse()));
        self.is_trivial(&w)
    }

    /// The base-group word equal to `w`, or `None` when `w` is not in the
    /// base free group.
    pub fn to_base(&self, w: &[Letter]) -> Result<Option<Word>> {
        let r = self.reduce(w)?;
        Ok(if r.letters().iter().any(|&l| self.level(l).is_some()) { None } else { Some(r) })
    }

    fn reduce_level(&self, i: usize, w: &[Letter], mut trace: Option<&mut ReductionTrace>) -> Result<Vec<Letter>> {
        let levels = self.spec.levels();
        if i == levels.len() {
            return Ok(free_reduce(w).into_letters());
        }
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        let mut marks: Vec<usize> = Vec::new();
        for &l in w {
            if self.level(l) != Some(i) {
                push_reduced(&mut out, l);
                continue;
            }
            if let Some(&p) = marks.last() {
                let x = out[p];
                if x.gen() == l.gen() && x.is_positive() != l.is_positive() {
                    if let Some(rep) = self.pinch(i, x, &out[p + 1..])? {
                        if let Some(t) = trace.as_deref_mut() {
                            t.steps.push(Step {
                                level: i,
                                position: p,
                                stable: x.gen(),
                                kind: if x.is_positive() { PinchKind::Forward } else { PinchKind::Backward },
                                before: out.len() - p + 1,
                                after: rep.len(),
                            });
                        }
                        out.truncate(p);
                        marks.pop();
                        for &r in rep.letters() {
                            push_reduced(&mut out, r);
                        }
                        continue;
                    }
                }
            }
            marks.push(out.len());
            out.push(l);
        }
        if i + 1 == levels.len() && marks.is_empty() {
            return Ok(free_reduce(&out).into_letters());
        }
        // normalize the inner segments between surviving stable letters
        let mut result = Vec::with_capacity(out.len());
        let mut start = 0;
        for &m in marks.iter().chain(std::iter::once(&out.len())) {
            let seg = self.reduce_level(i + 1, &out[start..m], trace.as_deref_mut())?;
            result.extend(seg);
            if m < out.len() {
                result.push(out[m]);
            }
            start = m + 1;
        }
        Ok(result)
    }

    fn pinch(&self, i: usize, x: Letter, u: &[Letter]) -> Result<Option<Word>> {
        let lv = &self.spec.levels()[i];
        let data = self.data(x.gen())?;
        if x.is_positive() {
            match self.express_in(i + 1, u, lv.domain)? {
                Some(v) => Ok(Some(data.phi.apply(v.letters())?)),
                None => Ok(None),
            }
        } else {
            match self.express_in(i + 1, u, lv.codomain)? {
                Some(c) => match data.cert.preimage(&c) {
                    Ok(v) => Ok(Some(v)),
                    Err(Error::NotInImage) => Ok(None),
                    Err(e) => Err(e),
                },
                None => Ok(None),
            }
        }
    }

    /// Writes `u`, a word in the group at level `i`, over the generators of
    /// the free subgroup `d`, if it lies there.
    fn express_in(&self, i: usize, u: &[Letter], d: SubgroupRef) -> Result<Option<Word>> {
        let levels = self.spec.levels();
        if i == levels.len() {
            return Ok(Some(free_reduce(u)));
        }
        if d == SubgroupRef::Stable(i) {
            // the level-i letters retract the level-i group onto F(d)
            let r: Vec<Letter> = u.iter().copied().filter(|&l| self.level(l) == Some(i)).collect();
            let r = free_reduce(&r);
            let mut probe = u.to_vec();
            probe.extend(r.letters().iter().rev().map(|l| l.inverse()));
            return Ok(if self.reduce_level(i, &probe, None)?.is_empty() { Some(r) } else { None });
        }
        let v = self.reduce_level(i, u, None)?;
        if v.iter().any(|&l| self.level(l) == Some(i)) {
            return Ok(None);
        }
        self.express_in(i + 1, &v, d)
    }

    /// Image under the retraction onto the outermost stable letters.
    pub fn outer_image(&self, w: &[Letter]) -> Word {
        let kept: Vec<Letter> = w.iter().copied().filter(|l| self.outer[l.gen() as usize]).collect();
        free_reduce(&kept)
    }

    pub fn abelian_invariant(&self, w: &[Letter]) -> AbelianImage {
        let spec = self.spec;
        let (free_gens, modulus, weight): (Vec<Gen>, i64, Box<dyn Fn(Gen) -> i64>) = match spec.structure() {
            Structure::Free { .. } => (spec.alphabet().gens().collect(), 1, Box::new(|_| 0)),
            Structure::Block { len, .. } | Structure::Chain { len, .. } => {
                let outer = outer_retraction(spec);
                (outer, len as i64 - 1, Box::new(|_| 1))
            }
            Structure::Double { len, .. } => {
                let base = spec.base().to_vec();
                let l = len as i64;
                (outer_retraction(spec), l * (l - 1), Box::new(move |g| if base.contains(&g) { l } else { 1 }))
            }
        };
        let slot: HashMap<Gen, usize> = free_gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut free = vec![0i64; free_gens.len()];
        let mut torsion = 0i64;
        for &l in w {
            let s = l.sign() as i64;
            match slot.get(&l.gen()) {
                Some(&i) => free[i] += s,
                None => torsion += s * weight(l.gen()),
            }
        }
        AbelianImage { free, torsion: torsion.rem_euclid(modulus.max(1)), modulus }
    }

    /// Canonical form for free groups and single-level groups whose stable
    /// letters act on the whole base group; `None` otherwise.
    ///
    /// Elements of `F` slide right through `t⁻¹` (as `a t⁻¹ = t⁻¹ φ(a)`);
    /// before `t` only the part in `Im φ` slides, leaving the shortlex
    /// representative of its left coset behind.
    pub fn normal_form(&self, w: &[Letter]) -> Result<Option<Vec<Letter>>> {
        let levels = self.spec.levels();
        if levels.is_empty() {
            return Ok(Some(free_reduce(w).into_letters()));
        }
        if levels.len() != 1 || levels[0].domain != SubgroupRef::Base || levels[0].codomain != SubgroupRef::Base {
            return Ok(None);
        }
        let reduced = self.reduce(w)?;
        let mut out = Vec::with_capacity(reduced.len());
        let mut cur: Vec<Letter> = Vec::new();
        for &l in reduced.letters() {
            if self.level(l).is_none() {
                push_reduced(&mut cur, l);
                continue;
            }
            let data = self.data(l.gen())?;
            if l.is_positive() {
                let tree = data.tree.get_or_init(|| data.cert.folded.shortlex_tree());
                let inv: Vec<Letter> = cur.iter().rev().map(|x| x.inverse()).collect();
                let (v, k) = data.cert.folded.read_prefix(&inv);
                let mut rep_right = tree.path_to(v);
                rep_right.extend_from_slice(&inv[k..]);
                let r: Vec<Letter> = rep_right.iter().rev().map(|x| x.inverse()).collect();
                let mut c = rep_right;
                c.extend_from_slice(&cur);
                let c = free_reduce(&c);
                let pre = data.cert.preimage(&c)?;
                out.extend_from_slice(&r);
                out.push(l);
                cur = pre.into_letters();
            } else {
                let pushed = data.phi.apply(&cur)?;
                out.push(l);
                cur = pushed.into_letters();
            }
        }
        out.extend(cur);
        Ok(Some(out))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallElement {
    /// A geodesic word for the element.
    pub word: String,
    pub length: usize,
    /// Britton-reduced form.
    pub reduced: String,
    /// Length in the base free group, when the element lies there.
    pub base_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallRecord {
    pub radius: usize,
    pub cap: usize,
    pub complete: bool,
    /// Number of elements at distance at most `ρ`, for each `ρ` reached.
    pub sizes: Vec<usize>,
    pub elements: Vec<BallElement>,
}

enum Dedup {
    Canonical(HashMap<Vec<Letter>, usize>),
    Buckets(HashMap<(Word, AbelianImage), Vec<usize>>),
}

/// Breadth-first ball of radius `r`, stopping early once more than `cap`
/// elements are known.
pub fn ball(spec: &GroupSpec, r: usize, cap: usize) -> Result<BallRecord> {
    let nav = Navigator::new(spec);
    nav.warm()?;
    let al = spec.alphabet();
    let letters: Vec<Letter> = al.gens().flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect();
    let canonical = nav.normal_form(&[])?.is_some();
    let mut dedup = if canonical {
        let mut m = HashMap::new();
        m.insert(Vec::new(), 0);
        Dedup::Canonical(m)
    } else {
        let mut m = HashMap::new();
        m.insert((Word::empty(), nav.abelian_invariant(&[])), vec![0]);
        Dedup::Buckets(m)
    };
    // (geodesic, reduced form)
    let mut elems: Vec<(Vec<Letter>, Vec<Letter>, usize)> = vec![(vec![], vec![], 0)];
    let mut sizes = vec![1];
    let mut frontier = vec![0usize];
    let mut complete = true;
    'outer: for depth in 1..=r {
        let candidates: Vec<Vec<(Vec<Letter>, Vec<Letter>, Option<Vec<Letter>>)>> = frontier
            .par_iter()
            .map(|&e| {
                let (geo, red, _) = &elems[e];
                letters
                    .iter()
                    .filter(|&&l| geo.last() != Some(&l.inverse()))
                    .map(|&l| {
                        let mut g = geo.clone();
                        g.push(l);
                        let mut w = red.clone();
                        w.push(l);
                        let red = nav.reduce(&w)?.into_letters();
                        let key = if canonical { nav.normal_form(&red)? } else { None };
                        Ok((g, red, key))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for (g, red, key) in candidates.into_iter().flatten() {
            let new = match &mut dedup {
                Dedup::Canonical(m) => {
                    let key = key.expect("canonical key");
                    if m.contains_key(&key) {
                        false
                    } else {
                        m.insert(key, elems.len());
                        true
                    }
                }
                Dedup::Buckets(m) => {
                    let bucket = m.entry((nav.outer_image(&red), nav.abelian_invariant(&red))).or_default();
                    let mut seen = false;
                    for &j in bucket.iter() {
                        if nav.equal(&elems[j].1, &red)? {
                            seen = true;
                            break;
                        }
                    }
                    if !seen {
                        bucket.push(elems.len());
                    }
                    !seen
                }
            };
            if new {
                next.push(elems.len());
                elems.push((g, red, depth));
                if elems.len() > cap {
                    complete = false;
                    sizes.push(elems.len());
                    break 'outer;
                }
            }
        }
        sizes.push(elems.len());
        frontier = next;
    }
    let elements = elems
        .iter()
        .map(|(g, red, d)| BallElement {
            word: al.format(g),
            length: *d,
            reduced: al.format(red),
            base_length: if red.iter().any(|l| spec.level_of(l.gen()).is_some()) { None } else { Some(red.len()) },
        })
        .collect();
    Ok(BallRecord { radius: r, cap, complete, sizes, elements })
}

/// Largest base-group length found within each radius `ρ ≤ r`.
pub fn measure_distortion(spec: &GroupSpec, r: usize, cap: usize) -> Result<(DistortionCurve, BallRecord)> {
    let rec = ball(spec, r, cap)?;
    let reached = rec.sizes.len() - 1;
    let points = (0..=reached)
        .map(|rho| {
            let best = rec
                .elements
                .iter()
                .filter(|e| e.length <= rho)
                .filter_map(|e| e.base_length)
                .max()
                .unwrap_or(0);
            CurvePoint { x: rho as u64, value: LengthExpr::exact(best as u64), ball_size: Some(rec.sizes[rho]) }
        })
        .collect();
    Ok((DistortionCurve { kind: CurveKind::EmpiricalExact, points }, rec))
}

/// CSV with columns `radius,max_f_length,ball_size`.
pub fn distortion_csv(curve: &DistortionCurve) -> String {
    let mut s = String::from("radius,max_f_length,ball_size\n");
    for p in &curve.points {
        s.push_str(&format!("{},{},{}\n", p.x, p.value, p.ball_size.map_or(String::new(), |b| b.to_string())));
    }
    s
}
