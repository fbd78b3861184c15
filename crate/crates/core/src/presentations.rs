//! The three presentation families (building blocks, chains, double
//! extensions), their canonical JSON form, and retractions.
//!
//! Every family is a tower of HNN levels over a free base group. Level 0 is
//! outermost. Each stable letter `x` of a level acts by a positive
//! endomorphism `d ↦ W` from the level's domain subgroup to its codomain
//! subgroup, one relator `x d x⁻¹ = W` per domain generator `d`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folding::{certify_injective, PositiveEndomorphism};
use crate::words::{check_pair_uniqueness, chop, free_reduce, sigma, Alphabet, Gen, GenName, Letter, PositiveWord, Role};

pub const FORMAT: &str = "catdistort/1";

/// Default cap on the number of generators `build_chain` will materialize.
pub const DEFAULT_GENERATOR_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Structure {
    Free {
        rank: u32,
    },
    Block {
        n: u32,
        m: u32,
        #[serde(rename = "L")]
        len: u32,
    },
    Chain {
        #[serde(rename = "l")]
        levels: u32,
        #[serde(rename = "L")]
        len: u32,
    },
    Double {
        n: u32,
        m: u32,
        #[serde(rename = "L")]
        len: u32,
    },
}

impl Structure {
    /// Relator image length, if the family has relators.
    pub fn image_len(&self) -> Option<u32> {
        match *self {
            Structure::Free { .. } => None,
            Structure::Block { len, .. } | Structure::Chain { len, .. } | Structure::Double { len, .. } => {
                Some(len)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockParams {
    pub n: u32,
    pub m: u32,
    pub len: u32,
}

impl BlockParams {
    pub fn new(n: u32, m: u32, len: u32) -> Result<Self> {
        let p = BlockParams { n, m, len };
        p.validate()?;
        Ok(p)
    }

    /// The standard `m = 14n` block.
    pub fn standard(n: u32) -> Self {
        BlockParams { n, m: 14 * n, len: 14 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::InvalidParameter(format!("L = {} must be at least 2", self.len)));
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if self.m as u64 != self.len as u64 * self.n as u64 {
            return Err(Error::InvalidParameter(format!(
                "m = L·n violated: m = {}, L·n = {}",
                self.m,
                self.len as u64 * self.n as u64
            )));
        }
        Ok(())
    }
}

/// `stable · base · stable⁻¹ = image`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub stable: Gen,
    pub base: Gen,
    pub image: PositiveWord,
}

impl Relator {
    /// Boundary word `stable base stable⁻¹ image⁻¹`.
    pub fn boundary(&self) -> Vec<Letter> {
        let mut w = vec![Letter::pos(self.stable), Letter::pos(self.base), Letter::neg(self.stable)];
        w.extend(self.image.gens().iter().rev().map(|&g| Letter::neg(g)));
        w
    }

    pub fn boundary_len(&self) -> usize {
        3 + self.image.len()
    }
}

/// Which free subgroup of an inner group an HNN level attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubgroupRef {
    /// The free base group at the bottom of the tower.
    Base,
    /// The free group on the stable letters of the given level.
    Stable(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnLevel {
    pub stable: Vec<Gen>,
    pub domain: SubgroupRef,
    pub codomain: SubgroupRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    structure: Structure,
    alphabet: Alphabet,
    relators: Vec<Relator>,
    base_free: Vec<Gen>,
    convex_rose: Vec<Gen>,
    target: Vec<Gen>,
    levels: Vec<HnnLevel>,
    base: Vec<Gen>,
    level_of: Vec<Option<usize>>,
    relator_at: HashMap<(Gen, Gen), usize>,
}

fn gens_of(alphabet: &Alphabet, names: impl IntoIterator<Item = GenName>) -> Vec<Gen> {
    names
        .into_iter()
        .map(|n| alphabet.gen(&n).expect("canonical generator present"))
        .collect()
}

/// The canonical generator order for a structure.
fn canonical_names(s: &Structure) -> Vec<GenName> {
    match *s {
        Structure::Free { rank } => (1..=rank).map(GenName::a).collect(),
        Structure::Block { n, m, .. } => (1..=m).map(GenName::a).chain((1..=n).map(GenName::t)).collect(),
        Structure::Double { n, m, .. } => (1..=m)
            .map(GenName::a)
            .chain((1..=n).map(GenName::t))
            .chain(std::iter::once(GenName::s()))
            .collect(),
        Structure::Chain { levels, len } => {
            let mut v = vec![GenName::t(0)];
            let mut rank = 1u64;
            for k in 1..=levels {
                rank *= len as u64;
                v.extend((1..=rank as u32).map(|j| GenName::a_level(k, j)));
            }
            v
        }
    }
}

struct Layout {
    levels: Vec<HnnLevel>,
    base: Vec<Gen>,
    base_free: Vec<Gen>,
    convex_rose: Vec<Gen>,
    target: Vec<Gen>,
}

fn layout(s: &Structure, alphabet: &Alphabet) -> Layout {
    let a_gens = |m: u32| gens_of(alphabet, (1..=m).map(GenName::a));
    let t_gens = |n: u32| gens_of(alphabet, (1..=n).map(GenName::t));
    match *s {
        Structure::Free { rank } => {
            let a = a_gens(rank);
            Layout { levels: vec![], base: a.clone(), base_free: a.clone(), convex_rose: vec![], target: a }
        }
        Structure::Block { n, m, .. } => {
            let (a, t) = (a_gens(m), t_gens(n));
            Layout {
                levels: vec![HnnLevel { stable: t.clone(), domain: SubgroupRef::Base, codomain: SubgroupRef::Base }],
                base: a.clone(),
                base_free: a.clone(),
                convex_rose: t,
                target: a,
            }
        }
        Structure::Double { n, m, .. } => {
            let (a, t) = (a_gens(m), t_gens(n));
            let s = gens_of(alphabet, [GenName::s()]);
            Layout {
                levels: vec![
                    HnnLevel { stable: s.clone(), domain: SubgroupRef::Base, codomain: SubgroupRef::Stable(1) },
                    HnnLevel { stable: t, domain: SubgroupRef::Base, codomain: SubgroupRef::Base },
                ],
                base: a.clone(),
                base_free: a.clone(),
                convex_rose: s,
                target: a,
            }
        }
        Structure::Chain { levels, len } => {
            let level_gens = |k: u32| -> Vec<Gen> {
                if k == 0 {
                    gens_of(alphabet, [GenName::t(0)])
                } else {
                    let rank = (len as u64).pow(k) as u32;
                    gens_of(alphabet, (1..=rank).map(|j| GenName::a_level(k, j)))
                }
            };
            let hnn = (0..levels)
                .map(|k| {
                    let inner = if k + 1 == levels { SubgroupRef::Base } else { SubgroupRef::Stable(k as usize + 1) };
                    HnnLevel { stable: level_gens(k), domain: inner, codomain: inner }
                })
                .collect();
            let top = level_gens(levels);
            Layout {
                levels: hnn,
                base: top.clone(),
                base_free: top.clone(),
                convex_rose: level_gens(0),
                target: top,
            }
        }
    }
}

impl GroupSpec {
    fn assemble(structure: Structure, relators: Vec<Relator>) -> Result<Self> {
        let alphabet = Alphabet::new(canonical_names(&structure))?;
        let lay = layout(&structure, &alphabet);
        let mut level_of = vec![None; alphabet.len()];
        for (i, lv) in lay.levels.iter().enumerate() {
            for &g in &lv.stable {
                level_of[g as usize] = Some(i);
            }
        }
        let mut relator_at = HashMap::with_capacity(relators.len());
        for (i, r) in relators.iter().enumerate() {
            if relator_at.insert((r.stable, r.base), i).is_some() {
                return Err(Error::InvalidInput(format!(
                    "two relators for ({}, {})",
                    alphabet.name(r.stable),
                    alphabet.name(r.base)
                )));
            }
        }
        Ok(GroupSpec {
            structure,
            alphabet,
            relators,
            base_free: lay.base_free,
            convex_rose: lay.convex_rose,
            target: lay.target,
            levels: lay.levels,
            base: lay.base,
            level_of,
            relator_at,
        })
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    pub fn base_free(&self) -> &[Gen] {
        &self.base_free
    }

    pub fn convex_rose(&self) -> &[Gen] {
        &self.convex_rose
    }

    /// Generators of the subgroup whose distortion is measured.
    pub fn target(&self) -> &[Gen] {
        &self.target
    }

    pub fn levels(&self) -> &[HnnLevel] {
        &self.levels
    }

    /// Generators of the innermost free group.
    pub fn base(&self) -> &[Gen] {
        &self.base
    }

    /// HNN level of a stable letter, `None` for base letters.
    pub fn level_of(&self, g: Gen) -> Option<usize> {
        self.level_of[g as usize]
    }

    pub fn subgroup_gens(&self, s: SubgroupRef) -> &[Gen] {
        match s {
            SubgroupRef::Base => &self.base,
            SubgroupRef::Stable(i) => &self.levels[i].stable,
        }
    }

    /// Indices of the relators belonging to each HNN level, in order.
    pub fn families(&self) -> Vec<Vec<usize>> {
        let mut fam = vec![Vec::new(); self.levels.len()];
        for (i, r) in self.relators.iter().enumerate() {
            if let Some(l) = self.level_of(r.stable) {
                fam[l].push(i);
            }
        }
        fam
    }

    pub fn relator(&self, stable: Gen, base: Gen) -> Option<&Relator> {
        self.relator_at.get(&(stable, base)).map(|&i| &self.relators[i])
    }

    /// The endomorphism of the stable letter `x`.
    pub fn endomorphism(&self, x: Gen) -> Result<PositiveEndomorphism> {
        let level = self
            .level_of(x)
            .ok_or_else(|| Error::InvalidInput(format!("{} is not a stable letter", self.alphabet.name(x))))?;
        let domain = self.subgroup_gens(self.levels[level].domain).to_vec();
        let images = domain
            .iter()
            .map(|&d| {
                self.relator(x, d).map(|r| r.image.clone()).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "missing relator for ({}, {})",
                        self.alphabet.name(x),
                        self.alphabet.name(d)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PositiveEndomorphism::new(domain, images)
    }

    /// Number of generators for the given structure, without building it.
    pub fn generator_count(s: &Structure) -> u64 {
        match *s {
            Structure::Free { rank } => rank as u64,
            Structure::Block { n, m, .. } => (n + m) as u64,
            Structure::Double { n, m, .. } => (n + m) as u64 + 1,
            Structure::Chain { levels, len } => 1 + (1..=levels).map(|k| (len as u64).pow(k)).sum::<u64>(),
        }
    }

    /// Number of relators for the given structure, without building it.
    pub fn relator_count(s: &Structure) -> u64 {
        match *s {
            Structure::Free { .. } => 0,
            Structure::Block { n, m, .. } => n as u64 * m as u64,
            Structure::Double { n, m, .. } => n as u64 * m as u64 + m as u64,
            Structure::Chain { levels, len } => {
                (1..=levels).map(|k| (len as u64).pow(k - 1) * (len as u64).pow(k)).sum()
            }
        }
    }
}

fn check_injective(spec: &GroupSpec) -> Result<()> {
    let stables: Vec<Gen> = spec.levels.iter().flat_map(|l| l.stable.iter().copied()).collect();
    stables.par_iter().try_for_each(|&x| {
        let phi = spec.endomorphism(x)?;
        let cert = certify_injective(&phi);
        if cert.injective {
            Ok(())
        } else {
            Err(Error::ConstructionFailed(format!(
                "endomorphism of {} folds to rank {} < {}",
                spec.alphabet.name(x),
                cert.folded_rank,
                cert.domain_rank
            )))
        }
    })
}

fn check_families(spec: &GroupSpec) -> Result<()> {
    for (k, fam) in spec.families().iter().enumerate() {
        let words: Vec<PositiveWord> = fam.iter().map(|&i| spec.relators[i].image.clone()).collect();
        let report = check_pair_uniqueness(&words);
        if !report.ok {
            let ((x, y), c) = report.repeated().next().expect("a repeat");
            return Err(Error::ConstructionFailed(format!(
                "level {k}: pair {} {} occurs {c} times",
                spec.alphabet.name(*x),
                spec.alphabet.name(*y)
            )));
        }
    }
    Ok(())
}

/// Relators `x_i d_j x_i⁻¹ = W_ij` with `W` chopped row-major from Σ(codomain).
fn conjugation_family(stable: &[Gen], domain: &[Gen], codomain: &[Gen], len: u32) -> Result<Vec<Relator>> {
    let sig = sigma(codomain)?;
    let words = chop(&sig, len as usize, stable.len() * domain.len())?;
    let mut out = Vec::with_capacity(words.len());
    let mut it = words.into_iter();
    for &x in stable {
        for &d in domain {
            out.push(Relator { stable: x, base: d, image: it.next().expect("enough words") });
        }
    }
    Ok(out)
}

fn build_from_structure(structure: Structure) -> Result<GroupSpec> {
    let alphabet = Alphabet::new(canonical_names(&structure))?;
    let lay = layout(&structure, &alphabet);
    let mut relators = Vec::new();
    if let Some(len) = structure.image_len() {
        let subgroup = |s: SubgroupRef| match s {
            SubgroupRef::Base => lay.base.clone(),
            SubgroupRef::Stable(i) => lay.levels[i].stable.clone(),
        };
        // innermost level first, so block relators precede the outer ones
        for lv in lay.levels.iter().rev() {
            relators.extend(conjugation_family(&lv.stable, &subgroup(lv.domain), &subgroup(lv.codomain), len)?);
        }
    }
    let spec = GroupSpec::assemble(structure, relators)?;
    check_families(&spec)?;
    Ok(spec)
}

/// The building block `⟨a_1..a_m, t_1..t_n | t_i a_j t_i⁻¹ = W_ij⟩`.
pub fn build_block(p: BlockParams) -> Result<GroupSpec> {
    p.validate()?;
    let spec = build_from_structure(Structure::Block { n: p.n, m: p.m, len: p.len })?;
    check_injective(&spec)?;
    Ok(spec)
}

pub fn build_free(rank: u32) -> Result<GroupSpec> {
    if rank == 0 {
        return Err(Error::InvalidParameter("free group rank must be positive".into()));
    }
    GroupSpec::assemble(Structure::Free { rank }, vec![])
}

/// A chain of `l` blocks glued distorted-to-convex, as one flat presentation.
pub fn build_chain(l: u32, len: u32, generator_cap: usize) -> Result<GroupSpec> {
    if l == 0 {
        return Err(Error::InvalidParameter("chain needs l ≥ 1".into()));
    }
    if len < 2 {
        return Err(Error::InvalidParameter(format!("L = {len} must be at least 2")));
    }
    let structure = Structure::Chain { levels: l, len };
    let count = (1..=l).try_fold(1u64, |acc, k| (len as u64).checked_pow(k).map(|r| acc.saturating_add(r)));
    match count {
        Some(c) if c <= generator_cap as u64 => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "chain l={l} L={len} needs more than the cap of {generator_cap} generators"
            )))
        }
    }
    let spec = build_from_structure(structure)?;
    check_injective(&spec)?;
    Ok(spec)
}

/// Checks `L·m·n ≤ m²` and `L·m ≤ n²`, naming the violated inequality.
pub fn check_double_params(n: u32, m: u32, len: u32) -> Result<()> {
    if len < 2 {
        return Err(Error::InvalidParameter(format!("L = {len} must be at least 2")));
    }
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter("n and m must both be at least 2".into()));
    }
    let (n64, m64, l64) = (n as u64, m as u64, len as u64);
    let mut violated = Vec::new();
    if l64 * m64 * n64 > m64 * m64 {
        violated.push(format!(
            "{len}mn ≤ m² violated: {len}·{m}·{n} = {} > {} = m²",
            l64 * m64 * n64,
            m64 * m64
        ));
    }
    if l64 * m64 > n64 * n64 {
        violated.push(format!("{len}m ≤ n² violated: {len}·{m} = {} > {} = n²", l64 * m64, n64 * n64));
    }
    if violated.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(violated.join("; ")))
    }
}

/// The double extension with stable letter `s`, certified injective.
pub fn build_double(n: u32, m: u32, len: u32) -> Result<GroupSpec> {
    let spec = build_double_uncertified(n, m, len)?;
    check_injective(&spec)?;
    Ok(spec)
}

/// As [`build_double`] but skipping the folding certification, which is the
/// expensive part at full size.
pub fn build_double_uncertified(n: u32, m: u32, len: u32) -> Result<GroupSpec> {
    check_double_params(n, m, len)?;
    build_from_structure(Structure::Double { n, m, len })
}

/// Certifies every relator family's endomorphisms by folding.
pub fn certify_all(spec: &GroupSpec) -> Result<()> {
    check_injective(spec)
}

/// True iff sending `kept` letters to themselves and all others to 1 maps
/// every relator to the identity or to a relator among kept letters only.
pub fn verify_retraction(spec: &GroupSpec, kept: &[Gen]) -> bool {
    let mut keep = vec![false; spec.alphabet.len()];
    for &g in kept {
        keep[g as usize] = true;
    }
    spec.relators.iter().all(|r| {
        let boundary = r.boundary();
        if boundary.iter().all(|l| keep[l.gen() as usize]) {
            return true;
        }
        let image: Vec<Letter> = boundary.into_iter().filter(|l| keep[l.gen() as usize]).collect();
        free_reduce(&image).is_empty()
    })
}

/// Letters kept by the standard retraction: the outermost stable letters
/// (`t_i` for a block, `s` for the double, `t` for a chain).
pub fn outer_retraction(spec: &GroupSpec) -> Vec<Gen> {
    spec.levels.first().map(|l| l.stable.clone()).unwrap_or_default()
}

#[derive(Serialize, Deserialize)]
struct RelatorDoc {
    stable: GenName,
    base: GenName,
    image: String,
}

#[derive(Serialize, Deserialize)]
struct SubgroupsDoc {
    base_free: Vec<GenName>,
    convex_rose: Vec<GenName>,
    target: Vec<GenName>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    format: String,
    structure: Structure,
    generators: Vec<GenName>,
    relators: Vec<RelatorDoc>,
    subgroups: SubgroupsDoc,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

impl GroupSpec {
    /// Canonical JSON document.
    pub fn to_json(&self) -> String {
        let names = |v: &[Gen]| v.iter().map(|&g| self.alphabet.name(g)).collect::<Vec<_>>();
        let doc = SpecDoc {
            format: FORMAT.into(),
            structure: self.structure,
            generators: self.alphabet.names().to_vec(),
            relators: self
                .relators
                .iter()
                .map(|r| RelatorDoc {
                    stable: self.alphabet.name(r.stable),
                    base: self.alphabet.name(r.base),
                    image: self.alphabet.format(r.image.to_word().letters()),
                })
                .collect(),
            subgroups: SubgroupsDoc {
                base_free: names(&self.base_free),
                convex_rose: names(&self.convex_rose),
                target: names(&self.target),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Parses and validates a JSON document. Injectivity is not re-certified
    /// here; see [`certify_all`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(text)
            .map_err(|e| parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        if doc.format != FORMAT {
            return Err(parse_err("format", format!("expected `{FORMAT}`, found `{}`", doc.format)));
        }
        let structure = doc.structure;
        match structure {
            Structure::Free { rank } if rank == 0 => return Err(parse_err("structure", "rank must be positive")),
            Structure::Block { n, m, len } => {
                BlockParams { n, m, len }.validate().map_err(|e| parse_err("structure", e.to_string()))?
            }
            Structure::Double { n, m, len } => {
                check_double_params(n, m, len).map_err(|e| parse_err("structure", e.to_string()))?
            }
            Structure::Chain { levels, len } if levels == 0 || len < 2 => {
                return Err(parse_err("structure", "chain needs l ≥ 1 and L ≥ 2"))
            }
            _ => {}
        }
        if GroupSpec::generator_count(&structure) != doc.generators.len() as u64
            || canonical_names(&structure) != doc.generators
        {
            return Err(parse_err("generators", "generator list does not match the structure"));
        }
        let alphabet = Alphabet::new(doc.generators).map_err(|e| parse_err("generators", e.to_string()))?;
        let lay = layout(&structure, &alphabet);
        let len = structure.image_len().unwrap_or(0) as usize;
        let mut relators = Vec::with_capacity(doc.relators.len());
        for (i, r) in doc.relators.iter().enumerate() {
            let at = |what: &str| format!("relators[{i}].{what}");
            let lookup = |n: &GenName, what: &str| {
                alphabet.gen(n).ok_or_else(|| parse_err(at(what), format!("unknown generator {n}")))
            };
            let stable = lookup(&r.stable, "stable")?;
            let base = lookup(&r.base, "base")?;
            let level = lay
                .levels
                .iter()
                .position(|l| l.stable.contains(&stable))
                .ok_or_else(|| parse_err(at("stable"), format!("{} is not a stable letter", r.stable)))?;
            let sub = |s: SubgroupRef| match s {
                SubgroupRef::Base => &lay.base,
                SubgroupRef::Stable(j) => &lay.levels[j].stable,
            };
            if !sub(lay.levels[level].domain).contains(&base) {
                return Err(parse_err(at("base"), format!("{} is outside the domain of {}", r.base, r.stable)));
            }
            let word = alphabet.parse_word(&r.image).map_err(|e| parse_err(at("image"), e.to_string()))?;
            let image = word
                .to_positive()
                .ok_or_else(|| parse_err(at("image"), "image must be a positive word"))?;
            if image.len() != len {
                return Err(parse_err(at("image"), format!("image length {} ≠ L = {len}", image.len())));
            }
            let codomain = sub(lay.levels[level].codomain);
            if let Some(&g) = image.gens().iter().find(|g| !codomain.contains(g)) {
                return Err(parse_err(at("image"), format!("{} is outside the codomain", alphabet.name(g))));
            }
            relators.push(Relator { stable, base, image });
        }
        if relators.len() as u64 != GroupSpec::relator_count(&structure) {
            return Err(parse_err(
                "relators",
                format!("expected {} relators, found {}", GroupSpec::relator_count(&structure), relators.len()),
            ));
        }
        let spec = GroupSpec::assemble(structure, relators).map_err(|e| parse_err("relators", e.to_string()))?;
        check_families(&spec).map_err(|e| parse_err("relators", e.to_string()))?;
        let names = |v: &[Gen]| v.iter().map(|&g| alphabet.name(g)).collect::<Vec<_>>();
        if doc.subgroups.base_free != names(&spec.base_free)
            || doc.subgroups.convex_rose != names(&spec.convex_rose)
            || doc.subgroups.target != names(&spec.target)
        {
            return Err(parse_err("subgroups", "distinguished subgroups do not match the structure"));
        }
        Ok(spec)
    }

    /// Letters with the given role, in alphabet order.
    pub fn gens_with_role(&self, role: Role) -> Vec<Gen> {
        self.alphabet.gens().filter(|&g| self.alphabet.name(g).role == role).collect()
    }
}
