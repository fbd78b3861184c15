//! Command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distortion::{
    lower_bound_curve, upper_bound_audit, witness_block, witness_chain, witness_tower, LengthExpr, Witness,
};
use crate::error::{Error, Result};
use crate::folding::certify_injective;
use crate::linkgeom::{
    build_link, check_chain_gluing, check_large_link, check_separation, contract_summary, Direction, Scheme,
};
use crate::navigator::{ball, distortion_csv, measure_distortion, Navigator};
use crate::presentations::{
    build_block, build_chain, build_double_uncertified, build_free, outer_retraction, verify_retraction, BlockParams,
    GroupSpec, Structure, DEFAULT_GENERATOR_CAP,
};
use crate::words::{check_pair_uniqueness, sigma, GenName, PositiveWord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

const DEFAULT_CAP: usize = 1_000_000;
const DEFAULT_MAX_LETTERS: usize = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "catdistort", version, about = "Distorted free subgroups of CAT(-1) presentation complexes")]
pub struct Cli {
    /// TOML file with defaults for the global options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write machine output here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for sampled audits.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ball size cap.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Largest word that will be materialized, in letters.
    #[arg(long, global = true)]
    max_letters: Option<usize>,
    /// Largest chain, in generators.
    #[arg(long, global = true)]
    max_generators: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    output: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    cap: Option<usize>,
    max_letters: Option<usize>,
    max_generators: Option<usize>,
}

/// Resolved options for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub cap: usize,
    pub max_letters: usize,
    pub max_generators: usize,
}

#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct SpecArgs {
    /// Building block, e.g. `--block n=1 m=14 L=14`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    block: Option<Vec<String>>,
    /// Double extension, e.g. `--double n=196 m=2744 L=14`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    double: Option<Vec<String>>,
    /// Chain of blocks, e.g. `--chain l=2 L=14`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    chain: Option<Vec<String>>,
    /// Free group, e.g. `--free rank=2`.
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    free: Option<Vec<String>>,
    /// Spec document written by `build`.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print Σ(a_1, ..., a_m).
    Sigma {
        #[arg(long)]
        m: u32,
    },
    /// Print the spec document.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Folding, retraction, link and separation checks.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Fold every relator family even at full size.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value = "ladder")]
        scheme: String,
    },
    /// Britton-reduce a word.
    Reduce {
        #[command(flatten)]
        spec: SpecArgs,
        /// Whitespace-separated letters, e.g. "t1 a1 t1^-1".
        #[arg(long)]
        word: String,
    },
    /// Enumerate a Cayley ball.
    Ball {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        radius: usize,
    },
    /// Distortion curves: empirical (`--radius`), witness (`--lower`) or audit (`--audit`).
    Distortion {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, conflicts_with_all = ["lower", "audit"])]
        radius: Option<usize>,
        #[arg(long, conflicts_with = "audit")]
        lower: Option<u32>,
        /// Largest word length to audit.
        #[arg(long)]
        audit: Option<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Witness words and their lengths.
    Witness {
        #[command(flatten)]
        spec: SpecArgs,
        /// Conjugation depth for blocks and chains.
        #[arg(long)]
        n: Option<u32>,
        /// Tower level for the double.
        #[arg(long)]
        k: Option<u32>,
    },
    /// DOT rendering of the link or of a folded image graph.
    ExportDot {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        boundary_only: bool,
        /// Draw the folded graph of this stable letter's image instead.
        #[arg(long)]
        stallings: Option<String>,
    },
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let mut out = Vec::new();
    let mut summary = String::new();
    let result = resolve(&cli).and_then(|cfg| execute(&cli.command, &cfg, &mut out, &mut summary).map(|c| (c, cfg)));
    match result {
        Ok((code, cfg)) => {
            let to_stdout = cfg.output.is_none();
            if let Some(path) = &cfg.output {
                if let Err(e) = std::fs::write(path, &out) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            } else {
                let _ = std::io::stdout().write_all(&out);
            }
            if to_stdout {
                eprint!("{summary}");
            } else {
                print!("{summary}");
            }
            code
        }
        Err(e) => {
            eprint!("{summary}");
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConstructionFailed(_) | Error::NotInImage => EXIT_FAILED,
        Error::CapExceeded(_) | Error::TooLarge(_) => EXIT_CAP,
        Error::InvalidParameter(_)
        | Error::InsufficientLength { .. }
        | Error::InvalidInput(_)
        | Error::NoScheme(_)
        | Error::Parse { .. } => EXIT_USAGE,
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?;
            toml::from_str::<ConfigFile>(&text)
                .map_err(|e| Error::Parse { location: p.display().to_string(), message: e.to_string() })?
        }
        None => ConfigFile::default(),
    };
    let cfg = RunConfig {
        output: cli.output.clone().or(file.output),
        format: cli.format.or(file.format),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        cap: cli.cap.or(file.cap).unwrap_or(DEFAULT_CAP),
        max_letters: cli.max_letters.or(file.max_letters).unwrap_or(DEFAULT_MAX_LETTERS),
        max_generators: cli.max_generators.or(file.max_generators).unwrap_or(DEFAULT_GENERATOR_CAP),
    };
    if cfg.cap == 0 || cfg.max_letters == 0 || cfg.max_generators == 0 {
        return Err(Error::InvalidParameter("caps must be positive".into()));
    }
    Ok(cfg)
}

fn key_values(tokens: &[String], allowed: &[&str]) -> Result<BTreeMap<String, u32>> {
    let mut map = BTreeMap::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, found `{tok}`")))?;
        if !allowed.contains(&k) {
            return Err(Error::InvalidParameter(format!("unknown key `{k}` (expected one of {})", allowed.join(", "))));
        }
        let v: u32 = v.parse().map_err(|_| Error::InvalidParameter(format!("`{v}` is not a nonnegative integer")))?;
        if map.insert(k.to_string(), v).is_some() {
            return Err(Error::InvalidParameter(format!("key `{k}` given twice")));
        }
    }
    Ok(map)
}

fn need(map: &BTreeMap<String, u32>, k: &str) -> Result<u32> {
    map.get(k).copied().ok_or_else(|| Error::InvalidParameter(format!("missing `{k}=`")))
}

/// Builds the group named on the command line. Large doubles are not folded
/// here; `verify` certifies them separately.
pub fn load_spec(args: &SpecArgs, cfg: &RunConfig) -> Result<GroupSpec> {
    if let Some(t) = &args.block {
        let kv = key_values(t, &["n", "m", "L"])?;
        let (n, len) = (need(&kv, "n")?, need(&kv, "L")?);
        let m = kv.get("m").copied().unwrap_or(n.saturating_mul(len));
        return build_block(BlockParams::new(n, m, len)?);
    }
    if let Some(t) = &args.double {
        let kv = key_values(t, &["n", "m", "L"])?;
        return build_double_uncertified(need(&kv, "n")?, need(&kv, "m")?, need(&kv, "L")?);
    }
    if let Some(t) = &args.chain {
        let kv = key_values(t, &["l", "L"])?;
        return build_chain(need(&kv, "l")?, need(&kv, "L")?, cfg.max_generators);
    }
    if let Some(t) = &args.free {
        let kv = key_values(t, &["rank"])?;
        return build_free(need(&kv, "rank")?);
    }
    let path = args.spec.as_ref().expect("clap enforces one spec source");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    GroupSpec::from_json(&text)
}

fn describe(s: &Structure) -> String {
    match *s {
        Structure::Free { rank } => format!("free group of rank {rank}"),
        Structure::Block { n, m, len } => format!("block n={n} m={m} L={len}"),
        Structure::Chain { levels, len } => format!("chain l={levels} L={len}"),
        Structure::Double { n, m, len } => format!("double n={n} m={m} L={len}"),
    }
}

fn emit_json(out: &mut Vec<u8>, v: &impl Serialize) {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    out.extend_from_slice(s.as_bytes());
}

fn execute(cmd: &Command, cfg: &RunConfig, out: &mut Vec<u8>, summary: &mut String) -> Result<i32> {
    match cmd {
        Command::Sigma { m } => {
            let gens: Vec<u32> = (0..*m).collect();
            let names: Vec<GenName> = (1..=*m).map(GenName::a).collect();
            let al = crate::words::Alphabet::new(names)?;
            let w = sigma(&gens)?;
            let report = check_pair_uniqueness(&[w.clone()]);
            let text = al.format(w.to_word().letters());
            match cfg.format {
                Some(Format::Csv) => {
                    out.extend_from_slice(b"position,letter\n");
                    for (i, &g) in w.gens().iter().enumerate() {
                        out.extend_from_slice(format!("{i},{}\n", al.name(g)).as_bytes());
                    }
                }
                _ => emit_json(out, &json!({"m": m, "length": w.len(), "pairs_unique": report.ok, "word": text})),
            }
            let _ = writeln!(summary, "Σ over {m} letters: length {} (m² = {}), pairs unique: {}", w.len(), m * m, report.ok);
            Ok(EXIT_OK)
        }
        Command::Build { spec } => {
            let g = load_spec(spec, cfg)?;
            out.extend_from_slice(g.to_json().as_bytes());
            let _ = writeln!(
                summary,
                "{}: {} generators, {} relators",
                describe(&g.structure()),
                g.alphabet().len(),
                g.relators().len()
            );
            Ok(EXIT_OK)
        }
        Command::Verify { spec, full, scheme } => {
            let scheme: Scheme = scheme.parse()?;
            let g = load_spec(spec, cfg)?;
            verify(&g, *full, scheme, cfg, out, summary)
        }
        Command::Reduce { spec, word } => {
            let g = load_spec(spec, cfg)?;
            let w = g.alphabet().parse_raw(word)?;
            let nav = Navigator::new(&g);
            let (r, trace) = nav.britton_reduce(&w)?;
            let in_base = r.letters().iter().all(|l| g.level_of(l.gen()).is_none());
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "level": s.level,
                        "position": s.position,
                        "stable": g.alphabet().name(s.stable).to_string(),
                        "kind": s.kind,
                        "before": s.before,
                        "after": s.after,
                    })
                })
                .collect();
            let text = if r.len() <= cfg.max_letters { g.alphabet().format(r.letters()) } else { String::new() };
            emit_json(
                out,
                &json!({"input": word, "reduced": text, "length": r.len(), "in_base": in_base, "trace": steps}),
            );
            let _ = writeln!(summary, "reduced length {} after {} pinches; in base group: {in_base}", r.len(), trace.pinches());
            Ok(EXIT_OK)
        }
        Command::Ball { spec, radius } => {
            let g = load_spec(spec, cfg)?;
            let rec = ball(&g, *radius, cfg.cap)?;
            emit_json(out, &rec);
            let _ = writeln!(summary, "ball sizes by radius: {:?}{}", rec.sizes, if rec.complete { "" } else { " (cap reached)" });
            Ok(if rec.complete { EXIT_OK } else { EXIT_CAP })
        }
        Command::Distortion { spec, radius, lower, audit, samples } => {
            let g = load_spec(spec, cfg)?;
            if let Some(k) = audit {
                let rep = upper_bound_audit(&g, *k, *samples, cfg.seed)?;
                emit_json(out, &rep);
                let _ = writeln!(
                    summary,
                    "audit seed {}: {} samples, {} violations",
                    rep.seed,
                    rep.samples(),
                    rep.violations()
                );
                return Ok(if rep.ok { EXIT_OK } else { EXIT_FAILED });
            }
            if let Some(n) = lower {
                let curve = lower_bound_curve(&g, *n)?;
                match cfg.format {
                    Some(Format::Json) => emit_json(out, &curve),
                    _ => out.extend_from_slice(curve.to_csv().as_bytes()),
                }
                let _ = writeln!(summary, "witness lower bound: {} points", curve.points.len());
                return Ok(EXIT_OK);
            }
            let r = radius.ok_or_else(|| Error::InvalidParameter("give --radius, --lower or --audit".into()))?;
            let (curve, rec) = measure_distortion(&g, r, cfg.cap)?;
            match cfg.format {
                Some(Format::Json) => emit_json(out, &curve),
                _ => out.extend_from_slice(distortion_csv(&curve).as_bytes()),
            }
            let _ = writeln!(summary, "empirical distortion to radius {}{}", curve.points.len() - 1, if rec.complete { "" } else { " (cap reached)" });
            Ok(if rec.complete { EXIT_OK } else { EXIT_CAP })
        }
        Command::Witness { spec, n, k } => {
            let g = load_spec(spec, cfg)?;
            witness(&g, *n, *k, cfg, out, summary)
        }
        Command::ExportDot { spec, boundary_only, stallings } => {
            let g = load_spec(spec, cfg)?;
            if let Some(name) = stallings {
                let gn: GenName = name.parse()?;
                let x = g
                    .alphabet()
                    .gen(&gn)
                    .ok_or_else(|| Error::InvalidInput(format!("{name} is not a generator")))?;
                let cert = certify_injective(&g.endomorphism(x)?);
                out.extend_from_slice(cert.folded.to_dot(g.alphabet()).as_bytes());
                let _ = writeln!(summary, "folded image of {name}: {} vertices, {} edges", cert.folded.num_vertices(), cert.folded.num_edges());
            } else {
                let link = build_link(&g, Scheme::Ladder)?;
                out.extend_from_slice(link.to_dot(*boundary_only).as_bytes());
                let _ = writeln!(summary, "link: {} vertices, {} edges", link.num_vertices(), link.num_edges());
            }
            Ok(EXIT_OK)
        }
    }
}

/// Relator families at or above this size are folded only with `--full`.
const FULL_THRESHOLD: usize = 50_000;

fn verify(
    g: &GroupSpec,
    full: bool,
    scheme: Scheme,
    cfg: &RunConfig,
    out: &mut Vec<u8>,
    summary: &mut String,
) -> Result<i32> {
    let al = g.alphabet();
    let mut checks: Vec<Value> = Vec::new();
    let mut all_ok = true;
    let _ = writeln!(summary, "{}", describe(&g.structure()));

    let families = g.families();
    let pairs_ok = families.iter().all(|fam| {
        let words: Vec<PositiveWord> = fam.iter().map(|&i| g.relators()[i].image.clone()).collect();
        check_pair_uniqueness(&words).ok
    });
    all_ok &= pairs_ok;
    checks.push(json!({"check": "pair-uniqueness", "ok": pairs_ok, "families": families.len()}));
    let _ = writeln!(summary, "pair uniqueness: {}", if pairs_ok { "ok" } else { "FAILED" });

    if g.relators().len() >= FULL_THRESHOLD && !full {
        checks.push(json!({"check": "injectivity", "status": "skipped", "reason": "pass --full to fold at this size"}));
        let _ = writeln!(summary, "injectivity: skipped ({} relators; pass --full)", g.relators().len());
    } else {
        let mut fam_reports = Vec::new();
        let mut inj_ok = true;
        for (k, lv) in g.levels().iter().enumerate() {
            if full {
                eprintln!("folding level {k}: {} endomorphisms", lv.stable.len());
            }
            let results: Vec<(String, bool, usize, usize)> = {
                use rayon::prelude::*;
                lv.stable
                    .par_iter()
                    .map(|&x| {
                        let cert = certify_injective(&g.endomorphism(x)?);
                        Ok((al.name(x).to_string(), cert.injective, cert.domain_rank, cert.folded_rank))
                    })
                    .collect::<Result<_>>()?
            };
            let fam_ok = results.iter().all(|r| r.1);
            inj_ok &= fam_ok;
            let failing: Vec<&String> = results.iter().filter(|r| !r.1).map(|r| &r.0).collect();
            fam_reports.push(json!({"level": k, "endomorphisms": results.len(), "injective": fam_ok, "failing": failing}));
        }
        all_ok &= inj_ok;
        let _ = writeln!(
            summary,
            "injective: {} ×{} {}",
            if inj_ok { "yes" } else { "NO" },
            fam_reports.len(),
            if fam_reports.len() == 1 { "family" } else { "families" }
        );
        checks.push(json!({"check": "injectivity", "ok": inj_ok, "families": fam_reports}));
    }

    let kept = outer_retraction(g);
    let retract_ok = verify_retraction(g, &kept);
    all_ok &= retract_ok;
    let kept_names: Vec<String> = kept.iter().map(|&x| al.name(x).to_string()).collect();
    checks.push(json!({"check": "retraction", "ok": retract_ok, "kept": kept_names}));
    let _ = writeln!(summary, "retraction onto outer stable letters: {}", if retract_ok { "ok" } else { "FAILED" });

    if !g.relators().is_empty() {
        let contract = contract_summary(g, scheme)?;
        let _ = writeln!(
            summary,
            "per-cell contract: {}/{} cells meet it (reported only)",
            contract.cells - contract.failing,
            contract.cells
        );
        checks.push(json!({"check": "cell-contract", "reported_only": true, "summary": contract}));
    }

    let link = build_link(g, scheme)?;
    let girth = check_large_link(&link);
    all_ok &= girth.ok;
    let _ = writeln!(
        summary,
        "link girth: {}",
        match girth.short_cycle {
            None => "≥ 2π".to_string(),
            Some(k) => format!("{k}·π/2 < 2π (witness {:?})", girth.witness.as_ref().map(|c| &c.names)),
        }
    );
    checks.push(json!({"check": "large-link", "ok": girth.ok, "report": girth}));

    let convex: Vec<Direction> = g.convex_rose().iter().flat_map(|&x| [Direction::Out(x), Direction::In(x)]).collect();
    if !convex.is_empty() {
        let sep = check_separation(&link, &convex)?;
        all_ok &= sep.ok;
        let _ = writeln!(
            summary,
            "separation of {}: {}",
            sep.set.join(" "),
            match sep.min_distance {
                Some(d) if d >= 4 => format!("≥ 2π ({d} edges)"),
                Some(d) => format!("{d} edges < 2π"),
                None => format!("≥ 2π (none within {} edges)", sep.horizon),
            }
        );
        checks.push(json!({"check": "separation", "ok": sep.ok, "report": sep}));
    }
    drop(link);

    if matches!(g.structure(), Structure::Chain { .. }) {
        let glue = check_chain_gluing(g, scheme)?;
        all_ok &= glue.ok;
        let _ = writeln!(summary, "chain gluing: {}", if glue.ok { "ok" } else { "FAILED" });
        checks.push(json!({"check": "chain-gluing", "ok": glue.ok, "report": glue}));
    }

    emit_json(
        out,
        &json!({"structure": g.structure(), "seed": cfg.seed, "scheme": scheme.to_string(), "ok": all_ok, "checks": checks}),
    );
    let _ = writeln!(summary, "{}", if all_ok { "all checks passed" } else { "verification FAILED" });
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED })
}

fn witness(g: &GroupSpec, n: Option<u32>, k: Option<u32>, cfg: &RunConfig, out: &mut Vec<u8>, summary: &mut String) -> Result<i32> {
    let (w, mut doc): (Witness, Value) = match g.structure() {
        Structure::Block { len, .. } => {
            let n = n.ok_or_else(|| Error::InvalidParameter("block witness needs --n".into()))?;
            let w = witness_block(len, n);
            let d = json!({"family": "block", "n": n});
            (w, d)
        }
        Structure::Chain { levels, len } => {
            let n = n.ok_or_else(|| Error::InvalidParameter("chain witness needs --n".into()))?;
            let w = witness_chain(levels, len, n)?;
            let d = json!({"family": "chain", "l": levels, "n": n, "recurrence_ok": BigUint::from(w.word.len()) <= w.g_bound});
            (w, d)
        }
        Structure::Double { len, .. } => {
            let k = k.ok_or_else(|| Error::InvalidParameter("tower witness needs --k".into()))?;
            let w = witness_tower(len, k)?;
            let four_k = BigUint::from(4u32).pow(k);
            let d = json!({
                "family": "tower",
                "k": k,
                "four_to_k": four_k.to_str_radix(10),
                "g_bound_le_four_to_k": w.g_bound <= four_k,
            });
            (w, d)
        }
        Structure::Free { .. } => return Err(Error::InvalidInput("free groups have no distortion witness".into())),
    };
    let mut materialized = Value::Null;
    if let Some(f) = w.f_length.as_exact() {
        if *f <= BigUint::from(cfg.max_letters) {
            let letters = w.respell(g.alphabet())?;
            let nav = Navigator::new(g);
            let base = nav.to_base(&letters)?;
            materialized = match base {
                Some(b) => json!({"length": b.len(), "positive": b.is_positive(), "matches": BigUint::from(b.len()) == *f}),
                None => json!({"length": null, "matches": false}),
            };
        }
    }
    let obj = doc.as_object_mut().expect("object");
    if let Value::Object(m) = w.to_json() {
        obj.extend(m);
    }
    obj.insert("materialized".into(), materialized.clone());
    emit_json(out, &doc);
    let _ = writeln!(
        summary,
        "witness of word length {} (bound {}), |·|_F = {}",
        w.word.len(),
        w.g_bound,
        short(&w.f_length)
    );
    let ok = materialized.get("matches").map_or(true, |m| m == true)
        && doc.get("g_bound_le_four_to_k").map_or(true, |m| m == true)
        && doc.get("recurrence_ok").map_or(true, |m| m == true);
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn short(e: &LengthExpr) -> String {
    match e.digits() {
        Some(d) if d > 40 => format!("<{d}-digit integer>"),
        _ => {
            let s = e.to_string();
            if s.len() > 80 {
                format!("{}…", &s[..80])
            } else {
                s
            }
        }
    }
}
