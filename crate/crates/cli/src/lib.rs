//! Command implementations for the `selfsim` binary. Each command returns
//! its standard output and exit code so it can be driven from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use selfsim::lab::{run_lab, LabParams};
use selfsim::literal::{format_element, format_word, parse_element_with};
use selfsim::similarity::{
    catalog_entries, catalog_triple, format_config, parse_config, validate_triple, SimilarityError,
    SimilarityTriple,
};
use selfsim::tree::{
    act, kernel_search_in, level1_transitive, level_orbits, portrait, stabilizer_pair,
    state_closure_named, BisimResult, Closure, CompileSession, TreeAutomorphism,
};

pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_CAP: usize = 10_000;
pub const DEFAULT_RADIUS: usize = 3;
pub const DEFAULT_WINDOW: i64 = 10;
pub const DEFAULT_SAMPLES: usize = 100;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FOUND: i32 = 2;
pub const EXIT_STRUCTURE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Similarity triples on wreath products and their tree representations")]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List built-in triples or print one in config format.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Print the portrait of an element's tree automorphism.
    Compile(CompileArgs),
    /// Apply an element to a vertex of the tree.
    Act(ActArgs),
    /// Validate a triple and search for kernel witnesses.
    Check(CheckArgs),
    /// Run the torsion-free obstruction checks and try to certify a core.
    Falsify(FalsifyArgs),
    /// Orbits of the generators on a level of the tree.
    Orbits(OrbitsArgs),
    /// Schreier generators of the stabilizer of letter 1 and their sections.
    Stabilizer(StabilizerArgs),
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    /// Catalog name or config file.
    pub triple: String,
    #[arg(long, short = 'e')]
    pub element: String,
    #[arg(long, short = 'd', default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    /// Write the minimized automaton as DOT.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long, short = 'c', default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct ActArgs {
    pub triple: String,
    #[arg(long, short = 'e')]
    pub element: String,
    /// Letters separated by spaces or commas.
    #[arg(long, short = 'w', allow_hyphen_values = true)]
    pub word: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub triple: String,
    #[arg(long, short = 'r', default_value_t = DEFAULT_RADIUS)]
    pub radius: usize,
    #[arg(long, short = 'd', default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, short = 'c', default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct FalsifyArgs {
    pub triple: String,
    #[arg(long, short = 'w', default_value_t = DEFAULT_WINDOW)]
    pub window: i64,
    #[arg(long, short = 'd', default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct OrbitsArgs {
    pub triple: String,
    #[arg(long, short = 'l', default_value_t = 1)]
    pub level: usize,
}

#[derive(Args, Debug)]
pub struct StabilizerArgs {
    pub triple: String,
    #[arg(long, short = 'd', default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, short = 'c', default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn new(stdout: String, code: i32) -> Self {
        Outcome { stdout, code }
    }
}

/// Catalog name first, then a config file path.
pub fn load_triple(source: &str) -> Result<SimilarityTriple> {
    match catalog_triple(source) {
        Ok(t) => Ok(t),
        Err(SimilarityError::UnknownCatalog(_)) if Path::new(source).is_file() => {
            let text = std::fs::read_to_string(source).with_context(|| format!("reading {}", source))?;
            let spec = parse_config(&text).with_context(|| format!("parsing {}", source))?;
            Ok(SimilarityTriple::new(spec)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn element(t: &SimilarityTriple, literal: &str) -> Result<selfsim::wreath::WreathElement> {
    parse_element_with(t.group(), t.generators(), literal)
        .with_context(|| format!("element literal '{}'", literal))
}

fn session(t: &SimilarityTriple) -> Result<Arc<CompileSession>> {
    Ok(CompileSession::new(Arc::new(t.clone()))?)
}

fn generator_images(
    t: &SimilarityTriple,
    s: &Arc<CompileSession>,
) -> Result<Vec<(String, TreeAutomorphism)>> {
    if t.generators().is_empty() {
        bail!("the triple names no generators");
    }
    t.generators()
        .iter()
        .map(|(n, g)| Ok((n.clone(), s.compile(g)?)))
        .collect()
}

fn format_vertex(v: &[usize]) -> String {
    v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn parse_vertex(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().map_err(|_| anyhow!("bad letter '{}'", p)))
        .collect()
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let seed = cli.seed;
    match cli.command {
        Command::Catalog { action } => cmd_catalog(action),
        Command::Compile(a) => cmd_compile(a),
        Command::Act(a) => cmd_act(a),
        Command::Check(a) => cmd_check(a, seed),
        Command::Falsify(a) => cmd_falsify(a, seed),
        Command::Orbits(a) => cmd_orbits(a),
        Command::Stabilizer(a) => cmd_stabilizer(a),
    }
}

/// Parses and runs; usage errors exit 1 like any other invalid input.
pub fn run_args<I, S>(args: I) -> (Outcome, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                (Outcome::new(String::new(), EXIT_ERROR), text)
            } else {
                (Outcome::new(text, EXIT_OK), String::new())
            };
        }
    };
    match run(cli) {
        Ok(o) => (o, String::new()),
        Err(e) => (Outcome::new(String::new(), EXIT_ERROR), format!("error: {:#}\n", e)),
    }
}

pub fn cmd_catalog(action: CatalogAction) -> Result<Outcome> {
    let mut out = String::new();
    match action {
        CatalogAction::List => {
            for (name, shape, m, note) in catalog_entries() {
                writeln!(out, "{:<22} m = {:<2} {:<44} {}", name, m, shape, note)?;
            }
        }
        CatalogAction::Show { name } => {
            let t = catalog_triple(&name)?;
            writeln!(out, "# {}: index {}", name, t.index())?;
            out.push_str(&format_config(t.spec()));
        }
    }
    Ok(Outcome::new(out, EXIT_OK))
}

pub fn cmd_compile(a: CompileArgs) -> Result<Outcome> {
    let t = load_triple(&a.triple)?;
    let g = element(&t, &a.element)?;
    let s = session(&t)?;
    let img = s.compile(&g)?;
    let mut out = format!("{}\n", portrait(&img, a.depth));
    if let Some(path) = &a.dot {
        match state_closure_named(&[("g".to_string(), img)], a.cap)? {
            Closure::Closed(c) => {
                std::fs::write(path, c.automaton.to_dot())
                    .with_context(|| format!("writing {}", path.display()))?;
                writeln!(out, "automaton: {} states written to {}", c.len(), path.display())?;
            }
            Closure::Overflow => {
                writeln!(out, "state closure exceeds cap {}; no automaton written", a.cap)?;
                return Ok(Outcome::new(out, EXIT_ERROR));
            }
        }
    }
    Ok(Outcome::new(out, EXIT_OK))
}

pub fn cmd_act(a: ActArgs) -> Result<Outcome> {
    let t = load_triple(&a.triple)?;
    let g = element(&t, &a.element)?;
    let img = session(&t)?.compile(&g)?;
    let w = parse_vertex(&a.word)?;
    let v = act(&img, &w)?;
    Ok(Outcome::new(format!("{}\n", format_vertex(&v)), EXIT_OK))
}

pub fn cmd_check(a: CheckArgs, seed: u64) -> Result<Outcome> {
    let t = load_triple(&a.triple)?;
    let d = t.group();
    let mut out = String::new();
    writeln!(out, "triple: {}", a.triple)?;
    writeln!(out, "index: {}", t.index())?;
    writeln!(out, "\n[validation]")?;
    let report = validate_triple(&t, a.samples, seed);
    out.push_str(&report.render(d));
    let mut structural = report.passed();
    if !report.passed() {
        writeln!(out, "\nresult: invalid triple")?;
        return Ok(Outcome::new(out, EXIT_STRUCTURE));
    }

    let s = session(&t)?;
    let gens = generator_images(&t, &s)?;
    let images: Vec<TreeAutomorphism> = gens.iter().map(|(_, a)| a.clone()).collect();
    writeln!(out, "\n[transitivity]")?;
    let transitive = level1_transitive(&images)?;
    writeln!(out, "level 1: {}", if transitive { "transitive" } else { "intransitive" })?;
    structural &= transitive;

    writeln!(out, "\n[state closure]")?;
    match state_closure_named(&gens, a.cap)? {
        Closure::Closed(c) => writeln!(out, "closed: {} states (cap {})", c.len(), a.cap)?,
        Closure::Overflow => {
            writeln!(out, "overflow: more than {} states", a.cap)?;
            structural = false;
        }
    }

    writeln!(out, "\n[kernel search]")?;
    let names = t.generator_names();
    let elements: Vec<_> = t.generators().iter().map(|(_, g)| g.clone()).collect();
    let found = kernel_search_in(&s, &elements, a.radius, a.depth)?;
    writeln!(out, "radius {}, depth {}: {} witnesses", a.radius, a.depth, found.len())?;
    for w in &found {
        writeln!(out, "witness: {} = {}", format_word(&names, &w.word), format_element(d, &w.element))?;
    }

    let code = if !found.is_empty() {
        writeln!(out, "\nresult: kernel witness found")?;
        EXIT_FOUND
    } else if !structural {
        writeln!(out, "\nresult: structural check failed")?;
        EXIT_STRUCTURE
    } else {
        writeln!(out, "\nresult: ok")?;
        EXIT_OK
    };
    Ok(Outcome::new(out, code))
}

pub fn cmd_falsify(a: FalsifyArgs, seed: u64) -> Result<Outcome> {
    let t = load_triple(&a.triple)?;
    let params = LabParams {
        window: a.window,
        depth: a.depth,
        samples: a.samples,
        seed,
    };
    let report = run_lab(&t, params)?;
    let mut out = format!("triple: {}\n", a.triple);
    out.push_str(&report.render(t.group()));
    let code = if report.out_of_hypothesis.is_some() {
        EXIT_ERROR
    } else if report.certified() {
        EXIT_FOUND
    } else if report.core.as_ref().is_some_and(|c| c.certificate().is_some()) {
        EXIT_ERROR
    } else {
        EXIT_OK
    };
    Ok(Outcome::new(out, code))
}

pub fn cmd_orbits(a: OrbitsArgs) -> Result<Outcome> {
    let t = load_triple(&a.triple)?;
    let s = session(&t)?;
    let images: Vec<_> = generator_images(&t, &s)?.into_iter().map(|(_, g)| g).collect();
    let orbits = level_orbits(&images, a.level)?;
    let plural = if orbits.len() == 1 { "orbit" } else { "orbits" };
    let mut out = format!("level {}: {} {}\n", a.level, orbits.len(), plural);
    for o in orbits {
        let parts: Vec<String> = o.iter().map(|v| format!("[{}]", format_vertex(v))).collect();
        writeln!(out, "{}", parts.join(" "))?;
    }
    Ok(Outcome::new(out, EXIT_OK))
}

pub fn cmd_stabilizer(a: StabilizerArgs) -> Result<Outcome> {
    let t = load_triple(&a.triple)?;
    let d = t.group();
    let names = t.generator_names();
    let elements: Vec<_> = t.generators().iter().map(|(_, g)| g.clone()).collect();
    if elements.is_empty() {
        bail!("the triple names no generators");
    }
    let p = stabilizer_pair(&t, &elements, a.depth, a.cap)?;
    let mut out = format!("index: {}\n", p.index);
    for (i, w) in p.transversal.iter().enumerate() {
        writeln!(out, "u{} = {}", i + 1, format_word(&names, w))?;
    }
    let mut ok = true;
    for g in &p.generators {
        let bisim = match &g.bisim {
            BisimResult::Equal { pairs } => format!("equal ({} pairs)", pairs),
            BisimResult::DistinctAt(v) => {
                ok = false;
                format!("distinct at [{}]", format_vertex(v))
            }
            BisimResult::Unknown => "unknown".to_string(),
        };
        ok &= g.portrait_match;
        writeln!(
            out,
            "{} = {}: section {}; portrait to depth {} {}; bisimulation {}",
            format_word(&names, &g.word),
            format_element(d, &g.element),
            format_element(d, &g.section),
            a.depth,
            if g.portrait_match { "matches" } else { "DIFFERS" },
            bisim
        )?;
    }
    Ok(Outcome::new(out, if ok { EXIT_OK } else { EXIT_STRUCTURE }))
}
