//! Desk-scale obstruction checks for triples on `B wr X` with `X`
//! torsion-free: shifts to disjointness, nontriviality of `f(x^m)`,
//! `f`-invariance of `A^m`, and certificates for a nontrivial `f`-core.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::abelian::Coord;
use crate::literal::{format_element, format_x};
use crate::similarity::{SimilarityError, SimilarityTriple};
use crate::tree::{CompileSession, TreeError, TrivialityCache};
use crate::wreath::{GroupDescriptor, WreathElement, XDescriptor, XElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("shift element has finite order")]
    FiniteOrderShift,
    #[error("out of hypothesis: {0}")]
    OutOfHypothesis(String),
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
}

fn require_torsion_free(t: &SimilarityTriple) -> Result<(), LabError> {
    if t.group().top_group().is_torsion_free() {
        Ok(())
    } else {
        Err(LabError::OutOfHypothesis("X has torsion".into()))
    }
}

/// Order in which shifts are tried: `0, 1, -1, 2, -2, ...`.
pub fn shift_order() -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..).flat_map(|k| [k, -k]))
}

/// Smallest `|k|` (positive first on ties) with `kz + zs` disjoint from `xs`.
pub fn find_disjoint_shift(
    xd: &XDescriptor,
    z: &XElement,
    zs: &[XElement],
    xs: &[XElement],
) -> Result<i64, LabError> {
    if z.coords()[..xd.free_rank()].iter().all(|c| c.is_zero()) {
        return Err(LabError::FiniteOrderShift);
    }
    let forbidden: BTreeSet<&XElement> = xs.iter().collect();
    for k in shift_order() {
        let kz = xd.scale(z, &BigInt::from(k));
        if zs.iter().all(|y| !forbidden.contains(&xd.add(y, &kz))) {
            return Ok(k);
        }
    }
    unreachable!("an element of infinite order hits each target at most once")
}

#[derive(Clone, Debug)]
pub struct Lemma4Result {
    pub x: XElement,
    /// `f(x^m)`.
    pub image: WreathElement,
    pub passed: bool,
}

/// Whether `f(x^m)` is nontrivial.
pub fn lemma4_check(t: &SimilarityTriple, x: &XElement) -> Result<Lemma4Result, LabError> {
    require_torsion_free(t)?;
    if x.is_identity() {
        return Err(LabError::InvalidTriple("x must be nontrivial".into()));
    }
    let d = t.group();
    let xm = d.top_element(d.top_group().scale(x, &BigInt::from(t.index())));
    let image = t.apply_f(&xm)?;
    Ok(Lemma4Result {
        x: x.clone(),
        passed: !image.is_identity(),
        image,
    })
}

#[derive(Clone, Debug)]
pub struct Lemma5Entry {
    pub coord: usize,
    pub shift: XElement,
    /// `None` when `m·(b↶x)` is not in `H`.
    pub image: Option<WreathElement>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Lemma5Report {
    pub window: i64,
    pub entries: Vec<Lemma5Entry>,
    /// Every residue class of `X/Y` is met and every generator lies in `H`,
    /// so translation by `Y` covers all of `A^m`.
    pub exhaustive: bool,
}

impl Lemma5Report {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn skipped(&self) -> usize {
        self.entries.iter().filter(|e| e.image.is_none()).count()
    }
}

fn window_shifts(xd: &XDescriptor, window: i64) -> Vec<XElement> {
    let mut out = vec![Vec::new()];
    for _ in 0..xd.dim() {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-window..=window).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|v| xd.from_ints(&v).expect("dimension"))
        .collect()
}

/// For each base generator `b` and shift `x` in `[-window, window]^d`,
/// checks `f(m·(b↶x)) ∈ A^m`.
pub fn lemma5_check(t: &SimilarityTriple, window: i64) -> Result<Lemma5Report, LabError> {
    require_torsion_free(t)?;
    let d = t.group();
    let b = d.base_group();
    if b.is_omega() {
        return Err(LabError::OutOfHypothesis("B is not finitely generated".into()));
    }
    let m = BigInt::from(t.index());
    let shifts = window_shifts(d.top_group(), window.max(0));
    let mut entries = Vec::new();
    let mut residues = BTreeSet::new();
    for x in &shifts {
        residues.insert(t.subgroup().y_lattice().coset_rep(x.coords()));
        for c in 0..b.rank() {
            let g = d.power(&d.delta(Coord::fg(c), x).map_err(SimilarityError::from)?, &m);
            let (image, passed) = if t.in_subgroup(&g) {
                let img = t.apply_f(&g)?;
                let ok = d.normal_closure_power_member(&img, &m);
                (Some(img), ok)
            } else {
                (None, true)
            };
            entries.push(Lemma5Entry {
                coord: c,
                shift: x.clone(),
                image,
                passed,
            });
        }
    }
    let covered = match t.subgroup().y_lattice().index().finite() {
        Some(n) => BigUint::from(residues.len()) == *n,
        None => false,
    };
    let exhaustive = covered && entries.iter().all(|e| e.image.is_some());
    Ok(Lemma5Report {
        window,
        entries,
        exhaustive,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma2Branch {
    /// `m·B = 0`.
    BmTrivial,
    /// Every sampled `f(a)`, `a ∈ A ∩ H`, has trivial top.
    A0fInA,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct Lemma2Report {
    pub bm_trivial: bool,
    pub samples: usize,
    /// Number of sampled `f(a)` with trivial top.
    pub in_a: usize,
    /// Distinct nontrivial samples of `f(A ∩ H) ∩ A`.
    pub l_intersection: Vec<WreathElement>,
    /// A sampled `a ∈ A ∩ H` with `f(a) ∉ A`, if any.
    pub escape: Option<WreathElement>,
    pub branch: Lemma2Branch,
}

const L_SAMPLES_SHOWN: usize = 5;

/// Either `m·B = 0` or `f` maps `A ∩ H` into `A` (on samples); both
/// failing is reported as an invalid triple.
pub fn lemma2_branch(t: &SimilarityTriple, samples: usize, seed: u64) -> Result<Lemma2Report, LabError> {
    require_torsion_free(t)?;
    let d = t.group();
    let m = BigInt::from(t.index());
    let bm_trivial = d.base_group().multiple_is_trivial(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_a = 0;
    let mut escape = None;
    let mut l_intersection: Vec<WreathElement> = Vec::new();
    for _ in 0..samples {
        let a = t.random_base_subgroup_element(&mut rng, 3);
        let img = t.apply_f(&a)?;
        if img.top.is_identity() {
            in_a += 1;
            if !img.is_identity() && l_intersection.len() < L_SAMPLES_SHOWN && !l_intersection.contains(&img) {
                l_intersection.push(img);
            }
        } else if escape.is_none() {
            escape = Some(a);
        }
    }
    let branch = if bm_trivial {
        Lemma2Branch::BmTrivial
    } else if let Some(a) = &escape {
        return Err(LabError::InvalidTriple(format!(
            "m·B is nontrivial and f({}) leaves the base group",
            format_element(d, a)
        )));
    } else if samples > 0 {
        Lemma2Branch::A0fInA
    } else {
        Lemma2Branch::Inconclusive
    };
    Ok(Lemma2Report {
        bm_trivial,
        samples,
        in_a,
        l_intersection,
        escape,
        branch,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Nontrivial,
    Membership,
    Normality,
    Invariance,
    Kernel,
}

impl CheckKind {
    fn label(self) -> &'static str {
        match self {
            CheckKind::Nontrivial => "nontrivial",
            CheckKind::Membership => "in H",
            CheckKind::Normality => "normal",
            CheckKind::Invariance => "f-invariant",
            CheckKind::Kernel => "kernel",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub kind: CheckKind,
    pub input: String,
    pub passed: bool,
}

/// Evidence that `A^m` is a nontrivial normal `f`-invariant subgroup of `H`.
#[derive(Clone, Debug)]
pub struct CoreCertificate {
    pub description: String,
    pub m: usize,
    pub generators: Vec<WreathElement>,
    pub witness: WreathElement,
    pub depth: usize,
    pub lemma5: Lemma5Report,
    pub checks: Vec<CheckEntry>,
}

impl CoreCertificate {
    pub fn passed(&self) -> bool {
        self.lemma5.passed() && self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug)]
pub enum CoreOutcome {
    Certified(Box<CoreCertificate>),
    /// `m·B = 0`: `A^m` is trivial and gives no obstruction.
    TorsionBranch { exponent: BigUint, m: usize },
}

impl CoreOutcome {
    pub fn certificate(&self) -> Option<&CoreCertificate> {
        match self {
            CoreOutcome::Certified(c) => Some(c),
            CoreOutcome::TorsionBranch { .. } => None,
        }
    }

    pub fn explanation(&self) -> String {
        match self {
            CoreOutcome::Certified(c) => format!("{} is a nontrivial f-invariant normal subgroup of H", c.description),
            CoreOutcome::TorsionBranch { exponent, m } => format!(
                "torsion exponent {} branch: B has exponent {} dividing m = {}, so A^{} is trivial",
                exponent, exponent, m, m
            ),
        }
    }
}

const NORMALITY_SAMPLES: usize = 20;

/// Certificate for `A^m` when `m·B ≠ 0`.
pub fn core_witness(
    t: &SimilarityTriple,
    window: i64,
    depth: usize,
    seed: u64,
) -> Result<CoreOutcome, LabError> {
    require_torsion_free(t)?;
    let d = t.group();
    let b = d.base_group();
    let m_usize = t.index();
    let m = BigInt::from(m_usize);
    if b.multiple_is_trivial(&m) {
        let exponent = b.exponent().expect("finite exponent");
        return Ok(CoreOutcome::TorsionBranch { exponent, m: m_usize });
    }
    if b.is_omega() {
        return Err(LabError::OutOfHypothesis("B is not finitely generated".into()));
    }
    let origin = d.top_group().identity();
    let mut generators = Vec::new();
    for x in window_shifts(d.top_group(), 1) {
        for c in 0..b.rank() {
            let g = d.power(&d.delta(Coord::fg(c), &x).map_err(SimilarityError::from)?, &m);
            if !g.is_identity() {
                generators.push(g);
            }
        }
    }
    let witness = (0..b.rank())
        .map(|c| d.power(&d.delta(Coord::fg(c), &origin).expect("generator"), &m))
        .find(|g| !g.is_identity())
        .expect("m·B is nontrivial");

    let fmt = |g: &WreathElement| format_element(d, g);
    let mut checks = vec![CheckEntry {
        kind: CheckKind::Nontrivial,
        input: fmt(&witness),
        passed: !witness.is_identity(),
    }];
    for g in &generators {
        checks.push(CheckEntry {
            kind: CheckKind::Membership,
            input: fmt(g),
            passed: t.in_subgroup(g) && t.coset_index(g).ok() == Some(1),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..NORMALITY_SAMPLES {
        let by = t.random_element(&mut rng, 3);
        let g = &generators[rng.gen_range(0..generators.len())];
        let c = d.conjugate(g, &by);
        checks.push(CheckEntry {
            kind: CheckKind::Normality,
            input: format!("{} by {}", fmt(g), fmt(&by)),
            passed: d.normal_closure_power_member(&c, &m) && t.in_subgroup(&c),
        });
    }
    for g in std::iter::once(&witness).chain(&generators) {
        let passed = match t.apply_f(g) {
            Ok(img) => d.normal_closure_power_member(&img, &m),
            Err(_) => false,
        };
        checks.push(CheckEntry {
            kind: CheckKind::Invariance,
            input: fmt(g),
            passed,
        });
    }
    let lemma5 = lemma5_check(t, window)?;
    let session = CompileSession::new(Arc::new(t.clone()))?;
    let image = session.compile(&witness)?;
    checks.push(CheckEntry {
        kind: CheckKind::Kernel,
        input: format!("{} to depth {}", fmt(&witness), depth),
        passed: TrivialityCache::new().trivial_to_depth(&image, depth),
    });
    Ok(CoreOutcome::Certified(Box::new(CoreCertificate {
        description: format!("A^{}", m_usize),
        m: m_usize,
        generators,
        witness,
        depth,
        lemma5,
        checks,
    })))
}

/// All checks for one triple; `None` fields did not run.
#[derive(Clone, Debug)]
pub struct LabReport {
    pub m: usize,
    pub out_of_hypothesis: Option<String>,
    pub lemma2: Option<Lemma2Report>,
    pub lemma4: Vec<Lemma4Result>,
    pub lemma5: Option<Lemma5Report>,
    pub core: Option<CoreOutcome>,
}

#[derive(Clone, Copy, Debug)]
pub struct LabParams {
    pub window: i64,
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for LabParams {
    fn default() -> Self {
        LabParams {
            window: 10,
            depth: 8,
            samples: 100,
            seed: 0,
        }
    }
}

const LEMMA4_RANDOM: usize = 4;

fn lemma4_inputs(xd: &XDescriptor, seed: u64) -> Vec<XElement> {
    let mut out = Vec::new();
    for e in xd.basis() {
        out.push(xd.neg(&e));
        out.push(e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 2 * xd.dim() + LEMMA4_RANDOM {
        let v: Vec<i64> = (0..xd.dim()).map(|_| rng.gen_range(-3..=3)).collect();
        let x = xd.from_ints(&v).expect("dimension");
        if !x.is_identity() && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub fn run_lab(t: &SimilarityTriple, p: LabParams) -> Result<LabReport, LabError> {
    let mut report = LabReport {
        m: t.index(),
        out_of_hypothesis: None,
        lemma2: None,
        lemma4: Vec::new(),
        lemma5: None,
        core: None,
    };
    if let Err(LabError::OutOfHypothesis(why)) = require_torsion_free(t) {
        report.out_of_hypothesis = Some(why);
        return Ok(report);
    }
    report.lemma2 = Some(lemma2_branch(t, p.samples, p.seed)?);
    for x in lemma4_inputs(t.group().top_group(), p.seed) {
        report.lemma4.push(lemma4_check(t, &x)?);
    }
    let core = core_witness(t, p.window, p.depth, p.seed)?;
    report.lemma5 = Some(match &core {
        CoreOutcome::Certified(c) => c.lemma5.clone(),
        CoreOutcome::TorsionBranch { .. } => lemma5_check(t, p.window)?,
    });
    report.core = Some(core);
    Ok(report)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

impl LabReport {
    pub fn certified(&self) -> bool {
        self.core
            .as_ref()
            .and_then(|c| c.certificate())
            .is_some_and(|c| c.passed())
    }

    /// Section per check, one line per sample.
    pub fn render(&self, d: &GroupDescriptor) -> String {
        let fmt = |g: &WreathElement| format_element(d, g);
        let mut s = String::new();
        let _ = writeln!(s, "m = {}", self.m);
        if let Some(why) = &self.out_of_hypothesis {
            let _ = writeln!(s, "out of hypothesis: {}", why);
            return s;
        }
        if let Some(l2) = &self.lemma2 {
            let _ = writeln!(s, "\n[lemma2]");
            let _ = writeln!(s, "B^m trivial: {}", yes(l2.bm_trivial));
            let _ = writeln!(s, "A0^f in A: {}/{} samples", l2.in_a, l2.samples);
            let branch = match l2.branch {
                Lemma2Branch::BmTrivial => "B_m_trivial",
                Lemma2Branch::A0fInA => "A0f_in_A",
                Lemma2Branch::Inconclusive => "inconclusive",
            };
            let _ = writeln!(s, "branch: {}", branch);
            for g in &l2.l_intersection {
                let _ = writeln!(s, "l_intersection: {}", fmt(g));
            }
        }
        if !self.lemma4.is_empty() {
            let _ = writeln!(s, "\n[lemma4]");
            for r in &self.lemma4 {
                let _ = write!(s, "x = {}: f(x^m) = {} {}", format_x(&r.x), fmt(&r.image), pass(r.passed));
                if !r.passed {
                    let _ = write!(s, " (A^(m(x^m - 1)) lies in ker f)");
                }
                s.push('\n');
            }
        }
        if let Some(l5) = &self.lemma5 {
            let _ = writeln!(s, "\n[lemma5]");
            let _ = writeln!(s, "window = {}", l5.window);
            for e in &l5.entries {
                match &e.image {
                    Some(img) => {
                        let _ = writeln!(
                            s,
                            "b{} at {}: f = {} {}",
                            e.coord + 1,
                            format_x(&e.shift),
                            fmt(img),
                            pass(e.passed)
                        );
                    }
                    None => {
                        let _ = writeln!(s, "b{} at {}: not in H, skipped", e.coord + 1, format_x(&e.shift));
                    }
                }
            }
            let _ = writeln!(s, "exhaustive: {}", yes(l5.exhaustive));
            let _ = writeln!(s, "result: {}", pass(l5.passed()));
        }
        if let Some(core) = &self.core {
            let _ = writeln!(s, "\n[certificate]");
            match core {
                CoreOutcome::Certified(c) => {
                    let _ = writeln!(s, "subgroup: {}", c.description);
                    let _ = writeln!(s, "witness: {}", fmt(&c.witness));
                    let _ = writeln!(s, "depth: {}", c.depth);
                    for e in &c.checks {
                        let _ = writeln!(s, "{}: {} {}", e.kind.label(), e.input, pass(e.passed));
                    }
                    let _ = writeln!(s, "f-invariance window: {}", pass(c.lemma5.passed()));
                    let _ = writeln!(s, "result: {}", if c.passed() { "certified" } else { "certification failed" });
                }
                CoreOutcome::TorsionBranch { .. } => {
                    let _ = writeln!(s, "none: {}", core.explanation());
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests;
