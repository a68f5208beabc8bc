use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use petgraph::unionfind::UnionFind;

use super::{
    act, bisim_equal, portrait, section_at, BisimResult, CompileSession, TreeAutomorphism,
    TreeError, TrivialityCache,
};
use crate::literal::{format_word, Word};
use crate::similarity::SimilarityTriple;
use crate::wreath::WreathElement;

fn common_degree(gens: &[TreeAutomorphism]) -> Result<usize, TreeError> {
    let Some(first) = gens.first() else {
        return Err(TreeError::InvalidAutomaton("empty generator list".into()));
    };
    let m = first.degree();
    match gens.iter().find(|g| g.degree() != m) {
        Some(g) => Err(TreeError::AlphabetMismatch(m, g.degree())),
        None => Ok(m),
    }
}

pub fn level1_transitive(gens: &[TreeAutomorphism]) -> Result<bool, TreeError> {
    Ok(level_orbits(gens, 1)?.len() == 1)
}

/// Orbits of the generated group on the words of length `l`, each sorted,
/// listed by smallest member.
pub fn level_orbits(gens: &[TreeAutomorphism], l: usize) -> Result<Vec<Vec<Vec<usize>>>, TreeError> {
    let m = common_degree(gens)?;
    let n = m
        .checked_pow(l as u32)
        .ok_or_else(|| TreeError::InvalidAutomaton(format!("level {} is too large", l)))?;
    let word_of = |mut v: usize| {
        let mut w = vec![0; l];
        for k in (0..l).rev() {
            w[k] = v % m + 1;
            v /= m;
        }
        w
    };
    let index_of = |w: &[usize]| w.iter().fold(0, |acc, &x| acc * m + (x - 1));
    let mut uf = UnionFind::<usize>::new(n);
    for g in gens {
        if g.is_identity_node() {
            continue;
        }
        for v in 0..n {
            let img = act(g, &word_of(v))?;
            uf.union(v, index_of(&img));
        }
    }
    let labels = uf.into_labeling();
    let mut orbits: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for (v, &r) in labels.iter().enumerate().take(n) {
        if slot[r] == usize::MAX {
            slot[r] = orbits.len();
            orbits.push(Vec::new());
        }
        orbits[slot[r]].push(word_of(v));
    }
    Ok(orbits)
}

/// A nontrivial element of `G` whose image acts trivially to `depth_checked`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelWitness {
    pub word: Word,
    pub element: WreathElement,
    pub depth_checked: usize,
}

impl KernelWitness {
    pub fn format_word(&self, names: &[String]) -> String {
        format_word(names, &self.word)
    }
}

fn symbol_inverse(s: usize) -> usize {
    s ^ 1
}

fn symbol_letter(s: usize) -> (usize, BigInt) {
    let e = if s.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    (s / 2, e)
}

/// Free-reduced words of length `1..=radius` in the symbols
/// `g1, g1^-1, g2, ...`, shortest first, each passed with its value.
fn for_reduced_words<F>(t: &SimilarityTriple, gens: &[WreathElement], radius: usize, mut visit: F) -> Result<(), TreeError>
where
    F: FnMut(&[usize], &WreathElement) -> Result<(), TreeError>,
{
    let d = t.group();
    let mut symbols = Vec::with_capacity(2 * gens.len());
    for g in gens {
        symbols.push(g.clone());
        symbols.push(d.inverse(g));
    }
    let mut layer: Vec<(Vec<usize>, WreathElement)> = vec![(Vec::new(), d.identity())];
    for _ in 0..radius {
        let mut next = Vec::new();
        for (w, v) in &layer {
            for (s, sv) in symbols.iter().enumerate() {
                if w.last().is_some_and(|&p| p == symbol_inverse(s)) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(s);
                let v2 = d.mul(v, sv);
                visit(&w2, &v2)?;
                next.push((w2, v2));
            }
        }
        layer = next;
    }
    Ok(())
}

/// Reduced words up to `radius` that are nontrivial in `G` but whose compiled
/// image is trivial on the first `depth` levels.
pub fn kernel_search(
    t: &SimilarityTriple,
    gens: &[WreathElement],
    radius: usize,
    depth: usize,
) -> Result<Vec<KernelWitness>, TreeError> {
    let session = CompileSession::new(Arc::new(t.clone()))?;
    kernel_search_in(&session, gens, radius, depth)
}

pub fn kernel_search_in(
    session: &Arc<CompileSession>,
    gens: &[WreathElement],
    radius: usize,
    depth: usize,
) -> Result<Vec<KernelWitness>, TreeError> {
    let mut cache = TrivialityCache::new();
    let mut out = Vec::new();
    for_reduced_words(session.triple(), gens, radius, |w, v| {
        if v.is_identity() {
            return Ok(());
        }
        let a = session.compile(v)?;
        if cache.trivial_to_depth(&a, depth) {
            out.push(KernelWitness {
                word: w.iter().map(|&s| symbol_letter(s)).collect(),
                element: v.clone(),
                depth_checked: depth,
            });
        }
        Ok(())
    })?;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct StabilizerGenerator {
    pub word: Word,
    pub element: WreathElement,
    /// `f(x_1·h·x_1^-1)`, the element whose image is the section at `[1]`.
    pub section: WreathElement,
    pub portrait_match: bool,
    pub bisim: BisimResult,
}

#[derive(Clone, Debug)]
pub struct StabilizerPair {
    /// Size of the orbit of letter 1, the index of the stabilizer.
    pub index: usize,
    /// `transversal[i]` maps letter 1 to letter `i + 1`.
    pub transversal: Vec<Word>,
    pub generators: Vec<StabilizerGenerator>,
}

fn free_reduce(word: Vec<(usize, BigInt)>) -> Word {
    let mut out: Word = Vec::new();
    for (i, e) in word {
        if let Some((j, f)) = out.last_mut() {
            if *j == i {
                *f += e;
                if num_traits::Zero::is_zero(f) {
                    out.pop();
                }
                continue;
            }
        }
        out.push((i, e));
    }
    out
}

fn invert_word(w: &Word) -> Word {
    w.iter().rev().map(|(i, e)| (*i, -e)).collect()
}

/// Schreier generators of the stabilizer of letter 1, each with its section
/// at `[1]` checked against the compiled section element to `depth`.
pub fn stabilizer_pair(
    t: &SimilarityTriple,
    gens: &[WreathElement],
    depth: usize,
    cap: usize,
) -> Result<StabilizerPair, TreeError> {
    let session = CompileSession::new(Arc::new(t.clone()))?;
    let d = t.group();
    let m = session.degree();
    let images = gens
        .iter()
        .map(|g| session.compile(g))
        .collect::<Result<Vec<_>, _>>()?;
    if gens.iter().all(|g| g.is_identity()) {
        return Ok(StabilizerPair {
            index: 1,
            transversal: vec![Vec::new()],
            generators: Vec::new(),
        });
    }
    let perms: Vec<_> = images.iter().map(|a| a.root_perm()).collect();

    let mut rep: Vec<Option<(Word, WreathElement)>> = vec![None; m];
    rep[0] = Some((Vec::new(), d.identity()));
    let mut queue = VecDeque::from([0usize]);
    let mut order = vec![0usize];
    while let Some(i) = queue.pop_front() {
        for (s, p) in perms.iter().enumerate() {
            let j = p.image0(i);
            if rep[j].is_none() {
                let (w, v) = rep[i].clone().expect("visited");
                let mut w2 = w;
                w2.push((s, BigInt::one()));
                rep[j] = Some((free_reduce(w2), d.mul(&v, &gens[s])));
                queue.push_back(j);
                order.push(j);
            }
        }
    }
    if order.len() != m {
        return Err(TreeError::Intransitive);
    }
    let rep: Vec<(Word, WreathElement)> = rep.into_iter().map(|r| r.expect("transitive")).collect();

    let x1 = &t.transversal()[0];
    let x1_inv = d.inverse(x1);
    let mut seen = HashSet::new();
    let mut generators = Vec::new();
    for i in 0..m {
        for (s, p) in perms.iter().enumerate() {
            let j = p.image0(i);
            let (wi, vi) = &rep[i];
            let (wj, vj) = &rep[j];
            let h = d.mul(&d.mul(vi, &gens[s]), &d.inverse(vj));
            if h.is_identity() || !seen.insert(h.clone()) {
                continue;
            }
            let mut w = wi.clone();
            w.push((s, BigInt::one()));
            w.extend(invert_word(wj));
            let section = t.apply_f(&d.mul(&d.mul(x1, &h), &x1_inv))?;
            let image = session.compile(&h)?;
            let at1 = section_at(&image, &[1])?;
            let direct = session.compile(&section)?;
            generators.push(StabilizerGenerator {
                word: free_reduce(w),
                element: h,
                portrait_match: portrait(&at1, depth) == portrait(&direct, depth),
                bisim: bisim_equal(&at1, &direct, cap),
                section,
            });
        }
    }
    let mut transversal = vec![Vec::new(); m];
    for (i, (w, _)) in rep.into_iter().enumerate() {
        transversal[i] = w;
    }
    Ok(StabilizerPair {
        index: m,
        transversal,
        generators,
    })
}
