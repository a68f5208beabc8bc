//! Automorphisms of the `m`-ary rooted tree, unfolded lazily.
//!
//! Letters are `1..=m`; vertices are letter sequences read from the root.
//! `compose(a, b)` acts as `a` first, then `b`.

mod automaton;
mod compile;
mod perm;
mod search;

pub use automaton::{state_closure, state_closure_named, Closure, ClosedStates, ExplicitAutomaton};
pub use compile::{compile, CompileSession};
pub use perm::Permutation;
pub use search::{
    kernel_search, kernel_search_in, level1_transitive, level_orbits, stabilizer_pair, KernelWitness,
    StabilizerGenerator, StabilizerPair,
};

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::similarity::SimilarityError;
use crate::wreath::WreathElement;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub(crate) fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("letter {letter} outside 1..={degree}")]
    BadLetter { letter: usize, degree: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("root action is not transitive")]
    Intransitive,
}

/// Structural identity of a node; equal keys imply equal automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateKey {
    Identity,
    Explicit { automaton: u64, state: usize },
    Compiled { session: u64, element: Arc<WreathElement> },
    Product(Box<StateKey>, Box<StateKey>),
    Inverse(Box<StateKey>),
}

enum Node {
    Identity { degree: usize },
    Explicit { automaton: Arc<ExplicitAutomaton>, state: usize },
    Compiled { session: Arc<CompileSession>, element: Arc<WreathElement> },
    Product(TreeAutomorphism, TreeAutomorphism),
    Inverse(TreeAutomorphism),
}

#[derive(Clone)]
pub struct TreeAutomorphism(Arc<Node>);

impl fmt::Debug for TreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeAutomorphism({:?})", self.key())
    }
}

impl TreeAutomorphism {
    pub fn identity(degree: usize) -> Self {
        TreeAutomorphism(Arc::new(Node::Identity { degree }))
    }

    pub(crate) fn explicit(automaton: Arc<ExplicitAutomaton>, state: usize) -> Self {
        TreeAutomorphism(Arc::new(Node::Explicit { automaton, state }))
    }

    pub(crate) fn compiled(session: Arc<CompileSession>, element: Arc<WreathElement>) -> Self {
        if element.is_identity() {
            return TreeAutomorphism::identity(session.degree());
        }
        TreeAutomorphism(Arc::new(Node::Compiled { session, element }))
    }

    pub fn degree(&self) -> usize {
        match &*self.0 {
            Node::Identity { degree } => *degree,
            Node::Explicit { automaton, .. } => automaton.degree(),
            Node::Compiled { session, .. } => session.degree(),
            Node::Product(a, _) => a.degree(),
            Node::Inverse(a) => a.degree(),
        }
    }

    /// True only when the node is structurally the identity.
    pub fn is_identity_node(&self) -> bool {
        matches!(&*self.0, Node::Identity { .. })
    }

    /// The wreath element behind a compiled node.
    pub fn element(&self) -> Option<&WreathElement> {
        match &*self.0 {
            Node::Compiled { element, .. } => Some(element),
            _ => None,
        }
    }

    pub fn key(&self) -> StateKey {
        match &*self.0 {
            Node::Identity { .. } => StateKey::Identity,
            Node::Explicit { automaton, state } => StateKey::Explicit {
                automaton: automaton.id(),
                state: *state,
            },
            Node::Compiled { session, element } => StateKey::Compiled {
                session: session.id(),
                element: element.clone(),
            },
            Node::Product(a, b) => StateKey::Product(Box::new(a.key()), Box::new(b.key())),
            Node::Inverse(a) => StateKey::Inverse(Box::new(a.key())),
        }
    }

    pub fn root_perm(&self) -> Permutation {
        match &*self.0 {
            Node::Identity { degree } => Permutation::identity(*degree),
            Node::Explicit { automaton, state } => automaton.perm(*state).clone(),
            Node::Compiled { session, element } => session.unfold(element).0,
            Node::Product(a, b) => a.root_perm().then(&b.root_perm()),
            Node::Inverse(a) => a.root_perm().inverse(),
        }
    }

    fn section0(&self, i: usize) -> TreeAutomorphism {
        match &*self.0 {
            Node::Identity { .. } => self.clone(),
            Node::Explicit { automaton, state } => {
                TreeAutomorphism::explicit(automaton.clone(), automaton.transitions(*state)[i])
            }
            Node::Compiled { session, element } => {
                let (_, sections) = session.unfold(element);
                TreeAutomorphism::compiled(session.clone(), sections[i].clone())
            }
            Node::Product(a, b) => {
                let j = a.root_perm().image0(i);
                compose_unchecked(&a.section0(i), &b.section0(j))
            }
            Node::Inverse(a) => {
                let j = a.root_perm().inverse().image0(i);
                invert(&a.section0(j))
            }
        }
    }

    /// Section at a one-based letter.
    pub fn section(&self, letter: usize) -> Result<TreeAutomorphism, TreeError> {
        check_letter(letter, self.degree())?;
        Ok(self.section0(letter - 1))
    }

    /// Permutation and all sections in one step.
    pub(crate) fn unfold(&self) -> (Permutation, Vec<TreeAutomorphism>) {
        let perm = self.root_perm();
        let sections = (0..self.degree()).map(|i| self.section0(i)).collect();
        (perm, sections)
    }
}

fn check_letter(letter: usize, degree: usize) -> Result<(), TreeError> {
    if letter == 0 || letter > degree {
        Err(TreeError::BadLetter { letter, degree })
    } else {
        Ok(())
    }
}

fn compose_unchecked(a: &TreeAutomorphism, b: &TreeAutomorphism) -> TreeAutomorphism {
    if a.is_identity_node() {
        return b.clone();
    }
    if b.is_identity_node() {
        return a.clone();
    }
    TreeAutomorphism(Arc::new(Node::Product(a.clone(), b.clone())))
}

/// `a` first, then `b`.
pub fn compose(a: &TreeAutomorphism, b: &TreeAutomorphism) -> Result<TreeAutomorphism, TreeError> {
    if a.degree() != b.degree() {
        return Err(TreeError::AlphabetMismatch(a.degree(), b.degree()));
    }
    Ok(compose_unchecked(a, b))
}

pub fn invert(a: &TreeAutomorphism) -> TreeAutomorphism {
    match &*a.0 {
        Node::Identity { .. } => a.clone(),
        Node::Inverse(inner) => inner.clone(),
        _ => TreeAutomorphism(Arc::new(Node::Inverse(a.clone()))),
    }
}

/// Image of the vertex `w`.
pub fn act(a: &TreeAutomorphism, w: &[usize]) -> Result<Vec<usize>, TreeError> {
    let m = a.degree();
    for &l in w {
        check_letter(l, m)?;
    }
    let mut cur = a.clone();
    let mut out = Vec::with_capacity(w.len());
    for &l in w {
        if cur.is_identity_node() {
            out.push(l);
            continue;
        }
        out.push(cur.root_perm().apply(l));
        cur = cur.section0(l - 1);
    }
    Ok(out)
}

/// Section at the vertex `v`.
pub fn section_at(a: &TreeAutomorphism, v: &[usize]) -> Result<TreeAutomorphism, TreeError> {
    let m = a.degree();
    let mut cur = a.clone();
    for &l in v {
        check_letter(l, m)?;
        cur = cur.section0(l - 1);
    }
    Ok(cur)
}

/// Truncation of an automorphism: `depth` levels of permutations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Portrait {
    pub depth: usize,
    pub root: Option<Permutation>,
    pub children: Vec<Portrait>,
}

impl Portrait {
    pub fn is_trivial(&self) -> bool {
        self.root.as_ref().is_none_or(|p| p.is_identity()) && self.children.iter().all(|c| c.is_trivial())
    }
}

/// `perm[ child, ... ]`, `perm[]` on the last level, `-` at depth 0.
impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.root {
            None => write!(f, "-"),
            Some(p) => {
                write!(f, "{}[", p)?;
                if !self.children.is_empty() {
                    write!(f, " ")?;
                    for (i, c) in self.children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", c)?;
                    }
                    write!(f, " ")?;
                }
                write!(f, "]")
            }
        }
    }
}

pub fn portrait(a: &TreeAutomorphism, depth: usize) -> Portrait {
    let m = a.degree();
    let mut memo = HashMap::new();
    portrait_memo(a, depth, m, &mut memo)
}

fn portrait_memo(
    a: &TreeAutomorphism,
    depth: usize,
    m: usize,
    memo: &mut HashMap<(StateKey, usize), Portrait>,
) -> Portrait {
    if depth == 0 {
        return Portrait {
            depth: 0,
            root: None,
            children: Vec::new(),
        };
    }
    let key = (a.key(), depth);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let (perm, sections) = if a.is_identity_node() {
        (Permutation::identity(m), vec![a.clone(); m])
    } else {
        a.unfold()
    };
    let children = if depth == 1 {
        Vec::new()
    } else {
        sections
            .iter()
            .map(|s| portrait_memo(s, depth - 1, m, memo))
            .collect()
    };
    let p = Portrait {
        depth,
        root: Some(perm),
        children,
    };
    memo.insert(key, p.clone());
    p
}

/// Decides "acts trivially on the first `depth` levels" with a shared memo.
#[derive(Default)]
pub struct TrivialityCache {
    memo: HashMap<(StateKey, usize), bool>,
}

impl TrivialityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trivial_to_depth(&mut self, a: &TreeAutomorphism, depth: usize) -> bool {
        if depth == 0 || a.is_identity_node() {
            return true;
        }
        let key = (a.key(), depth);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let (perm, sections) = a.unfold();
        let v = perm.is_identity() && sections.iter().all(|s| self.trivial_to_depth(s, depth - 1));
        self.memo.insert(key, v);
        v
    }
}

pub fn trivial_to_depth(a: &TreeAutomorphism, depth: usize) -> bool {
    TrivialityCache::new().trivial_to_depth(a, depth)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimResult {
    /// The pair closure closed with this many pairs, all root permutations equal.
    Equal { pairs: usize },
    DistinctAt(Vec<usize>),
    Unknown,
}

/// Breadth-first bisimulation over section pairs.
pub fn bisim_equal(a: &TreeAutomorphism, b: &TreeAutomorphism, cap: usize) -> BisimResult {
    if a.degree() != b.degree() {
        return BisimResult::DistinctAt(Vec::new());
    }
    let m = a.degree();
    let mut seen: HashSet<(StateKey, StateKey)> = HashSet::new();
    let mut queue: VecDeque<(TreeAutomorphism, TreeAutomorphism, Vec<usize>)> = VecDeque::new();
    seen.insert((a.key(), b.key()));
    queue.push_back((a.clone(), b.clone(), Vec::new()));
    while let Some((x, y, path)) = queue.pop_front() {
        if x.key() == y.key() {
            continue;
        }
        let (px, sx) = if x.is_identity_node() {
            (Permutation::identity(m), vec![x.clone(); m])
        } else {
            x.unfold()
        };
        let (py, sy) = if y.is_identity_node() {
            (Permutation::identity(m), vec![y.clone(); m])
        } else {
            y.unfold()
        };
        if let Some(i) = (0..m).find(|&i| px.image0(i) != py.image0(i)) {
            let mut v = path;
            v.push(i + 1);
            return BisimResult::DistinctAt(v);
        }
        for i in 0..m {
            let k = (sx[i].key(), sy[i].key());
            if seen.contains(&k) {
                continue;
            }
            if seen.len() >= cap {
                return BisimResult::Unknown;
            }
            seen.insert(k);
            let mut v = path.clone();
            v.push(i + 1);
            queue.push_back((sx[i].clone(), sy[i].clone(), v));
        }
    }
    BisimResult::Equal { pairs: seen.len() }
}
