use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use super::{fresh_id, Permutation, StateKey, TreeAutomorphism, TreeError};

/// Finite Mealy automaton over the letters `1..=m`.
#[derive(Debug)]
pub struct ExplicitAutomaton {
    id: u64,
    degree: usize,
    names: Vec<String>,
    perms: Vec<Permutation>,
    transitions: Vec<Vec<usize>>,
}

impl ExplicitAutomaton {
    /// `transitions[s][i]` is the state reached from `s` on letter `i + 1`.
    pub fn new(
        names: Vec<String>,
        perms: Vec<Permutation>,
        transitions: Vec<Vec<usize>>,
    ) -> Result<Arc<Self>, TreeError> {
        let n = names.len();
        if n == 0 || perms.len() != n || transitions.len() != n {
            return Err(TreeError::InvalidAutomaton(
                "names, permutations and transitions must have the same nonzero length".into(),
            ));
        }
        let degree = perms[0].degree();
        if degree < 2 {
            return Err(TreeError::InvalidAutomaton("alphabet needs at least 2 letters".into()));
        }
        for (s, (p, row)) in perms.iter().zip(&transitions).enumerate() {
            if p.degree() != degree {
                return Err(TreeError::AlphabetMismatch(degree, p.degree()));
            }
            if row.len() != degree || row.iter().any(|&q| q >= n) {
                return Err(TreeError::InvalidAutomaton(format!(
                    "state {} has malformed transitions",
                    names[s]
                )));
            }
        }
        Ok(Arc::new(ExplicitAutomaton {
            id: fresh_id(),
            degree,
            names,
            perms,
            transitions,
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn perm(&self, s: usize) -> &Permutation {
        &self.perms[s]
    }

    pub fn transitions(&self, s: usize) -> &[usize] {
        &self.transitions[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn state(self: &Arc<Self>, s: usize) -> TreeAutomorphism {
        TreeAutomorphism::explicit(self.clone(), s)
    }

    /// Graphviz text; nodes carry the state name and root permutation,
    /// edges `i|j` for input `i` and output `j`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        for (s, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "  s{} [label=\"{} {}\"];", s, name, self.perms[s]);
        }
        for s in 0..self.len() {
            for i in 0..self.degree {
                let _ = writeln!(
                    out,
                    "  s{} -> s{} [label=\"{}|{}\"];",
                    s,
                    self.transitions[s][i],
                    i + 1,
                    self.perms[s].apply(i + 1)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Minimized closure of a generator set under taking sections.
#[derive(Debug, Clone)]
pub struct ClosedStates {
    pub automaton: Arc<ExplicitAutomaton>,
    /// State of each generator, in input order.
    pub generators: Vec<usize>,
    /// States visited before minimization.
    pub raw_states: usize,
}

impl ClosedStates {
    pub fn len(&self) -> usize {
        self.automaton.len()
    }

    pub fn is_empty(&self) -> bool {
        self.automaton.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum Closure {
    Closed(ClosedStates),
    Overflow,
}

impl Closure {
    pub fn closed(&self) -> Option<&ClosedStates> {
        match self {
            Closure::Closed(c) => Some(c),
            Closure::Overflow => None,
        }
    }
}

pub fn state_closure(gens: &[TreeAutomorphism], cap: usize) -> Result<Closure, TreeError> {
    let named: Vec<(String, TreeAutomorphism)> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| (format!("g{}", i + 1), g.clone()))
        .collect();
    state_closure_named(&named, cap)
}

/// Breadth-first closure, then partition refinement so bisimilar states
/// merge. Names: `e` for the identity, generator names, then `q<k>`.
pub fn state_closure_named(
    gens: &[(String, TreeAutomorphism)],
    cap: usize,
) -> Result<Closure, TreeError> {
    let Some((_, first)) = gens.first() else {
        return Err(TreeError::InvalidAutomaton("empty generator list".into()));
    };
    let m = first.degree();
    if let Some((_, g)) = gens.iter().find(|(_, g)| g.degree() != m) {
        return Err(TreeError::AlphabetMismatch(m, g.degree()));
    }

    let mut index: HashMap<StateKey, usize> = HashMap::new();
    let mut states: Vec<TreeAutomorphism> = Vec::new();
    let mut perms: Vec<Permutation> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut gen_raw = Vec::with_capacity(gens.len());

    let mut intern = |a: &TreeAutomorphism,
                      states: &mut Vec<TreeAutomorphism>,
                      queue: &mut VecDeque<usize>|
     -> Option<usize> {
        let k = a.key();
        if let Some(&i) = index.get(&k) {
            return Some(i);
        }
        if states.len() >= cap {
            return None;
        }
        let i = states.len();
        index.insert(k, i);
        states.push(a.clone());
        queue.push_back(i);
        Some(i)
    };

    for (_, g) in gens {
        match intern(g, &mut states, &mut queue) {
            Some(i) => gen_raw.push(i),
            None => return Ok(Closure::Overflow),
        }
    }
    while let Some(i) = queue.pop_front() {
        let a = states[i].clone();
        let (p, secs) = if a.is_identity_node() {
            (Permutation::identity(m), vec![a.clone(); m])
        } else {
            a.unfold()
        };
        let mut row = Vec::with_capacity(m);
        for s in &secs {
            match intern(s, &mut states, &mut queue) {
                Some(j) => row.push(j),
                None => return Ok(Closure::Overflow),
            }
        }
        if perms.len() <= i {
            perms.resize(i + 1, Permutation::identity(m));
            trans.resize(i + 1, Vec::new());
        }
        perms[i] = p;
        trans[i] = row;
    }
    let raw = states.len();

    let class = refine(&perms, &trans);
    let n_classes = class.iter().copied().max().map_or(0, |c| c + 1);
    if n_classes > cap {
        return Ok(Closure::Overflow);
    }
    let mut rep = vec![usize::MAX; n_classes];
    for (i, &c) in class.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = i;
        }
    }
    let cperms: Vec<Permutation> = rep.iter().map(|&i| perms[i].clone()).collect();
    let ctrans: Vec<Vec<usize>> = rep
        .iter()
        .map(|&i| trans[i].iter().map(|&j| class[j]).collect())
        .collect();

    let mut names: Vec<Option<String>> = vec![None; n_classes];
    for c in 0..n_classes {
        if cperms[c].is_identity() && ctrans[c].iter().all(|&d| d == c) {
            names[c] = Some("e".into());
        }
    }
    let generators: Vec<usize> = gen_raw.iter().map(|&i| class[i]).collect();
    for ((name, _), &c) in gens.iter().zip(&generators) {
        if names[c].is_none() {
            names[c] = Some(name.clone());
        }
    }
    let mut k = 0;
    let names: Vec<String> = names
        .into_iter()
        .map(|n| {
            n.unwrap_or_else(|| {
                k += 1;
                format!("q{}", k)
            })
        })
        .collect();

    let automaton = ExplicitAutomaton::new(names, cperms, ctrans)?;
    Ok(Closure::Closed(ClosedStates {
        automaton,
        generators,
        raw_states: raw,
    }))
}

/// Coarsest partition compatible with root permutations and transitions;
/// classes are numbered by first occurrence.
fn refine(perms: &[Permutation], trans: &[Vec<usize>]) -> Vec<usize> {
    let n = perms.len();
    let mut class = renumber(perms.iter().map(|p| p.images()));
    loop {
        let next = renumber(
            (0..n).map(|i| (class[i], trans[i].iter().map(|&j| class[j]).collect::<Vec<_>>())),
        );
        let before = class.iter().copied().max();
        let after = next.iter().copied().max();
        class = next;
        if before == after {
            return class;
        }
    }
}

fn renumber<K: Ord, I: Iterator<Item = K>>(keys: I) -> Vec<usize> {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    keys.map(|k| {
        let n = ids.len();
        *ids.entry(k).or_insert(n)
    })
    .collect()
}
