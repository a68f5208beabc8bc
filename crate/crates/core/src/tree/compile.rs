use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{fresh_id, Permutation, TreeAutomorphism, TreeError};
use crate::literal::format_element;
use crate::similarity::{SimilarityError, SimilarityTriple};
use crate::wreath::WreathElement;

type Unfolded = Arc<(Permutation, Vec<Arc<WreathElement>>)>;

/// Unfolds elements of `G` through a triple; states are shared across the
/// session.
pub struct CompileSession {
    id: u64,
    triple: Arc<SimilarityTriple>,
    inverses: Vec<WreathElement>,
    memo: Mutex<HashMap<WreathElement, Unfolded>>,
}

impl std::fmt::Debug for CompileSession {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CompileSession({}, m = {})", self.id, self.degree())
    }
}

impl CompileSession {
    pub fn new(triple: Arc<SimilarityTriple>) -> Result<Arc<Self>, TreeError> {
        triple.transversal_coherent()?;
        if triple.index() < 2 {
            return Err(SimilarityError::Unsupported(format!(
                "index {} is below 2; the tree needs at least two letters",
                triple.index()
            ))
            .into());
        }
        let d = triple.group();
        let inverses = triple.transversal().iter().map(|x| d.inverse(x)).collect();
        Ok(Arc::new(CompileSession {
            id: fresh_id(),
            triple,
            inverses,
            memo: Mutex::new(HashMap::new()),
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.triple.index()
    }

    pub fn triple(&self) -> &SimilarityTriple {
        &self.triple
    }

    /// Number of distinct elements unfolded so far.
    pub fn memo_len(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }

    pub fn compile(self: &Arc<Self>, g: &WreathElement) -> Result<TreeAutomorphism, TreeError> {
        self.triple.group().check(g).map_err(SimilarityError::from)?;
        self.try_unfold(g)?;
        Ok(TreeAutomorphism::compiled(self.clone(), Arc::new(g.clone())))
    }

    fn try_unfold(&self, g: &WreathElement) -> Result<Unfolded, TreeError> {
        if let Some(u) = self.memo.lock().expect("memo lock").get(g) {
            return Ok(u.clone());
        }
        let t = &self.triple;
        let d = t.group();
        let m = self.degree();
        let mut images = Vec::with_capacity(m);
        let mut sections = Vec::with_capacity(m);
        for (i, x) in t.transversal().iter().enumerate() {
            let xg = d.mul(x, g);
            let j = t.coset_index(&xg)? - 1;
            let h = d.mul(&xg, &self.inverses[j]);
            let s = t.apply_f(&h).map_err(|e| {
                SimilarityError::IncoherentTransversal(format!(
                    "x_{}·g·x_{}^-1 = {} is not in H ({})",
                    i + 1,
                    j + 1,
                    format_element(d, &h),
                    e
                ))
            })?;
            images.push(j);
            sections.push(Arc::new(s));
        }
        let u = Arc::new((Permutation::from_zero_based(images), sections));
        self.memo
            .lock()
            .expect("memo lock")
            .entry(g.clone())
            .or_insert(u.clone());
        Ok(u)
    }

    /// Root permutation and section elements; coherence was checked when the
    /// session was built, so failure here means the triple is invalid.
    pub(crate) fn unfold(&self, g: &WreathElement) -> (Permutation, Vec<Arc<WreathElement>>) {
        let u = self
            .try_unfold(g)
            .unwrap_or_else(|e| panic!("invalid similarity triple: {}", e));
        (u.0.clone(), u.1.clone())
    }
}

/// `g^φ` in a fresh session.
pub fn compile(t: &SimilarityTriple, g: &WreathElement) -> Result<TreeAutomorphism, TreeError> {
    CompileSession::new(Arc::new(t.clone()))?.compile(g)
}
