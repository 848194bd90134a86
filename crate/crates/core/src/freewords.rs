//! Reduced words in the free group `F_n` and Stallings graphs of its finitely
//! generated subgroups.
//!
//! Letters are encoded as nonzero `i32`: `k` is `z_k`, `-k` is `z_k^{-1}`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::intlat::Index;

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// The generator `z_k` (1-based).
    pub fn generator(k: u32) -> Self {
        Word(vec![k as i32])
    }

    /// Free reduction of an arbitrary letter sequence. Zero letters are ignored.
    pub fn reduce(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                continue;
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Reduces `letters`, rejecting any letter outside `z_1..z_n`.
    pub fn checked(letters: &[i32], n: usize) -> Result<Self> {
        let w = Self::reduce(letters.iter().copied());
        w.check_rank(n)?;
        Ok(w)
    }

    pub fn check_rank(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|l| l.unsigned_abs() as usize > n) {
            Some(l) => Err(Error::LetterOutOfRange {
                letter: l.unsigned_abs(),
                rank: n,
            }),
            None => Ok(()),
        }
    }

    /// Parses `"z1 z2^-1 z1"`; tokens may carry any integer exponent.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let w: Word = s.parse()?;
        w.check_rank(n)?;
        Ok(w)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn multiply(&self, other: &Word) -> Word {
        Word::reduce(self.0.iter().chain(&other.0).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.0);
        }
        Word::reduce(letters)
    }

    /// `c^{-1} w c`, the right conjugate.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.inverse().multiply(self).multiply(c)
    }

    /// Exponent sums of the letters `z_1..z_n`.
    pub fn abelianize(&self, n: usize) -> Vec<BigInt> {
        let mut v = vec![0i64; n];
        for &l in &self.0 {
            let k = l.unsigned_abs() as usize;
            debug_assert!(k <= n, "letter z{k} outside F_{n}");
            if let Some(slot) = v.get_mut(k - 1) {
                *slot += l.signum() as i64;
            }
        }
        v.into_iter().map(BigInt::from).collect()
    }

    /// Replaces each `z_k` by `images[k - 1]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Vec::new();
        for &l in &self.0 {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                out.extend_from_slice(&img.0);
            } else {
                out.extend(img.0.iter().rev().map(|x| -x));
            }
        }
        Word::reduce(out)
    }

    /// `(root, alpha)` with `w = root^alpha` and `alpha` maximal.
    pub fn root(&self) -> Result<(Word, u64)> {
        if self.is_empty() {
            return Err(Error::IdentityRoot);
        }
        let letters = &self.0;
        let mut lo = 0;
        let mut hi = letters.len();
        while hi - lo >= 2 && letters[lo] == -letters[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        let conj = Word(letters[..lo].to_vec());
        let core = &letters[lo..hi];
        let len = core.len();
        let period = (1..=len)
            .filter(|p| len.is_multiple_of(*p))
            .find(|&p| (0..len).all(|i| core[i] == core[i % p]))
            .unwrap_or(len);
        let root = Word(core[..period].to_vec());
        let root = conj.multiply(&root).multiply(&conj.inverse());
        Ok((root, (len / period) as u64))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l > 0 {
                write!(f, "z{l}")?;
            } else {
                write!(f, "z{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || Error::Parse(format!("bad word token {tok:?}"));
            let body = tok.strip_prefix('z').ok_or_else(bad)?;
            let (gen, exp) = match body.split_once('^') {
                Some((g, e)) => (g, e.parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let gen: i32 = gen.parse().map_err(|_| bad())?;
            if gen <= 0 {
                return Err(bad());
            }
            let l = if exp < 0 { -gen } else { gen };
            for _ in 0..exp.unsigned_abs() {
                letters.push(l);
            }
        }
        Ok(Word::reduce(letters))
    }
}

/// Abelian decoration carried by every edge during folding. The unit type is
/// the plain (undecorated) case.
pub trait EdgeWeight: Clone {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl EdgeWeight for () {
    fn add(&self, _: &Self) -> Self {}
    fn sub(&self, _: &Self) -> Self {}
    fn neg(&self) -> Self {}
    fn is_zero(&self) -> bool {
        true
    }
}

impl EdgeWeight for Vec<BigInt> {
    fn add(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a + b).collect()
    }
    fn sub(&self, other: &Self) -> Self {
        self.iter().zip(other).map(|(a, b)| a - b).collect()
    }
    fn neg(&self) -> Self {
        self.iter().map(|a| -a).collect()
    }
    fn is_zero(&self) -> bool {
        self.iter().all(Zero::is_zero)
    }
}

#[derive(Clone)]
struct RawEdge<W> {
    src: usize,
    dst: usize,
    gen: u32,
    weight: W,
}

impl<W: EdgeWeight> RawEdge<W> {
    /// Target and weight when leaving `from` along signed letter `s`.
    fn step(&self, from: usize, s: i32) -> Option<(usize, W)> {
        if s > 0 && self.src == from && s as u32 == self.gen {
            Some((self.dst, self.weight.clone()))
        } else if s < 0 && self.dst == from && (-s) as u32 == self.gen {
            Some((self.src, self.weight.neg()))
        } else {
            None
        }
    }
}

/// Labelled graph before folding. Vertex 0 is the basepoint.
struct RawGraph<W> {
    vertices: usize,
    edges: Vec<RawEdge<W>>,
}

impl<W: EdgeWeight> RawGraph<W> {
    fn new() -> Self {
        Self {
            vertices: 1,
            edges: Vec::new(),
        }
    }

    fn add_vertex(&mut self) -> usize {
        self.vertices += 1;
        self.vertices - 1
    }

    /// Attaches a closed petal at the basepoint spelling `word`, its first edge
    /// carrying `weight`.
    fn add_petal(&mut self, word: &Word, weight: &W, zero: &W) {
        let letters = word.letters();
        let mut cur = 0;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                0
            } else {
                self.add_vertex()
            };
            let w = if i == 0 { weight.clone() } else { zero.clone() };
            let edge = if l > 0 {
                RawEdge {
                    src: cur,
                    dst: next,
                    gen: l as u32,
                    weight: w,
                }
            } else {
                RawEdge {
                    src: next,
                    dst: cur,
                    gen: (-l) as u32,
                    weight: w.neg(),
                }
            };
            self.edges.push(edge);
            cur = next;
        }
    }

    fn find_collision(&self) -> Option<(usize, usize, usize, i32)> {
        let mut seen: HashMap<(usize, i32), usize> = HashMap::new();
        for (idx, e) in self.edges.iter().enumerate() {
            for (v, s) in [(e.src, e.gen as i32), (e.dst, -(e.gen as i32))] {
                if let Some(&other) = seen.get(&(v, s)) {
                    return Some((other, idx, v, s));
                }
                seen.insert((v, s), idx);
            }
        }
        None
    }

    /// Shifts the potential of vertex `x` by `s`: loop labels are unchanged.
    fn shift(&mut self, x: usize, s: &W) {
        for e in &mut self.edges {
            if e.src == x && e.dst == x {
                continue;
            }
            if e.dst == x {
                e.weight = e.weight.add(s);
            }
            if e.src == x {
                e.weight = e.weight.sub(s);
            }
        }
    }

    fn merge_vertex(&mut self, from: usize, into: usize) {
        for e in &mut self.edges {
            if e.src == from {
                e.src = into;
            }
            if e.dst == from {
                e.dst = into;
            }
        }
    }

    /// Stallings folding. Returns the labels of the closed loops with trivial
    /// free part that each identification of parallel edges creates.
    fn fold(&mut self) -> Vec<W> {
        let mut relations = Vec::new();
        while let Some((e1, e2, u, s)) = self.find_collision() {
            let (t1, a) = self.edges[e1].step(u, s).expect("collision edge");
            let (t2, b) = self.edges[e2].step(u, s).expect("collision edge");
            if t1 == t2 {
                let rel = a.sub(&b);
                if !rel.is_zero() {
                    relations.push(rel);
                }
            } else {
                // shift the target that is not `u` so both edges carry the same
                // weight, then identify it with the other target
                let (moved, kept, shift) = if t2 != u {
                    (t2, t1, a.sub(&b))
                } else {
                    (t1, t2, b.sub(&a))
                };
                self.shift(moved, &shift);
                // keep the basepoint's id
                let (from, into) = if moved == 0 { (kept, 0) } else { (moved, kept) };
                self.merge_vertex(from, into);
            }
            self.edges.swap_remove(e2);
        }
        relations
    }

    fn prune(&mut self) {
        loop {
            let mut degree = vec![0usize; self.vertices];
            for e in &self.edges {
                degree[e.src] += 1;
                degree[e.dst] += 1;
            }
            let before = self.edges.len();
            self.edges.retain(|e| {
                !((e.src != 0 && degree[e.src] == 1) || (e.dst != 0 && degree[e.dst] == 1))
            });
            if self.edges.len() == before {
                return;
            }
        }
    }

    /// Canonical renumbering (breadth-first from the basepoint, letters in the
    /// order z1 < z1^-1 < z2 < ...), spanning tree and free basis. Also returns
    /// the weight of each basis loop.
    fn canonicalize(&self, zero: &W) -> (StallingsGraph, Vec<W>) {
        // vertex -> (generator, inverted) -> (target, edge index)
        type Star = BTreeMap<(u32, bool), (usize, usize)>;
        let mut adj: HashMap<usize, Star> = HashMap::new();
        for (idx, e) in self.edges.iter().enumerate() {
            adj.entry(e.src)
                .or_default()
                .insert((e.gen, false), (e.dst, idx));
            adj.entry(e.dst)
                .or_default()
                .insert((e.gen, true), (e.src, idx));
        }
        let mut order = vec![0usize];
        let mut new_id: HashMap<usize, usize> = HashMap::from([(0, 0)]);
        let mut parent: Vec<Option<(usize, i32)>> = vec![None];
        let mut tree_edges: HashSet<usize> = HashSet::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let Some(nbrs) = adj.get(&v) else { continue };
            for (&(gen, inv), &(t, idx)) in nbrs {
                if new_id.contains_key(&t) {
                    continue;
                }
                let s = if inv { -(gen as i32) } else { gen as i32 };
                new_id.insert(t, order.len());
                parent.push(Some((new_id[&v], s)));
                order.push(t);
                tree_edges.insert(idx);
                queue.push_back(t);
            }
        }
        let n_vertices = order.len();
        let mut out_adj: Vec<Vec<(i32, usize)>> = vec![Vec::new(); n_vertices];
        for (nv, old) in order.iter().enumerate() {
            if let Some(nbrs) = adj.get(old) {
                for (&(gen, inv), &(t, _)) in nbrs {
                    let s = if inv { -(gen as i32) } else { gen as i32 };
                    out_adj[nv].push((s, new_id[&t]));
                }
            }
        }
        // tree words and potentials
        let mut tree_words = vec![Word::identity(); n_vertices];
        let mut potential: Vec<W> = vec![zero.clone(); n_vertices];
        for nv in 1..n_vertices {
            let (p, s) = parent[nv].expect("non-root vertex has a parent");
            tree_words[nv] = Word::reduce(tree_words[p].0.iter().copied().chain([s]));
            let old_p = order[p];
            let (_, idx) = adj[&old_p][&(s.unsigned_abs(), s < 0)];
            let (_, w) = self.edges[idx].step(old_p, s).expect("tree edge");
            potential[nv] = potential[p].add(&w);
        }
        let mut basis_edges = Vec::new();
        let mut basis = Vec::new();
        let mut weights = Vec::new();
        let mut basis_index = HashMap::new();
        for (nv, old) in order.iter().enumerate() {
            let Some(nbrs) = adj.get(old) else { continue };
            for (&(gen, inv), &(t, idx)) in nbrs {
                if inv || tree_edges.contains(&idx) {
                    continue;
                }
                let nt = new_id[&t];
                basis_index.insert((nv, gen), basis.len());
                basis_edges.push((nv, gen, nt));
                basis.push(
                    tree_words[nv]
                        .multiply(&Word::generator(gen))
                        .multiply(&tree_words[nt].inverse()),
                );
                weights.push(
                    potential[nv]
                        .add(&self.edges[idx].weight)
                        .sub(&potential[nt]),
                );
            }
        }
        let graph = StallingsGraph {
            adj: out_adj,
            tree_words,
            basis,
            basis_index,
        };
        (graph, weights)
    }
}

/// Output of a decorated folding.
pub(crate) struct Folded<W> {
    pub graph: StallingsGraph,
    /// Weight accumulated along each basis loop of `graph`.
    pub basis_weights: Vec<W>,
    /// Labels of closed loops with trivial free part.
    pub relations: Vec<W>,
}

/// Folds the flower of `(word, weight)` petals. Identity words are skipped
/// (their weight is a relation).
pub(crate) fn fold_weighted<W: EdgeWeight>(petals: &[(Word, W)], zero: &W) -> Folded<W> {
    let mut raw = RawGraph::new();
    let mut relations = Vec::new();
    for (word, weight) in petals {
        if word.is_identity() {
            if !weight.is_zero() {
                relations.push(weight.clone());
            }
        } else {
            raw.add_petal(word, weight, zero);
        }
    }
    relations.extend(raw.fold());
    raw.prune();
    let (graph, basis_weights) = raw.canonicalize(zero);
    Folded {
        graph,
        basis_weights,
        relations,
    }
}

/// Folded core graph of a finitely generated subgroup of `F_n`, in canonical
/// breadth-first numbering with its spanning-tree free basis.
#[derive(Clone)]
pub struct StallingsGraph {
    adj: Vec<Vec<(i32, usize)>>,
    tree_words: Vec<Word>,
    basis: Vec<Word>,
    basis_index: HashMap<(usize, u32), usize>,
}

impl PartialEq for StallingsGraph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for StallingsGraph {}

impl fmt::Debug for StallingsGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StallingsGraph")
            .field("vertices", &self.adj.len())
            .field("basis", &self.basis)
            .finish()
    }
}

impl StallingsGraph {
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|a| a.iter().filter(|(s, _)| *s > 0).count())
            .sum()
    }

    /// Rank of the subgroup, `E - V + 1`.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Free basis read off the breadth-first spanning tree.
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    /// Outgoing `(signed letter, target)` pairs of vertex `v`.
    pub fn neighbours(&self, v: usize) -> &[(i32, usize)] {
        &self.adj[v]
    }

    fn step(&self, v: usize, s: i32) -> Option<usize> {
        self.adj[v].iter().find(|(l, _)| *l == s).map(|&(_, t)| t)
    }

    /// Reads `w` from the basepoint. When `w` is in the subgroup, returns it as
    /// a word over the basis, letter `i` standing for `basis()[i - 1]`.
    pub fn member(&self, w: &Word) -> Option<Word> {
        let mut cur = 0;
        let mut expr = Vec::new();
        for &s in w.letters() {
            let next = self.step(cur, s)?;
            let key = if s > 0 {
                (cur, s as u32)
            } else {
                (next, (-s) as u32)
            };
            if let Some(&i) = self.basis_index.get(&key) {
                let letter = i as i32 + 1;
                expr.push(if s > 0 { letter } else { -letter });
            }
            cur = next;
        }
        (cur == 0).then(|| Word::reduce(expr))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.member(w).is_some()
    }

    pub fn tree_word(&self, v: usize) -> &Word {
        &self.tree_words[v]
    }
}

/// Stallings graph of `⟨generators⟩`.
pub fn stallings(generators: &[Word]) -> StallingsGraph {
    let petals: Vec<(Word, ())> = generators.iter().map(|w| (w.clone(), ())).collect();
    fold_weighted(&petals, &()).graph
}

/// Graph of `H ∩ K`: core of the basepoint component of the product graph.
pub fn pullback(g1: &StallingsGraph, g2: &StallingsGraph) -> StallingsGraph {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut raw: RawGraph<()> = RawGraph::new();
    while let Some((a, b)) = queue.pop_front() {
        let here = ids[&(a, b)];
        for &(s, ta) in &g1.adj[a] {
            if s < 0 {
                continue;
            }
            let Some(tb) = g2.step(b, s) else { continue };
            let there = match ids.get(&(ta, tb)) {
                Some(&id) => id,
                None => {
                    let id = raw.add_vertex();
                    ids.insert((ta, tb), id);
                    queue.push_back((ta, tb));
                    id
                }
            };
            raw.edges.push(RawEdge {
                src: here,
                dst: there,
                gen: s as u32,
                weight: (),
            });
        }
        // vertices reached only through inverse letters
        for &(s, ta) in &g1.adj[a] {
            if s > 0 {
                continue;
            }
            let Some(tb) = g2.step(b, s) else { continue };
            if let std::collections::hash_map::Entry::Vacant(e) = ids.entry((ta, tb)) {
                let id = raw.add_vertex();
                e.insert(id);
                queue.push_back((ta, tb));
            }
        }
    }
    raw.prune();
    raw.canonicalize(&()).0
}

/// Index of the subgroup in `F_n`: the vertex count when every vertex carries
/// all `2n` labels, infinite otherwise.
pub fn graph_index(g: &StallingsGraph, n: usize) -> Index {
    let complete = g
        .adj
        .iter()
        .all(|a| a.len() == 2 * n && a.iter().all(|(s, _)| s.unsigned_abs() as usize <= n));
    if complete {
        Index::Finite(g.vertex_count().into())
    } else {
        Index::Infinite
    }
}

/// Free basis of a finite-index subgroup of the free group on `ambient_basis`,
/// given by a membership predicate on (substituted) words.
///
/// Cosets are discovered from the trivial one by right multiplication with the
/// ambient letters; the discovery edges form a spanning tree and every other
/// edge of the coset graph gives one basis element. `index_bound` caps the
/// number of cosets.
pub fn schreier_basis(
    ambient_basis: &[Word],
    member: impl Fn(&Word) -> bool,
    index_bound: u64,
) -> Result<Vec<Word>> {
    let p = ambient_basis.len();
    let in_subgroup = |abstract_word: &Word| member(&abstract_word.substitute(ambient_basis));
    let mut reps: Vec<Word> = vec![Word::identity()];
    let mut tree: HashSet<(usize, usize)> = HashSet::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        for j in 1..=p {
            let candidate = reps[i].multiply(&Word::generator(j as u32));
            let target = reps
                .iter()
                .position(|y| in_subgroup(&candidate.multiply(&y.inverse())));
            let k = match target {
                Some(k) => k,
                None => {
                    if reps.len() as u64 >= index_bound {
                        return Err(Error::IndexBoundExceeded(index_bound));
                    }
                    reps.push(candidate);
                    tree.insert((i, j));
                    reps.len() - 1
                }
            };
            edges.push((i, j, k));
        }
        i += 1;
    }
    let basis = edges
        .into_iter()
        .filter(|&(i, j, _)| !tree.contains(&(i, j)))
        .map(|(i, j, k)| {
            reps[i]
                .multiply(&Word::generator(j as u32))
                .multiply(&reps[k].inverse())
                .substitute(ambient_basis)
        })
        .collect();
    Ok(basis)
}
