//! Bounded brute force: element enumeration, fixed-element search and product
//! closure checks.

use std::collections::HashSet;

use num_bigint::BigInt;

use crate::error::Result;
use crate::freewords::Word;
use crate::morphism::Morphism;
use crate::subgroup::{Ambient, GroupElement, SubgroupBasis};

/// Search box: words of length `<= word_len_max`, coordinates with absolute
/// value `<= coord_abs_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub word_len_max: usize,
    pub coord_abs_max: u64,
}

impl Bounds {
    pub fn new(word_len_max: usize, coord_abs_max: u64) -> Self {
        Self {
            word_len_max,
            coord_abs_max,
        }
    }
}

/// Reduced words of length `<= max_len` in length-lexicographic order, letters
/// ordered `z1 < z1^-1 < z2 < ...`.
pub fn words_up_to(n: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<i32> = (1..=n as i32).flat_map(|k| [k, -k]).collect();
    let mut out = vec![Word::identity()];
    let mut layer = vec![Vec::<i32>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut x = w.clone();
                x.push(l);
                next.push(x);
            }
        }
        out.extend(next.iter().map(|x| Word::reduce(x.iter().copied())));
        layer = next;
    }
    out
}

/// All vectors of `Z^m` in the box, lexicographically.
pub fn vectors_in_box(m: usize, c: u64) -> Vec<Vec<BigInt>> {
    let c = c as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v: Vec<BigInt>| {
                (-c..=c).map(move |x| {
                    let mut v = v.clone();
                    v.push(x.into());
                    v
                })
            })
            .collect();
    }
    out
}

/// Every `t^a w` in the box exactly once: words outer, vectors inner.
pub fn enumerate(ambient: Ambient, bounds: Bounds) -> impl Iterator<Item = GroupElement> {
    let vectors = vectors_in_box(ambient.m, bounds.coord_abs_max);
    words_up_to(ambient.n, bounds.word_len_max)
        .into_iter()
        .flat_map(move |w| {
            vectors
                .clone()
                .into_iter()
                .map(move |t| GroupElement::new(t, w.clone()))
        })
}

/// Enumerated elements fixed by every morphism. The word condition is tested
/// first, so vectors are only scanned above fixed words.
pub fn brute_fixed(
    ambient: Ambient,
    morphisms: &[Morphism],
    bounds: Bounds,
) -> Result<Vec<GroupElement>> {
    for psi in morphisms {
        ambient.check_same(&psi.ambient())?;
    }
    let vectors = vectors_in_box(ambient.m, bounds.coord_abs_max);
    let mut out = Vec::new();
    for w in words_up_to(ambient.n, bounds.word_len_max) {
        if morphisms.iter().any(|psi| psi.phi().apply(&w) != w) {
            continue;
        }
        for t in &vectors {
            let g = GroupElement::new(t.clone(), w.clone());
            let mut fixed = true;
            for psi in morphisms {
                if psi.apply(&g)? != g {
                    fixed = false;
                    break;
                }
            }
            if fixed {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// All products of at most `depth` factors from `gens` and their inverses.
pub fn products<T, F>(
    gens: &[T],
    identity: T,
    inverse: impl Fn(&T) -> T,
    mul: F,
    depth: usize,
) -> Vec<T>
where
    T: Clone + Eq + std::hash::Hash,
    F: Fn(&T, &T) -> T,
{
    let mut letters: Vec<T> = gens.to_vec();
    letters.extend(gens.iter().map(&inverse));
    let mut seen: HashSet<T> = HashSet::from([identity.clone()]);
    let mut out = vec![identity.clone()];
    let mut frontier = vec![identity];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for l in &letters {
                let y = mul(x, l);
                if seen.insert(y.clone()) {
                    out.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Products of at most `depth` words from `gens`.
pub fn word_products(gens: &[Word], depth: usize) -> Vec<Word> {
    products(gens, Word::identity(), Word::inverse, Word::multiply, depth)
}

/// Every product of `<= depth` generators lies in `h`, and every basis element
/// of `h` is one of those products.
pub fn closure_check(h: &SubgroupBasis, gens: &[GroupElement], depth: usize) -> Result<bool> {
    let ambient = h.ambient();
    for g in gens {
        ambient.check(g)?;
    }
    let prods = products(
        gens,
        ambient.identity(),
        GroupElement::inverse,
        |a, b| a.try_mul(b).expect("same ambient"),
        depth,
    );
    for p in &prods {
        if !h.member(p)? {
            return Ok(false);
        }
    }
    let set: HashSet<&GroupElement> = prods.iter().collect();
    Ok(h.elements().iter().all(|b| set.contains(b)))
}
