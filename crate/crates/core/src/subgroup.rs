//! Elements and finitely generated subgroups of `G = Z^m x F_n`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::freewords::{fold_weighted, StallingsGraph, Word};
use crate::intlat::{is_direct_summand, Lattice};

/// The group `Z^m x F_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    pub m: usize,
    pub n: usize,
}

impl Ambient {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            t: vec![BigInt::zero(); self.m],
            w: Word::identity(),
        }
    }

    /// `z_k` with trivial abelian part.
    pub fn generator(&self, k: u32) -> GroupElement {
        GroupElement {
            t: vec![BigInt::zero(); self.m],
            w: Word::generator(k),
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.t.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "element has abelian part of length {}, ambient has m = {}",
                g.t.len(),
                self.m
            )));
        }
        g.w.check_rank(self.n)
    }

    pub fn check_same(&self, other: &Ambient) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AmbientMismatch {
                expected_m: self.m,
                expected_n: self.n,
                got_m: other.m,
                got_n: other.n,
            })
        }
    }
}

/// `t^t w` in normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub t: Vec<BigInt>,
    pub w: Word,
}

impl GroupElement {
    pub fn new(t: Vec<BigInt>, w: Word) -> Self {
        Self { t, w }
    }

    pub fn abelian(t: Vec<BigInt>) -> Self {
        Self {
            t,
            w: Word::identity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.w.is_identity() && self.t.iter().all(Zero::is_zero)
    }

    /// `(t^a u)(t^b v) = t^{a+b} uv`.
    pub fn try_mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.t.len() != other.t.len() {
            return Err(Error::DimensionMismatch(format!(
                "abelian parts of length {} and {}",
                self.t.len(),
                other.t.len()
            )));
        }
        Ok(GroupElement {
            t: self.t.iter().zip(&other.t).map(|(a, b)| a + b).collect(),
            w: self.w.multiply(&other.w),
        })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            t: self.t.iter().map(|a| -a).collect(),
            w: self.w.inverse(),
        }
    }

    /// The projection `t^a u -> u`.
    pub fn project(&self) -> &Word {
        &self.w
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.t.iter().map(|x| x.to_string()).collect();
        write!(f, "t^({}) [{}]", t.join(","), self.w)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Basis `{t^{a_i} u_i} ∪ {t^{b_j}}` of a finitely generated subgroup `H`:
/// the `u_i` freely generate the projection of `H`, the `b_j` are the HNF rows
/// of `L_H = H ∩ Z^m`.
#[derive(Clone)]
pub struct SubgroupBasis {
    ambient: Ambient,
    free: Vec<GroupElement>,
    abelian: Lattice,
    graph: StallingsGraph,
}

impl fmt::Debug for SubgroupBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupBasis")
            .field("free", &self.free)
            .field("abelian", &self.abelian)
            .finish()
    }
}

impl SubgroupBasis {
    pub fn trivial(ambient: Ambient) -> Self {
        Self::from_generators(ambient, &[]).expect("empty generating set is valid")
    }

    pub fn whole(ambient: Ambient) -> Self {
        let mut gens: Vec<GroupElement> = (1..=ambient.n as u32)
            .map(|k| ambient.generator(k))
            .collect();
        gens.extend((0..ambient.m).map(|i| {
            let mut t = vec![BigInt::zero(); ambient.m];
            t[i] = 1.into();
            GroupElement::abelian(t)
        }));
        Self::from_generators(ambient, &gens).expect("standard generators are valid")
    }

    /// Computes a basis of `⟨generators⟩` by folding the flower of the
    /// generators with their abelian parts as edge decorations.
    pub fn from_generators(ambient: Ambient, generators: &[GroupElement]) -> Result<Self> {
        for g in generators {
            ambient.check(g)?;
        }
        let zero = vec![BigInt::zero(); ambient.m];
        let petals: Vec<(Word, Vec<BigInt>)> = generators
            .iter()
            .map(|g| (g.w.clone(), g.t.clone()))
            .collect();
        let folded = fold_weighted(&petals, &zero);
        let abelian = Lattice::from_generators(ambient.m, folded.relations)?;
        let free = folded
            .graph
            .basis()
            .iter()
            .zip(&folded.basis_weights)
            .map(|(u, a)| Ok(GroupElement::new(abelian.reduce(a)?, u.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ambient,
            free,
            abelian,
            graph: folded.graph,
        })
    }

    /// Builds a basis from a free part and an abelian lattice, normalizing it
    /// through [`SubgroupBasis::from_generators`].
    pub fn from_parts(ambient: Ambient, free: &[GroupElement], abelian: &Lattice) -> Result<Self> {
        if abelian.dim() != ambient.m {
            return Err(Error::DimensionMismatch(format!(
                "abelian lattice in Z^{}, ambient has m = {}",
                abelian.dim(),
                ambient.m
            )));
        }
        let mut gens = free.to_vec();
        gens.extend(
            abelian
                .basis_rows()
                .iter()
                .cloned()
                .map(GroupElement::abelian),
        );
        Self::from_generators(ambient, &gens)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// The elements `t^{a_i} u_i`.
    pub fn free_part(&self) -> &[GroupElement] {
        &self.free
    }

    /// `L_H`.
    pub fn abelian_part(&self) -> &Lattice {
        &self.abelian
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }

    /// All basis elements, free part first.
    pub fn elements(&self) -> Vec<GroupElement> {
        let mut out = self.free.clone();
        out.extend(
            self.abelian
                .basis_rows()
                .iter()
                .cloned()
                .map(GroupElement::abelian),
        );
        out
    }

    /// Number of basis elements.
    pub fn rank(&self) -> usize {
        self.free.len() + self.abelian.rank()
    }

    /// `max(rank - 1, 0)`.
    pub fn reduced_rank(&self) -> usize {
        self.rank().saturating_sub(1)
    }

    pub fn member(&self, g: &GroupElement) -> Result<bool> {
        self.ambient.check(g)?;
        let Some(expr) = self.graph.member(&g.w) else {
            return Ok(false);
        };
        let mut defect = g.t.clone();
        for &l in expr.letters() {
            let a = &self.free[l.unsigned_abs() as usize - 1].t;
            for (d, x) in defect.iter_mut().zip(a) {
                if l > 0 {
                    *d -= x;
                } else {
                    *d += x;
                }
            }
        }
        self.abelian.contains(&defect)
    }

    /// Whether every basis element of `other` lies in `self`.
    pub fn contains_subgroup(&self, other: &SubgroupBasis) -> Result<bool> {
        self.ambient.check_same(&other.ambient)?;
        for g in other.elements() {
            if !self.member(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Equality of subgroups, by mutual membership of the bases.
pub fn subgroup_equal(h: &SubgroupBasis, k: &SubgroupBasis) -> Result<bool> {
    Ok(h.contains_subgroup(k)? && k.contains_subgroup(h)?)
}

/// Whether `L_H` is a direct summand of `L_K`.
pub fn abelian_summand_test(h: &SubgroupBasis, k: &SubgroupBasis) -> Result<bool> {
    h.ambient.check_same(&k.ambient)?;
    is_direct_summand(&h.abelian, &k.abelian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlat::ivec;

    fn el(t: &[i64], w: &str) -> GroupElement {
        GroupElement::new(ivec(t), w.parse().unwrap())
    }

    #[test]
    fn element_operations() {
        assert_eq!(
            el(&[1, 0], "z1").try_mul(&el(&[0, 1], "z1^-1")).unwrap(),
            el(&[1, 1], "")
        );
        assert_eq!(el(&[0, 1], "z2 z2").inverse(), el(&[0, -1], "z2^-1 z2^-1"));
        assert_eq!(
            el(&[0, 1], "z2 z2").project(),
            &"z2^2".parse::<Word>().unwrap()
        );
        assert!(el(&[1], "").try_mul(&el(&[1, 2], "")).is_err());
    }

    #[test]
    fn basis_examples() {
        let amb = Ambient::new(2, 1);
        let h =
            SubgroupBasis::from_generators(amb, &[el(&[1, 0], "z1"), el(&[0, 1], "z1")]).unwrap();
        assert_eq!(h.free_part().len(), 1);
        assert_eq!(
            h.abelian_part(),
            &Lattice::from_generators(2, vec![ivec(&[1, -1])]).unwrap()
        );
        assert!(h.member(&el(&[1, 0], "z1")).unwrap());
        assert!(h.member(&el(&[0, 1], "z1")).unwrap());
        assert!(!h.member(&el(&[0, 0], "z1")).unwrap());

        let pure = SubgroupBasis::from_generators(Ambient::new(2, 2), &[el(&[0, 1], "")]).unwrap();
        assert!(pure.free_part().is_empty());
        assert_eq!(
            pure.abelian_part(),
            &Lattice::from_generators(2, vec![ivec(&[0, 1])]).unwrap()
        );
    }

    #[test]
    fn witnesses_respect_products() {
        // t z1 z2 and t z2 give z1 with trivial abelian part
        let amb = Ambient::new(1, 2);
        let h = SubgroupBasis::from_generators(amb, &[el(&[1], "z1 z2"), el(&[1], "z2")]).unwrap();
        assert!(h.member(&el(&[0], "z1")).unwrap());
        assert!(!h.member(&el(&[1], "z1")).unwrap());
        assert!(h.abelian_part().is_zero());
    }

    #[test]
    fn equality_and_summands() {
        let amb = Ambient::new(2, 2);
        let a = SubgroupBasis::from_generators(amb, &[el(&[0, 1], "z2 z2")]).unwrap();
        let b = SubgroupBasis::from_generators(amb, &[el(&[0, 2], "z2 z2")]).unwrap();
        assert!(!subgroup_equal(&a, &b).unwrap());
        let c =
            SubgroupBasis::from_generators(amb, &[el(&[0, 1], "z1"), el(&[1, 1], "z2")]).unwrap();
        let d =
            SubgroupBasis::from_generators(amb, &[el(&[1, 1], "z2"), el(&[0, 1], "z1")]).unwrap();
        assert!(subgroup_equal(&c, &d).unwrap());
        let again = SubgroupBasis::from_generators(amb, &c.elements()).unwrap();
        assert!(subgroup_equal(&c, &again).unwrap());

        let whole = SubgroupBasis::whole(amb);
        let e1 = SubgroupBasis::from_generators(amb, &[el(&[1, 0], "")]).unwrap();
        let e2 = SubgroupBasis::from_generators(amb, &[el(&[0, 2], "")]).unwrap();
        assert!(abelian_summand_test(&e1, &whole).unwrap());
        assert!(!abelian_summand_test(&e2, &whole).unwrap());
        assert!(abelian_summand_test(&whole, &whole).unwrap());
        assert_eq!(abelian_summand_test(&whole, &e1), Err(Error::NotSublattice));
    }

    #[test]
    fn identity_is_member() {
        let amb = Ambient::new(2, 3);
        assert!(SubgroupBasis::trivial(amb).member(&amb.identity()).unwrap());
        assert!(!SubgroupBasis::trivial(amb)
            .member(&amb.generator(1))
            .unwrap());
        assert!(SubgroupBasis::whole(amb)
            .member(&el(&[3, -1], "z3 z1^-1"))
            .unwrap());
    }

    #[test]
    fn ambient_mismatch() {
        let h = SubgroupBasis::trivial(Ambient::new(1, 2));
        assert!(h.member(&el(&[0, 0], "")).is_err());
        assert!(h.member(&el(&[0], "z3")).is_err());
    }
}
