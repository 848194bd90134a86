//! Endomorphisms `Ψ_{φ,Q,P}: t^a u -> t^{aQ + u^{ab}P} (uφ)` of `Z^m x F_n`.
//!
//! Maps act on the right: `compose(Ψ, Ψ')` is "first `Ψ`, then `Ψ'`".

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::freewords::Word;
use crate::intlat::{matrix_order, IntMatrix, Order};
use crate::subgroup::{Ambient, GroupElement};

/// An endomorphism of `F_n` given by generator images, optionally with the
/// images of a verified inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMap {
    images: Vec<Word>,
    inverse: Option<Vec<Word>>,
}

fn compose_images(first: &[Word], second: &[Word]) -> Vec<Word> {
    first.iter().map(|w| w.substitute(second)).collect()
}

fn is_identity_images(images: &[Word]) -> bool {
    images
        .iter()
        .enumerate()
        .all(|(i, w)| *w == Word::generator(i as u32 + 1))
}

impl FreeMap {
    /// Validates letters against `n = images.len()` and, when given, that
    /// `inverse` is a two-sided inverse.
    pub fn new(images: Vec<Word>, inverse: Option<Vec<Word>>) -> Result<Self> {
        let n = images.len();
        for w in &images {
            w.check_rank(n)?;
        }
        if let Some(inv) = &inverse {
            if inv.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{} inverse images for rank {n}",
                    inv.len()
                )));
            }
            for w in inv {
                w.check_rank(n)?;
            }
            if !is_identity_images(&compose_images(&images, inv))
                || !is_identity_images(&compose_images(inv, &images))
            {
                return Err(Error::InvalidInverse);
            }
        }
        Ok(Self { images, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let ids: Vec<Word> = (1..=n as u32).map(Word::generator).collect();
        Self {
            images: ids.clone(),
            inverse: Some(ids),
        }
    }

    /// `z_i -> z_{perm[i]}^{signs[i]}` (0-based `perm`, signs `±1`).
    pub fn signed_permutation(perm: &[usize], signs: &[i32]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        if signs.len() != n {
            return Err(Error::DimensionMismatch(
                "signs and permutation lengths differ".into(),
            ));
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::Inconsistent(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::Inconsistent("signs must be +1 or -1".into()));
        }
        let mut images = vec![Word::identity(); n];
        let mut inverse = vec![Word::identity(); n];
        for i in 0..n {
            let target = perm[i] as i32 + 1;
            images[i] = Word::reduce([signs[i] * target]);
            inverse[perm[i]] = Word::reduce([signs[i] * (i as i32 + 1)]);
        }
        Ok(Self {
            images,
            inverse: Some(inverse),
        })
    }

    pub fn permutation(perm: &[usize]) -> Result<Self> {
        Self::signed_permutation(perm, &vec![1; perm.len()])
    }

    /// `z_i -> z_i^{-1}` (1-based `i`), others fixed.
    pub fn inversion(n: usize, i: usize) -> Result<Self> {
        let mut signs = vec![1; n];
        *signs
            .get_mut(i.wrapping_sub(1))
            .ok_or(Error::LetterOutOfRange {
                letter: i as u32,
                rank: n,
            })? = -1;
        Self::signed_permutation(&(0..n).collect::<Vec<_>>(), &signs)
    }

    /// Elementary Nielsen map `z_i -> z_i z_j^e` (`right`) or `z_i -> z_j^e z_i`,
    /// with `i != j` 1-based and `e = ±1`.
    pub fn nielsen(n: usize, i: usize, j: usize, e: i32, right: bool) -> Result<Self> {
        for k in [i, j] {
            if k == 0 || k > n {
                return Err(Error::LetterOutOfRange {
                    letter: k as u32,
                    rank: n,
                });
            }
        }
        if i == j || e.abs() != 1 {
            return Err(Error::Inconsistent(
                "Nielsen map needs i != j and e = ±1".into(),
            ));
        }
        let zi = i as i32;
        let zj = j as i32 * e;
        let build = |zj: i32| {
            let mut images: Vec<Word> = (1..=n as u32).map(Word::generator).collect();
            images[i - 1] = if right {
                Word::reduce([zi, zj])
            } else {
                Word::reduce([zj, zi])
            };
            images
        };
        Ok(Self {
            images: build(zj),
            inverse: Some(build(-zj)),
        })
    }

    /// The inner automorphism `w -> u^{-1} w u`.
    pub fn conjugation(n: usize, u: &Word) -> Result<Self> {
        u.check_rank(n)?;
        let gens: Vec<Word> = (1..=n as u32).map(Word::generator).collect();
        Ok(Self {
            images: gens.iter().map(|z| z.conjugate_by(u)).collect(),
            inverse: Some(gens.iter().map(|z| z.conjugate_by(&u.inverse())).collect()),
        })
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> Option<&[Word]> {
        self.inverse.as_deref()
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    /// `φφ'`: first `self`, then `other`.
    pub fn compose(&self, other: &FreeMap) -> Result<FreeMap> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch(format!(
                "free maps of rank {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => Some(compose_images(b, a)),
            _ => None,
        };
        Ok(FreeMap {
            images: compose_images(&self.images, &other.images),
            inverse,
        })
    }

    pub fn invert(&self) -> Result<FreeMap> {
        let inv = self.inverse.clone().ok_or(Error::MissingInverse)?;
        Ok(FreeMap {
            images: inv,
            inverse: Some(self.images.clone()),
        })
    }

    pub fn power(&self, k: u64) -> FreeMap {
        let mut result = FreeMap::identity(self.rank());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base).expect("equal ranks");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base).expect("equal ranks");
            }
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        is_identity_images(&self.images)
    }

    /// `A`: row `i` is the abelianization of `z_i φ`.
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let n = self.rank();
        IntMatrix::new(n, self.images.iter().map(|w| w.abelianize(n)).collect())
            .expect("rows have length n")
    }

    /// Order of `φ`. A finite-order subgroup of `Aut(F_n)` embeds in
    /// `GL_n(Z)`, so `ord φ` is finite iff `φ^r = id` for `r = ord A`.
    pub fn order(&self) -> Result<Order> {
        let Order::Finite(r) = matrix_order(&self.abelianization_matrix())? else {
            return Ok(Order::Infinite);
        };
        if !self.power(r).is_identity() {
            return Ok(Order::Infinite);
        }
        Ok(Order::Finite(r))
    }
}

/// `Ψ_{φ,Q,P}` on `Z^m x F_n`; `q` is `m x m`, `p` is `n x m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    ambient: Ambient,
    phi: FreeMap,
    q: IntMatrix,
    p: IntMatrix,
}

impl Morphism {
    pub fn new(ambient: Ambient, phi: FreeMap, q: IntMatrix, p: IntMatrix) -> Result<Self> {
        let (m, n) = (ambient.m, ambient.n);
        if phi.rank() != n {
            return Err(Error::DimensionMismatch(format!(
                "free map of rank {} on F_{n}",
                phi.rank()
            )));
        }
        if q.rows() != m || q.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "Q is {}x{}, expected {m}x{m}",
                q.rows(),
                q.cols()
            )));
        }
        if p.rows() != n || p.cols() != m {
            return Err(Error::DimensionMismatch(format!(
                "P is {}x{}, expected {n}x{m}",
                p.rows(),
                p.cols()
            )));
        }
        Ok(Self { ambient, phi, q, p })
    }

    pub fn identity(ambient: Ambient) -> Self {
        Self {
            ambient,
            phi: FreeMap::identity(ambient.n),
            q: IntMatrix::identity(ambient.m),
            p: IntMatrix::zeros(ambient.n, ambient.m),
        }
    }

    /// The inner automorphism `Γ_u = Ψ_{γ_u, I, 0}`.
    pub fn inner(ambient: Ambient, u: &Word) -> Result<Self> {
        Ok(Self {
            ambient,
            phi: FreeMap::conjugation(ambient.n, u)?,
            q: IntMatrix::identity(ambient.m),
            p: IntMatrix::zeros(ambient.n, ambient.m),
        })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn phi(&self) -> &FreeMap {
        &self.phi
    }

    pub fn q(&self) -> &IntMatrix {
        &self.q
    }

    pub fn p(&self) -> &IntMatrix {
        &self.p
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        self.ambient.check(g)?;
        let aq = self.q.left_mul(&g.t)?;
        let up = self.p.left_mul(&g.w.abelianize(self.ambient.n))?;
        let t: Vec<BigInt> = aq.iter().zip(&up).map(|(x, y)| x + y).collect();
        Ok(GroupElement::new(t, self.phi.apply(&g.w)))
    }

    /// `Ψ_{φφ', QQ', PQ' + AP'}`: first `self`, then `other`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        self.ambient.check_same(&other.ambient)?;
        let a = self.phi.abelianization_matrix();
        let p = self.p.mul(&other.q)?.add(&a.mul(&other.p)?)?;
        Ok(Morphism {
            ambient: self.ambient,
            phi: self.phi.compose(&other.phi)?,
            q: self.q.mul(&other.q)?,
            p,
        })
    }

    /// `Ψ_{φ^{-1}, Q^{-1}, -A^{-1} P Q^{-1}}`.
    pub fn invert(&self) -> Result<Morphism> {
        let phi_inv = self.phi.invert()?;
        let q_inv = self.q.inverse_unimodular()?;
        let a_inv = phi_inv.abelianization_matrix();
        let p = a_inv.mul(&self.p)?.mul(&q_inv)?.neg();
        Ok(Morphism {
            ambient: self.ambient,
            phi: phi_inv,
            q: q_inv,
            p,
        })
    }

    /// `Ψ^k` by repeated squaring.
    pub fn power(&self, k: u64) -> Morphism {
        let mut result = Morphism::identity(self.ambient);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base).expect("same ambient");
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base).expect("same ambient");
            }
        }
        result
    }

    /// `P_k = Σ_{i<k} A^i P Q^{k-1-i}`, the `P`-component of `Ψ^k`.
    pub fn p_power(&self, k: u64) -> IntMatrix {
        let a = self.phi.abelianization_matrix();
        let mut total = IntMatrix::zeros(self.ambient.n, self.ambient.m);
        let mut a_i = IntMatrix::identity(self.ambient.n);
        for i in 0..k {
            let q_pow = self.q.pow(k - 1 - i).expect("square");
            let term = a_i
                .mul(&self.p)
                .and_then(|x| x.mul(&q_pow))
                .expect("shapes");
            total = total.add(&term).expect("shapes");
            a_i = a_i.mul(&a).expect("square");
        }
        total
    }

    pub fn is_identity(&self) -> bool {
        self.phi.is_identity() && self.q.is_identity() && self.p.is_zero()
    }

    /// With `r = lcm(ord φ, ord Q)`, `Ψ` has order `r` when `P_r = 0` and
    /// infinite order otherwise.
    pub fn order(&self) -> Result<Order> {
        let (Order::Finite(r1), Order::Finite(r2)) = (self.phi.order()?, matrix_order(&self.q)?)
        else {
            return Ok(Order::Infinite);
        };
        let r = r1.lcm(&r2);
        if self.p_power(r).is_zero() {
            Ok(Order::Finite(r))
        } else {
            Ok(Order::Infinite)
        }
    }
}
