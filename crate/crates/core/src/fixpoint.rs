//! Fixed subgroups of tuples of automorphisms, periodic subgroups, and the
//! auto-fixed closure of a subgroup given generators of its stabilizer.

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::freewords::{pullback, schreier_basis, stallings, Word};
use crate::intlat::{
    image_lattice, kernel_lattice, lattice_index, lattice_preimage, solve_left, unity_exponent,
    Index, IntMatrix, Lattice, Order,
};
use crate::morphism::{FreeMap, Morphism};
use crate::subgroup::{subgroup_equal, Ambient, GroupElement, SubgroupBasis};

/// Automorphisms `Ψ_1..Ψ_k` together with a free basis of each `Fix φ_i`.
#[derive(Clone, Debug)]
pub struct FixInput {
    morphisms: Vec<Morphism>,
    fixed_bases: Vec<Vec<Word>>,
}

impl FixInput {
    /// Checks that every supplied word is fixed by its free map and that each
    /// list is a free basis of the subgroup it generates.
    pub fn new(morphisms: Vec<Morphism>, fixed_bases: Vec<Vec<Word>>) -> Result<Self> {
        let first = morphisms.first().ok_or(Error::EmptyTuple)?;
        let ambient = first.ambient();
        if fixed_bases.len() != morphisms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} morphisms but {} fixed bases",
                morphisms.len(),
                fixed_bases.len()
            )));
        }
        for (i, (psi, basis)) in morphisms.iter().zip(&fixed_bases).enumerate() {
            ambient.check_same(&psi.ambient())?;
            for w in basis {
                w.check_rank(ambient.n)?;
                if w.is_identity() || psi.phi().apply(w) != *w {
                    return Err(Error::NotFixed {
                        index: i,
                        word: w.to_string(),
                    });
                }
            }
            if stallings(basis).rank() != basis.len() {
                return Err(Error::NotFreeBasis(i));
            }
        }
        Ok(Self {
            morphisms,
            fixed_bases,
        })
    }

    /// Fills in each `Fix φ_i` from [`catalog_fixed_basis`].
    pub fn from_catalog(morphisms: Vec<Morphism>) -> Result<Self> {
        let bases = morphisms
            .iter()
            .map(|psi| {
                catalog_fixed_basis(psi.phi()).ok_or_else(|| {
                    Error::Inconsistent(
                        "no fixed free basis supplied and the free map is not a signed permutation"
                            .into(),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(morphisms, bases)
    }

    pub fn ambient(&self) -> Ambient {
        self.morphisms[0].ambient()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn fixed_bases(&self) -> &[Vec<Word>] {
        &self.fixed_bases
    }
}

/// Free basis of `Fix φ` when every generator image is a single letter, i.e.
/// `φ` is a signed permutation and hence a graph automorphism of the rose: a
/// reduced loop is fixed only if each of its edges is, so `Fix φ` is generated
/// by the letters `φ` fixes.
pub fn catalog_fixed_basis(phi: &FreeMap) -> Option<Vec<Word>> {
    let n = phi.rank();
    let mut hit = vec![false; n];
    for img in phi.images() {
        let [l] = img.letters() else { return None };
        let k = l.unsigned_abs() as usize - 1;
        if hit[k] {
            return None;
        }
        hit[k] = true;
    }
    Some(
        (1..=n as u32)
            .map(Word::generator)
            .filter(|z| phi.apply(z) == *z)
            .collect(),
    )
}

/// Intermediate objects of the computation. Lattices of the matrix side live
/// in `Z^{km}`; `im_rho` and `n_pre` live in `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    /// Free basis of `Fix φ_1 ∩ ... ∩ Fix φ_k`.
    pub free_intersection: Vec<Word>,
    pub im_rho: Lattice,
    pub im_p: Lattice,
    pub m: Lattice,
    pub n: Lattice,
    /// `∩ E_1(Q_i)`, the abelian part of the fixed subgroup.
    pub kernel: Lattice,
    pub n_pre: Option<Lattice>,
    pub ell: Option<Index>,
}

#[derive(Clone, Debug)]
pub struct FixResult {
    pub finitely_generated: bool,
    pub basis: Option<SubgroupBasis>,
    pub diagnostics: Diagnostics,
}

/// `Fix Ψ_1 ∩ ... ∩ Fix Ψ_k`.
///
/// `t^a w` is fixed by all `Ψ_i` iff `w` lies in the free intersection `F` and
/// `a Q̃ = w^{ab} P̃` with `Q̃ = (I-Q_1|...|I-Q_k)`, `P̃ = (P_1|...|P_k)`. The
/// projection of the fixed subgroup is therefore the preimage in `F` of
/// `N P̃'^{-1}`, which is finitely generated iff it has finite index in `F`
/// or `F` is cyclic.
pub fn fix_tuple(input: &FixInput) -> Result<FixResult> {
    let ambient = input.ambient();
    let (m, n) = (ambient.m, ambient.n);
    let k = input.morphisms.len();

    let mut graph = stallings(&input.fixed_bases[0]);
    for basis in &input.fixed_bases[1..] {
        graph = pullback(&graph, &stallings(basis));
    }
    let v: Vec<Word> = graph.basis().to_vec();

    let mut q_tilde = IntMatrix::zeros(m, 0);
    let mut p_tilde = IntMatrix::zeros(n, 0);
    for psi in &input.morphisms {
        q_tilde = q_tilde.hcat(&IntMatrix::identity(m).sub(psi.q())?)?;
        p_tilde = p_tilde.hcat(psi.p())?;
    }

    let im_rho = Lattice::from_generators(n, v.iter().map(|w| w.abelianize(n)).collect())?;
    let im_p = im_rho.map(&p_tilde)?;
    let m_lat = image_lattice(&q_tilde);
    let n_lat = m_lat.intersect(&im_p)?;
    let kernel = kernel_lattice(&q_tilde);
    debug_assert_eq!(m_lat.dim(), k * m);

    let mut diagnostics = Diagnostics {
        free_intersection: v.clone(),
        im_rho: im_rho.clone(),
        im_p: im_p.clone(),
        m: m_lat,
        n: n_lat.clone(),
        kernel: kernel.clone(),
        n_pre: None,
        ell: None,
    };

    if n_lat.rank() == im_p.rank() {
        let n_pre = lattice_preimage(&im_rho, &p_tilde, &n_lat)?;
        let ell = lattice_index(&n_pre, &im_rho)?;
        diagnostics.n_pre = Some(n_pre.clone());
        diagnostics.ell = Some(ell.clone());
        let bound = ell
            .finite()
            .and_then(|x| x.to_u64())
            .ok_or_else(|| Error::Inconsistent(format!("index {ell} is not a usable bound")))?;
        let projected = schreier_basis(
            &v,
            |w| n_pre.contains(&w.abelianize(n)).unwrap_or(false),
            bound,
        )?;
        let mut free = Vec::with_capacity(projected.len());
        for u in projected {
            let rhs = p_tilde.left_mul(&u.abelianize(n))?;
            let e = solve_left(&q_tilde, &rhs)?.ok_or_else(|| {
                Error::Inconsistent(format!(
                    "no abelian part fixes {u}; the supplied fixed bases are invalid"
                ))
            })?;
            free.push(GroupElement::new(e, u));
        }
        let basis = SubgroupBasis::from_parts(ambient, &free, &kernel)?;
        return Ok(FixResult {
            finitely_generated: true,
            basis: Some(basis),
            diagnostics,
        });
    }

    // a cyclic intersection ⟨u⟩ with u^{ab} P̃ outside M: no power of u lifts
    if v.len() == 1 && !im_rho.is_zero() && n_lat.is_zero() {
        let basis = SubgroupBasis::from_parts(ambient, &[], &kernel)?;
        return Ok(FixResult {
            finitely_generated: true,
            basis: Some(basis),
            diagnostics,
        });
    }

    Ok(FixResult {
        finitely_generated: false,
        basis: None,
        diagnostics,
    })
}

/// `Fix Ψ` from a free basis of `Fix φ`.
pub fn fix_single(psi: &Morphism, fix_phi_basis: &[Word]) -> Result<FixResult> {
    fix_tuple(&FixInput::new(
        vec![psi.clone()],
        vec![fix_phi_basis.to_vec()],
    )?)
}

/// `e = lcm(ord φ, unity_exponent(Q))`, for which `Per Ψ = Fix Ψ^e`.
pub fn periodic_exponent(psi: &Morphism) -> Result<u64> {
    let Order::Finite(r) = psi.phi().order()? else {
        return Err(Error::InfiniteOrder);
    };
    Ok(r.lcm(&unity_exponent(psi.q())?))
}

/// `Per Ψ = Fix Ψ^e`; since `φ^e = id` the fixed free basis is `z_1..z_n`.
pub fn periodic_subgroup(psi: &Morphism) -> Result<FixResult> {
    let e = periodic_exponent(psi)?;
    let power = psi.power(e);
    let gens: Vec<Word> = (1..=psi.ambient().n as u32).map(Word::generator).collect();
    fix_single(&power, &gens)
}

fn check_fixes(h: &SubgroupBasis, stab: &FixInput) -> Result<()> {
    h.ambient().check_same(&stab.ambient())?;
    for (i, psi) in stab.morphisms.iter().enumerate() {
        for g in h.elements() {
            if psi.apply(&g)? != g {
                return Err(Error::DoesNotFixSubgroup {
                    index: i,
                    element: g.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// `Fix Ψ_1 ∩ ... ∩ Fix Ψ_k` for generators `Ψ_i` of the pointwise
/// stabilizer of `H`, after checking that each `Ψ_i` fixes `H`.
pub fn autofixed_closure(h: &SubgroupBasis, stab_gens: &FixInput) -> Result<FixResult> {
    check_fixes(h, stab_gens)?;
    let result = fix_tuple(stab_gens)?;
    if let Some(closure) = &result.basis {
        if !closure.contains_subgroup(h)? {
            return Err(Error::Inconsistent("closure does not contain H".into()));
        }
    }
    Ok(result)
}

pub fn is_autofixed(h: &SubgroupBasis, stab_gens: &FixInput) -> Result<bool> {
    let closure = autofixed_closure(h, stab_gens)?;
    match &closure.basis {
        Some(c) => subgroup_equal(h, c),
        None => Ok(false),
    }
}

/// Whether `g` is fixed by every morphism of the tuple.
pub fn fixed_by_all(morphisms: &[Morphism], g: &GroupElement) -> Result<bool> {
    for psi in morphisms {
        if psi.apply(g)? != *g {
            return Ok(false);
        }
    }
    Ok(true)
}
