//! JSON forms of elements, subgroups, morphisms and fixed-subgroup results.
//! Integers are written as decimal strings; plain JSON integers are accepted
//! on input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fixpoint::{Diagnostics, FixResult};
use crate::freewords::Word;
use crate::intlat::{IntMatrix, Lattice};
use crate::morphism::{FreeMap, Morphism};
use crate::oracle::Bounds;
use crate::subgroup::{Ambient, GroupElement, SubgroupBasis};

/// An integer carried as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dec(pub BigInt);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

struct DecVisitor;

impl Visitor<'_> for DecVisitor {
    type Value = Dec;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Dec, E> {
        BigInt::from_str(v.trim())
            .map(Dec)
            .map_err(|_| E::custom(format!("{v:?} is not a decimal integer")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Dec, E> {
        Ok(Dec(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Dec, E> {
        Ok(Dec(v.into()))
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Dec, D::Error> {
        d.deserialize_any(DecVisitor)
    }
}

fn to_dec(v: &[BigInt]) -> Vec<Dec> {
    v.iter().cloned().map(Dec).collect()
}

fn from_dec(v: &[Dec]) -> Vec<BigInt> {
    v.iter().map(|d| d.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub t: Vec<Dec>,
    pub w: String,
}

impl ElementJson {
    pub fn from_element(g: &GroupElement) -> Self {
        Self {
            t: to_dec(&g.t),
            w: g.w.to_string(),
        }
    }

    pub fn to_element(&self, ambient: Ambient) -> Result<GroupElement> {
        let g = GroupElement::new(from_dec(&self.t), Word::parse(&self.w, ambient.n)?);
        ambient.check(&g)?;
        Ok(g)
    }
}

pub fn lattice_to_json(l: &Lattice) -> Vec<Vec<Dec>> {
    l.basis_rows().iter().map(|r| to_dec(r)).collect()
}

pub fn lattice_from_json(rows: &[Vec<Dec>], dim: usize) -> Result<Lattice> {
    let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| from_dec(r)).collect();
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "lattice row of length {} in Z^{dim}",
            r.len()
        )));
    }
    Lattice::from_generators(dim, rows)
}

/// `rows x cols` matrix; with `cols = 0` an empty list stands for the empty
/// matrix of any height.
pub fn matrix_from_json(
    data: &[Vec<Dec>],
    rows: usize,
    cols: usize,
    name: &str,
) -> Result<IntMatrix> {
    if cols == 0 && (data.is_empty() || data.iter().all(Vec::is_empty)) {
        return Ok(IntMatrix::zeros(rows, 0));
    }
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!(
            "{name} must be {rows}x{cols}"
        )));
    }
    IntMatrix::new(cols, data.iter().map(|r| from_dec(r)).collect())
}

pub fn matrix_to_json(m: &IntMatrix) -> Vec<Vec<Dec>> {
    m.row_vecs().iter().map(|r| to_dec(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    #[serde(default)]
    pub free: Vec<ElementJson>,
    #[serde(default)]
    pub abelian: Vec<Vec<Dec>>,
}

impl BasisJson {
    pub fn from_basis(h: &SubgroupBasis) -> Self {
        Self {
            free: h
                .free_part()
                .iter()
                .map(ElementJson::from_element)
                .collect(),
            abelian: lattice_to_json(h.abelian_part()),
        }
    }

    /// Any generating set is accepted; it is normalized to a basis.
    pub fn to_basis(&self, ambient: Ambient) -> Result<SubgroupBasis> {
        let free = self
            .free
            .iter()
            .map(|e| e.to_element(ambient))
            .collect::<Result<Vec<_>>>()?;
        let abelian = lattice_from_json(&self.abelian, ambient.m)?;
        SubgroupBasis::from_parts(ambient, &free, &abelian)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub phi: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_inv: Option<Vec<String>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<Dec>>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<Dec>>,
}

fn parse_words(ws: &[String], n: usize) -> Result<Vec<Word>> {
    ws.iter().map(|s| Word::parse(s, n)).collect()
}

fn show_words(ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| w.to_string()).collect()
}

impl MorphismJson {
    pub fn from_morphism(psi: &Morphism) -> Self {
        Self {
            phi: show_words(psi.phi().images()),
            phi_inv: psi.phi().inverse_images().map(show_words),
            q: matrix_to_json(psi.q()),
            p: matrix_to_json(psi.p()),
        }
    }

    pub fn to_morphism(&self, ambient: Ambient) -> Result<Morphism> {
        let (m, n) = (ambient.m, ambient.n);
        if self.phi.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "phi has {} images, expected {n}",
                self.phi.len()
            )));
        }
        let images = parse_words(&self.phi, n)?;
        let inverse = self
            .phi_inv
            .as_deref()
            .map(|ws| parse_words(ws, n))
            .transpose()?;
        let phi = FreeMap::new(images, inverse)?;
        let q = matrix_from_json(&self.q, m, m, "Q")?;
        let p = matrix_from_json(&self.p, n, m, "P")?;
        Morphism::new(ambient, phi, q, p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagnosticsJson {
    pub free_intersection: Vec<String>,
    pub im_rho: Vec<Vec<Dec>>,
    pub im_p: Vec<Vec<Dec>>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<Dec>>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<Dec>>,
    pub kernel: Vec<Vec<Dec>>,
    #[serde(rename = "N_pre")]
    pub n_pre: Option<Vec<Vec<Dec>>>,
    pub ell: Option<String>,
}

impl DiagnosticsJson {
    pub fn from_diagnostics(d: &Diagnostics) -> Self {
        Self {
            free_intersection: show_words(&d.free_intersection),
            im_rho: lattice_to_json(&d.im_rho),
            im_p: lattice_to_json(&d.im_p),
            m: lattice_to_json(&d.m),
            n: lattice_to_json(&d.n),
            kernel: lattice_to_json(&d.kernel),
            n_pre: d.n_pre.as_ref().map(lattice_to_json),
            ell: d.ell.as_ref().map(|i| i.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixResultJson {
    pub fg: bool,
    pub basis: Option<BasisJson>,
    pub diagnostics: DiagnosticsJson,
}

impl FixResultJson {
    pub fn from_result(r: &FixResult) -> Self {
        Self {
            fg: r.finitely_generated,
            basis: r.basis.as_ref().map(BasisJson::from_basis),
            diagnostics: DiagnosticsJson::from_diagnostics(&r.diagnostics),
        }
    }
}

/// The part of a stored fixed-subgroup result needed to check containment.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct StoredFixResult {
    pub fg: bool,
    pub basis: Option<BasisJson>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsJson {
    pub word_len_max: usize,
    pub coord_abs_max: u64,
}

impl From<BoundsJson> for Bounds {
    fn from(b: BoundsJson) -> Self {
        Bounds::new(b.word_len_max, b.coord_abs_max)
    }
}
