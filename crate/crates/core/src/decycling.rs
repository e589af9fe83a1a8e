//! Decycling families and decycling matrices.
//!
//! A family decycles `D` when inverting all of its sets leaves `D` acyclic.
//! A symmetric matrix decycles a tournament `T` when reversing the arcs at
//! its off-diagonal ones leaves `T` transitive. The Gram matrix of a
//! family's characteristic vectors marks exactly the arcs the family
//! reverses, which is what ties the two notions together.

use serde::{Deserialize, Serialize};

use crate::digraph::{OrientedGraph, Tournament, VertexFamily};
use crate::error::{Error, Result};
use crate::gf2::{factor_symmetric, MatGF2, SymMatGF2};

fn check_size(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, found })
    }
}

pub fn is_decycling_family(d: &OrientedGraph, family: &VertexFamily) -> Result<bool> {
    Ok(d.invert(family)?.is_acyclic())
}

/// Reverses every arc `ij` of `t` with `m[i][j] = 1`. The diagonal is ignored.
pub fn apply_matrix(t: &Tournament, m: &SymMatGF2) -> Result<Tournament> {
    check_size(t.n(), m.n())?;
    let flips: Vec<u64> = (0..t.n()).map(|i| m.flip_mask(i)).collect();
    Tournament::try_from(t.as_graph().flip(&flips))
}

pub fn is_decycling_matrix(t: &Tournament, m: &SymMatGF2) -> Result<bool> {
    Ok(apply_matrix(t, m)?.is_transitive())
}

/// The characteristic vectors of `family`, one row per vertex.
pub fn characteristic_matrix(family: &VertexFamily) -> MatGF2 {
    let mut x = MatGF2::zeros(family.n(), family.len());
    for (i, &set) in family.sets().iter().enumerate() {
        for v in 0..family.n() {
            if set >> v & 1 == 1 {
                x.set(v, i, true);
            }
        }
    }
    x
}

/// Gram matrix of the family's characteristic vectors.
pub fn family_to_matrix(family: &VertexFamily) -> SymMatGF2 {
    characteristic_matrix(family).gram()
}

/// A family whose Gram matrix is `m`, read off the columns of
/// [`factor_symmetric`]: `rank(m)` sets, or `rank(m)+1` when `m` is nonzero
/// with a zero diagonal.
pub fn matrix_to_family(m: &SymMatGF2) -> VertexFamily {
    let x = factor_symmetric(m);
    let sets = (0..x.cols())
        .map(|c| {
            (0..x.rows())
                .filter(|&v| x.get(v, c))
                .fold(0u64, |acc, v| acc | 1 << v)
        })
        .collect();
    VertexFamily::new(m.n(), sets).expect("factor rows match the matrix dimension")
}

/// The witness carried by a [`Certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Family(VertexFamily),
    Matrix(SymMatGF2),
}

/// Proof that a claimed `inv` (family) or `tmr` (matrix) value is attained.
///
/// `order` is the vertex order of the acyclic graph obtained by applying the
/// payload: the unique transitive order for tournaments, the lexicographically
/// least topological order otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub value: usize,
    pub order: Vec<usize>,
}

impl Certificate {
    /// Certificate for `d` from a decycling family; `value = |family|`.
    pub fn from_family(d: &OrientedGraph, family: VertexFamily) -> Result<Self> {
        let order = d
            .invert(&family)?
            .topological_order()
            .ok_or_else(|| Error::InvalidCertificate("family does not decycle the graph".into()))?;
        Ok(Self {
            value: family.len(),
            kind: CertificateKind::Family(family),
            order,
        })
    }

    /// Certificate for `t` from a decycling matrix; `value = rank(m)`.
    pub fn from_matrix(t: &Tournament, m: SymMatGF2) -> Result<Self> {
        let order = apply_matrix(t, &m)?
            .topological_order()
            .ok_or_else(|| Error::InvalidCertificate("matrix does not decycle the tournament".into()))?;
        Ok(Self {
            value: m.rank(),
            kind: CertificateKind::Matrix(m),
            order,
        })
    }

    pub fn family(&self) -> Option<&VertexFamily> {
        match &self.kind {
            CertificateKind::Family(f) => Some(f),
            CertificateKind::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&SymMatGF2> {
        match &self.kind {
            CertificateKind::Matrix(m) => Some(m),
            CertificateKind::Family(_) => None,
        }
    }

    /// Replays the certificate against `d`; `Err` carries the first failed
    /// claim.
    pub fn check(&self, d: &OrientedGraph) -> std::result::Result<(), String> {
        let applied = match &self.kind {
            CertificateKind::Family(f) => {
                if f.n() != d.n() {
                    return Err(format!("family is over {} vertices, graph has {}", f.n(), d.n()));
                }
                if f.len() != self.value {
                    return Err(format!("family has {} sets but claims value {}", f.len(), self.value));
                }
                d.invert(f).map_err(|e| e.to_string())?
            }
            CertificateKind::Matrix(m) => {
                let t = Tournament::try_from(d.clone())
                    .map_err(|_| "decycling matrices are defined for tournaments only".to_string())?;
                if m.n() != d.n() {
                    return Err(format!("matrix is {0}x{0}, graph has {1} vertices", m.n(), d.n()));
                }
                let rank = m.rank();
                if rank != self.value {
                    return Err(format!("matrix has rank {rank} but claims value {}", self.value));
                }
                apply_matrix(&t, m).map_err(|e| e.to_string())?.into_graph()
            }
        };
        match applied.topological_order() {
            None => Err("applying the payload leaves a directed cycle".into()),
            Some(order) if order != self.order => Err(format!(
                "acyclic order is {order:?}, certificate claims {:?}",
                self.order
            )),
            Some(_) => Ok(()),
        }
    }

    pub fn to_json(&self) -> CertificateJson {
        let (kind, family, matrix) = match &self.kind {
            CertificateKind::Family(f) => ("family", Some(f.to_lists()), None),
            CertificateKind::Matrix(m) => ("matrix", None, Some(m.to_rows())),
        };
        CertificateJson {
            kind: kind.into(),
            value: self.value,
            family,
            matrix,
            order: self.order.clone(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self> {
        let kind = match (j.kind.as_str(), &j.family, &j.matrix) {
            ("family", Some(lists), None) => {
                CertificateKind::Family(VertexFamily::from_lists(j.order.len(), lists)?)
            }
            ("matrix", None, Some(rows)) => CertificateKind::Matrix(SymMatGF2::from_rows(rows)?),
            (other, _, _) => {
                return Err(Error::InvalidCertificate(format!(
                    "kind `{other}` with mismatched payload fields"
                )))
            }
        };
        Ok(Self {
            kind,
            value: j.value,
            order: j.order.clone(),
        })
    }
}

/// Wire form: `{"kind":..., "value":..., "family":[[...]] | "matrix":[[...]], "order":[...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub kind: String,
    pub value: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<u8>>>,
    pub order: Vec<usize>,
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CertificateJson::deserialize(d)?;
        Self::from_json(&j).map_err(serde::de::Error::custom)
    }
}
