//! The JSON interchange format for complexes:
//!
//! ```json
//! { "p": 3,
//!   "generators": [{"id": "x", "degree": 0, "action": "1/2"}],
//!   "d": [["y", "x", 1]],
//!   "sigma": [["x", "x", 1]] }
//! ```
//!
//! Matrix entries are `[row_id, col_id, value]` triplets; repeated triplets
//! add up. A missing `sigma` means the identity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{CochainComplex, EquivariantComplex, Generator};
use crate::error::{Error, Result};
use crate::fp_core::{FpMatrix, PrimeField};
use crate::rational::{serde_rational, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub id: String,
    pub degree: i64,
    #[serde(with = "serde_rational")]
    pub action: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson(pub String, pub String, pub i64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub p: u64,
    pub generators: Vec<GeneratorJson>,
    #[serde(default)]
    pub d: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<EntryJson>>,
}

impl ComplexJson {
    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.p)
    }

    pub fn generators(&self) -> Vec<Generator> {
        self.generators
            .iter()
            .map(|g| Generator::new(g.id.clone(), g.degree, g.action))
            .collect()
    }

    fn index(&self) -> Result<HashMap<&str, usize>> {
        let mut idx = HashMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            if idx.insert(g.id.as_str(), i).is_some() {
                return Err(Error::malformed(
                    format!("generators[{i}].id"),
                    format!("duplicate id {:?}", g.id),
                ));
            }
        }
        Ok(idx)
    }

    /// Builds a matrix from triplets keyed by generator id.
    pub fn matrix(&self, name: &str, entries: &[EntryJson]) -> Result<FpMatrix> {
        let field = self.field()?;
        let idx = self.index()?;
        let n = self.generators.len();
        let mut m = FpMatrix::zeros(field, n, n);
        for (k, EntryJson(row, col, v)) in entries.iter().enumerate() {
            let lookup = |id: &String, what: &str| {
                idx.get(id.as_str()).copied().ok_or_else(|| {
                    Error::malformed(format!("{name}[{k}]"), format!("unknown {what} id {id:?}"))
                })
            };
            let (i, j) = (lookup(row, "row")?, lookup(col, "column")?);
            let cur = m.get(i, j);
            m.set(i, j, field.add(cur, field.reduce(*v)));
        }
        Ok(m)
    }

    pub fn to_complex(&self) -> Result<CochainComplex> {
        let field = self.field()?;
        let d = self.matrix("d", &self.d)?;
        Ok(CochainComplex::new(field, self.generators(), d))
    }

    /// Parses into an equivariant complex without validating it.
    pub fn to_equivariant(&self) -> Result<EquivariantComplex> {
        let complex = self.to_complex()?;
        let sigma = match &self.sigma {
            Some(entries) => self.matrix("sigma", entries)?,
            None => FpMatrix::identity(complex.field(), complex.dim()),
        };
        Ok(EquivariantComplex::new(complex, sigma))
    }

    pub fn from_complex(c: &CochainComplex) -> Self {
        let gens = c.generators();
        ComplexJson {
            p: c.p() as u64,
            generators: gens
                .iter()
                .map(|g| GeneratorJson {
                    id: g.id.clone(),
                    degree: g.degree,
                    action: g.action,
                })
                .collect(),
            d: triplets(c.d(), gens),
            sigma: None,
        }
    }

    pub fn from_equivariant(c: &EquivariantComplex) -> Self {
        let mut out = Self::from_complex(c.complex());
        if !c.sigma().is_identity() {
            out.sigma = Some(triplets(c.sigma(), c.generators()));
        }
        out
    }
}

pub(crate) fn triplets(m: &FpMatrix, gens: &[Generator]) -> Vec<EntryJson> {
    m.entries()
        .map(|(i, j, v)| EntryJson(gens[i].id.clone(), gens[j].id.clone(), v as i64))
        .collect()
}

impl EquivariantComplex {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ComplexJson = serde_json::from_str(s)
            .map_err(|e| Error::malformed(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
        raw.to_equivariant()
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson::from_equivariant(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = r#"{"p": 3,
            "generators": [{"id":"g0","degree":0,"action":"0"},
                           {"id":"g1","degree":0,"action":"0/1"},
                           {"id":"g2","degree":0,"action":"0"}],
            "d": [],
            "sigma": [["g1","g0",1],["g2","g1",1],["g0","g2",1]]}"#;
        let c = EquivariantComplex::from_json_str(s).unwrap();
        assert!(c.validate().is_valid());
        let back = serde_json::to_string(&c.to_json()).unwrap();
        let again = EquivariantComplex::from_json_str(&back).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let s = r#"{"p": 3, "generators": [{"id":"x","degree":0,"action":"0"}],
                    "d": [["x","nope",1]]}"#;
        match EquivariantComplex::from_json_str(s) {
            Err(Error::Malformed { field, .. }) => assert_eq!(field, "d[0]"),
            other => panic!("unexpected {other:?}"),
        }
        let s = r#"{"p": 4, "generators": []}"#;
        assert!(matches!(EquivariantComplex::from_json_str(s), Err(Error::NotPrime(4))));
        let s = r#"{"p": 3, "generators": [}"#;
        assert!(matches!(EquivariantComplex::from_json_str(s), Err(Error::Malformed { .. })));
    }
}
