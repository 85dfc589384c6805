//! Serializable backend descriptions, the schema used inside instance files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::CoeffField;
use crate::groups::Group;

/// Which ambient algebra K to build and over which base field k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BackendDescriptor {
    /// K = GF(p^n) = GF(p)[x]/(modulus), k = GF(p). Coefficients of the
    /// modulus are little-endian integers, reduced mod p.
    #[serde(rename = "FF")]
    Ff { p: u64, modulus: Vec<i64> },
    /// K = k[y]/(g) for a monic irreducible g; k per `coeff`. Coefficients
    /// of g are little-endian expression strings over k.
    #[serde(rename = "EXT")]
    Ext { coeff: BaseDescriptor, g: Vec<String> },
    /// K = k0(t), k = k0.
    #[serde(rename = "RF")]
    Rf { base: BaseDescriptor },
    /// K = rational quaternions, k = Q.
    #[serde(rename = "QUAT")]
    Quat,
    /// K = k0[G], k = k0.
    #[serde(rename = "GA")]
    Ga {
        base: BaseDescriptor,
        group: GroupDescriptor,
    },
}

/// A coefficient field: Q, GF(p), or rational functions in s over either.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum BaseDescriptor {
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "GF")]
    Gf { p: u64 },
    #[serde(rename = "QS")]
    QRatFn,
    #[serde(rename = "GFS")]
    GfRatFn { p: u64 },
}

impl BaseDescriptor {
    pub fn to_coeff_field(&self) -> Result<CoeffField> {
        match self {
            BaseDescriptor::Q => Ok(CoeffField::rationals()),
            BaseDescriptor::Gf { p } => CoeffField::gf(*p),
            BaseDescriptor::QRatFn => Ok(CoeffField::rational_functions_q()),
            BaseDescriptor::GfRatFn { p } => CoeffField::rational_functions_gf(*p),
        }
    }

    /// Only Q and GF(p) may serve as the base of RF and GA backends.
    pub fn to_plain_coeff_field(&self) -> Result<CoeffField> {
        match self {
            BaseDescriptor::Q | BaseDescriptor::Gf { .. } => self.to_coeff_field(),
            other => Err(Error::UnsupportedBackend(format!(
                "{} is not a plain base field here",
                other.label()
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BaseDescriptor::Q => "Q".into(),
            BaseDescriptor::Gf { p } => format!("GF({p})"),
            BaseDescriptor::QRatFn => "Q(s)".into(),
            BaseDescriptor::GfRatFn { p } => format!("GF({p})(s)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum GroupDescriptor {
    Cayley { table: Vec<Vec<usize>> },
    Abelian { free_rank: usize, torsion: Vec<u64> },
}

impl GroupDescriptor {
    pub fn to_group(&self) -> Result<Group> {
        match self {
            GroupDescriptor::Cayley { table } => Group::cayley(table.clone()),
            GroupDescriptor::Abelian { free_rank, torsion } => {
                Group::abelian(*free_rank, torsion.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_json_shapes() {
        let ff: BackendDescriptor =
            serde_json::from_str(r#"{"kind":"FF","p":2,"modulus":[1,1,0,0,1]}"#).unwrap();
        assert_eq!(
            ff,
            BackendDescriptor::Ff {
                p: 2,
                modulus: vec![1, 1, 0, 0, 1]
            }
        );
        let ext: BackendDescriptor = serde_json::from_str(
            r#"{"kind":"EXT","coeff":{"name":"GFS","p":2},"g":["-s","0","1"]}"#,
        )
        .unwrap();
        match &ext {
            BackendDescriptor::Ext { coeff, g } => {
                assert_eq!(*coeff, BaseDescriptor::GfRatFn { p: 2 });
                assert_eq!(g.len(), 3);
            }
            _ => panic!("wrong variant"),
        }
        let ga: BackendDescriptor = serde_json::from_str(
            r#"{"kind":"GA","base":{"name":"Q"},"group":{"type":"Abelian","free_rank":1,"torsion":[]}}"#,
        )
        .unwrap();
        let round = serde_json::to_string(&ga).unwrap();
        let back: BackendDescriptor = serde_json::from_str(&round).unwrap();
        assert_eq!(ga, back);
        let quat: BackendDescriptor = serde_json::from_str(r#"{"kind":"QUAT"}"#).unwrap();
        assert_eq!(quat, BackendDescriptor::Quat);
    }

    #[test]
    fn plain_base_restriction() {
        assert!(BaseDescriptor::Q.to_plain_coeff_field().is_ok());
        assert!(BaseDescriptor::Gf { p: 5 }.to_plain_coeff_field().is_ok());
        assert!(BaseDescriptor::QRatFn.to_plain_coeff_field().is_err());
    }
}
