//! JSON input files. Unknown fields are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use starga::moyal::PhaseSpace;
use starga::scalar::parse_rational;
use starga::{Error, Gaussian, PolyScalar, Result};

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub dof: usize,
    #[serde(default)]
    pub with_hbar: bool,
    pub terms: Vec<TermSpec>,
}

/// `coeff * prod_j q_j^q[j] p_j^p[j]`.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: String,
    #[serde(default)]
    pub q: Vec<u32>,
    #[serde(default)]
    pub p: Vec<u32>,
}

impl HamiltonianSpec {
    pub fn preset(name: &str) -> Result<Self> {
        let term = |coeff: &str, q: u32, p: u32| TermSpec { coeff: coeff.into(), q: vec![q], p: vec![p] };
        let terms = match name {
            "oscillator" => vec![term("1/2", 2, 0), term("1/2", 0, 2)],
            "zero" => vec![],
            "cubic" => vec![term("1/2", 0, 2), term("1/3", 3, 0)],
            "quartic" => vec![term("1/2", 0, 2), term("1/4", 4, 0), term("-1", 1, 1)],
            _ => return Err(Error::Invalid(format!("unknown preset `{name}`"))),
        };
        Ok(HamiltonianSpec { dof: 1, with_hbar: false, terms })
    }

    pub fn polynomial(&self, ps: &PhaseSpace) -> Result<PolyScalar> {
        if self.dof == 0 || self.dof > 3 {
            return Err(Error::Invalid(format!("dof must be 1, 2 or 3, got {}", self.dof)));
        }
        let mut h = PolyScalar::zero();
        for t in &self.terms {
            if t.q.len() > self.dof || t.p.len() > self.dof {
                return Err(Error::Malformed(format!("term `{}` has more exponents than degrees of freedom", t.coeff)));
            }
            let mut m = PolyScalar::constant(Gaussian::real(parse_rational(&t.coeff)?));
            for (j, e) in t.q.iter().enumerate() {
                m = &m * &ps.q(j).pow(*e);
            }
            for (j, e) in t.p.iter().enumerate() {
                m = &m * &ps.p(j).pow(*e);
            }
            h += &m;
        }
        Ok(h)
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct RigidBodySpec {
    pub inertia: [f64; 3],
    #[serde(rename = "L0")]
    pub l0: [f64; 3],
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub every: Option<usize>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub groups: Option<Vec<u8>>,
    pub triples: Option<usize>,
    pub vector_pairs: Option<usize>,
    pub hamiltonians: Option<usize>,
    pub grid: Option<usize>,
    pub symplectic_samples: Option<usize>,
}
