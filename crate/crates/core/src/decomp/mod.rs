//! Tensor-space decompositions and their witnesses.
//!
//! A spec `[n_1 ... n_d; a_1 ... a_d]` asks for subspaces `X_i` of
//! `(x)_{j != i} K^{n_j}` with `dim X_i = a_i` such that the lifts
//! `X_i[i] = K^{n_i} (x) X_i` (the new factor placed at position `i`) sum to the
//! whole space `K^{n_1,...,n_d}`. A witness stores such subspaces; it counts as
//! verified only after an exact rank computation shows the lifts span.

mod construct;
mod rewrite;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::subspace::{lift_subspace, spans_ambient, TensorSubspace};

pub use construct::{
    blow_up_witness, certify_with_witness, coordinate_witness, derive_333, direct_sum_combine,
    order_n_schedule, random_witness, trivial_witness, witness_2220_31, witness_333,
    witness_333_binary, witness_order_n, Derivation, Method,
};
pub use rewrite::{rewrite_spec, Rewrite};

/// One column `[n; a]` of a spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Leg {
    pub n: usize,
    pub a: usize,
}

/// A `2 x d` integer matrix `[n; a]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct DecompSpec {
    legs: Vec<Leg>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    n: Vec<usize>,
    a: Vec<usize>,
}

impl TryFrom<SpecJson> for DecompSpec {
    type Error = Error;

    fn try_from(j: SpecJson) -> Result<Self> {
        DecompSpec::new(&j.n, &j.a)
    }
}

impl From<DecompSpec> for SpecJson {
    fn from(s: DecompSpec) -> Self {
        SpecJson {
            n: s.dims(),
            a: s.a_values(),
        }
    }
}

impl DecompSpec {
    pub fn new(n: &[usize], a: &[usize]) -> Result<Self> {
        if n.len() != a.len() || n.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "spec rows of lengths {} and {}",
                n.len(),
                a.len()
            )));
        }
        let spec = DecompSpec {
            legs: n.iter().zip(a).map(|(&n, &a)| Leg { n, a }).collect(),
        };
        for (i, leg) in spec.legs.iter().enumerate() {
            if leg.n == 0 {
                return Err(Error::InvalidArgument(format!("leg {i} has n = 0")));
            }
            let room: usize = spec.leg_ambient(i).iter().product();
            if leg.a > room {
                return Err(Error::InvalidArgument(format!(
                    "leg {i}: a = {} exceeds the {room}-dimensional complement",
                    leg.a
                )));
            }
        }
        Ok(spec)
    }

    /// `[n; a]^{(.)k}`
    pub fn repeated(n: usize, a: usize, k: usize) -> Result<Self> {
        Self::new(&vec![n; k], &vec![a; k])
    }

    /// Column concatenation.
    pub fn concat(&self, other: &DecompSpec) -> Result<Self> {
        let n: Vec<usize> = self.dims().into_iter().chain(other.dims()).collect();
        let a: Vec<usize> = self.a_values().into_iter().chain(other.a_values()).collect();
        Self::new(&n, &a)
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn order(&self) -> usize {
        self.legs.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.legs.iter().map(|l| l.n).collect()
    }

    pub fn a_values(&self) -> Vec<usize> {
        self.legs.iter().map(|l| l.a).collect()
    }

    pub fn ambient_dim(&self) -> usize {
        self.legs.iter().map(|l| l.n).product()
    }

    /// Shape of the space leg `i`'s subspace lives in: every other side, in order.
    pub fn leg_ambient(&self, i: usize) -> Vec<usize> {
        self.legs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, l)| l.n)
            .collect()
    }

    /// `sum a_i n_i = prod n_i`.
    pub fn is_balanced(&self) -> bool {
        self.legs.iter().map(|l| l.a * l.n).sum::<usize>() == self.ambient_dim()
    }

    pub fn check_balanced(&self) -> Result<()> {
        if !self.is_balanced() {
            return Err(Error::InvalidArgument(format!("{self} is not balanced")));
        }
        Ok(())
    }
}

impl fmt::Display for DecompSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<usize>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "[{}; {}]", join(self.dims()), join(self.a_values()))
    }
}

/// Parses `"3,3,3;3,3,3"` (the `n` row, then the `a` row).
impl FromStr for DecompSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, a) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("spec {s:?} needs the form n1,n2,..;a1,a2,..")))?;
        let row = |r: &str| -> Result<Vec<usize>> {
            r.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
                .collect()
        };
        Self::new(&row(n)?, &row(a)?)
    }
}

/// One entry of a witness's construction log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub op: String,
    pub spec: DecompSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub attempts: usize,
}

impl DerivationStep {
    pub fn new(op: impl Into<String>, spec: &DecompSpec) -> Self {
        Self {
            op: op.into(),
            spec: spec.clone(),
            seed: None,
            attempts: 0,
        }
    }

    pub fn seeded(op: impl Into<String>, spec: &DecompSpec, seed: u64, attempts: usize) -> Self {
        Self {
            op: op.into(),
            spec: spec.clone(),
            seed: Some(seed),
            attempts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WitnessJson", into = "WitnessJson")]
pub struct DecompWitness {
    spec: DecompSpec,
    subspaces: Vec<TensorSubspace>,
    field: FieldSpec,
    verified: bool,
    derivation: Vec<DerivationStep>,
}

impl DecompWitness {
    /// Assembles an unverified witness, checking every subspace's ambient and
    /// dimension against `spec`.
    pub fn new(spec: DecompSpec, subspaces: Vec<TensorSubspace>) -> Result<Self> {
        if subspaces.len() != spec.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} subspaces for a {}-leg spec",
                subspaces.len(),
                spec.order()
            )));
        }
        let field = subspaces[0].field();
        for (i, x) in subspaces.iter().enumerate() {
            field.check_same(&x.field())?;
            let shape = spec.leg_ambient(i);
            if x.shape() != shape.as_slice() {
                return Err(Error::DimensionMismatch(format!(
                    "leg {i}: subspace lives in {:?}, spec needs {shape:?}",
                    x.shape()
                )));
            }
            if x.dim() != spec.legs[i].a {
                return Err(Error::DimensionMismatch(format!(
                    "leg {i}: subspace has dimension {}, spec needs {}",
                    x.dim(),
                    spec.legs[i].a
                )));
            }
        }
        Ok(Self {
            spec,
            subspaces,
            field,
            verified: false,
            derivation: Vec::new(),
        })
    }

    /// Builds and verifies, failing with [`Error::Unverified`] if the lifts do
    /// not span.
    pub fn verified(spec: DecompSpec, subspaces: Vec<TensorSubspace>, derivation: Vec<DerivationStep>) -> Result<Self> {
        let mut w = Self::new(spec, subspaces)?.with_derivation(derivation);
        if !w.verify()? {
            return Err(Error::Unverified(format!("lifts of {} do not span", w.spec)));
        }
        Ok(w)
    }

    pub fn spec(&self) -> &DecompSpec {
        &self.spec
    }

    pub fn subspaces(&self) -> &[TensorSubspace] {
        &self.subspaces
    }

    pub fn subspace(&self, leg: usize) -> &TensorSubspace {
        &self.subspaces[leg]
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn derivation(&self) -> &[DerivationStep] {
        &self.derivation
    }

    pub fn with_derivation(mut self, derivation: Vec<DerivationStep>) -> Self {
        self.derivation = derivation;
        self
    }

    pub(crate) fn push_step(&mut self, step: DerivationStep) {
        self.derivation.push(step);
    }

    /// The lifted subspaces `X_i[i]`.
    pub fn lifts(&self) -> Result<Vec<TensorSubspace>> {
        self.subspaces
            .iter()
            .zip(&self.spec.legs)
            .enumerate()
            .map(|(i, (x, leg))| lift_subspace(x, i, leg.n))
            .collect()
    }

    /// Exact spanning test, without touching the flag.
    pub fn spans(&self) -> Result<bool> {
        let lifts = self.lifts()?;
        let parts: Vec<&TensorSubspace> = lifts.iter().collect();
        spans_ambient(&parts)
    }

    /// Recomputes spanning and records the result in the verified flag.
    pub fn verify(&mut self) -> Result<bool> {
        self.verified = self.spans()?;
        Ok(self.verified)
    }
}

/// Verifies a witness in place: true iff its lifts span the ambient space.
pub fn verify_witness(w: &mut DecompWitness) -> Result<bool> {
    w.verify()
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    leg: usize,
    basis: Vec<Vec<u64>>,
}

/// `{"spec":{"n":[..],"a":[..]},"modulus":p,"subspaces":[{"leg":i,"basis":[..]}],"verified":b,"derivation":[..]}`
#[derive(Serialize, Deserialize)]
struct WitnessJson {
    spec: DecompSpec,
    modulus: u64,
    subspaces: Vec<SubspaceJson>,
    verified: bool,
    #[serde(default)]
    derivation: Vec<DerivationStep>,
}

impl From<DecompWitness> for WitnessJson {
    fn from(w: DecompWitness) -> Self {
        WitnessJson {
            modulus: w.field.modulus(),
            subspaces: w
                .subspaces
                .iter()
                .enumerate()
                .map(|(leg, x)| SubspaceJson { leg, basis: x.vectors() })
                .collect(),
            verified: w.verified,
            derivation: w.derivation,
            spec: w.spec,
        }
    }
}

impl TryFrom<WitnessJson> for DecompWitness {
    type Error = Error;

    fn try_from(j: WitnessJson) -> Result<Self> {
        let field = FieldSpec::new(j.modulus)?;
        if j.subspaces.len() != j.spec.order() {
            return Err(Error::Parse(format!(
                "{} subspaces for a {}-leg spec",
                j.subspaces.len(),
                j.spec.order()
            )));
        }
        let mut subspaces = Vec::with_capacity(j.subspaces.len());
        for (i, s) in j.subspaces.into_iter().enumerate() {
            if s.leg != i {
                return Err(Error::Parse(format!("subspace {i} is labelled leg {}", s.leg)));
            }
            if s.basis.iter().flatten().any(|&e| e >= j.modulus) {
                return Err(Error::Parse("basis entry not reduced mod p".into()));
            }
            subspaces.push(TensorSubspace::from_basis(field, &j.spec.leg_ambient(i), s.basis)?);
        }
        if subspaces.is_empty() {
            return Err(Error::Parse("witness without subspaces".into()));
        }
        let mut w = DecompWitness::new(j.spec, subspaces)?;
        w.verified = j.verified;
        w.derivation = j.derivation;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> FieldSpec {
        FieldSpec::default()
    }

    #[test]
    fn spec_parse_and_display() {
        let s: DecompSpec = "3,1,2;1,3,0".parse().unwrap();
        assert_eq!(s.dims(), vec![3, 1, 2]);
        assert_eq!(s.a_values(), vec![1, 3, 0]);
        assert_eq!(s.to_string(), "[3 1 2; 1 3 0]");
        assert!(s.is_balanced());
        assert!("3,3;3".parse::<DecompSpec>().is_err());
        assert!("3,x;1,1".parse::<DecompSpec>().is_err());
        // a exceeds the complement dimension
        assert!(DecompSpec::new(&[2, 2], &[3, 0]).is_err());
        assert!(DecompSpec::new(&[0, 2], &[0, 0]).is_err());
    }

    #[test]
    fn order_one_spec() {
        let s = DecompSpec::new(&[5], &[1]).unwrap();
        assert!(s.is_balanced());
        let x = TensorSubspace::full(f(), &[]);
        let mut w = DecompWitness::new(s, vec![x]).unwrap();
        assert!(verify_witness(&mut w).unwrap());
        assert!(w.is_verified());
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        let s: DecompSpec = "3,3,3;3,3,3".parse().unwrap();
        let zero = TensorSubspace::zero(f(), &[3, 3]);
        assert!(DecompWitness::new(s.clone(), vec![zero.clone(), zero.clone(), zero]).is_err());
        let wrong_shape = TensorSubspace::random(f(), &[9], 3, 0).unwrap();
        let ok = TensorSubspace::random(f(), &[3, 3], 3, 0).unwrap();
        assert!(DecompWitness::new(s, vec![wrong_shape, ok.clone(), ok]).is_err());
    }

    #[test]
    fn unbalanced_but_spanning_is_detected() {
        let s: DecompSpec = "2,2;2,2".parse().unwrap();
        assert!(!s.is_balanced());
        let full = TensorSubspace::full(f(), &[2]);
        let mut w = DecompWitness::new(s, vec![full.clone(), full]).unwrap();
        assert!(w.verify().unwrap());
    }
}
