//! JSON documents for scalars, operators, matrices and Mahler functions.
//!
//! Scalars are strings in the `p^v * digits` form printed by [`Padic`], so
//! every digit of precision survives a round trip. Plain integers and
//! fractions such as `"-3"` or `"2/9"` are accepted on input.

use std::collections::BTreeMap;

use padic_opalg_core::{
    Context, Error, IndexRule, MahlerFunction, Matrix, Operator, Padic, PairingScheme, Repr, SumRingMap,
    ValuationBound, Valuation,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeDoc {
    Cantor,
    Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDoc {
    Alpha0,
    Beta0,
    Alpha1,
    Beta1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleDoc {
    /// `(column, destination row)` pairs.
    Finite(Vec<(usize, usize)>),
    Shift(usize),
    BackShift(usize),
    SumRing { map: MapDoc, scheme: SchemeDoc },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorDoc {
    Identity,
    Finite {
        entries: Vec<(usize, usize, String)>,
    },
    /// Constant diagonal tail plus explicit entries.
    Matrix {
        tail: String,
        entries: Vec<(usize, usize, String)>,
    },
    Diagonal {
        #[serde(default)]
        entries: Vec<(usize, String)>,
        default: String,
    },
    #[serde(rename = "indexmap")]
    IndexMap {
        rule: RuleDoc,
        #[serde(default)]
        coeffs: Vec<(usize, String)>,
        default: String,
    },
    Sum {
        terms: Vec<OperatorDoc>,
    },
    /// The last factor acts first.
    Product {
        factors: Vec<OperatorDoc>,
    },
    #[serde(rename = "scalar")]
    ScalarMul {
        scalar: String,
        operator: Box<OperatorDoc>,
    },
    Adjoint {
        operator: Box<OperatorDoc>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorFile {
    #[serde(rename = "p")]
    pub prime: u32,
    pub precision: u32,
    #[serde(flatten)]
    pub operator: OperatorDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MahlerFile {
    #[serde(rename = "p")]
    pub prime: u32,
    pub precision: u32,
    pub coefficients: Vec<String>,
    /// Valuation of the bound on the dropped coefficients; absent for none.
    #[serde(default)]
    pub tail_bound: Option<i64>,
}

pub fn scalar(x: &Padic) -> String {
    x.to_string()
}

pub fn parse_scalar(ctx: Context, s: &str) -> Result<Padic, Error> {
    Padic::parse(ctx, s)
}

fn entries3(ctx: Context, v: &[(usize, usize, String)]) -> Result<Vec<(usize, usize, Padic)>, Error> {
    v.iter().map(|(i, j, s)| Ok((*i, *j, parse_scalar(ctx, s)?))).collect()
}

fn entries2(ctx: Context, v: &[(usize, String)]) -> Result<BTreeMap<usize, Padic>, Error> {
    v.iter().map(|(i, s)| Ok((*i, parse_scalar(ctx, s)?))).collect()
}

fn scheme_doc(s: PairingScheme) -> SchemeDoc {
    match s {
        PairingScheme::Cantor => SchemeDoc::Cantor,
        PairingScheme::Dyadic => SchemeDoc::Dyadic,
    }
}

pub fn scheme_from_doc(s: &SchemeDoc) -> PairingScheme {
    match s {
        SchemeDoc::Cantor => PairingScheme::Cantor,
        SchemeDoc::Dyadic => PairingScheme::Dyadic,
    }
}

fn rule_doc(rule: &IndexRule) -> RuleDoc {
    match rule {
        IndexRule::Finite(m) => RuleDoc::Finite(m.iter().map(|(j, i)| (*j, *i)).collect()),
        IndexRule::Shift(k) => RuleDoc::Shift(*k),
        IndexRule::BackShift(k) => RuleDoc::BackShift(*k),
        IndexRule::SumRing(map, scheme) => RuleDoc::SumRing {
            map: match map {
                SumRingMap::Alpha0 => MapDoc::Alpha0,
                SumRingMap::Beta0 => MapDoc::Beta0,
                SumRingMap::Alpha1 => MapDoc::Alpha1,
                SumRingMap::Beta1 => MapDoc::Beta1,
            },
            scheme: scheme_doc(*scheme),
        },
    }
}

fn rule_from_doc(rule: &RuleDoc) -> IndexRule {
    match rule {
        RuleDoc::Finite(pairs) => IndexRule::Finite(pairs.iter().copied().collect()),
        RuleDoc::Shift(k) => IndexRule::Shift(*k),
        RuleDoc::BackShift(k) => IndexRule::BackShift(*k),
        RuleDoc::SumRing { map, scheme } => IndexRule::SumRing(
            match map {
                MapDoc::Alpha0 => SumRingMap::Alpha0,
                MapDoc::Beta0 => SumRingMap::Beta0,
                MapDoc::Alpha1 => SumRingMap::Alpha1,
                MapDoc::Beta1 => SumRingMap::Beta1,
            },
            scheme_from_doc(scheme),
        ),
    }
}

pub fn operator_doc(op: &Operator) -> OperatorDoc {
    match op.repr() {
        Repr::Finite(entries) => OperatorDoc::Finite {
            entries: entries.iter().map(|((i, j), x)| (*i, *j, scalar(x))).collect(),
        },
        Repr::IndexMap { rule, coeffs, default_coeff } => OperatorDoc::IndexMap {
            rule: rule_doc(rule),
            coeffs: coeffs.iter().map(|(j, x)| (*j, scalar(x))).collect(),
            default: scalar(default_coeff),
        },
        Repr::Diagonal { entries, default } => OperatorDoc::Diagonal {
            entries: entries.iter().map(|(i, x)| (*i, scalar(x))).collect(),
            default: scalar(default),
        },
        Repr::Identity => OperatorDoc::Identity,
        Repr::Sum(terms) => OperatorDoc::Sum { terms: terms.iter().map(operator_doc).collect() },
        Repr::Product(factors) => OperatorDoc::Product { factors: factors.iter().map(operator_doc).collect() },
        Repr::ScalarMul(s, op) => OperatorDoc::ScalarMul { scalar: scalar(s), operator: Box::new(operator_doc(op)) },
        Repr::Adjoint(op) => OperatorDoc::Adjoint { operator: Box::new(operator_doc(op)) },
    }
}

pub fn matrix_doc(m: &Matrix) -> OperatorDoc {
    OperatorDoc::Matrix {
        tail: scalar(m.tail()),
        entries: m.explicit().map(|((i, j), x)| (i, j, scalar(x))).collect(),
    }
}

pub fn operator_from_doc(ctx: Context, doc: &OperatorDoc) -> Result<Operator, Error> {
    Ok(match doc {
        OperatorDoc::Identity => Operator::identity(ctx),
        OperatorDoc::Finite { entries } => Operator::finite(ctx, entries3(ctx, entries)?),
        OperatorDoc::Matrix { .. } => Operator::from_matrix(&matrix_from_doc(ctx, doc)?),
        OperatorDoc::Diagonal { entries, default } => {
            Operator::diagonal(ctx, entries2(ctx, entries)?, parse_scalar(ctx, default)?)?
        }
        OperatorDoc::IndexMap { rule, coeffs, default } => {
            Operator::index_map(ctx, rule_from_doc(rule), entries2(ctx, coeffs)?, parse_scalar(ctx, default)?)?
        }
        OperatorDoc::Sum { terms } => {
            Operator::sum(ctx, terms.iter().map(|t| operator_from_doc(ctx, t)).collect::<Result<_, _>>()?)
        }
        OperatorDoc::Product { factors } => {
            Operator::product(ctx, factors.iter().map(|t| operator_from_doc(ctx, t)).collect::<Result<_, _>>()?)
        }
        OperatorDoc::ScalarMul { scalar, operator } => {
            Operator::scalar_mul(parse_scalar(ctx, scalar)?, operator_from_doc(ctx, operator)?)?
        }
        OperatorDoc::Adjoint { operator } => Operator::adjoint_of(operator_from_doc(ctx, operator)?),
    })
}

/// A `matrix` document directly, anything else through materialization.
pub fn matrix_from_doc(ctx: Context, doc: &OperatorDoc) -> Result<Matrix, Error> {
    match doc {
        OperatorDoc::Matrix { tail, entries } => {
            Ok(Matrix::with_tail(ctx, parse_scalar(ctx, tail)?, entries3(ctx, entries)?))
        }
        other => operator_from_doc(ctx, other)?.materialize(),
    }
}

impl OperatorFile {
    pub fn context(&self) -> Result<Context, Error> {
        Context::new(self.prime, self.precision)
    }

    pub fn from_operator(op: &Operator) -> Self {
        let ctx = op.context();
        OperatorFile { prime: ctx.prime(), precision: ctx.precision(), operator: operator_doc(op) }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let ctx = m.context();
        OperatorFile { prime: ctx.prime(), precision: ctx.precision(), operator: matrix_doc(m) }
    }

    pub fn operator(&self) -> Result<Operator, Error> {
        operator_from_doc(self.context()?, &self.operator)
    }

    pub fn matrix(&self) -> Result<Matrix, Error> {
        matrix_from_doc(self.context()?, &self.operator)
    }
}

pub fn bound_exponent(b: ValuationBound) -> Option<i64> {
    b.exponent.finite()
}

impl MahlerFile {
    pub fn from_function(f: &MahlerFunction) -> Self {
        let ctx = f.context();
        MahlerFile {
            prime: ctx.prime(),
            precision: ctx.precision(),
            coefficients: f.coefficients().iter().map(scalar).collect(),
            tail_bound: bound_exponent(f.tail_bound()),
        }
    }

    pub fn function(&self) -> Result<MahlerFunction, Error> {
        let ctx = Context::new(self.prime, self.precision)?;
        let coeffs = self.coefficients.iter().map(|s| parse_scalar(ctx, s)).collect::<Result<Vec<_>, _>>()?;
        let bound = match self.tail_bound {
            Some(v) => ValuationBound::new(Valuation::Finite(v)),
            None => ValuationBound::ZERO,
        };
        MahlerFunction::new(ctx, coeffs, bound)
    }
}
