//! Inequality ledgers shared by the certificate builders.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::rat::{sig12, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    fn eval<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// One evaluated inequality. Exact values are serialized as `p/q`, advisory
/// floating-point values as 12-significant-digit decimals.
#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub holds: bool,
    /// Non-binding entries are reported but never fail a certificate.
    pub binding: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(transparent)]
pub struct Ledger {
    pub entries: Vec<Inequality>,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger::default()
    }

    pub fn exact(&mut self, name: &str, lhs: Rat, relation: Relation, rhs: Rat) -> bool {
        self.push_exact(name, lhs, relation, rhs, true)
    }

    pub fn exact_advisory(&mut self, name: &str, lhs: Rat, relation: Relation, rhs: Rat) -> bool {
        self.push_exact(name, lhs, relation, rhs, false)
    }

    pub fn count(
        &mut self,
        name: &str,
        lhs: impl Into<BigInt>,
        relation: Relation,
        rhs: impl Into<BigInt>,
    ) -> bool {
        self.exact(
            name,
            Rat::from_integer(lhs),
            relation,
            Rat::from_integer(rhs),
        )
    }

    fn push_exact(
        &mut self,
        name: &str,
        lhs: Rat,
        relation: Relation,
        rhs: Rat,
        binding: bool,
    ) -> bool {
        let holds = relation.eval(&lhs, &rhs);
        self.entries.push(Inequality {
            name: name.to_string(),
            lhs: lhs.to_fraction_string(),
            relation,
            rhs: rhs.to_fraction_string(),
            holds,
            binding,
        });
        holds
    }

    /// Floating-point comparison; always advisory.
    pub fn real(&mut self, name: &str, lhs: f64, relation: Relation, rhs: f64) -> bool {
        let holds = relation.eval(&lhs, &rhs);
        self.entries.push(Inequality {
            name: name.to_string(),
            lhs: sig12(lhs),
            relation,
            rhs: sig12(rhs),
            holds,
            binding: false,
        });
        holds
    }

    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn holds(&self, name: &str) -> Option<bool> {
        self.get(name).map(|e| e.holds)
    }

    pub fn all_binding_hold(&self) -> bool {
        self.entries.iter().filter(|e| e.binding).all(|e| e.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality> {
        self.entries.iter().filter(|e| e.binding && !e.holds)
    }

    pub fn extend(&mut self, other: Ledger) {
        self.entries.extend(other.entries);
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let tag = match (e.holds, e.binding) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "note",
            };
            writeln!(f, "{tag:4}  {}: {} {} {}", e.name, e.lhs, e.relation, e.rhs)?;
        }
        Ok(())
    }
}
