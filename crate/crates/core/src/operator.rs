//! Data model for semi-infinite T-periodic Jacobi matrices.
//!
//! Sites are 1-based to match the index convention n = T(k-1) + s with
//! s in {0, .., T-1}; n = 0 only appears internally through a_0 := a_T.

use std::path::Path;

use serde::Deserialize;

use crate::exact::{parse_rat, rat_from_f64, rat_to_f64, BigRat};
use crate::{Error, Result};

/// A T-periodic Jacobi operator: positive off-diagonal a_1..a_T, diagonal
/// b_1..b_T, with optional exact rational mirrors of both sequences.
#[derive(Clone, Debug)]
pub struct PeriodicJacobi {
    a: Vec<f64>,
    b: Vec<f64>,
    exact_a: Option<Vec<BigRat>>,
    exact_b: Option<Vec<BigRat>>,
}

/// Decomposition of a site index as n = T(k-1) + s.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteIndex {
    pub n: usize,
    pub k: usize,
    pub s: usize,
}

impl PeriodicJacobi {
    /// Build from real sequences; no exact mirrors.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::validate(&a, &b)?;
        Ok(PeriodicJacobi {
            a,
            b,
            exact_a: None,
            exact_b: None,
        })
    }

    /// Build from exact rational sequences; the real sequences are the
    /// (nearest-double) images and the mirrors are kept.
    pub fn from_rationals(exact_a: Vec<BigRat>, exact_b: Vec<BigRat>) -> Result<Self> {
        let a: Vec<f64> = exact_a.iter().map(rat_to_f64).collect();
        let b: Vec<f64> = exact_b.iter().map(rat_to_f64).collect();
        Self::validate(&a, &b)?;
        Ok(PeriodicJacobi {
            a,
            b,
            exact_a: Some(exact_a),
            exact_b: Some(exact_b),
        })
    }

    fn validate(a: &[f64], b: &[f64]) -> Result<()> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "need equal-length nonempty coefficient sequences, got |a| = {}, |b| = {}",
                a.len(),
                b.len()
            )));
        }
        for (i, &ai) in a.iter().enumerate() {
            if !(ai > 0.0) {
                return Err(Error::NonPositiveOffDiagonal {
                    index: i + 1,
                    value: ai,
                });
            }
        }
        Ok(())
    }

    pub fn period(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn has_exact(&self) -> bool {
        self.exact_a.is_some()
    }

    pub fn exact_a(&self) -> Result<&[BigRat]> {
        self.exact_a.as_deref().ok_or(Error::ExactUnavailable)
    }

    pub fn exact_b(&self) -> Result<&[BigRat]> {
        self.exact_b.as_deref().ok_or(Error::ExactUnavailable)
    }

    pub fn diagonal_is_zero(&self) -> bool {
        self.b.iter().all(|&x| x == 0.0)
    }

    /// Off-diagonal entry a_n for any n >= 0 (a_0 resolves to a_T).
    pub fn a_at(&self, n: usize) -> f64 {
        let t = self.period();
        self.a[(n + t - 1) % t]
    }

    /// Diagonal entry b_n for n >= 1.
    pub fn b_at(&self, n: usize) -> f64 {
        let t = self.period();
        self.b[(n + t - 1) % t]
    }

    pub fn exact_a_at(&self, n: usize) -> Result<BigRat> {
        let t = self.period();
        Ok(self.exact_a()?[(n + t - 1) % t].clone())
    }

    pub fn exact_b_at(&self, n: usize) -> Result<BigRat> {
        let t = self.period();
        Ok(self.exact_b()?[(n + t - 1) % t].clone())
    }

    /// Decompose n = T(k-1) + s and return (a_n, b_n, index).
    pub fn site(&self, n: usize) -> (f64, f64, SiteIndex) {
        assert!(n >= 1, "sites are 1-based");
        (self.a_at(n), self.b_at(n), self.site_index(n))
    }

    pub fn site_index(&self, n: usize) -> SiteIndex {
        let t = self.period();
        SiteIndex {
            n,
            k: n / t + 1,
            s: n % t,
        }
    }

    /// Crude enclosure of the spectrum used as a numeric sanity check.
    pub fn spectrum_enclosure(&self) -> (f64, f64) {
        let t = self.period();
        let pair_max = (0..t)
            .map(|i| self.a[i] + self.a[(i + 1) % t])
            .fold(f64::MIN, f64::max);
        let b_min = self.b.iter().cloned().fold(f64::MAX, f64::min);
        let b_max = self.b.iter().cloned().fold(f64::MIN, f64::max);
        (-pair_max + b_min.min(0.0), pair_max + b_max.max(0.0))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonEntry {
    Number(f64),
    Rational(String),
}

#[derive(Deserialize)]
struct OperatorFile {
    a: Vec<JsonEntry>,
    b: Vec<JsonEntry>,
}

fn entries_to_rats(entries: &[JsonEntry]) -> Result<Vec<BigRat>> {
    entries
        .iter()
        .map(|e| match e {
            // finite doubles are exact rationals, so plain JSON numbers
            // still feed the exact path
            JsonEntry::Number(x) => rat_from_f64(*x)
                .ok_or_else(|| Error::Parse(format!("non-finite coefficient {x}"))),
            JsonEntry::Rational(s) => parse_rat(s),
        })
        .collect()
}

/// Parse the operator JSON format: `{"a": [...], "b": [...]}` where each
/// entry is a number or a "p/q" string.
pub fn operator_from_json(text: &str) -> Result<PeriodicJacobi> {
    let file: OperatorFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    PeriodicJacobi::from_rationals(entries_to_rats(&file.a)?, entries_to_rats(&file.b)?)
}

pub fn operator_from_path(path: &Path) -> Result<PeriodicJacobi> {
    operator_from_json(&std::fs::read_to_string(path)?)
}
