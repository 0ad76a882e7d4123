use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron_all, Matrix, Modifier, DEFAULT_DIM_CAP};
use crate::scalar::Real;

/// Group a word variable ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Unitary,
    Orthogonal,
    Permutation,
}

impl Group {
    /// Real groups have trivial conjugation.
    pub fn is_real(self) -> bool {
        !matches!(self, Group::Unitary)
    }
}

impl std::str::FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary" | "U" => Ok(Group::Unitary),
            "orthogonal" | "O" => Ok(Group::Orthogonal),
            "permutation" | "S" => Ok(Group::Permutation),
            _ => Err(Error::BadParams(format!("unknown group `{s}`"))),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Unitary => "unitary",
            Group::Orthogonal => "orthogonal",
            Group::Permutation => "permutation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    pub group: Group,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub var: String,
    pub modifier: Modifier,
}

/// A parsed tensor word such as `U,U,U^H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryWord {
    factors: Vec<Factor>,
    vars: BTreeMap<String, VarSpec>,
}

impl SymmetryWord {
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn vars(&self) -> &BTreeMap<String, VarSpec> {
        &self.vars
    }

    pub fn var(&self, name: &str) -> Option<VarSpec> {
        self.vars.get(name).copied()
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| self.vars[&f.var].dim).collect()
    }

    /// Dimension of the space the instantiated word acts on.
    pub fn total_dim(&self) -> usize {
        self.factor_dims().iter().product()
    }

    /// `Some((name, dim))` when the word uses exactly one variable of the unitary group.
    pub fn single_unitary_var(&self) -> Option<(&str, usize)> {
        let mut it = self.vars.iter();
        match (it.next(), it.next()) {
            (Some((name, spec)), None) if spec.group == Group::Unitary => Some((name.as_str(), spec.dim)),
            _ => None,
        }
    }

    /// Common local dimension if every factor has the same one.
    pub fn uniform_dim(&self) -> Option<usize> {
        let dims = self.factor_dims();
        let first = *dims.first()?;
        dims.iter().all(|&d| d == first).then_some(first)
    }

    pub fn dims(&self) -> BTreeMap<String, usize> {
        self.vars.iter().map(|(k, v)| (k.clone(), v.dim)).collect()
    }

    pub fn groups(&self) -> BTreeMap<String, Group> {
        self.vars.iter().map(|(k, v)| (k.clone(), v.group)).collect()
    }
}

impl fmt::Display for SymmetryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}{}", factor.var, factor.modifier.suffix())?;
        }
        Ok(())
    }
}

/// Parses `FACTOR ("," FACTOR)*` with `FACTOR := VAR SUFFIX?` and
/// `SUFFIX := "*" | "^T" | "^H"`. Variables without an explicit group are
/// unitary; spaces around factors are ignored.
pub fn parse_word(text: &str, dims: &BTreeMap<String, usize>, groups: &BTreeMap<String, Group>) -> Result<SymmetryWord> {
    parse_word_with_cap(text, dims, groups, DEFAULT_DIM_CAP)
}

pub fn parse_word_with_cap(
    text: &str,
    dims: &BTreeMap<String, usize>,
    groups: &BTreeMap<String, Group>,
    cap: usize,
) -> Result<SymmetryWord> {
    let parse_err = |position: usize, message: &str| Error::Parse { position, message: message.to_string() };
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut raw: Vec<(String, Modifier)> = Vec::new();

    let skip_spaces = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos] == b' ' {
            *pos += 1;
        }
    };

    loop {
        skip_spaces(&mut pos);
        let start = pos;
        if pos >= bytes.len() || !(bytes[pos].is_ascii_alphabetic() || bytes[pos] == b'_') {
            return Err(parse_err(pos, "expected variable name"));
        }
        while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
            pos += 1;
        }
        let var = text[start..pos].to_string();
        let modifier = match bytes.get(pos) {
            Some(b'*') => {
                pos += 1;
                Modifier::Conj
            }
            Some(b'^') => match bytes.get(pos + 1) {
                Some(b'T') => {
                    pos += 2;
                    Modifier::Transpose
                }
                Some(b'H') => {
                    pos += 2;
                    Modifier::ConjTranspose
                }
                _ => return Err(parse_err(pos + 1, "expected `T` or `H` after `^`")),
            },
            _ => Modifier::Id,
        };
        raw.push((var, modifier));
        skip_spaces(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b',') => pos += 1,
            Some(_) => return Err(parse_err(pos, "expected `,` or end of word")),
        }
    }

    let mut vars = BTreeMap::new();
    for (var, _) in &raw {
        if vars.contains_key(var) {
            continue;
        }
        let dim = *dims.get(var).ok_or_else(|| Error::DimMissing(var.clone()))?;
        if dim == 0 {
            return Err(Error::BadParams(format!("dimension of `{var}` must be positive")));
        }
        let group = groups.get(var).copied().unwrap_or(Group::Unitary);
        vars.insert(var.clone(), VarSpec { group, dim });
    }

    let factors = raw
        .into_iter()
        .map(|(var, modifier)| {
            let modifier = if vars[&var].group.is_real() {
                match modifier {
                    Modifier::Conj => Modifier::Id,
                    Modifier::ConjTranspose => Modifier::Transpose,
                    m => m,
                }
            } else {
                modifier
            };
            Factor { var, modifier }
        })
        .collect();
    let word = SymmetryWord { factors, vars };

    let mut total: usize = 1;
    for d in word.factor_dims() {
        total = total.checked_mul(d).filter(|&t| t <= cap).ok_or(Error::SizeOverflow { dim: total.saturating_mul(d), cap })?;
    }
    Ok(word)
}

/// Concrete matrices substituted for the variables of a word.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorAssignment<T: Real> {
    pub matrices: BTreeMap<String, Matrix<T>>,
}

impl<T: Real> GeneratorAssignment<T> {
    pub fn new(matrices: BTreeMap<String, Matrix<T>>) -> Self {
        Self { matrices }
    }

    pub fn single(var: &str, m: Matrix<T>) -> Self {
        Self { matrices: BTreeMap::from([(var.to_string(), m)]) }
    }

    pub fn get(&self, var: &str) -> Option<&Matrix<T>> {
        self.matrices.get(var)
    }

    /// Checks shapes, unitarity and (for real groups) realness against `word`.
    pub fn validate(&self, word: &SymmetryWord) -> Result<()> {
        let tol = T::default_tol();
        for (name, spec) in word.vars() {
            let m = self.matrices.get(name).ok_or_else(|| Error::BadParams(format!("no matrix for `{name}`")))?;
            if m.shape() != (spec.dim, spec.dim) {
                return Err(Error::DimensionMismatch { op: "assignment", left: m.shape(), right: (spec.dim, spec.dim) });
            }
            let defect = m.unitarity_defect();
            if defect > tol {
                return Err(Error::BadParams(format!("matrix for `{name}` is not unitary (defect {defect:e})")));
            }
            if spec.group.is_real() && !m.is_real(tol * T::lit(1e-2)) {
                return Err(Error::BadParams(format!("matrix for `{name}` must be real")));
            }
        }
        Ok(())
    }
}

/// Kronecker product over the factors of `modifier(g[var])`.
pub fn instantiate_word<T: Real>(word: &SymmetryWord, g: &GeneratorAssignment<T>) -> Result<Matrix<T>> {
    let mut parts = Vec::with_capacity(word.factors().len());
    for f in word.factors() {
        let spec = word.vars()[&f.var];
        let m = g.get(&f.var).ok_or_else(|| Error::BadParams(format!("no matrix for `{}`", f.var)))?;
        if m.shape() != (spec.dim, spec.dim) {
            return Err(Error::DimensionMismatch { op: "instantiate_word", left: m.shape(), right: (spec.dim, spec.dim) });
        }
        parts.push(m.apply_modifier(f.modifier));
    }
    kron_all(parts.iter(), usize::MAX)
}
