use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{kron, Matrix, DEFAULT_DIM_CAP};
use crate::scalar::{Cx, Real};

/// Permutation operators are supported on at most this many tensor factors.
pub const MAX_TENSOR_FACTORS: usize = 4;

/// Permutation of `k` tensor slots, stored as 0-based images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Self((0..k).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::BadParams(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self(images))
    }

    /// Parses 1-based cycle notation such as `(1 2 3)(4)`; `()` is the identity.
    pub fn from_cycles(k: usize, text: &str) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut seen = vec![false; k];
        let bad = |msg: &str| Error::BadParams(format!("cycle notation `{text}`: {msg}"));
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body_end = rest.find(')').ok_or_else(|| bad("missing `)`"))?;
            let body = rest.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let body = &body[..body_end - 1];
            let elems: Vec<usize> = body
                .split([' ', ','])
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("non-numeric entry")))
                .collect::<Result<_>>()?;
            for &e in &elems {
                if e == 0 || e > k {
                    return Err(bad("entry out of range"));
                }
                if std::mem::replace(&mut seen[e - 1], true) {
                    return Err(bad("repeated entry"));
                }
            }
            for (a, b) in elems.iter().zip(elems.iter().cycle().skip(1)) {
                images[a - 1] = b - 1;
            }
            rest = rest[body_end + 1..].trim_start();
        }
        Ok(Self(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// All permutations of `k` slots in lexicographic order of images.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
            let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).expect("exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// 1-based cycle notation omitting fixed points, `()` for the identity.
    pub fn cycle_notation(&self) -> String {
        let k = self.0.len();
        let mut seen = vec![false; k];
        let mut out = String::new();
        for start in 0..k {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cyc = vec![start + 1];
            seen[start] = true;
            let mut cur = self.0[start];
            while cur != start {
                seen[cur] = true;
                cyc.push(cur + 1);
                cur = self.0[cur];
            }
            out.push('(');
            out.push_str(&cyc.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Swap operator `F_n = Σ_ij |i⟩⟨j| ⊗ |j⟩⟨i|`, so that `F(a⊗b) = b⊗a`.
pub fn swap_operator<T: Real>(n: usize) -> Result<Matrix<T>> {
    permutation_operator(&Permutation(vec![1, 0]), n)
}

/// `|Ω⟩⟨Ω|` for the unnormalised `Ω = Σ_i |ii⟩`.
pub fn omega_projector<T: Real>(n: usize) -> Result<Matrix<T>> {
    check_size(n, 2)?;
    let d = n * n;
    let mut m = Matrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + i, j * n + j)] = Cx::new(T::one(), T::zero());
        }
    }
    Ok(m)
}

/// `M⊗M` with `M = [[0,1],[−1,0]]`.
pub fn m_tensor_m<T: Real>() -> Matrix<T> {
    let m = Matrix::from_real(2, 2, &[0., 1., -1., 0.]).expect("finite");
    kron(&m, &m).expect("4x4")
}

fn check_size(n: usize, k: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::BadParams("dimension must be positive".into()));
    }
    let mut d: usize = 1;
    for _ in 0..k {
        d = d
            .checked_mul(n)
            .filter(|&d| d <= DEFAULT_DIM_CAP)
            .ok_or(Error::SizeOverflow { dim: d.saturating_mul(n), cap: DEFAULT_DIM_CAP })?;
    }
    Ok(d)
}

/// Operator on `(ℂⁿ)^{⊗k}` moving tensor slot `p` to slot `σ(p)`.
pub fn permutation_operator<T: Real>(sigma: &Permutation, n: usize) -> Result<Matrix<T>> {
    let k = sigma.len();
    if k == 0 || k > MAX_TENSOR_FACTORS {
        return Err(Error::BadParams(format!("permutation operators support 1..={MAX_TENSOR_FACTORS} factors, got {k}")));
    }
    let d = check_size(n, k)?;
    let mut m = Matrix::zeros(d, d);
    let mut digits = vec![0usize; k];
    let mut out = vec![0usize; k];
    for col in 0..d {
        let mut rem = col;
        for p in (0..k).rev() {
            digits[p] = rem % n;
            rem /= n;
        }
        for p in 0..k {
            out[sigma.image(p)] = digits[p];
        }
        let row = out.iter().fold(0, |acc, &x| acc * n + x);
        m[(row, col)] = Cx::new(T::one(), T::zero());
    }
    Ok(m)
}

/// Operators that can serve as the direction of an `x·I + y·B` family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedOperator {
    /// `F_n`.
    Swap,
    /// `F_n ⊗ I_n`.
    SwapId,
    /// `|Ω⟩⟨Ω|`.
    Omega,
    /// `M⊗M`, only for `n = 2`.
    MTensorM,
    /// Permutation operator on `k` factors.
    Perm(Permutation),
}

impl NamedOperator {
    /// Accepts `F`/`swap`, `F⊗I`/`FxI`/`F_I`, `Omega`/`Ω`, `M⊗M`/`MxM`, and `S<k>(cycles)`.
    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim();
        match s {
            "F" | "swap" => return Ok(Self::Swap),
            "F⊗I" | "FxI" | "F_I" | "swap_id" => return Ok(Self::SwapId),
            "Omega" | "Ω" | "omega" => return Ok(Self::Omega),
            "M⊗M" | "MxM" | "M_M" | "mm" => return Ok(Self::MTensorM),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('S') {
            let split = rest.find('(').ok_or_else(|| Error::UnknownOperator(name.into()))?;
            let k: usize = rest[..split].parse().map_err(|_| Error::UnknownOperator(name.into()))?;
            if (1..=MAX_TENSOR_FACTORS).contains(&k) {
                return Permutation::from_cycles(k, &rest[split..]).map(Self::Perm);
            }
        }
        Err(Error::UnknownOperator(name.into()))
    }

    pub fn build<T: Real>(&self, n: usize) -> Result<Matrix<T>> {
        match self {
            Self::Swap => swap_operator(n),
            Self::SwapId => permutation_operator(&Permutation(vec![1, 0, 2]), n),
            Self::Omega => omega_projector(n),
            Self::MTensorM if n == 2 => Ok(m_tensor_m()),
            Self::MTensorM => Err(Error::BadParams(format!("M⊗M is only defined for n = 2, got {n}"))),
            Self::Perm(p) => permutation_operator(p, n),
        }
    }
}

impl fmt::Display for NamedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Swap => f.write_str("F"),
            Self::SwapId => f.write_str("F⊗I"),
            Self::Omega => f.write_str("Omega"),
            Self::MTensorM => f.write_str("M⊗M"),
            Self::Perm(p) => write!(f, "S{}{}", p.len(), p.cycle_notation()),
        }
    }
}
