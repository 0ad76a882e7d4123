//! Command-line arguments and the reproducibility header.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commutant_core::symmetry::{parse_word, Group, SymmetryWord};
use commutant_core::Error;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "commutant", version, about = "Commutants of tensor-word unitary symmetries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute and recognise the commutant of a word.
    Commutant(CommonArgs),
    /// Check a matrix for invariance under a word.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Matrix JSON file.
        matrix: PathBuf,
        /// Haar trials on top of the structured generators.
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Monte-Carlo twirl of a matrix onto the commutant.
    Twirl {
        #[command(flatten)]
        common: CommonArgs,
        /// Matrix JSON file.
        matrix: PathBuf,
        /// Number of twirl terms.
        #[arg(short = 'N', long = "n-twirl", default_value_t = 1000)]
        n: usize,
        /// Comma-separated sample counts for a convergence table, e.g. 100,1000,10000.
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        /// Write the convergence table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Positivity cone of x·I + y·B.
    Region {
        #[command(flatten)]
        common: CommonArgs,
        /// Direction operator: F, F⊗I, Omega, M⊗M or S<k>(cycles).
        #[arg(long)]
        direction: String,
        /// Write the membership grid (x, y, min_eigenvalue, inside) as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// Grid half-width.
        #[arg(long, default_value_t = 2.0)]
        range: f64,
    },
    /// Commutant, recognition, block structure and algebra checks in one summary.
    Report(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Symmetry word, e.g. "U,U,U^H".
    #[arg(long, default_value = "")]
    pub word: String,
    /// Variable dimension VAR=n (repeatable); a bare n applies to every variable.
    #[arg(long = "dim", value_parser = parse_dim)]
    pub dims: Vec<DimArg>,
    /// Variable group VAR=unitary|orthogonal|permutation (repeatable).
    #[arg(long = "group", value_parser = parse_group)]
    pub groups: Vec<(String, Group)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial Haar samples for the commutant solver.
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
    /// Tolerance override key=value (rank, gap, verify, region).
    #[arg(long = "tol", value_parser = parse_tol)]
    pub tols: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimArg {
    pub var: Option<String>,
    pub n: usize,
}

fn parse_dim(s: &str) -> Result<DimArg, String> {
    let (var, n) = match s.split_once('=') {
        Some((v, n)) => (Some(v.trim().to_string()), n),
        None => (None, s),
    };
    let n: usize = n.trim().parse().map_err(|_| format!("bad dimension `{s}`"))?;
    if n == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok(DimArg { var, n })
}

fn parse_group(s: &str) -> Result<(String, Group), String> {
    let (v, g) = s.split_once('=').ok_or_else(|| format!("expected VAR=group, got `{s}`"))?;
    Ok((v.trim().to_string(), g.trim().parse().map_err(|e: Error| e.to_string())?))
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let k = k.trim();
    if !TOL_KEYS.contains(&k) {
        return Err(format!("unknown tolerance `{k}` (expected one of {})", TOL_KEYS.join(", ")));
    }
    let v: f64 = v.trim().parse().map_err(|_| format!("bad tolerance value `{v}`"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err("tolerances must be positive".into());
    }
    Ok((k.to_string(), v))
}

pub const TOL_KEYS: [&str; 4] = ["rank", "gap", "verify", "region"];

/// Every input that determines an artifact, serialised at its top.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub word: String,
    pub dims: BTreeMap<String, usize>,
    pub groups: BTreeMap<String, String>,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub format: Format,
    pub out: Option<String>,
    /// Command-specific inputs.
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl CommonArgs {
    pub fn tol(&self, key: &str) -> f64 {
        self.tols.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or(match key {
            "rank" => 1e-10,
            "gap" => 1e6,
            "verify" => 1e-8,
            "region" => 1e-10,
            _ => unreachable!("validated key"),
        })
    }

    pub fn tolerances(&self) -> BTreeMap<String, f64> {
        TOL_KEYS.iter().map(|k| (k.to_string(), self.tol(k))).collect()
    }

    pub fn group_map(&self) -> BTreeMap<String, Group> {
        self.groups.iter().cloned().collect()
    }

    /// Parses `--word`, filling variables without an explicit `VAR=n` from a bare `--dim n`.
    pub fn word(&self) -> Result<SymmetryWord, Error> {
        if self.word.trim().is_empty() {
            return Err(Error::BadParams("--word is required".into()));
        }
        let mut dims: BTreeMap<String, usize> = self.dims.iter().filter_map(|d| d.var.clone().map(|v| (v, d.n))).collect();
        let fallback = self.dims.iter().rev().find(|d| d.var.is_none()).map(|d| d.n);
        loop {
            match parse_word(&self.word, &dims, &self.group_map()) {
                Err(Error::DimMissing(v)) if fallback.is_some() && !dims.contains_key(&v) => {
                    dims.insert(v, fallback.expect("checked"));
                }
                other => return other,
            }
        }
    }

    /// Single local dimension for commands without a word.
    pub fn single_dim(&self) -> Result<usize, Error> {
        match self.dims.as_slice() {
            [d] => Ok(d.n),
            [] => Err(Error::BadParams("--dim is required".into())),
            _ => Err(Error::BadParams("exactly one --dim expected".into())),
        }
    }

    pub fn config(&self, command: &str, word: Option<&SymmetryWord>) -> RunConfig {
        let (dims, groups) = match word {
            Some(w) => (w.dims(), w.groups().into_iter().map(|(k, g)| (k, g.to_string())).collect()),
            None => (
                self.dims.iter().map(|d| (d.var.clone().unwrap_or_else(|| "n".into()), d.n)).collect(),
                self.groups.iter().map(|(k, g)| (k.clone(), g.to_string())).collect(),
            ),
        };
        RunConfig {
            command: command.to_string(),
            word: word.map(|w| w.to_string()).unwrap_or_else(|| self.word.clone()),
            dims,
            groups,
            seed: self.seed,
            samples: self.samples,
            tolerances: self.tolerances(),
            format: self.format,
            out: self.out.as_ref().map(|p| p.display().to_string()),
            extra: BTreeMap::new(),
        }
    }
}
