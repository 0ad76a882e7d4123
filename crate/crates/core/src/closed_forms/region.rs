use std::fmt;

use serde::Serialize;

use super::operators::NamedOperator;
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, hermitian_eig_with_tol, Matrix};
use crate::scalar::{Cx, Real};
use crate::CMatrix;

/// Eigenvalues closer than this are reported as one.
const EIG_CLUSTER_TOL: f64 = 1e-9;

/// `x·I + y·B` for a named direction `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub direction: NamedOperator,
    pub x: f64,
    pub y: f64,
}

impl FamilySpec {
    pub fn new(direction: NamedOperator, x: f64, y: f64) -> Self {
        Self { direction, x, y }
    }
}

pub fn family_matrix<T: Real>(f: &FamilySpec, n: usize) -> Result<Matrix<T>> {
    let b = f.direction.build::<T>(n)?;
    Ok(combine(&b, f.x, f.y))
}

fn combine<T: Real>(b: &Matrix<T>, x: f64, y: f64) -> Matrix<T> {
    let mut w = Matrix::identity(b.rows()).scale_real(T::lit(x));
    w.axpy(Cx::new(T::lit(y), T::zero()), b).expect("same shape");
    w
}

/// `x_coef·x + y_coef·y ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfPlane {
    pub x_coef: f64,
    pub y_coef: f64,
}

impl HalfPlane {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.x_coef * x + self.y_coef * y
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |c: f64, v: &str| -> String {
            if c == 1.0 {
                v.to_string()
            } else if c == -1.0 {
                format!("-{v}")
            } else {
                format!("{c}{v}")
            }
        };
        let x = term(self.x_coef, "x");
        if self.y_coef == 0.0 {
            return write!(f, "{x} >= 0");
        }
        let y = term(self.y_coef.abs(), "y");
        let sign = if self.y_coef < 0.0 { "-" } else { "+" };
        write!(f, "{x} {sign} {y} >= 0")
    }
}

/// Closed cone of `(x, y)` for which `x·I + y·B` is positive semidefinite.
#[derive(Clone, Debug, Serialize)]
pub struct PsdRegion {
    pub direction: String,
    pub dim: usize,
    /// Distinct eigenvalues of `B` with multiplicities.
    pub eigenvalues: Vec<(f64, usize)>,
    pub inequalities: Vec<HalfPlane>,
    /// Compact form, e.g. `x >= |y|`.
    pub description: String,
    pub closed: bool,
    pub note: String,
    /// Points on the boundary rays of the cone.
    pub boundary_samples: Vec<(f64, f64)>,
}

/// One grid point of a membership scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSample {
    pub x: f64,
    pub y: f64,
    pub min_eigenvalue: f64,
    pub inside: bool,
}

impl PsdRegion {
    /// Membership in the closed cone with slack `tol`.
    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        self.inequalities.iter().all(|h| h.value(x, y) >= -tol)
    }

    /// `steps × steps` grid over `[lo, hi]²` with the direct minimum eigenvalue of
    /// `x·I + y·B` and the cone's verdict at each point.
    pub fn grid(&self, direction: &CMatrix, lo: f64, hi: f64, steps: usize, tol: f64) -> Result<Vec<GridSample>> {
        let mut out = Vec::with_capacity(steps * steps);
        let span = (steps.max(2) - 1) as f64;
        for i in 0..steps {
            let x = lo + (hi - lo) * i as f64 / span;
            for j in 0..steps {
                let y = lo + (hi - lo) * j as f64 / span;
                let min_eigenvalue = hermitian_eig(&combine(direction, x, y))?.min_eigenvalue();
                out.push(GridSample { x, y, min_eigenvalue, inside: self.contains(x, y, tol) });
            }
        }
        Ok(out)
    }
}

/// Positivity cone of `x·I + y·B` for a named direction at local dimension `n`.
pub fn psd_region(direction: &NamedOperator, n: usize) -> Result<PsdRegion> {
    let b: CMatrix = direction.build(n)?;
    psd_region_of(&direction.to_string(), &b)
}

/// Positivity cone for an arbitrary Hermitian direction: `x + λ·y ≥ 0` for every eigenvalue λ.
pub fn psd_region_of(name: &str, b: &CMatrix) -> Result<PsdRegion> {
    let spec = hermitian_eig(b)?;
    let mut eigenvalues: Vec<(f64, usize)> = Vec::new();
    for &l in &spec.eigenvalues {
        match eigenvalues.last_mut() {
            Some((v, m)) if (l - *v).abs() <= EIG_CLUSTER_TOL * (1.0 + v.abs()) => *m += 1,
            _ => eigenvalues.push((l, 1)),
        }
    }
    // Snap eigenvalues that are integers up to round-off so the inequalities read cleanly.
    for (v, _) in &mut eigenvalues {
        if (*v - v.round()).abs() <= EIG_CLUSTER_TOL {
            *v = v.round() + 0.0;
        }
    }
    let lmin = eigenvalues.first().map_or(0.0, |e| e.0);
    let lmax = eigenvalues.last().map_or(0.0, |e| e.0);
    // x + λy is linear in λ, so the extreme eigenvalues carry every constraint.
    let mut inequalities = vec![HalfPlane { x_coef: 1.0, y_coef: lmin }];
    if lmax != lmin {
        inequalities.push(HalfPlane { x_coef: 1.0, y_coef: lmax });
    }

    let description = if lmin == -1.0 && lmax == 1.0 {
        "x >= |y|".to_string()
    } else {
        inequalities.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(", ")
    };
    let boundary_samples = boundary_rays(lmin, lmax)
        .iter()
        .flat_map(|&(dx, dy)| (1..=4).map(move |k| (dx * k as f64 * 0.5, dy * k as f64 * 0.5)))
        .collect();

    Ok(PsdRegion {
        direction: name.to_string(),
        dim: b.rows(),
        eigenvalues,
        inequalities,
        description,
        closed: true,
        note: "closed cone: boundary points (a zero eigenvalue) are positive semidefinite and included; \
               the strict form x > |y| describes the interior only"
            .to_string(),
        boundary_samples,
    })
}

/// Unit directions of the boundary rays of `{x + λmin·y ≥ 0, x + λmax·y ≥ 0}`.
fn boundary_rays(lmin: f64, lmax: f64) -> Vec<(f64, f64)> {
    let unit = |x: f64, y: f64| {
        let n = x.hypot(y);
        (x / n, y / n)
    };
    if lmin == lmax {
        // half-plane: the boundary line in both directions
        return vec![unit(-lmin, 1.0), unit(lmin, -1.0)];
    }
    // x = −λmax·y with y ≤ 0, and x = −λmin·y with y ≥ 0
    vec![unit(lmax, -1.0), unit(-lmin, 1.0)]
}

/// `W / tr W` for a positive semidefinite `W`.
pub fn normalize_state<T: Real>(w: &Matrix<T>) -> Result<Matrix<T>> {
    let tol = T::default_tol();
    let spec = hermitian_eig_with_tol(w, tol)?;
    let min = spec.min_eigenvalue();
    if min < -tol {
        return Err(Error::NotPsd { min_eigenvalue: min.to_f64_lossy() });
    }
    let tr = w.trace().re;
    if tr <= T::min_positive_value() {
        return Err(Error::ZeroTrace);
    }
    Ok(w.scale_real(T::one() / tr))
}
