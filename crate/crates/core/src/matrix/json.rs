use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::Error;
use crate::scalar::{Cx, Real};

/// Wire form of a matrix: `{"rows": R, "cols": C, "data": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl<T: Real> From<&Matrix<T>> for MatrixJson {
    fn from(m: &Matrix<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect(),
        }
    }
}

impl<T: Real> TryFrom<MatrixJson> for Matrix<T> {
    type Error = Error;

    fn try_from(raw: MatrixJson) -> Result<Self, Error> {
        let data = raw.data.iter().map(|&[re, im]| Cx::new(T::lit(re), T::lit(im))).collect();
        Matrix::new(raw.rows, raw.cols, data)
    }
}

#[cfg(test)]
mod tests {
    use crate::CMatrix;

    #[test]
    fn wire_format_is_row_major_pairs() {
        let m = CMatrix::from_pairs(&[vec![(1., 0.), (0., -1.)], vec![(2.5, 0.), (0., 0.)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"data":[[1.0,0.0],[0.0,-1.0],[2.5,0.0],[0.0,0.0]]}"#);
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_inconsistent_length() {
        let bad = r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
    }
}
