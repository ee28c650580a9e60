//! JSON wire formats for matrices and channels.
//!
//! Matrix: `{ "dim": n, "re": [[...]], "im": [[...]] }`, row-major. `im` may be
//! omitted for real matrices. Channel: `{ "in_dim": n, "out_dim": k, "kraus":
//! [matrix, ...] }` where each Kraus operator is `k x n` and its `dim` field
//! holds the row count `k`.

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{complex_from_parts, CMatrix, HermitianMatrix};
use crate::state::{DensityMatrix, Observable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |part: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: m.nrows(),
            re: rows(|z| z.re),
            im: Some(rows(|z| z.im)),
        }
    }

    /// The matrix, with `re.len() == dim` enforced. Rows may be shorter or
    /// longer than `dim` only where the caller accepts rectangular data.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.re.len() != self.dim {
            return Err(Error::Format(format!(
                "field \"re\" has {} rows but \"dim\" is {}",
                self.re.len(),
                self.dim
            )));
        }
        let im = match &self.im {
            Some(im) => im.clone(),
            None => self.re.iter().map(|r| vec![0.0; r.len()]).collect(),
        };
        complex_from_parts(&self.re, &im)
    }

    pub fn to_square(&self) -> Result<CMatrix> {
        let m = self.to_matrix()?;
        if m.ncols() != self.dim {
            return Err(Error::Format(format!(
                "expected {0}x{0} entries, rows have length {1}",
                self.dim,
                m.ncols()
            )));
        }
        Ok(m)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_square()?)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_hermitian()?)
    }

    pub fn to_observable(&self) -> Result<Observable> {
        Ok(Observable::new(self.to_hermitian()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            in_dim: ch.in_dim(),
            out_dim: ch.out_dim(),
            kraus: ch.kraus().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(s, k)| {
                let m = k.to_matrix()?;
                if m.shape() != (self.out_dim, self.in_dim) {
                    return Err(Error::Format(format!(
                        "kraus[{s}] is {}x{}, expected {}x{}",
                        m.nrows(),
                        m.ncols(),
                        self.out_dim,
                        self.in_dim
                    )));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(kraus)
    }
}

pub fn parse_matrix(text: &str) -> Result<MatrixJson> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn parse_channel(text: &str) -> Result<ChannelJson> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))
}
