//! JSON formats for states, channels and complex matrices.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows:
//!
//! ```json
//! {"dims": [2, 2], "matrix": [[[0.5, 0], [0, 0], ...], ...]}
//! {"dim": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], ...]}
//! ```
//!
//! A flat row-major list of `d*d` pairs is accepted on input as well.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::linalg::{c64, ComplexMatrix};
use crate::numerics::{validate_density, DensityMatrix, ProductBasis, Tolerances};

/// Largest total Hilbert-space dimension accepted from external input.
pub const MAX_DIM: usize = 64;

/// Largest number of Kraus operators accepted from external input.
pub const MAX_KRAUS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Nested(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

fn matrix_from_repr(repr: MatrixRepr) -> std::result::Result<ComplexMatrix, String> {
    match repr {
        MatrixRepr::Nested(rows) => {
            let n = rows.len();
            if n > MAX_DIM {
                return Err(format!("matrix dimension {n} exceeds {MAX_DIM}"));
            }
            if let Some(bad) = rows.iter().position(|r| r.len() != n) {
                return Err(format!(
                    "row {bad} has {} entries, expected {n}",
                    rows[bad].len()
                ));
            }
            Ok(ComplexMatrix::from_fn(n, n, |i, j| {
                let [re, im] = rows[i][j];
                c64(re, im)
            }))
        }
        MatrixRepr::Flat(entries) => {
            let n = (entries.len() as f64).sqrt().round() as usize;
            if n * n != entries.len() {
                return Err(format!("{} entries do not form a square matrix", entries.len()));
            }
            if n > MAX_DIM {
                return Err(format!("matrix dimension {n} exceeds {MAX_DIM}"));
            }
            Ok(ComplexMatrix::from_fn(n, n, |i, j| {
                let [re, im] = entries[i * n + j];
                c64(re, im)
            }))
        }
    }
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Serde adapter for `ComplexMatrix` fields (`#[serde(with = "io::matrix")]`).
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        matrix_from_repr(MatrixRepr::deserialize(d)?).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<ComplexMatrix>` fields.
pub mod matrix_list {
    use super::*;

    pub fn serialize<S: Serializer>(
        ms: &[ComplexMatrix],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ms.iter().map(matrix_to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
        let reprs = Vec::<MatrixRepr>::deserialize(d)?;
        if reprs.len() > MAX_KRAUS {
            return Err(D::Error::custom(format!("more than {MAX_KRAUS} matrices")));
        }
        reprs
            .into_iter()
            .map(|r| matrix_from_repr(r).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<ComplexMatrix>` fields.
pub mod opt_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &Option<ComplexMatrix>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        m.as_ref().map(matrix_to_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<ComplexMatrix>, D::Error> {
        Option::<MatrixRepr>::deserialize(d)?
            .map(|r| matrix_from_repr(r).map_err(D::Error::custom))
            .transpose()
    }
}

/// Wire form of a density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    #[serde(with = "matrix")]
    pub matrix: ComplexMatrix,
}

/// Wire form of a Kraus channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim: usize,
    #[serde(with = "matrix_list")]
    pub kraus: Vec<ComplexMatrix>,
}

impl From<&DensityMatrix> for StateJson {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.dims().to_vec(),
            matrix: rho.matrix().clone(),
        }
    }
}

impl From<&KrausChannel> for ChannelJson {
    fn from(ch: &KrausChannel) -> Self {
        Self {
            dim: ch.dim(),
            kraus: ch.kraus().to_vec(),
        }
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StateJson::from(self).serialize(s)
    }
}

impl Serialize for KrausChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson::from(self).serialize(s)
    }
}

impl Serialize for ProductBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_list::serialize(self.factors(), s)
    }
}

impl<'de> Deserialize<'de> for ProductBasis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let factors = matrix_list::deserialize(d)?;
        ProductBasis::new(factors, 1e-9).map_err(D::Error::custom)
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses and validates a state document.
pub fn parse_state(text: &str, tol: &Tolerances) -> Result<DensityMatrix> {
    let raw: StateJson = parse_json(text)?;
    state_from_json(raw, tol)
}

pub fn state_from_json(raw: StateJson, tol: &Tolerances) -> Result<DensityMatrix> {
    if raw.dims.len() > MAX_DIM {
        return Err(Error::DimensionMismatch(format!("{} subsystems", raw.dims.len())));
    }
    validate_density(raw.matrix, &raw.dims, tol)
}

/// Parses and validates a channel document.
pub fn parse_channel(text: &str, tol_tp: f64) -> Result<KrausChannel> {
    let raw: ChannelJson = parse_json(text)?;
    channel_from_json(raw, tol_tp)
}

pub fn channel_from_json(raw: ChannelJson, tol_tp: f64) -> Result<KrausChannel> {
    if let Some(bad) = raw.kraus.iter().find(|k| k.nrows() != raw.dim) {
        return Err(Error::DimensionMismatch(format!(
            "Kraus operator of dimension {} in a channel of dimension {}",
            bad.nrows(),
            raw.dim
        )));
    }
    KrausChannel::new(raw.kraus, tol_tp)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(rho).expect("state serializes")
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string(ch).expect("channel serializes")
}
