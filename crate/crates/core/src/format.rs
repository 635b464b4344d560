//! JSON file formats for channels, factorizations and dilations.
//!
//! Complex scalars are `[re, im]` pairs and matrices are row-major nested
//! arrays. Floats are written in shortest round-trip form, so a
//! write-then-read cycle reproduces every entry bit for bit.
//!
//! ```json
//! {"format_version":"1","dim_in":2,"dim_out":2,"representation":"kraus",
//!  "data":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]}
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::cholesky::CholeskyFactors;
use crate::dilation::{DilationOperator, HalmosUnitary};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

pub const FORMAT_VERSION: &str = "1";

pub type RawMatrix = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &ComplexMatrix) -> RawMatrix {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

/// Decodes a raw matrix and checks it has shape `rows x cols`.
pub fn decode_matrix(
    raw: &RawMatrix,
    rows: usize,
    cols: usize,
    what: &str,
) -> Result<ComplexMatrix> {
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::Format(format!("{what} must be {rows}x{cols}")));
    }
    let rows: Vec<Vec<C64>> = raw
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "representation", content = "data", rename_all = "lowercase")]
pub enum ChannelData {
    /// `entries[i][j] = Φ(E_ij)`, each `d x d`.
    Entries(Vec<Vec<RawMatrix>>),
    /// Kraus operators, each `d x N`.
    Kraus(Vec<RawMatrix>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub format_version: String,
    pub dim_in: usize,
    pub dim_out: usize,
    #[serde(flatten)]
    pub data: ChannelData,
}

fn check_version(v: &str) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format_version {v:?}")));
    }
    Ok(())
}

impl ChannelFile {
    pub fn from_channel(ch: &ChannelSpec) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            data: ChannelData::Entries(
                ch.entries()
                    .iter()
                    .map(|row| row.iter().map(encode_matrix).collect())
                    .collect(),
            ),
        }
    }

    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKrausList)?;
        Ok(Self {
            format_version: FORMAT_VERSION.into(),
            dim_in: first.cols(),
            dim_out: first.rows(),
            data: ChannelData::Kraus(kraus.iter().map(encode_matrix).collect()),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        check_version(&file.format_version)?;
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        to_json_line(self)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Validates declared dimensions against the data and builds the channel.
    pub fn to_channel(&self) -> Result<ChannelSpec> {
        check_version(&self.format_version)?;
        let (n, d) = (self.dim_in, self.dim_out);
        if n == 0 || d == 0 {
            return Err(Error::Format("dimensions must be positive".into()));
        }
        match &self.data {
            ChannelData::Entries(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Format(format!("entries must be a {n}x{n} array")));
                }
                let mut entries = Vec::with_capacity(n);
                for (i, row) in rows.iter().enumerate() {
                    let decoded = row
                        .iter()
                        .enumerate()
                        .map(|(j, raw)| decode_matrix(raw, d, d, &format!("entry ({i}, {j})")))
                        .collect::<Result<Vec<_>>>()?;
                    entries.push(decoded);
                }
                ChannelSpec::new(n, d, entries)
            }
            ChannelData::Kraus(ops) => {
                let kraus = ops
                    .iter()
                    .enumerate()
                    .map(|(k, raw)| decode_matrix(raw, d, n, &format!("Kraus operator {k}")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ChannelSpec::from_kraus(&kraus)?.0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorsFile {
    pub format_version: String,
    pub kind: String,
    pub n_blocks: usize,
    pub block_dim: usize,
    #[serde(rename = "L")]
    pub l: Vec<Vec<RawMatrix>>,
    #[serde(rename = "D")]
    pub d: Vec<RawMatrix>,
    #[serde(rename = "L_hat")]
    pub l_hat: Vec<Vec<RawMatrix>>,
}

fn encode_blocks(blocks: &[Vec<ComplexMatrix>]) -> Vec<Vec<RawMatrix>> {
    blocks
        .iter()
        .map(|row| row.iter().map(encode_matrix).collect())
        .collect()
}

impl FactorsFile {
    pub fn from_factors(f: &CholeskyFactors) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            kind: "cholesky_factors".into(),
            n_blocks: f.n_blocks(),
            block_dim: f.block_dim(),
            l: encode_blocks(&f.l_blocks()),
            d: (0..f.n_blocks()).map(|i| encode_matrix(f.d(i))).collect(),
            l_hat: encode_blocks(&f.l_hat_blocks()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        check_version(&file.format_version)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_json_line(self)
    }

    /// Decoded `L` blocks.
    pub fn l_blocks(&self) -> Result<Vec<Vec<ComplexMatrix>>> {
        let d = self.block_dim;
        self.l
            .iter()
            .map(|row| {
                row.iter()
                    .map(|raw| decode_matrix(raw, d, d, "L block"))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationFile {
    pub format_version: String,
    pub kind: String,
    pub dim_in: usize,
    pub dim_out: usize,
    #[serde(rename = "V")]
    pub v: RawMatrix,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<RawMatrix>,
}

impl DilationFile {
    pub fn new(v: &DilationOperator, u: Option<&HalmosUnitary>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            kind: "dilation".into(),
            dim_in: v.dim_in,
            dim_out: v.dim_out,
            v: encode_matrix(&v.v),
            u: u.map(|u| encode_matrix(&u.u)),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        check_version(&file.format_version)?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_json_line(self)
    }

    pub fn operator(&self) -> Result<DilationOperator> {
        let (n, d) = (self.dim_in, self.dim_out);
        let v = decode_matrix(&self.v, n * d * d, n, "V")?;
        DilationOperator::from_matrix(v, n, d)
    }
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("plain data serializes");
    s.push('\n');
    s
}
