use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use eigenlocal::{Matrix, Tensor, C64};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// On-disk tensor: row-major data split into real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub shape: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl TensorFile {
    pub fn from_tensor(t: &Tensor) -> Self {
        Self {
            shape: t.shape().to_vec(),
            re: t.data().iter().map(|z| z.re).collect(),
            im: t.data().iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        Self::from_tensor(&Tensor::from_matrix(m))
    }

    pub fn to_tensor(&self) -> Result<Tensor, CliError> {
        let n: usize = self.shape.iter().product();
        if self.re.len() != n || self.im.len() != n {
            return Err(CliError::Input(format!(
                "shape {:?} needs {n} entries, got {} real and {} imaginary",
                self.shape,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|x| !x.is_finite()) {
            return Err(CliError::Input("tensor entries must be finite".into()));
        }
        let data = self.re.iter().zip(&self.im).map(|(&re, &im)| C64::new(re, im)).collect();
        Tensor::new(self.shape.clone(), data).map_err(|e| CliError::Input(e.to_string()))
    }
}

/// A file that was read, with its SHA-256 for the report.
pub struct Loaded {
    pub path: PathBuf,
    pub sha256: String,
    pub tensor: Tensor,
}

impl Loaded {
    pub fn input_record(&self) -> Value {
        serde_json::json!({ "path": self.path.display().to_string(), "sha256": self.sha256 })
    }
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file: TensorFile =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Loaded {
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        tensor: file.to_tensor()?,
    })
}

/// Square matrix from a rank-2 file, or from `2k` axes split in half
/// (`out_1 .. out_k, in_1 .. in_k`).
pub fn as_operator_matrix(t: &Tensor) -> Result<Matrix, CliError> {
    let r = t.rank();
    if r == 0 || r % 2 != 0 {
        return Err(CliError::Input(format!("operator file must have an even number of axes, got shape {:?}", t.shape())));
    }
    let m = t.to_matrix(r / 2).map_err(|e| CliError::Input(e.to_string()))?;
    if m.nrows() != m.ncols() {
        return Err(CliError::Input(format!("operator is not square: {:?}", m.shape())));
    }
    Ok(m)
}

/// Writes floats with 17 significant digits, enough to round-trip any f64;
/// non-finite values become `null`.
struct PreciseFloats;

impl Formatter for PreciseFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFloats);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json(value) + "\n").map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn complex(z: C64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

/// `"0.7"`, `"0.7+0.2i"`, `"-1i"` or `"re,im"`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let s = s.trim();
    if let Some((re, im)) = s.split_once(',') {
        let re: f64 = re.trim().parse().map_err(|e| format!("{s}: {e}"))?;
        let im: f64 = im.trim().parse().map_err(|e| format!("{s}: {e}"))?;
        return Ok(C64::new(re, im));
    }
    s.parse::<C64>().map_err(|e| format!("{s}: {e}"))
}
