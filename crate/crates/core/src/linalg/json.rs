//! Operator JSON interchange.
//!
//! ```json
//! {"dims":[2,2],"im":[[...],...],"labels":["A_O","B_I"],"re":[[...],...]}
//! ```
//!
//! `re` and `im` are row-major and must both be `N×N` with `N = Π dims`.
//! Floats are written with 17 significant digits so a read/write cycle is
//! byte-identical; object keys come out sorted.

use std::io;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use super::layout::SubsystemLayout;
use super::operator::{Operator, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dims: Vec<usize>,
    pub im: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub re: Vec<Vec<f64>>,
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let n = op.dim();
        let m = op.matrix();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|r| (0..n).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        Self {
            dims: op.layout().dims().to_vec(),
            im: rows(|z| z.im),
            labels: op.layout().labels().to_vec(),
            re: rows(|z| z.re),
        }
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Operator> {
        let layout = SubsystemLayout::new(j.labels, j.dims)?;
        let n = layout.total_dim();
        let check = |name: &str, rows: &[Vec<f64>]| -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Format(format!(
                    "`{name}` must be {n}x{n} for layout {layout}"
                )));
            }
            Ok(())
        };
        check("re", &j.re)?;
        check("im", &j.im)?;
        let mat = DMatrix::from_fn(n, n, |r, c| C64::new(j.re[r][c], j.im[r][c]));
        Operator::new(layout, mat)
    }
}

impl Operator {
    pub fn to_json(&self) -> String {
        to_json_string(&OperatorJson::from(self))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: OperatorJson = serde_json::from_str(s)?;
        Operator::try_from(j)
    }
}

/// serde_json formatter that prints every float with 17 significant digits.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullPrecision;

impl Formatter for FullPrecision {
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

/// Compact JSON with [`FullPrecision`] floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value
        .serialize(&mut ser)
        .expect("serializing plain data to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
