//! JSON and CSV formats for tensors, paths and reports.
//!
//! Tensor JSON:
//! `{"dimension": d, "depth": N, "scalar": "rational"|"f64"|"c64",
//!   "levels": [{"degree": k, "coefficients": [...]}]}`
//! with rationals as `"p/q"` strings, reals as numbers and complex values
//! as `[re, im]` pairs. Path JSON: `{"dimension": d, "points": [[...], ...]}`
//! with rational-string or numeric coordinates; CSV holds one vertex per row.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;
use crate::scalar::{parse_rational, rational_to_string, Complex64, Rational, RealScalar, Scalar, ScalarKind};
use crate::tensor::TruncatedTensor;

/// Version tag carried by every report document.
pub const SCHEMA_VERSION: u32 = 1;

/// A tensor of any supported scalar kind.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Rational(TruncatedTensor<Rational>),
    F64(TruncatedTensor<f64>),
    C64(TruncatedTensor<Complex64>),
}

/// Calls `$body` with `$t` bound to the inner tensor, whatever its scalar.
#[macro_export]
macro_rules! with_tensor {
    ($any:expr, $t:ident => $body:expr) => {
        match $any {
            $crate::io::AnyTensor::Rational($t) => $body,
            $crate::io::AnyTensor::F64($t) => $body,
            $crate::io::AnyTensor::C64($t) => $body,
        }
    };
}

impl AnyTensor {
    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyTensor::Rational(_) => ScalarKind::Rational,
            AnyTensor::F64(_) => ScalarKind::F64,
            AnyTensor::C64(_) => ScalarKind::C64,
        }
    }

    pub fn depth(&self) -> usize {
        with_tensor!(self, t => t.depth())
    }

    pub fn dim(&self) -> usize {
        with_tensor!(self, t => t.dim())
    }

    /// Dilation by a complex factor. Real tensors accept only real factors.
    pub fn dilate(&self, lambda: Complex64) -> Result<AnyTensor> {
        match self {
            AnyTensor::C64(t) => Ok(AnyTensor::C64(t.dilate(&lambda))),
            _ if lambda.im != 0.0 => Err(Error::NonRealDilation),
            AnyTensor::F64(t) => Ok(AnyTensor::F64(t.dilate(&lambda.re))),
            AnyTensor::Rational(t) => {
                let l = Rational::from_float(lambda.re).ok_or(Error::NonRealDilation)?;
                Ok(AnyTensor::Rational(t.dilate(&l)))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LevelDoc {
    degree: usize,
    coefficients: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    dimension: usize,
    depth: usize,
    scalar: ScalarKind,
    levels: Vec<LevelDoc>,
}

trait JsonScalar: Scalar {
    fn to_value(&self) -> Value;
    fn from_value(v: &Value) -> Option<Self>;
}

fn number_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

impl JsonScalar for Rational {
    fn to_value(&self) -> Value {
        Value::String(rational_to_string(self))
    }

    fn from_value(v: &Value) -> Option<Self> {
        parse_rational(&number_text(v)?)
    }
}

impl JsonScalar for f64 {
    fn to_value(&self) -> Value {
        serde_json::Number::from_f64(*self).map_or(Value::Null, Value::Number)
    }

    fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => parse_rational(s).map(|q| RealScalar::to_f64(&q)),
            _ => None,
        }
    }
}

impl JsonScalar for Complex64 {
    fn to_value(&self) -> Value {
        Value::Array(vec![self.re.to_value(), self.im.to_value()])
    }

    fn from_value(v: &Value) -> Option<Self> {
        match v.as_array()?.as_slice() {
            [re, im] => Some(Complex64::new(f64::from_value(re)?, f64::from_value(im)?)),
            _ => None,
        }
    }
}

fn tensor_doc<S: JsonScalar>(t: &TruncatedTensor<S>) -> TensorDoc {
    TensorDoc {
        dimension: t.dim(),
        depth: t.depth(),
        scalar: S::KIND,
        levels: t
            .levels()
            .iter()
            .enumerate()
            .map(|(degree, l)| LevelDoc { degree, coefficients: l.iter().map(JsonScalar::to_value).collect() })
            .collect(),
    }
}

fn tensor_from_doc<S: JsonScalar>(doc: &TensorDoc) -> Result<TruncatedTensor<S>> {
    let mut t = TruncatedTensor::<S>::zero(doc.dimension, doc.depth)?;
    for level in &doc.levels {
        let coeffs = level
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, v)| {
                S::from_value(v).ok_or_else(|| {
                    Error::Parse(format!(
                        "level {}: coefficient {i} is not a valid {} value: {v}",
                        level.degree,
                        S::KIND.as_str()
                    ))
                })
            })
            .collect::<Result<Vec<S>>>()?;
        t.set_level(level.degree, coeffs)?;
    }
    Ok(t)
}

impl Serialize for AnyTensor {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            AnyTensor::Rational(t) => tensor_doc(t).serialize(s),
            AnyTensor::F64(t) => tensor_doc(t).serialize(s),
            AnyTensor::C64(t) => tensor_doc(t).serialize(s),
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn tensor_to_json(t: &AnyTensor) -> String {
    let mut s = serde_json::to_string_pretty(t).expect("tensor serialization cannot fail");
    s.push('\n');
    s
}

pub fn tensor_from_json(text: &str) -> Result<AnyTensor> {
    let doc: TensorDoc = serde_json::from_str(text).map_err(json_error)?;
    Ok(match doc.scalar {
        ScalarKind::Rational => AnyTensor::Rational(tensor_from_doc(&doc)?),
        ScalarKind::F64 => AnyTensor::F64(tensor_from_doc(&doc)?),
        ScalarKind::C64 => AnyTensor::C64(tensor_from_doc(&doc)?),
    })
}

/// A path with rational or binary64 coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPath {
    Rational(PiecewiseLinearPath<Rational>),
    F64(PiecewiseLinearPath<f64>),
}

impl AnyPath {
    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyPath::Rational(_) => ScalarKind::Rational,
            AnyPath::F64(_) => ScalarKind::F64,
        }
    }
}

#[derive(Deserialize)]
struct PathDoc {
    dimension: Option<usize>,
    points: Vec<Vec<Value>>,
}

fn coordinate<S: JsonScalar>(text: &str) -> Option<S> {
    S::from_value(&Value::String(text.to_string()))
}

fn build_path<S: JsonScalar + RealScalar>(
    rows: Vec<Vec<S>>,
    dimension: Option<usize>,
) -> Result<PiecewiseLinearPath<S>> {
    if let (Some(d), Some(first)) = (dimension, rows.first()) {
        if first.len() != d {
            return Err(Error::DimensionMismatch { index: 0, expected: d, found: first.len() });
        }
    }
    PiecewiseLinearPath::new(rows)
}

fn path_json_as<S: JsonScalar + RealScalar>(doc: &PathDoc) -> Result<PiecewiseLinearPath<S>> {
    let rows = doc
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.iter()
                .enumerate()
                .map(|(j, v)| {
                    S::from_value(v)
                        .ok_or_else(|| Error::Parse(format!("point {i}, coordinate {j}: invalid number {v}")))
                })
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    build_path(rows, doc.dimension)
}

pub fn path_from_json(text: &str, kind: ScalarKind) -> Result<AnyPath> {
    let doc: PathDoc = serde_json::from_str(text).map_err(json_error)?;
    match kind {
        ScalarKind::Rational => Ok(AnyPath::Rational(path_json_as(&doc)?)),
        ScalarKind::F64 => Ok(AnyPath::F64(path_json_as(&doc)?)),
        ScalarKind::C64 => Err(Error::Parse("paths have real coordinates".into())),
    }
}

fn path_csv_as<S: JsonScalar + RealScalar>(text: &str) -> Result<PiecewiseLinearPath<S>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                coordinate::<S>(field)
                    .ok_or_else(|| Error::Parse(format!("line {line}, column {}: invalid number `{field}`", col + 1)))
            })
            .collect::<Result<Vec<S>>>()?;
        rows.push(row);
    }
    build_path(rows, None)
}

pub fn path_from_csv(text: &str, kind: ScalarKind) -> Result<AnyPath> {
    match kind {
        ScalarKind::Rational => Ok(AnyPath::Rational(path_csv_as(text)?)),
        ScalarKind::F64 => Ok(AnyPath::F64(path_csv_as(text)?)),
        ScalarKind::C64 => Err(Error::Parse("paths have real coordinates".into())),
    }
}

fn path_doc<S: JsonScalar + RealScalar>(p: &PiecewiseLinearPath<S>) -> Value {
    serde_json::json!({
        "dimension": p.dim(),
        "points": p.vertices().iter().map(|v| v.iter().map(JsonScalar::to_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn path_to_json(p: &AnyPath) -> String {
    let v = match p {
        AnyPath::Rational(p) => path_doc(p),
        AnyPath::F64(p) => path_doc(p),
    };
    let mut s = serde_json::to_string_pretty(&v).expect("path serialization cannot fail");
    s.push('\n');
    s
}

/// Input file contents, classified by shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Tensor(AnyTensor),
    Path(AnyPath),
}

/// Parses a tensor JSON, path JSON or path CSV document. CSV is chosen by
/// the `.csv` extension; JSON documents are told apart by their keys.
pub fn parse_input(text: &str, file: Option<&Path>, kind: ScalarKind) -> Result<Input> {
    let is_csv = file.and_then(Path::extension).is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return path_from_csv(text, kind).map(Input::Path);
    }
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    if value.get("levels").is_some() {
        tensor_from_json(text).map(Input::Tensor)
    } else if value.get("points").is_some() {
        path_from_json(text, kind).map(Input::Path)
    } else {
        Err(Error::Parse("expected a tensor (`levels`) or path (`points`) document".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rational_tensor_document_shape() {
        let t = TruncatedTensor::from_vector(2, &[q(1, 2), q(-3, 1)]).unwrap().exp().unwrap();
        let text = tensor_to_json(&AnyTensor::Rational(t.clone()));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["scalar"], "rational");
        assert_eq!(v["levels"][1]["coefficients"][0], "1/2");
        assert_eq!(v["levels"][2]["degree"], 2);
        assert_eq!(tensor_from_json(&text).unwrap(), AnyTensor::Rational(t));
    }

    #[test]
    fn complex_coefficients_are_pairs() {
        let t = TruncatedTensor::from_vector(1, &[Complex64::new(1.5, -2.0)]).unwrap();
        let text = tensor_to_json(&AnyTensor::C64(t.clone()));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["levels"][1]["coefficients"][0], serde_json::json!([1.5, -2.0]));
        assert_eq!(tensor_from_json(&text).unwrap(), AnyTensor::C64(t));
    }

    #[test]
    fn tensor_errors_carry_positions() {
        let err = tensor_from_json("{\"dimension\": 2,\n \"depth\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let bad_len = r#"{"dimension":2,"depth":1,"scalar":"f64","levels":[{"degree":1,"coefficients":[1]}]}"#;
        assert!(matches!(tensor_from_json(bad_len), Err(Error::InvalidShape(_))));
        let bad_val = r#"{"dimension":1,"depth":1,"scalar":"rational","levels":[{"degree":1,"coefficients":["x"]}]}"#;
        assert!(matches!(tensor_from_json(bad_val), Err(Error::Parse(_))));
    }

    #[test]
    fn path_json_accepts_strings_and_numbers() {
        let text = r#"{"dimension": 2, "points": [[0, 0], ["1/3", 0.25], [2, "-1"]]}"#;
        let AnyPath::Rational(p) = path_from_json(text, ScalarKind::Rational).unwrap() else { panic!() };
        assert_eq!(p.vertices()[1], vec![q(1, 3), q(1, 4)]);
        let AnyPath::F64(f) = path_from_json(text, ScalarKind::F64).unwrap() else { panic!() };
        assert_eq!(f.vertices()[2], vec![2.0, -1.0]);
        let mismatch = r#"{"dimension": 3, "points": [[0, 0]]}"#;
        assert!(matches!(path_from_json(mismatch, ScalarKind::F64), Err(Error::DimensionMismatch { .. })));
        let ragged = r#"{"points": [[0, 0], [1]]}"#;
        assert!(matches!(path_from_json(ragged, ScalarKind::F64), Err(Error::DimensionMismatch { index: 1, .. })));
    }

    #[test]
    fn path_csv_rows() {
        let text = "# x, y\n0, 0\n1/2, 3\n\n-1, 0.5\n";
        let AnyPath::Rational(p) = path_from_csv(text, ScalarKind::Rational).unwrap() else { panic!() };
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.vertices()[2], vec![q(-1, 1), q(1, 2)]);
        let err = path_from_csv("0,0\n1,zz\n", ScalarKind::F64).unwrap_err();
        assert_eq!(err.to_string(), "parse error: line 2, column 2: invalid number `zz`");
        assert_eq!(path_from_csv("", ScalarKind::F64), Err(Error::EmptyPath));
    }

    #[test]
    fn input_detection() {
        let t = AnyTensor::F64(TruncatedTensor::unit(2, 2).unwrap());
        assert_eq!(parse_input(&tensor_to_json(&t), None, ScalarKind::Rational).unwrap(), Input::Tensor(t));
        let p = r#"{"points": [[1, 2]]}"#;
        assert!(matches!(parse_input(p, None, ScalarKind::F64).unwrap(), Input::Path(AnyPath::F64(_))));
        assert!(parse_input("{}", None, ScalarKind::F64).is_err());
        let csv = parse_input("1,2\n3,4\n", Some(Path::new("p.CSV")), ScalarKind::F64).unwrap();
        assert!(matches!(csv, Input::Path(_)));
    }

    #[test]
    fn real_tensor_rejects_complex_dilation() {
        let t = AnyTensor::Rational(TruncatedTensor::unit(2, 2).unwrap());
        assert_eq!(t.dilate(Complex64::new(0.0, 1.0)), Err(Error::NonRealDilation));
        assert!(t.dilate(Complex64::new(-1.0, 0.0)).is_ok());
    }

    proptest! {
        #[test]
        fn f64_tensor_json_is_byte_stable(coeffs in proptest::collection::vec(-1e6f64..1e6, 8)) {
            let t = TruncatedTensor::homogeneous(2, 3, 3, coeffs).unwrap();
            let text = tensor_to_json(&AnyTensor::F64(t.clone()));
            let back = tensor_from_json(&text).unwrap();
            prop_assert_eq!(&back, &AnyTensor::F64(t));
            prop_assert_eq!(tensor_to_json(&back), text);
        }

        #[test]
        fn rational_tensor_json_is_byte_stable(nums in proptest::collection::vec((-50i64..50, 1i64..30), 4)) {
            let coeffs = nums.into_iter().map(|(n, d)| q(n, d)).collect();
            let t = TruncatedTensor::homogeneous(2, 2, 2, coeffs).unwrap();
            let text = tensor_to_json(&AnyTensor::Rational(t));
            prop_assert_eq!(tensor_to_json(&tensor_from_json(&text).unwrap()), text);
        }
    }
}
