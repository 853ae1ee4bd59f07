//! JSON reports and error payloads.
//!
//! Floating-point numbers are written with 17 significant digits (`%.17g`
//! style), which round-trips every double exactly. Infinities are written as the
//! strings `"inf"` / `"-inf"`.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Value) -> Self {
        Self {
            command: command.to_owned(),
            inputs,
            results,
            warnings: Vec::new(),
        }
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

/// Machine-readable failure: `{code, message, location}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub location: Option<Value>,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            location: None,
        }
    }

    pub fn at(mut self, location: Value) -> Self {
        self.location = Some(location);
        self
    }

    pub fn to_json(&self) -> String {
        to_json_string(&json!({ "error": self }), 0)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<projcone::Error> for CliError {
    fn from(e: projcone::Error) -> Self {
        use projcone::Error as E;
        let message = e.to_string();
        match e {
            E::Empty => CliError::new("empty", message),
            E::ZeroVector => CliError::new("zero_vector", message),
            E::InvalidEntry { index, value } if value < 0.0 => {
                CliError::new("negative_entry", message).at(json!({ "index": index }))
            }
            E::InvalidEntry { index, .. } => {
                CliError::new("non_finite", message).at(json!({ "index": index }))
            }
            E::DimensionMismatch { .. } => CliError::new("dimension_mismatch", message),
            E::Domain { name, .. } => {
                CliError::new("invalid_argument", message).at(json!({ "argument": name }))
            }
            E::NotSquare { row, .. } => CliError::new("not_square", message).at(json!({ "row": row })),
            E::ZeroColumn { column } => {
                CliError::new("not_cone_preserving", message).at(json!({ "column": column }))
            }
            E::ZeroImage => CliError::new("not_cone_preserving", message),
            E::NotStrictlyPositive { row, col } => {
                CliError::new("not_strictly_positive", message).at(json!({ "row": row, "column": col }))
            }
            E::NotUniformlyPositive { row, col } | E::NotFactorizable { row, col } => {
                CliError::new("pattern_failure", message).at(json!({ "row": row, "column": col }))
            }
            E::NotContracting => CliError::new("not_contracting", message),
            E::NotStrictlyPositiveVector { index } => {
                CliError::new("not_strictly_positive", message).at(json!({ "index": index }))
            }
            E::InvalidGrid(_) => CliError::new("invalid_grid", message),
            E::EmptySequence => CliError::new("empty", message),
        }
    }
}

/// A JSON number, or `"inf"` / `"-inf"` / `"nan"` where JSON has no literal.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x == f64::INFINITY => Value::String("inf".into()),
        None if x == f64::NEG_INFINITY => Value::String("-inf".into()),
        None => Value::String("nan".into()),
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// `printf("%.17g", x)` for finite `x`.
pub fn fmt_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..PRECISION).contains(&exp) {
        let fixed = format!("{:.*}", (PRECISION - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Delegates layout to `F` and writes floats with [`fmt_g17`].
struct G17<F>(F);

impl<F: Formatter> Formatter for G17<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value`; `indent = 0` gives a single line.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T, indent: usize) -> String {
    let mut out = Vec::new();
    let res = if indent == 0 {
        let mut ser = serde_json::Serializer::with_formatter(&mut out, G17(CompactFormatter));
        value.serialize(&mut ser)
    } else {
        let pad = vec![b' '; indent];
        let mut ser =
            serde_json::Serializer::with_formatter(&mut out, G17(PrettyFormatter::with_indent(&pad)));
        value.serialize(&mut ser)
    };
    res.expect("serializing to memory");
    String::from_utf8(out).expect("JSON is UTF-8")
}
