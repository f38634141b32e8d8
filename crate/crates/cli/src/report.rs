//! Deterministic JSON and CSV output.
//!
//! Object keys come out sorted because `serde_json::Map` is a `BTreeMap` without
//! the `preserve_order` feature. Every float is written as `{:.16e}` (17 significant
//! digits); integers stay integers.

use std::io;

use blockkrylov::Matrix;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

/// Key excluded from determinism comparisons.
pub const WALL_TIME_KEY: &str = "wall_time_s";

/// `{:.16e}`; JSON cannot carry non-finite values so those become `null` upstream.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a report object: fields are collected into a sorted map.
#[derive(Default, Debug, Clone)]
pub struct RunReport {
    fields: Map<String, Value>,
}

impl RunReport {
    pub fn new(task: &str) -> Self {
        let mut r = RunReport::default();
        r.set("task", task);
        r.set("tool_version", env!("CARGO_PKG_VERSION"));
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.to_string(), value.into());
    }

    /// Finite floats only; non-finite values are stored as `null`.
    pub fn set_f64(&mut self, key: &str, value: f64) {
        self.set(key, float_value(value));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn as_value(&self) -> Value {
        Value::Object(self.fields.clone())
    }

    pub fn to_json(&self) -> String {
        to_json(&self.as_value())
    }
}

pub fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Pretty-printed JSON with sorted keys and fixed float formatting.
pub fn to_json(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Pretty::default());
    serde::Serialize::serialize(value, &mut ser).expect("serializing a Value cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Pretty formatter with fixed-precision floats.
#[derive(Default)]
struct Pretty {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident),*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.inner.$name(w)
        })*
    };
}

impl Formatter for Pretty {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    delegate!(
        begin_array,
        end_array,
        end_array_value,
        begin_object,
        end_object,
        end_object_value,
        begin_object_value
    );

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
}

/// Drops the wall-time line, for byte comparison of two reports.
pub fn strip_wall_time(json: &str) -> String {
    let needle = format!("\"{WALL_TIME_KEY}\":");
    json.lines()
        .filter(|line| !line.trim_start().starts_with(&needle))
        .map(|line| format!("{line}\n"))
        .collect()
}

/// Matrix as nested `[[re, im], …]` rows.
pub fn matrix_value(m: &Matrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| {
                            let z = m[(i, j)];
                            Value::Array(vec![float_value(z.re), float_value(z.im)])
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// CSV header and rows; floats formatted with [`format_float`].
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[String]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&x| format_float(x)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn row_mixed(&mut self, leading: &[String], values: &[f64]) {
        let mut cells: Vec<String> = leading.to_vec();
        cells.extend(values.iter().map(|&x| format_float(x)));
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}
