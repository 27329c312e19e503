//! Canonical JSON reports: sorted keys, fixed float formatting, stable
//! indentation. Equal inputs give byte-identical output.

use crate::cone::{ConeUnion, PolyCone};
use crate::exact::{self, QVec};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::io;

pub const SCHEMA: &str = "monolab-report/1";

/// Pretty formatter that prints every float as `{:.16e}`.
struct Canonical<'a>(PrettyFormatter<'a>);

impl Formatter for Canonical<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
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

/// Serializes with sorted keys and fixed float formatting, ending in a
/// newline. Non-finite floats nested in serialized structs come out as
/// `null`; use [`num`] for top-level numbers that may be infinite.
pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    // Going through `Value` sorts map keys.
    let v = serde_json::to_value(value).expect("report values serialize");
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Canonical(PrettyFormatter::with_indent(b"  ")));
    v.serialize(&mut ser).expect("writing to a buffer");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

/// A float, or `"inf"`, `"-inf"`, `"nan"` when it is not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn rat_rows(rows: &[QVec]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|q| Value::String(exact::fmt_rat(q))).collect()))
            .collect(),
    )
}

/// A cone as exact generators and lineality directions, entries written as
/// reduced fractions.
pub fn cone_json(c: &PolyCone) -> Value {
    json!({
        "generators": rat_rows(c.generators()),
        "lineality": rat_rows(c.lineality()),
    })
}

pub fn union_json(u: &ConeUnion) -> Value {
    Value::Array(u.cones().iter().map(cone_json).collect())
}
