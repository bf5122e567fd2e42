//! Deterministic number output: every value is rounded to 9 significant
//! digits and printed in the shortest scientific form that reads back to
//! the rounded value.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub fn round9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

pub fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{:e}", round9(x))
    }
}

pub fn csv<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.iter().map(|&x| number(x)).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

struct Scientific<'a>(PrettyFormatter<'a>);

impl Formatter for Scientific<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", number(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value.into())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-printed JSON with numbers in the same form as the CSV output.
/// NaN and infinities become `null`.
pub fn json<W: Write, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, Scientific(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(io::Error::other)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_nine_digits() {
        assert_eq!(number(0.077_465_212_345), "7.74652123e-2");
        assert_eq!(number(708.7), "7.087e2");
        assert_eq!(number(1.0), "1e0");
        assert_eq!(number(0.0), "0e0");
        assert_eq!(number(-2.5e-9), "-2.5e-9");
        assert_eq!(number(f64::NAN), "NaN");
        assert_eq!(round9(123_456_789_012.0), 123_456_789_000.0);
    }

    #[test]
    fn json_numbers_are_scientific() {
        #[derive(Serialize)]
        struct Row {
            a: f64,
            b: f64,
            ok: bool,
        }
        let mut buf = Vec::new();
        json(
            &mut buf,
            &Row {
                a: 0.5,
                b: f64::NAN,
                ok: true,
            },
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "{\n  \"a\": 5e-1,\n  \"b\": null,\n  \"ok\": true\n}\n");
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"], 0.5);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        csv(&mut buf, &["x", "y"], &[vec![1.0, 2.0], vec![3.0, f64::NAN]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y\n1e0,2e0\n3e0,NaN\n");
    }
}
