//! Payload formatting: every float is written with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(float(value).as_bytes())
    }
}

/// One compact JSON line (no trailing newline).
pub fn json_line<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// CSV with a header line and one row per record.
pub fn csv<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.into_iter().collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
