//! Text encodings shared by the CSV and JSON writers: every real is printed
//! with 17 significant digits in scientific notation.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

/// `x` with 17 significant digits, e.g. `1.2500000000000000e-1`.
/// Non-finite values print as `nan`, `inf`, `-inf`.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON formatter that prints floats through [`fmt_real`].
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON followed by a newline. Non-finite floats become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}
