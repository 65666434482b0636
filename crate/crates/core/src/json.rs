//! JSON output with every float written to 17 significant digits.

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter, Serializer};
use std::io::{self, Write};

struct Sig17<F>(F);

fn write_sig17<W: ?Sized + Write>(w: &mut W, v: f64) -> io::Result<()> {
    if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        w.write_all(b"null")
    }
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl<F: Formatter> Formatter for Sig17<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write_sig17(w, v)
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write_sig17(w, v as f64)
    }
    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

fn render<T: Serialize + ?Sized, F: Formatter>(value: &T, f: F) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Sig17(f));
    value.serialize(&mut ser).expect("serialising plain data cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Single-line JSON.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    render(value, CompactFormatter)
}

/// Indented JSON.
pub fn to_string_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    render(value, PrettyFormatter::new())
}
