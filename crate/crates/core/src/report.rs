//! Serialization helpers shared by every JSON/CSV emitter.
//!
//! JSON floats are written with 17 significant digits so that values
//! round-trip bit for bit; non-finite values become `null`.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats a float with 17 significant digits in scientific notation.
pub fn format_sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn sig17<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format_sig17(*v)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn sig17_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => sig17(x, s),
        None => s.serialize_none(),
    }
}

/// Serializes a complex number as `{"re": .., "im": ..}`.
pub fn complex17<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    struct F(f64);
    impl Serialize for F {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            sig17(&self.0, s)
        }
    }
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &F(z.re))?;
    st.serialize_field("im", &F(z.im))?;
    st.end()
}

/// Compact JSON for any report type.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize infallibly")
}
