//! Fixed float formatting: 17 significant digits in scientific notation,
//! independent of locale. Non-finite values become `null` in JSON.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(sci(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn ser_sci<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    Sci(*v).serialize(s)
}

pub fn vec3(v: &disclination_core::Vec3) -> [Sci; 3] {
    [Sci(v.x), Sci(v.y), Sci(v.z)]
}

pub fn mat3(m: &disclination_core::Mat3) -> [[Sci; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| Sci(m[(i, j)])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI, 0.0] {
            let s = sci(v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_numbers() {
        let s = serde_json::to_string(&[Sci(0.5), Sci(f64::NAN), Sci(-2e-7)]).unwrap();
        assert_eq!(s, "[5.0000000000000000e-1,null,-1.9999999999999999e-7]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Some(0.5), None, Some(-2e-7)]);
    }
}
