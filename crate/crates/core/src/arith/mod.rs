//! Exact arithmetic: integer backings, `Q(√5)` numbers and metric values.

mod distance;
mod int;
pub mod parse;
mod quadratic;

pub use distance::Distance;
pub use int::ExactInt;
pub use quadratic::QuadraticNumber;


/// Serde adapter writing `Ratio<u64>` as `"p/q"`.
pub(crate) mod ratio_serde {
    use num_rational::Ratio;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn to_text(r: &Ratio<u64>) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    pub fn from_text(s: &str) -> Result<Ratio<u64>, String> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: u64 = n.trim().parse().map_err(|_| format!("invalid numerator in {s:?}"))?;
        let d: u64 = d.trim().parse().map_err(|_| format!("invalid denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Ratio::new(n, d))
    }

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        from_text(&String::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Ratio<u64>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&to_text(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Ratio<u64>>, D::Error> {
            Vec::<String>::deserialize(d)?.iter().map(|s| from_text(s).map_err(D::Error::custom)).collect()
        }
    }
}
