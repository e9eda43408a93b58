//! Helpers shared by the JSON document readers.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{Deserialize, Deserializer, MapAccess, Visitor};

use crate::error::{Error, Result};

/// A JSON object read as an ordered list of entries. Unlike a map it keeps
/// duplicate keys so the caller can reject them with a precise error.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairs<V>(pub Vec<(String, V)>);

impl<V> Pairs<V> {
    /// Index of the first key that appears twice, if any.
    pub fn first_duplicate(&self) -> Option<&str> {
        let mut seen = std::collections::HashSet::new();
        self.0
            .iter()
            .map(|(k, _)| k.as_str())
            .find(|k| !seen.insert(*k))
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Pairs<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PairsVisitor<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for PairsVisitor<V> {
            type Value = Pairs<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Pairs<V>, A::Error> {
                let mut out = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some((k, v)) = map.next_entry::<String, V>()? {
                    out.push((k, v));
                }
                Ok(Pairs(out))
            }
        }

        d.deserialize_map(PairsVisitor(PhantomData))
    }
}

/// Parses an assignment bitstring of exactly `len` characters. Character `i`
/// (leftmost = 0) maps to bit `i` of the result; `'1'` means true.
pub fn parse_bitstring(key: &str, len: usize) -> Result<usize> {
    let malformed = |reason: String| Error::MalformedAssignment {
        key: key.to_string(),
        reason,
    };
    if key.chars().count() != len {
        return Err(malformed(format!("expected {len} characters")));
    }
    key.chars()
        .enumerate()
        .try_fold(0usize, |mask, (i, c)| match c {
            '1' => Ok(mask | (1 << i)),
            '0' => Ok(mask),
            other => Err(malformed(format!("unexpected character {other:?}"))),
        })
}

/// Inverse of [`parse_bitstring`].
pub fn bitstring(mask: usize, len: usize) -> String {
    (0..len)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leftmost_character_is_lowest_bit() {
        assert_eq!(parse_bitstring("10", 2).unwrap(), 0b01);
        assert_eq!(parse_bitstring("01", 2).unwrap(), 0b10);
        assert_eq!(parse_bitstring("", 0).unwrap(), 0);
        assert_eq!(bitstring(0b011, 3), "110");
    }

    #[test]
    fn rejects_bad_keys() {
        assert!(parse_bitstring("1", 2).is_err());
        assert!(parse_bitstring("1x", 2).is_err());
    }

    #[test]
    fn pairs_keep_duplicates() {
        let p: Pairs<f64> = serde_json::from_str(r#"{"a": 1, "b": 2, "a": 3}"#).unwrap();
        assert_eq!(p.0.len(), 3);
        assert_eq!(p.first_duplicate(), Some("a"));
    }
}
