use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Fixed-width bit-string, most significant bit first.
///
/// Used for mode labels, register outcomes and sharp-variant selectors.
/// Leading zeros are significant: `"01"` and `"1"` are different values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitStringError {
    #[error("empty bit-string")]
    Empty,
    #[error("bit-string longer than 64 bits")]
    TooWide,
    #[error("non-binary character {0:?} in bit-string")]
    NonBinary(char),
}

impl BitString {
    /// Builds a bit-string from the low `width` bits of `value`.
    ///
    /// Panics if `width > 64` or if `value` does not fit in `width` bits.
    pub fn new(value: u64, width: usize) -> Self {
        assert!(width <= 64, "bit-string width {width} exceeds 64");
        assert!(
            width == 64 || value >> width == 0,
            "value {value} does not fit in {width} bits"
        );
        BitString { value, width }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            let bit = (self.value >> i) & 1;
            f.write_str(if bit == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = BitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(BitStringError::Empty);
        }
        if s.chars().count() > 64 {
            return Err(BitStringError::TooWide);
        }
        let mut value = 0u64;
        for c in s.chars() {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                other => return Err(BitStringError::NonBinary(other)),
            };
            value = (value << 1) | bit;
        }
        Ok(BitString {
            value,
            width: s.len(),
        })
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_keeps_leading_zeros() {
        assert_eq!(BitString::new(1, 2).to_string(), "01");
        assert_eq!(BitString::new(5, 3).to_string(), "101");
        assert_eq!(BitString::new(0, 1).to_string(), "0");
    }

    #[test]
    fn parse_round_trip() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.value(), 6);
        assert_eq!(b.width(), 4);
        assert_eq!(b.to_string(), "0110");
    }

    #[test]
    fn parse_errors() {
        assert_eq!("".parse::<BitString>(), Err(BitStringError::Empty));
        assert_eq!(
            "0z".parse::<BitString>(),
            Err(BitStringError::NonBinary('z'))
        );
        assert_eq!(
            "1".repeat(65).parse::<BitString>(),
            Err(BitStringError::TooWide)
        );
    }

    #[test]
    fn serde_as_text() {
        let b = BitString::new(2, 2);
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"10\"");
        let back: BitString = serde_json::from_str("\"10\"").unwrap();
        assert_eq!(back, b);
    }
}
