//! Exact token amounts in wei.
//!
//! One FT is `10^18` wei. Amounts are unsigned 256-bit quantities; every
//! arithmetic helper is checked and reports overflow instead of wrapping.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of fractional decimal digits in one FT.
pub const DECIMALS: usize = 18;

/// Wei per FT as a plain integer.
pub const UNIT_WEI: u128 = 1_000_000_000_000_000_000;

fn max_wei() -> &'static BigUint {
    static MAX: OnceLock<BigUint> = OnceLock::new();
    MAX.get_or_init(|| (BigUint::from(1u8) << 256usize) - 1u8)
}

fn unit_big() -> &'static BigUint {
    static UNIT: OnceLock<BigUint> = OnceLock::new();
    UNIT.get_or_init(|| BigUint::from(UNIT_WEI))
}

/// A wei-denominated amount bounded to `[0, 2^256 - 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenAmount(BigUint);

impl TokenAmount {
    pub fn zero() -> Self {
        TokenAmount(BigUint::zero())
    }

    /// `10^18` wei.
    pub fn unit() -> Self {
        TokenAmount(unit_big().clone())
    }

    /// Largest representable amount, `2^256 - 1` wei.
    pub fn max_value() -> Self {
        TokenAmount(max_wei().clone())
    }

    pub fn from_wei(wei: u128) -> Self {
        TokenAmount(BigUint::from(wei))
    }

    /// `units × 10^18` wei. Any `u128` unit count fits in 256 bits.
    pub fn from_units(units: u128) -> Self {
        TokenAmount(BigUint::from(units) * unit_big())
    }

    /// Returns `None` when `wei` exceeds the 256-bit range.
    pub fn from_biguint(wei: BigUint) -> Option<Self> {
        (&wei <= max_wei()).then_some(TokenAmount(wei))
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(&self, other: &TokenAmount) -> Option<TokenAmount> {
        TokenAmount::from_biguint(&self.0 + &other.0)
    }

    pub fn checked_sub(&self, other: &TokenAmount) -> Option<TokenAmount> {
        (self.0 >= other.0).then(|| TokenAmount(&self.0 - &other.0))
    }

    pub fn checked_mul(&self, factor: u128) -> Option<TokenAmount> {
        TokenAmount::from_biguint(&self.0 * BigUint::from(factor))
    }

    /// `floor(self / 10^18)`: the number of whole FT in this amount.
    pub fn whole_units(&self) -> BigUint {
        &self.0 / unit_big()
    }

    /// Wei value as `u128`, if it fits.
    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    /// Renders the amount as a decimal FT string with no trailing zeros,
    /// e.g. `7.9` for `79 × 10^17` wei.
    pub fn to_ft_string(&self) -> String {
        let (whole, frac) = self.0.div_rem(unit_big());
        if frac.is_zero() {
            return whole.to_string();
        }
        let digits = format!("{:0>width$}", frac.to_string(), width = DECIMALS);
        format!("{}.{}", whole, digits.trim_end_matches('0'))
    }
}

impl fmt::Display for TokenAmount {
    /// Decimal wei.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Rejected decimal amount text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed amount {text:?}: {reason}")]
pub struct MalformedAmount {
    pub text: String,
    pub reason: &'static str,
}

impl FromStr for TokenAmount {
    type Err = MalformedAmount;

    /// Parses a plain decimal wei integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| MalformedAmount {
            text: s.to_owned(),
            reason,
        };
        if s.is_empty() {
            return Err(err("empty"));
        }
        if !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("non-digit character"));
        }
        let wei = BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| err("non-digit character"))?;
        TokenAmount::from_biguint(wei).ok_or_else(|| err("exceeds 256 bits"))
    }
}

/// Parses a decimal FT string (`"1"`, `"0.1"`, `"7.9"`) into exact wei.
///
/// At most 18 fraction digits are accepted. No floating point is involved.
pub fn parse_amount(text: &str) -> Result<TokenAmount, MalformedAmount> {
    let err = |reason| MalformedAmount {
        text: text.to_owned(),
        reason,
    };
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (text, None),
    };
    if int_part.is_empty() {
        return Err(err("missing integer part"));
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) {
        return Err(err("non-digit character"));
    }
    let mut wei = BigUint::parse_bytes(int_part.as_bytes(), 10).ok_or_else(|| err("non-digit character"))?
        * unit_big();
    if let Some(frac) = frac_part {
        if frac.is_empty() {
            return Err(err("empty fraction"));
        }
        if !all_digits(frac) {
            return Err(err("non-digit character"));
        }
        if frac.len() > DECIMALS {
            return Err(err("more than 18 fraction digits"));
        }
        let padded = format!("{:0<width$}", frac, width = DECIMALS);
        wei += BigUint::parse_bytes(padded.as_bytes(), 10).ok_or_else(|| err("non-digit character"))?;
    }
    TokenAmount::from_biguint(wei).ok_or_else(|| err("exceeds 256 bits"))
}

impl Serialize for TokenAmount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TokenAmount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
