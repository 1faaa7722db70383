//! Accounts, simulated block time and the ordered event log.
//!
//! [`Ledger`] is the single state machine. Token and rental operations are
//! implemented on it in [`crate::token`] and [`crate::rental`]; every
//! mutating call is externally serialized through `&mut self`.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::LedgerError;
use crate::rental::NfstRegistry;
use crate::token::TokenState;

/// A 20-byte account identifier.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address([u8; 20]);

impl Address {
    /// Mint source and burn sink. Never holds anything.
    pub const ZERO: Address = Address([0u8; 20]);

    pub const fn new(bytes: [u8; 20]) -> Self {
        Address(bytes)
    }

    /// Deterministic address for a human-readable account name: the first
    /// 20 bytes of `sha256(name)`.
    pub fn from_name(name: &str) -> Self {
        let digest = Sha256::digest(name.as_bytes());
        let mut bytes = [0u8; 20];
        bytes.copy_from_slice(&digest[..20]);
        Address(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 20] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        *self == Address::ZERO
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid address {0:?}: expected 0x followed by 40 hex digits")]
pub struct InvalidAddress(pub String);

impl FromStr for Address {
    type Err = InvalidAddress;

    /// Accepts `0x` + 40 hex digits in any letter case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .ok_or_else(|| InvalidAddress(s.to_owned()))?;
        if digits.len() != 40 {
            return Err(InvalidAddress(s.to_owned()));
        }
        let mut bytes = [0u8; 20];
        hex::decode_to_slice(digits, &mut bytes).map_err(|_| InvalidAddress(s.to_owned()))?;
        Ok(Address(bytes))
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Seconds since simulation start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub u64);

impl Timestamp {
    pub fn seconds(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, seconds: u64) -> Option<Timestamp> {
        self.0.checked_add(seconds).map(Timestamp)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventName {
    TransferFT,
    TransferNFT,
    UploadChannelInfo,
    TransferNFST,
    RentNFSTByOwner,
    RentNFSTByUser,
}

impl EventName {
    pub fn as_str(self) -> &'static str {
        match self {
            EventName::TransferFT => "TransferFT",
            EventName::TransferNFT => "TransferNFT",
            EventName::UploadChannelInfo => "UploadChannelInfo",
            EventName::TransferNFST => "TransferNFST",
            EventName::RentNFSTByOwner => "RentNFSTByOwner",
            EventName::RentNFSTByUser => "RentNFSTByUser",
        }
    }

    /// Argument keys, in emission order.
    pub fn arg_keys(self) -> &'static [&'static str] {
        match self {
            EventName::TransferFT => &["_from", "_to", "_amount"],
            EventName::TransferNFT => &["_from", "_to", "_tokenId"],
            EventName::UploadChannelInfo => &["_channel", "_location"],
            EventName::TransferNFST => &["_from", "_to", "_tokenIdOfNFST"],
            EventName::RentNFSTByOwner => &["_tokenIdOfNFST", "_price", "_duration"],
            EventName::RentNFSTByUser => &["_tokenIdOfNFST", "_renter"],
        }
    }
}

impl fmt::Display for EventName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One emitted event. Amounts are decimal wei strings, addresses 0x-hex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEvent {
    pub seq: u64,
    pub at: Timestamp,
    pub name: EventName,
    pub args: Vec<(String, String)>,
}

impl LedgerEvent {
    pub fn arg(&self, key: &str) -> Option<&str> {
        self.args.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl Serialize for LedgerEvent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Args<'a>(&'a [(String, String)]);
        impl Serialize for Args<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }

        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("seq", &self.seq)?;
        map.serialize_entry("at", &self.at)?;
        map.serialize_entry("event", self.name.as_str())?;
        map.serialize_entry("args", &Args(&self.args))?;
        map.end()
    }
}

/// The complete simulated contract state.
#[derive(Clone, Debug)]
pub struct Ledger {
    pub(crate) owner: Address,
    pub(crate) now: Timestamp,
    pub(crate) log: Vec<LedgerEvent>,
    pub(crate) token: TokenState,
    pub(crate) nfsts: NfstRegistry,
    /// Shared by spectrum NFTs and NFSTs. Starts at 1, never reused.
    pub(crate) next_token_id: u64,
}

impl Ledger {
    /// Fresh ledger at time 0 with `owner` as the contract owner and the
    /// only exempt account.
    pub fn new(owner: Address) -> Result<Self, LedgerError> {
        if owner.is_zero() {
            return Err(LedgerError::ZeroAddress);
        }
        Ok(Ledger {
            owner,
            now: Timestamp(0),
            log: Vec::new(),
            token: TokenState::new(owner),
            nfsts: NfstRegistry::default(),
            next_token_id: 1,
        })
    }

    pub fn owner(&self) -> Address {
        self.owner
    }

    pub fn now(&self) -> Timestamp {
        self.now
    }

    /// Moves the clock forward and runs the rental expiry sweep.
    pub fn advance_time(&mut self, delta: u64) -> Result<Timestamp, LedgerError> {
        let now = self.now.checked_add(delta).ok_or(LedgerError::Overflow)?;
        self.now = now;
        self.nfsts.reset_expired(now);
        Ok(now)
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.log
    }

    pub fn next_token_id(&self) -> u64 {
        self.next_token_id
    }

    pub(crate) fn ensure_owner(&self, caller: Address) -> Result<(), LedgerError> {
        if caller == self.owner {
            Ok(())
        } else {
            Err(LedgerError::NotOwner { caller })
        }
    }

    pub(crate) fn allocate_token_id(&mut self) -> u64 {
        let id = self.next_token_id;
        self.next_token_id += 1;
        id
    }

    pub(crate) fn emit<const N: usize>(&mut self, name: EventName, values: [String; N]) {
        let keys = name.arg_keys();
        debug_assert_eq!(keys.len(), N);
        let args = keys.iter().map(|k| (*k).to_owned()).zip(values).collect();
        self.log.push(LedgerEvent {
            seq: self.log.len() as u64,
            at: self.now,
            name,
            args,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pu() -> Address {
        "0x0aa7652B45d957B9d2dE60AFbbD90b2DaD3d1f60".parse().unwrap()
    }

    #[test]
    fn fresh_ledger() {
        let ledger = Ledger::new(pu()).unwrap();
        assert_eq!(ledger.owner(), pu());
        assert_eq!(ledger.now(), Timestamp(0));
        assert!(ledger.events().is_empty());
        assert_eq!(ledger.next_token_id(), 1);
    }

    #[test]
    fn zero_owner_rejected() {
        assert_eq!(Ledger::new(Address::ZERO).unwrap_err(), LedgerError::ZeroAddress);
    }

    #[test]
    fn advance_time_is_additive() {
        let mut ledger = Ledger::new(pu()).unwrap();
        assert_eq!(ledger.advance_time(86400).unwrap(), Timestamp(86400));
        assert_eq!(ledger.advance_time(0).unwrap(), Timestamp(86400));

        let mut ledger = Ledger::new(pu()).unwrap();
        ledger.advance_time(100).unwrap();
        assert_eq!(ledger.advance_time(50).unwrap(), Timestamp(150));
    }

    #[test]
    fn advance_time_overflow() {
        let mut ledger = Ledger::new(pu()).unwrap();
        ledger.advance_time(u64::MAX).unwrap();
        assert_eq!(ledger.advance_time(1).unwrap_err(), LedgerError::Overflow);
        assert_eq!(ledger.now(), Timestamp(u64::MAX));
    }

    #[test]
    fn address_rendering() {
        assert_eq!(pu().to_string(), "0x0aa7652b45d957b9d2de60afbbd90b2dad3d1f60");
        assert_eq!(Address::ZERO.to_string().len(), 42);
        assert!("0x0aa7".parse::<Address>().is_err());
        assert!("0aa7652B45d957B9d2dE60AFbbD90b2DaD3d1f60".parse::<Address>().is_err());
        assert!("0xzaa7652B45d957B9d2dE60AFbbD90b2DaD3d1f60".parse::<Address>().is_err());
    }

    #[test]
    fn named_addresses_are_stable() {
        // sha256("SU2")[..20], computed outside Rust.
        assert_eq!(
            Address::from_name("SU2").to_string(),
            "0xb272644b423cc003b72238337a4a0616020c3705"
        );
        assert_ne!(Address::from_name("SU1"), Address::from_name("SU2"));
    }

    proptest::proptest! {
        #[test]
        fn address_round_trips(bytes in proptest::array::uniform20(proptest::prelude::any::<u8>())) {
            let a = Address::new(bytes);
            proptest::prop_assert_eq!(a.to_string().parse::<Address>().unwrap(), a);
        }
    }
}
