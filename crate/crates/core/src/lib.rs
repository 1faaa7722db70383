//! Deterministic ledger for securitized spectrum.
//!
//! A single [`Ledger`] holds an ERC404-style fractional spectrum token
//! (fungible FT balances with automatically minted and burned NFTs bound to
//! uploaded channels) and ERC4907-style rentable spectrum tokens (NFSTs)
//! paid for in FT. The [`scenario`] module drives the ledger from a small
//! command language.

pub mod amount;
pub mod error;
pub mod invariants;
pub mod ledger;
pub mod rental;
pub mod scenario;
pub mod snapshot;
pub mod token;

pub use amount::{parse_amount, MalformedAmount, TokenAmount, UNIT_WEI};
pub use error::LedgerError;
pub use invariants::{InvariantChecker, InvariantViolation};
pub use ledger::{Address, EventName, Ledger, LedgerEvent, Timestamp};
pub use rental::{NfstRecord, NfstRegistry};
pub use snapshot::StateDocument;
pub use token::{ChannelRecord, SpectrumNft};
