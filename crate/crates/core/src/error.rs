use thiserror::Error;

use crate::amount::TokenAmount;
use crate::ledger::{Address, Timestamp};

/// Errors returned by state-changing ledger operations.
///
/// A failed operation never leaves partial state behind.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("the zero address cannot take part in this operation")]
    ZeroAddress,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("{caller} is not the contract owner")]
    NotOwner { caller: Address },
    #[error("amount must be at least one whole unit")]
    ZeroAmount,
    #[error("channel id must be non-empty")]
    EmptyChannelId,
    #[error("{account} holds {balance} wei, needs {required}")]
    InsufficientBalance {
        account: Address,
        balance: TokenAmount,
        required: TokenAmount,
    },
    #[error("{needed} NFT mint(s) requested but only {free} channel(s) are unoccupied")]
    NoFreeChannel { needed: usize, free: usize },
    #[error("channel {0:?} was never uploaded")]
    UnknownChannel(String),
    #[error("token {0} does not exist")]
    UnknownToken(u64),
    #[error("{caller} does not own NFST {token_id}")]
    NotNfstOwner { token_id: u64, caller: Address },
    #[error("rental price must be non-zero")]
    ZeroPrice,
    #[error("rental duration must be non-zero")]
    ZeroDuration,
    #[error("NFST {token_id} is rented by {user} until {expire_time}")]
    AlreadyRented {
        token_id: u64,
        user: Address,
        expire_time: Timestamp,
    },
    #[error("NFST {0} has no listing")]
    NotListed(u64),
    #[error("the owner of NFST {0} cannot rent it")]
    SelfRental(u64),
}

impl LedgerError {
    /// Stable variant name, used by scenario `expect` lines.
    pub fn kind(&self) -> &'static str {
        match self {
            LedgerError::ZeroAddress => "ZeroAddress",
            LedgerError::Overflow => "Overflow",
            LedgerError::NotOwner { .. } => "NotOwner",
            LedgerError::ZeroAmount => "ZeroAmount",
            LedgerError::EmptyChannelId => "EmptyChannelId",
            LedgerError::InsufficientBalance { .. } => "InsufficientBalance",
            LedgerError::NoFreeChannel { .. } => "NoFreeChannel",
            LedgerError::UnknownChannel(_) => "UnknownChannel",
            LedgerError::UnknownToken(_) => "UnknownToken",
            LedgerError::NotNfstOwner { .. } => "NotNfstOwner",
            LedgerError::ZeroPrice => "ZeroPrice",
            LedgerError::ZeroDuration => "ZeroDuration",
            LedgerError::AlreadyRented { .. } => "AlreadyRented",
            LedgerError::NotListed(_) => "NotListed",
            LedgerError::SelfRental(_) => "SelfRental",
        }
    }

    pub const KINDS: &'static [&'static str] = &[
        "ZeroAddress",
        "Overflow",
        "NotOwner",
        "ZeroAmount",
        "EmptyChannelId",
        "InsufficientBalance",
        "NoFreeChannel",
        "UnknownChannel",
        "UnknownToken",
        "NotNfstOwner",
        "ZeroPrice",
        "ZeroDuration",
        "AlreadyRented",
        "NotListed",
        "SelfRental",
    ];
}
