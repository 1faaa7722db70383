//! Line-oriented scenario language for driving a [`crate::Ledger`].
//!
//! ```text
//! # Table II
//! account PU 0x0aa7652B45d957B9d2dE60AFbbD90b2DaD3d1f60
//! mint_ft PU 8
//! upload_channel Channel1 Location1
//! transfer PU SU1 1.0
//! assert balance SU1 1
//! assert nft_count SU1 1
//! expect InsufficientBalance transfer SU2 SU1 5
//! ```
//!
//! Accounts are written by name. A name resolves to the first 20 bytes of
//! `sha256(name)` unless an `account NAME 0x…` line binds it explicitly
//! before first use; `zero` is the zero address and a bare `0x…` literal is
//! taken as-is. The first account a scenario mentions is the ledger owner,
//! which is also the implicit caller of owner-only verbs (override with a
//! trailing `by NAME`). Amounts are decimal FT strings.

mod exec;
mod fuzz;
mod parse;
mod render;

pub use crate::amount::parse_amount;
pub use exec::{execute, AssertionOutcome, DumpRecord, ExecOptions, FailureReason, RunFailure, RunReport};
pub use fuzz::{generate_fuzz_scenario, FuzzConfig};
pub use parse::{parse_scenario, ParseError};
pub use render::render_events;

use crate::amount::TokenAmount;
use crate::ledger::Address;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccountRef {
    pub name: String,
    pub address: Address,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assertion {
    Balance { account: AccountRef, amount: TokenAmount },
    NftCount { account: AccountRef, count: usize },
    UserOf { token_id: u64, account: AccountRef },
    ChannelOfNft { token_id: u64, channel: String },
    AvailableCount(usize),
    ExpireTime { token_id: u64, seconds: u64 },
    /// Uploaded channel count equals `totalSupply_NFT`.
    ChannelsMatchSupply,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Account(AccountRef),
    MintFt {
        caller: Option<AccountRef>,
        recipient: AccountRef,
        whole_units: u128,
    },
    UploadChannel {
        caller: Option<AccountRef>,
        channel: String,
        location: String,
    },
    Transfer {
        from: AccountRef,
        to: AccountRef,
        amount: TokenAmount,
    },
    MintNfst {
        caller: Option<AccountRef>,
        channel: String,
        location: String,
    },
    ListNfst {
        caller: Option<AccountRef>,
        token_id: u64,
        price: TokenAmount,
        duration: u64,
    },
    RentNfst {
        token_id: u64,
        renter: AccountRef,
    },
    AdvanceTime(u64),
    Assert(Assertion),
    Dump(Option<String>),
    /// The wrapped command must fail with the named error kind.
    Expect {
        error: String,
        command: Box<Command>,
    },
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Account(_) => "account",
            Command::MintFt { .. } => "mint_ft",
            Command::UploadChannel { .. } => "upload_channel",
            Command::Transfer { .. } => "transfer",
            Command::MintNfst { .. } => "mint_nfst",
            Command::ListNfst { .. } => "list_nfst",
            Command::RentNfst { .. } => "rent_nfst",
            Command::AdvanceTime(_) => "advance_time",
            Command::Assert(_) => "assert",
            Command::Dump(_) => "dump",
            Command::Expect { .. } => "expect",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioCommand {
    pub line_no: usize,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub owner: Address,
    /// Every named account in first-mention order.
    pub accounts: Vec<AccountRef>,
    pub commands: Vec<ScenarioCommand>,
}

impl Scenario {
    /// The account name for `address`, or its hex rendering.
    pub fn name_of(&self, address: Address) -> String {
        if address.is_zero() {
            return "zero".to_owned();
        }
        self.accounts
            .iter()
            .find(|a| a.address == address)
            .map_or_else(|| address.to_string(), |a| a.name.clone())
    }
}
