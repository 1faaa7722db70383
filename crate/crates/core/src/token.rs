//! Fractional spectrum token.
//!
//! Fungible balances are held in wei. Each non-exempt account holds one
//! spectrum NFT per whole FT of balance; NFTs are minted and burned as
//! transfers move whole-unit boundaries. Every live NFT is bound to one
//! uploaded channel, chosen as the earliest-uploaded unoccupied channel.
//!
//! The contract owner is exempt: FT it sends or receives never mints or
//! burns NFTs on its side.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::amount::TokenAmount;
use crate::error::LedgerError;
use crate::ledger::{Address, EventName, Ledger};

/// An uploaded spectrum asset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub channel: String,
    pub location: String,
    pub upload_index: usize,
    pub bound_nft: Option<u64>,
}

impl ChannelRecord {
    pub fn occupied(&self) -> bool {
        self.bound_nft.is_some()
    }
}

/// A live spectrum NFT.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumNft {
    pub token_id: u64,
    pub holder: Address,
    pub channel: String,
    pub location: String,
}

#[derive(Clone, Debug)]
pub struct TokenState {
    pub(crate) balances: BTreeMap<Address, TokenAmount>,
    pub(crate) exempt: BTreeSet<Address>,
    pub(crate) total_supply_ft: TokenAmount,
    /// Whole units ever minted. Not decremented on NFT burn.
    pub(crate) total_supply_nft: u128,
    pub(crate) nfts: BTreeMap<u64, SpectrumNft>,
    pub(crate) holdings: BTreeMap<Address, BTreeSet<u64>>,
    pub(crate) channels: Vec<ChannelRecord>,
    pub(crate) channel_index: BTreeMap<String, usize>,
    /// Upload indices of unoccupied channels.
    pub(crate) free_channels: BTreeSet<usize>,
}

impl TokenState {
    pub(crate) fn new(owner: Address) -> Self {
        TokenState {
            balances: BTreeMap::new(),
            exempt: BTreeSet::from([owner]),
            total_supply_ft: TokenAmount::zero(),
            total_supply_nft: 0,
            nfts: BTreeMap::new(),
            holdings: BTreeMap::new(),
            channels: Vec::new(),
            channel_index: BTreeMap::new(),
            free_channels: BTreeSet::new(),
        }
    }

    pub(crate) fn balance(&self, a: Address) -> TokenAmount {
        self.balances.get(&a).cloned().unwrap_or_default()
    }

    fn set_balance(&mut self, a: Address, amount: TokenAmount) {
        if amount.is_zero() {
            self.balances.remove(&a);
        } else {
            self.balances.insert(a, amount);
        }
    }

    pub(crate) fn nft_count(&self, a: Address) -> usize {
        self.holdings.get(&a).map_or(0, BTreeSet::len)
    }

    /// Removes `holder`'s highest-id NFT and frees its channel.
    fn burn_last(&mut self, holder: Address) -> u64 {
        let ids = self.holdings.get_mut(&holder).expect("burn from an account with no NFTs");
        let id = ids.pop_last().expect("burn from an account with no NFTs");
        if ids.is_empty() {
            self.holdings.remove(&holder);
        }
        let nft = self.nfts.remove(&id).expect("holding refers to a live NFT");
        let idx = self.channel_index[&nft.channel];
        self.channels[idx].bound_nft = None;
        self.free_channels.insert(idx);
        id
    }

    /// Binds `id` to the earliest-uploaded free channel and gives it to `holder`.
    fn mint_into(&mut self, holder: Address, id: u64) {
        let idx = self.free_channels.pop_first().expect("free channel availability checked");
        let record = &mut self.channels[idx];
        record.bound_nft = Some(id);
        self.nfts.insert(
            id,
            SpectrumNft {
                token_id: id,
                holder,
                channel: record.channel.clone(),
                location: record.location.clone(),
            },
        );
        self.holdings.entry(holder).or_default().insert(id);
    }
}

fn unit_delta(larger: &TokenAmount, smaller: &TokenAmount) -> BigUint {
    larger.whole_units() - smaller.whole_units()
}

impl Ledger {
    /// Credits `whole_units` FT to `recipient` and raises both supplies.
    ///
    /// No NFTs are minted here, even for a non-exempt recipient.
    pub fn mint_ft(&mut self, caller: Address, recipient: Address, whole_units: u128) -> Result<(), LedgerError> {
        self.ensure_owner(caller)?;
        if recipient.is_zero() {
            return Err(LedgerError::ZeroAddress);
        }
        if whole_units == 0 {
            return Err(LedgerError::ZeroAmount);
        }
        let amount = TokenAmount::from_units(whole_units);
        let total_nft = self
            .token
            .total_supply_nft
            .checked_add(whole_units)
            .ok_or(LedgerError::Overflow)?;
        let total_ft = self
            .token
            .total_supply_ft
            .checked_add(&amount)
            .ok_or(LedgerError::Overflow)?;
        // Conservation keeps every balance at or below the total supply.
        let balance = self.token.balance(recipient).checked_add(&amount).ok_or(LedgerError::Overflow)?;

        self.token.set_balance(recipient, balance);
        self.token.total_supply_ft = total_ft;
        self.token.total_supply_nft = total_nft;
        self.emit(
            EventName::TransferFT,
            [Address::ZERO.to_string(), recipient.to_string(), amount.to_string()],
        );
        Ok(())
    }

    /// Registers a spectrum channel. Returns `false` without any state
    /// change if the channel id was uploaded before.
    pub fn upload_channel(&mut self, caller: Address, channel: &str, location: &str) -> Result<bool, LedgerError> {
        self.ensure_owner(caller)?;
        if channel.is_empty() {
            return Err(LedgerError::EmptyChannelId);
        }
        if self.token.channel_index.contains_key(channel) {
            return Ok(false);
        }
        let idx = self.token.channels.len();
        self.token.channels.push(ChannelRecord {
            channel: channel.to_owned(),
            location: location.to_owned(),
            upload_index: idx,
            bound_nft: None,
        });
        self.token.channel_index.insert(channel.to_owned(), idx);
        self.token.free_channels.insert(idx);
        self.emit(EventName::UploadChannelInfo, [channel.to_owned(), location.to_owned()]);
        Ok(true)
    }

    /// Moves `amount` wei and then settles NFTs on whole-unit changes:
    /// the sender burns one NFT (highest id first) per whole unit lost and
    /// the recipient mints one per whole unit gained. Exempt accounts are
    /// skipped. Burns run before mints so freed channels can be rebound.
    ///
    /// Either the whole transfer applies or nothing does.
    pub fn transfer(&mut self, sender: Address, recipient: Address, amount: &TokenAmount) -> Result<(), LedgerError> {
        if sender.is_zero() || recipient.is_zero() {
            return Err(LedgerError::ZeroAddress);
        }
        let sender_old = self.token.balance(sender);
        let sender_new = sender_old
            .checked_sub(amount)
            .ok_or_else(|| LedgerError::InsufficientBalance {
                account: sender,
                balance: sender_old.clone(),
                required: amount.clone(),
            })?;

        if sender == recipient {
            self.emit(
                EventName::TransferFT,
                [sender.to_string(), recipient.to_string(), amount.to_string()],
            );
            return Ok(());
        }

        let recipient_old = self.token.balance(recipient);
        let recipient_new = recipient_old.checked_add(amount).ok_or(LedgerError::Overflow)?;

        let burn_n = if self.token.exempt.contains(&sender) {
            0
        } else {
            // Bounded by the sender's NFT count under the floor law.
            unit_delta(&sender_old, &sender_new)
                .to_usize()
                .expect("burn count bounded by live NFTs")
        };
        let mint_n = if self.token.exempt.contains(&recipient) {
            BigUint::default()
        } else {
            unit_delta(&recipient_new, &recipient_old)
        };
        let free = self.token.free_channels.len() + burn_n;
        let mint_n = match mint_n.to_usize() {
            Some(n) if n <= free => n,
            other => {
                return Err(LedgerError::NoFreeChannel {
                    needed: other.unwrap_or(usize::MAX),
                    free,
                })
            }
        };

        self.token.set_balance(sender, sender_new);
        self.token.set_balance(recipient, recipient_new);
        self.emit(
            EventName::TransferFT,
            [sender.to_string(), recipient.to_string(), amount.to_string()],
        );
        for _ in 0..burn_n {
            let id = self.token.burn_last(sender);
            self.emit(
                EventName::TransferNFT,
                [sender.to_string(), Address::ZERO.to_string(), id.to_string()],
            );
        }
        for _ in 0..mint_n {
            let id = self.allocate_token_id();
            self.token.mint_into(recipient, id);
            self.emit(
                EventName::TransferNFT,
                [Address::ZERO.to_string(), recipient.to_string(), id.to_string()],
            );
        }
        Ok(())
    }

    pub fn balance_of(&self, a: Address) -> TokenAmount {
        self.token.balance(a)
    }

    /// Live NFTs held by `a`, ascending by token id.
    pub fn nfts_of(&self, a: Address) -> Vec<SpectrumNft> {
        self.token
            .holdings
            .get(&a)
            .into_iter()
            .flatten()
            .map(|id| self.token.nfts[id].clone())
            .collect()
    }

    pub fn nft_count(&self, a: Address) -> usize {
        self.token.nft_count(a)
    }

    pub fn nft(&self, token_id: u64) -> Option<&SpectrumNft> {
        self.token.nfts.get(&token_id)
    }

    /// All live NFTs, ascending by token id.
    pub fn live_nfts(&self) -> impl Iterator<Item = &SpectrumNft> {
        self.token.nfts.values()
    }

    /// `(channel, location, occupied)` in upload order.
    pub fn channel_list(&self) -> Vec<(String, String, bool)> {
        self.token
            .channels
            .iter()
            .map(|c| (c.channel.clone(), c.location.clone(), c.occupied()))
            .collect()
    }

    pub fn channels(&self) -> &[ChannelRecord] {
        &self.token.channels
    }

    pub fn total_supply_ft(&self) -> &TokenAmount {
        &self.token.total_supply_ft
    }

    pub fn total_supply_nft(&self) -> u128 {
        self.token.total_supply_nft
    }

    pub fn is_exempt(&self, a: Address) -> bool {
        self.token.exempt.contains(&a)
    }

    /// Accounts with a non-zero balance, ascending by address.
    pub fn balances(&self) -> impl Iterator<Item = (Address, &TokenAmount)> {
        self.token.balances.iter().map(|(a, b)| (*a, b))
    }
}
