//! Whole-state invariant checks.
//!
//! [`InvariantChecker`] recomputes every property from the raw state
//! rather than trusting the bookkeeping used by the operations. It keeps a
//! cursor into the event log so checks after each command stay linear in
//! state size.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::amount::TokenAmount;
use crate::ledger::{Address, EventName, Ledger, Timestamp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{invariant}: {detail}")]
pub struct InvariantViolation {
    pub invariant: &'static str,
    pub detail: String,
}

fn violation(invariant: &'static str, detail: impl Into<String>) -> Result<(), InvariantViolation> {
    Err(InvariantViolation {
        invariant,
        detail: detail.into(),
    })
}

#[derive(Debug, Default, Clone)]
pub struct InvariantChecker {
    events_seen: usize,
    last_minted_id: u64,
    last_time: Timestamp,
}

impl InvariantChecker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, ledger: &Ledger) -> Result<(), InvariantViolation> {
        self.check_log(ledger)?;
        check_zero_address(ledger)?;
        check_conservation(ledger)?;
        check_floor_law(ledger)?;
        check_channels(ledger)?;
        check_rentals(ledger)
    }

    fn check_log(&mut self, ledger: &Ledger) -> Result<(), InvariantViolation> {
        if ledger.now() < self.last_time {
            return violation("time monotonic", format!("{} < {}", ledger.now(), self.last_time));
        }
        self.last_time = ledger.now();

        let events = ledger.events();
        for (i, ev) in events.iter().enumerate().skip(self.events_seen) {
            if ev.seq != i as u64 {
                return violation("gapless seq", format!("event {i} has seq {}", ev.seq));
            }
            if i > 0 && ev.at < events[i - 1].at {
                return violation("time monotonic", format!("event {i} at {} precedes predecessor", ev.at));
            }
            let minted = match ev.name {
                EventName::TransferNFT if ev.arg("_from") == Some(&Address::ZERO.to_string()) => ev.arg("_tokenId"),
                EventName::TransferNFST => ev.arg("_tokenIdOfNFST"),
                _ => None,
            };
            if let Some(id) = minted {
                let id: u64 = id.parse().map_err(|_| InvariantViolation {
                    invariant: "token-id monotonicity",
                    detail: format!("event {i} carries non-numeric id {id:?}"),
                })?;
                if id <= self.last_minted_id {
                    return violation(
                        "token-id monotonicity",
                        format!("minted id {id} after {}", self.last_minted_id),
                    );
                }
                self.last_minted_id = id;
            }
        }
        self.events_seen = events.len();
        if self.last_minted_id >= ledger.next_token_id() {
            return violation("token-id monotonicity", "counter behind minted ids");
        }
        Ok(())
    }
}

fn check_zero_address(ledger: &Ledger) -> Result<(), InvariantViolation> {
    if !ledger.balance_of(Address::ZERO).is_zero() || ledger.nft_count(Address::ZERO) != 0 {
        return violation("zero address", "zero address holds tokens");
    }
    if ledger
        .nfsts()
        .records()
        .any(|r| r.owner.is_zero())
    {
        return violation("zero address", "NFST owned by the zero address");
    }
    Ok(())
}

fn check_conservation(ledger: &Ledger) -> Result<(), InvariantViolation> {
    let sum = ledger
        .balances()
        .fold(BigUint::zero(), |acc, (_, b)| acc + b.as_biguint());
    if &sum != ledger.total_supply_ft().as_biguint() {
        return violation(
            "conservation",
            format!("balances sum to {sum}, supply is {}", ledger.total_supply_ft()),
        );
    }
    let lockstep = TokenAmount::from_units(ledger.total_supply_nft());
    if &lockstep != ledger.total_supply_ft() {
        return violation(
            "lockstep supply",
            format!("totalSupply_NFT {} vs totalSupply_FT {}", ledger.total_supply_nft(), ledger.total_supply_ft()),
        );
    }
    Ok(())
}

fn check_floor_law(ledger: &Ledger) -> Result<(), InvariantViolation> {
    let mut held: BTreeMap<Address, usize> = BTreeMap::new();
    for nft in ledger.live_nfts() {
        *held.entry(nft.holder).or_default() += 1;
    }
    let accounts: BTreeSet<Address> = ledger.balances().map(|(a, _)| a).chain(held.keys().copied()).collect();
    for a in accounts {
        let count = held.get(&a).copied().unwrap_or(0);
        if ledger.is_exempt(a) {
            if count != 0 {
                return violation("floor law", format!("exempt {a} holds {count} NFTs"));
            }
            continue;
        }
        let expected = ledger.balance_of(a).whole_units();
        if BigUint::from(count) != expected {
            return violation("floor law", format!("{a} holds {count} NFTs, floor(balance) is {expected}"));
        }
        if ledger.nft_count(a) != count {
            return violation("floor law", format!("{a} holdings index disagrees with live NFTs"));
        }
    }
    Ok(())
}

fn check_channels(ledger: &Ledger) -> Result<(), InvariantViolation> {
    let channels = ledger.channels();
    let mut by_name: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, c) in channels.iter().enumerate() {
        if c.upload_index != i {
            return violation("channel registry", format!("{} has upload_index {} at {i}", c.channel, c.upload_index));
        }
        if by_name.insert(&c.channel, i).is_some() {
            return violation("channel registry", format!("duplicate channel {}", c.channel));
        }
    }

    let mut used: BTreeSet<&str> = BTreeSet::new();
    let mut live = 0usize;
    for nft in ledger.live_nfts() {
        live += 1;
        if !used.insert(&nft.channel) {
            return violation("channel uniqueness", format!("two NFTs on {}", nft.channel));
        }
        let bound = by_name.get(nft.channel.as_str()).and_then(|&i| channels[i].bound_nft);
        if bound != Some(nft.token_id) {
            return violation(
                "channel uniqueness",
                format!("NFT {} claims {} but the channel is bound to {bound:?}", nft.token_id, nft.channel),
            );
        }
    }
    for c in channels {
        if let Some(id) = c.bound_nft {
            if ledger.nft(id).map(|n| n.channel.as_str()) != Some(c.channel.as_str()) {
                return violation("channel uniqueness", format!("{} bound to dead or foreign NFT {id}", c.channel));
            }
        }
    }
    if live > channels.len() || live as u128 > ledger.total_supply_nft() {
        return violation(
            "NFT cap",
            format!("{live} live NFTs, {} channels, cap {}", channels.len(), ledger.total_supply_nft()),
        );
    }
    Ok(())
}

fn check_rentals(ledger: &Ledger) -> Result<(), InvariantViolation> {
    let now = ledger.now();
    for r in ledger.nfsts().records() {
        if r.user.is_zero() {
            if r.expire_time != Timestamp(0) {
                return violation("rental state", format!("NFST {} has expiry without a user", r.token_id));
            }
            continue;
        }
        if r.expire_time == Timestamp(0) || !r.is_listed() {
            return violation("rental state", format!("NFST {} rented without expiry or listing", r.token_id));
        }
        if r.user == r.owner {
            return violation("rental exclusivity", format!("NFST {} rented by its owner", r.token_id));
        }
        // The sweep runs whenever the clock moves, so a stored user is live.
        if r.expire_time < now {
            return violation("rental exclusivity", format!("NFST {} holds an expired user", r.token_id));
        }
    }
    Ok(())
}
