//! Rentable spectrum tokens (NFSTs).
//!
//! The owner mints an NFST for an uploaded channel and lists it at a fixed
//! price and duration. A renter pays the price in FT through the ordinary
//! [`Ledger::transfer`] path and becomes the token's user until
//! `expire_time`, inclusive.
//!
//! Expiry is resolved lazily by [`NfstRegistry::user_of`]; the sweep in
//! [`NfstRegistry::reset_expired`] additionally clears stale users and is
//! run every time the ledger clock advances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amount::TokenAmount;
use crate::error::LedgerError;
use crate::ledger::{Address, EventName, Ledger, Timestamp};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfstRecord {
    pub token_id: u64,
    pub owner: Address,
    pub channel: String,
    pub location: String,
    pub price: Option<TokenAmount>,
    pub duration: Option<u64>,
    /// Zero when unrented.
    pub user: Address,
    /// Zero when unrented.
    pub expire_time: Timestamp,
}

impl NfstRecord {
    pub fn is_listed(&self) -> bool {
        self.price.is_some() && self.duration.is_some()
    }

    /// Rented at `now` iff a user is set and `expire_time >= now`.
    pub fn is_rented_at(&self, now: Timestamp) -> bool {
        !self.user.is_zero() && self.expire_time >= now
    }

    pub fn user_at(&self, now: Timestamp) -> Address {
        if self.is_rented_at(now) {
            self.user
        } else {
            Address::ZERO
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct NfstRegistry {
    records: BTreeMap<u64, NfstRecord>,
}

impl NfstRegistry {
    pub fn get(&self, token_id: u64) -> Option<&NfstRecord> {
        self.records.get(&token_id)
    }

    pub fn records(&self) -> impl Iterator<Item = &NfstRecord> {
        self.records.values()
    }

    pub fn user_of(&self, token_id: u64, now: Timestamp) -> Result<Address, LedgerError> {
        self.get(token_id)
            .map(|r| r.user_at(now))
            .ok_or(LedgerError::UnknownToken(token_id))
    }

    /// Clears every user whose rental ended before `now`. Returns how many
    /// records were reset.
    pub fn reset_expired(&mut self, now: Timestamp) -> usize {
        let mut count = 0;
        for record in self.records.values_mut() {
            if !record.user.is_zero() && record.expire_time < now {
                record.user = Address::ZERO;
                record.expire_time = Timestamp(0);
                count += 1;
            }
        }
        count
    }

    /// Listed records without an active user at `now`, ascending by id.
    pub fn available(&self, now: Timestamp) -> Vec<NfstRecord> {
        self.records
            .values()
            .filter(|r| r.is_listed() && !r.is_rented_at(now))
            .cloned()
            .collect()
    }

    fn get_mut(&mut self, token_id: u64) -> Result<&mut NfstRecord, LedgerError> {
        self.records.get_mut(&token_id).ok_or(LedgerError::UnknownToken(token_id))
    }

    fn insert(&mut self, record: NfstRecord) {
        self.records.insert(record.token_id, record);
    }
}

impl Ledger {
    /// Mints an NFST for an uploaded channel to the owner.
    pub fn mint_nfst(&mut self, caller: Address, channel: &str, location: &str) -> Result<u64, LedgerError> {
        self.ensure_owner(caller)?;
        if !self.token.channel_index.contains_key(channel) {
            return Err(LedgerError::UnknownChannel(channel.to_owned()));
        }
        let token_id = self.allocate_token_id();
        self.nfsts.insert(NfstRecord {
            token_id,
            owner: caller,
            channel: channel.to_owned(),
            location: location.to_owned(),
            price: None,
            duration: None,
            user: Address::ZERO,
            expire_time: Timestamp(0),
        });
        self.emit(
            EventName::TransferNFST,
            [Address::ZERO.to_string(), caller.to_string(), token_id.to_string()],
        );
        Ok(token_id)
    }

    /// Sets the rental terms. Re-listing an active rental only affects the
    /// next rental.
    pub fn list_nfst(
        &mut self,
        caller: Address,
        token_id: u64,
        price: &TokenAmount,
        duration: u64,
    ) -> Result<(), LedgerError> {
        let record = self.nfsts.get(token_id).ok_or(LedgerError::UnknownToken(token_id))?;
        if record.owner != caller {
            return Err(LedgerError::NotNfstOwner { token_id, caller });
        }
        if price.is_zero() {
            return Err(LedgerError::ZeroPrice);
        }
        if duration == 0 {
            return Err(LedgerError::ZeroDuration);
        }
        let record = self.nfsts.get_mut(token_id)?;
        record.price = Some(price.clone());
        record.duration = Some(duration);
        self.emit(
            EventName::RentNFSTByOwner,
            [token_id.to_string(), price.to_string(), duration.to_string()],
        );
        Ok(())
    }

    /// Rents `token_id` to `renter` at the current ledger time.
    ///
    /// Payment runs through [`Ledger::transfer`], NFT settlement included,
    /// and the user assignment happens only if the payment succeeds.
    pub fn rent_nfst_by_user(&mut self, token_id: u64, renter: Address) -> Result<(), LedgerError> {
        let now = self.now;
        let record = self.nfsts.get(token_id).ok_or(LedgerError::UnknownToken(token_id))?;
        let (Some(price), Some(duration)) = (record.price.clone(), record.duration) else {
            return Err(LedgerError::NotListed(token_id));
        };
        if renter.is_zero() {
            return Err(LedgerError::ZeroAddress);
        }
        if renter == record.owner {
            return Err(LedgerError::SelfRental(token_id));
        }
        if record.is_rented_at(now) {
            return Err(LedgerError::AlreadyRented {
                token_id,
                user: record.user,
                expire_time: record.expire_time,
            });
        }
        let expire_time = now.checked_add(duration).ok_or(LedgerError::Overflow)?;
        let owner = record.owner;

        self.transfer(renter, owner, &price)?;
        let record = self.nfsts.get_mut(token_id)?;
        record.user = renter;
        record.expire_time = expire_time;
        self.emit(EventName::RentNFSTByUser, [token_id.to_string(), renter.to_string()]);
        Ok(())
    }

    pub fn user_of(&self, token_id: u64, now: Timestamp) -> Result<Address, LedgerError> {
        self.nfsts.user_of(token_id, now)
    }

    /// Expiry sweep at the current ledger time.
    pub fn reset_expired(&mut self) -> usize {
        self.nfsts.reset_expired(self.now)
    }

    pub fn available_nfsts(&self, now: Timestamp) -> Vec<NfstRecord> {
        self.nfsts.available(now)
    }

    pub fn nfst(&self, token_id: u64) -> Option<&NfstRecord> {
        self.nfsts.get(token_id)
    }

    pub fn nfsts(&self) -> &NfstRegistry {
        &self.nfsts
    }
}
