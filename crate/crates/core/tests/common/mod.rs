//! Reference model for oracle tests.
//!
//! A deliberately naive re-statement of the token rules using plain `u128`
//! wei, linear scans and per-account stacks. It shares no code with the
//! library beyond the `Address` type.

#![allow(dead_code)]

use std::collections::BTreeMap;

use spectrum_core::Address;

pub const UNIT: u128 = 1_000_000_000_000_000_000;

#[derive(Clone, Debug, Default)]
pub struct Model {
    pub owner: Address,
    pub balances: BTreeMap<Address, u128>,
    /// token ids held per account, in mint order
    pub held: BTreeMap<Address, Vec<u64>>,
    /// (channel, bound token) in upload order
    pub channels: Vec<(String, Option<u64>)>,
    pub next_id: u64,
    pub events: usize,
}

impl Model {
    pub fn new(owner: Address) -> Self {
        Model {
            owner,
            next_id: 1,
            ..Default::default()
        }
    }

    pub fn balance(&self, a: Address) -> u128 {
        self.balances.get(&a).copied().unwrap_or(0)
    }

    pub fn mint_ft(&mut self, units: u128) {
        *self.balances.entry(self.owner).or_default() += units * UNIT;
        self.events += 1;
    }

    pub fn upload(&mut self, channel: &str) {
        if self.channels.iter().all(|(c, _)| c != channel) {
            self.channels.push((channel.to_owned(), None));
            self.events += 1;
        }
    }

    pub fn free_channels(&self) -> usize {
        self.channels.iter().filter(|(_, b)| b.is_none()).count()
    }

    /// Returns false (and changes nothing) when the transfer must fail.
    pub fn transfer(&mut self, from: Address, to: Address, wei: u128) -> bool {
        if from.is_zero() || to.is_zero() || self.balance(from) < wei {
            return false;
        }
        if from == to {
            self.events += 1;
            return true;
        }
        let (f0, t0) = (self.balance(from), self.balance(to));
        let (f1, t1) = (f0 - wei, t0 + wei);
        let burns = if from == self.owner { 0 } else { (f0 / UNIT - f1 / UNIT) as usize };
        let mints = if to == self.owner { 0 } else { (t1 / UNIT - t0 / UNIT) as usize };
        if mints > self.free_channels() + burns {
            return false;
        }
        self.balances.insert(from, f1);
        self.balances.insert(to, t1);
        self.events += 1;
        for _ in 0..burns {
            let stack = self.held.get_mut(&from).unwrap();
            stack.sort_unstable();
            let id = stack.pop().unwrap();
            for slot in &mut self.channels {
                if slot.1 == Some(id) {
                    slot.1 = None;
                }
            }
            self.events += 1;
        }
        for _ in 0..mints {
            let id = self.next_id;
            self.next_id += 1;
            let slot = self.channels.iter_mut().find(|(_, b)| b.is_none()).unwrap();
            slot.1 = Some(id);
            self.held.entry(to).or_default().push(id);
            self.events += 1;
        }
        true
    }

    pub fn nft_ids(&self, a: Address) -> Vec<u64> {
        let mut ids = self.held.get(&a).cloned().unwrap_or_default();
        ids.sort_unstable();
        ids
    }

    pub fn channel_of(&self, id: u64) -> Option<&str> {
        self.channels.iter().find(|(_, b)| *b == Some(id)).map(|(c, _)| c.as_str())
    }
}

pub fn accounts(n: usize) -> Vec<Address> {
    std::iter::once(Address::from_name("PU"))
        .chain((1..n).map(|i| Address::from_name(&format!("SU{i}"))))
        .collect()
}
