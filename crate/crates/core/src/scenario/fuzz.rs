//! Seeded random scenario generator.
//!
//! Commands are drawn at random and applied to a shadow ledger as they are
//! generated. A command the shadow rejects is written as an `expect` line
//! with the observed error kind, and assertions carry the shadow's values,
//! so a generated scenario is a complete self-checking replay.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amount::TokenAmount;
use crate::error::LedgerError;
use crate::ledger::{Address, Ledger};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    /// Random commands after the fixed setup block.
    pub steps: usize,
    /// Accounts including the owner; values below 2 are raised to 2.
    pub accounts: usize,
    pub seed: u64,
}

struct Generator {
    rng: ChaCha8Rng,
    ledger: Ledger,
    names: Vec<String>,
    addrs: Vec<Address>,
    next_channel: usize,
    out: String,
}

impl Generator {
    fn name_of(&self, a: Address) -> &str {
        if a.is_zero() {
            return "zero";
        }
        let i = self.addrs.iter().position(|x| *x == a).expect("generated address");
        &self.names[i]
    }

    fn emit(&mut self, line: String, result: Result<(), LedgerError>) {
        match result {
            Ok(()) => writeln!(self.out, "{line}"),
            Err(e) => writeln!(self.out, "expect {} {line}", e.kind()),
        }
        .expect("write to string");
    }

    fn any_account(&mut self) -> usize {
        self.rng.gen_range(0..self.addrs.len())
    }

    fn secondary(&mut self) -> usize {
        self.rng.gen_range(1..self.addrs.len())
    }

    fn any_addr(&mut self) -> Address {
        let i = self.any_account();
        self.addrs[i]
    }

    fn secondary_addr(&mut self) -> Address {
        let i = self.secondary();
        self.addrs[i]
    }

    fn owner(&self) -> Address {
        self.addrs[0]
    }

    fn setup(&mut self, units: u128, listings: usize) {
        for i in 0..self.names.len() {
            writeln!(self.out, "account {}", self.names[i]).unwrap();
        }
        let pu = self.owner();
        let r = self.ledger.mint_ft(pu, pu, units);
        self.emit(format!("mint_ft PU {units}"), r);
        for _ in 0..units {
            self.upload_next();
        }
        writeln!(self.out, "assert channels_match_supply").unwrap();
        for i in 1..=listings {
            let r = self
                .ledger
                .mint_nfst(pu, &format!("C{i}"), &format!("L{i}"))
                .map(drop);
            self.emit(format!("mint_nfst C{i} L{i}"), r);
            self.list_random(i as u64, pu);
        }
    }

    fn upload_next(&mut self) {
        self.next_channel += 1;
        let n = self.next_channel;
        let r = self
            .ledger
            .upload_channel(self.owner(), &format!("C{n}"), &format!("L{n}"))
            .map(drop);
        self.emit(format!("upload_channel C{n} L{n}"), r);
    }

    fn list_random(&mut self, token_id: u64, caller: Address) {
        let price = TokenAmount::from_wei(self.rng.gen_range(0..=5u128) * 100_000_000_000_000_000);
        let duration = if self.rng.gen_bool(0.05) { 0 } else { self.rng.gen_range(100..5000u64) };
        let r = self.ledger.list_nfst(caller, token_id, &price, duration);
        let by = if caller == self.owner() {
            String::new()
        } else {
            format!(" by {}", self.name_of(caller))
        };
        self.emit(
            format!("list_nfst {token_id} {} {duration}{by}", price.to_ft_string()),
            r,
        );
    }

    fn transfer(&mut self) {
        let from = if self.rng.gen_bool(0.02) {
            Address::ZERO
        } else {
            self.any_addr()
        };
        let to = match self.rng.gen_range(0..100) {
            0..=1 => Address::ZERO,
            2..=6 => from,
            _ => self.any_addr(),
        };
        let balance = self.ledger.balance_of(from).to_u128().expect("fuzz supplies fit in u128");
        let unit = TokenAmount::unit().to_u128().unwrap();
        let wei = match self.rng.gen_range(0..100) {
            0..=29 => self.rng.gen_range(0..=3u128) * unit,
            30..=59 => self.rng.gen_range(0..=balance),
            60..=74 => balance,
            75..=89 => self.rng.gen_range(1..=15u128) * (unit / 10),
            _ => balance + self.rng.gen_range(1..=2 * unit),
        };
        let amount = TokenAmount::from_wei(wei);
        let r = self.ledger.transfer(from, to, &amount);
        let line = format!(
            "transfer {} {} {}",
            self.name_of(from),
            self.name_of(to),
            amount.to_ft_string()
        );
        self.emit(line, r);
    }

    /// An existing NFST id, or now and then one that does not exist.
    fn nfst_id(&mut self) -> u64 {
        let ids: Vec<u64> = self.ledger.nfsts().records().map(|r| r.token_id).collect();
        match ids.choose(&mut self.rng) {
            Some(&id) if self.rng.gen_bool(0.9) => id,
            _ => self.ledger.next_token_id(),
        }
    }

    fn rent(&mut self) {
        let token_id = self.nfst_id();
        let renter = if self.rng.gen_bool(0.05) {
            self.owner()
        } else {
            self.secondary_addr()
        };
        let r = self.ledger.rent_nfst_by_user(token_id, renter);
        self.emit(format!("rent_nfst {token_id} {}", self.name_of(renter)), r);
    }

    fn assertion(&mut self) {
        let now = self.ledger.now();
        let line = match self.rng.gen_range(0..5) {
            0 => {
                let a = self.any_addr();
                format!("assert balance {} {}", self.name_of(a), self.ledger.balance_of(a).to_ft_string())
            }
            1 => {
                let a = self.any_addr();
                format!("assert nft_count {} {}", self.name_of(a), self.ledger.nft_count(a))
            }
            2 => format!("assert available_count {}", self.ledger.available_nfsts(now).len()),
            3 => match self.ledger.nfsts().records().map(|r| r.token_id).collect::<Vec<_>>().choose(&mut self.rng) {
                Some(&id) => {
                    let user = self.ledger.user_of(id, now).expect("listed id exists");
                    format!("assert user_of {id} {}", self.name_of(user))
                }
                None => "assert available_count 0".to_owned(),
            },
            _ => match self.ledger.live_nfts().map(|n| (n.token_id, n.channel.clone())).collect::<Vec<_>>().choose(&mut self.rng) {
                Some((id, channel)) => format!("assert channel_of_nft {id} {channel}"),
                None => format!("assert nft_count PU {}", self.ledger.nft_count(self.owner())),
            },
        };
        writeln!(self.out, "{line}").unwrap();
    }

    fn step(&mut self) {
        match self.rng.gen_range(0..100) {
            0..=49 => self.transfer(),
            50..=57 => self.rent(),
            58..=65 => {
                let secs = if self.rng.gen_bool(0.1) { 86400 } else { self.rng.gen_range(0..2000u64) };
                let r = self.ledger.advance_time(secs).map(drop);
                self.emit(format!("advance_time {secs}"), r);
            }
            66..=69 => {
                let token_id = self.nfst_id();
                let caller = if self.rng.gen_bool(0.2) {
                    self.secondary_addr()
                } else {
                    self.owner()
                };
                self.list_random(token_id, caller);
            }
            70..=72 => {
                let units = self.rng.gen_range(1..=2u128);
                let caller_idx = if self.rng.gen_bool(0.2) { self.secondary() } else { 0 };
                let caller = self.addrs[caller_idx];
                let r = self.ledger.mint_ft(caller, self.owner(), units);
                let by = if caller_idx == 0 { String::new() } else { format!(" by {}", self.names[caller_idx]) };
                self.emit(format!("mint_ft PU {units}{by}"), r);
            }
            73..=75 => {
                if self.rng.gen_bool(0.8) {
                    self.upload_next();
                } else {
                    let n = self.rng.gen_range(1..=self.next_channel);
                    let r = self.ledger.upload_channel(self.owner(), &format!("C{n}"), "dup").map(drop);
                    self.emit(format!("upload_channel C{n} dup"), r);
                }
            }
            76..=77 => {
                let n = self.rng.gen_range(1..=self.next_channel + 1);
                let r = self
                    .ledger
                    .mint_nfst(self.owner(), &format!("C{n}"), &format!("L{n}"))
                    .map(drop);
                self.emit(format!("mint_nfst C{n} L{n}"), r);
            }
            _ => self.assertion(),
        }
    }
}

/// Builds scenario text for `config`. Identical configs give identical text.
pub fn generate_fuzz_scenario(config: &FuzzConfig) -> String {
    let accounts = config.accounts.max(2);
    let names: Vec<String> = std::iter::once("PU".to_owned())
        .chain((1..accounts).map(|i| format!("SU{i}")))
        .collect();
    let addrs: Vec<Address> = names.iter().map(|n| Address::from_name(n)).collect();
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        ledger: Ledger::new(addrs[0]).expect("named owner is non-zero"),
        names,
        addrs,
        next_channel: 0,
        out: format!(
            "# generated: fuzz --steps {} --accounts {} --seed {}\n",
            config.steps, accounts, config.seed
        ),
    };
    gen.setup(3 * accounts as u128, 3);
    for _ in 0..config.steps {
        gen.step();
    }
    gen.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{execute, parse_scenario, ExecOptions};

    #[test]
    fn same_seed_same_text() {
        let cfg = FuzzConfig {
            steps: 200,
            accounts: 5,
            seed: 7,
        };
        assert_eq!(generate_fuzz_scenario(&cfg), generate_fuzz_scenario(&cfg));
        let other = FuzzConfig { seed: 8, ..cfg };
        assert_ne!(generate_fuzz_scenario(&cfg), generate_fuzz_scenario(&other));
    }

    #[test]
    fn generated_scenario_replays_cleanly() {
        let text = generate_fuzz_scenario(&FuzzConfig {
            steps: 500,
            accounts: 4,
            seed: 3,
        });
        let report = execute(&parse_scenario(&text).unwrap(), ExecOptions { check_invariants: true });
        assert!(report.success(), "{:?}", report.aborted);
        assert!(text.contains("expect InsufficientBalance"));
        assert!(!report.assertions.is_empty());
    }
}
