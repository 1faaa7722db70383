use std::collections::BTreeMap;

use thiserror::Error;

use super::{AccountRef, Assertion, Command, Scenario, ScenarioCommand};
use crate::amount::parse_amount;
use crate::error::LedgerError;
use crate::ledger::Address;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

/// Splits a line into whitespace-separated tokens. Double quotes group
/// text containing spaces; `#` outside quotes starts a comment.
fn tokenize(line: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '"' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => tok.push(ch),
                    None => return Err("unterminated quote".into()),
                }
            }
            tokens.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '#' {
                    break;
                }
                tok.push(ch);
                chars.next();
            }
            tokens.push(tok);
        }
    }
    Ok(tokens)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Default)]
struct Accounts {
    by_name: BTreeMap<String, Address>,
    order: Vec<AccountRef>,
    owner: Option<Address>,
}

impl Accounts {
    fn resolve(&mut self, token: &str) -> Result<AccountRef, String> {
        if token == "zero" {
            return Ok(AccountRef {
                name: "zero".into(),
                address: Address::ZERO,
            });
        }
        let (name, address) = if token.starts_with("0x") || token.starts_with("0X") {
            let address: Address = token.parse().map_err(|e| format!("{e}"))?;
            (address.to_string(), address)
        } else if is_identifier(token) {
            let address = *self
                .by_name
                .get(token)
                .unwrap_or(&Address::from_name(token));
            (token.to_owned(), address)
        } else {
            return Err(format!("invalid account {token:?}"));
        };
        self.record(&name, address);
        Ok(AccountRef { name, address })
    }

    fn record(&mut self, name: &str, address: Address) {
        if !self.by_name.contains_key(name) {
            self.by_name.insert(name.to_owned(), address);
            self.order.push(AccountRef {
                name: name.to_owned(),
                address,
            });
        }
        if self.owner.is_none() && !address.is_zero() {
            self.owner = Some(address);
        }
    }

    fn bind(&mut self, name: &str, address: Address) -> Result<AccountRef, String> {
        if name == "zero" || !is_identifier(name) {
            return Err(format!("invalid account name {name:?}"));
        }
        if address.is_zero() {
            return Err("accounts cannot be bound to the zero address".into());
        }
        match self.by_name.get(name) {
            Some(&existing) if existing != address => {
                Err(format!("account {name} already refers to {existing}"))
            }
            _ => {
                self.record(name, address);
                Ok(AccountRef {
                    name: name.to_owned(),
                    address,
                })
            }
        }
    }
}

struct Line<'a> {
    tokens: &'a [String],
}

impl Line<'_> {
    fn arity(&self, verb: &str, usage: &str, min: usize, max: usize) -> Result<(), String> {
        if self.tokens.len() < min || self.tokens.len() > max {
            Err(format!("usage: {verb} {usage}"))
        } else {
            Ok(())
        }
    }
}

fn int<T: std::str::FromStr>(token: &str, what: &str) -> Result<T, String> {
    if !token.bytes().all(|b| b.is_ascii_digit()) || token.is_empty() {
        return Err(format!("{what} must be a non-negative integer, got {token:?}"));
    }
    token.parse().map_err(|_| format!("{what} out of range: {token:?}"))
}

fn amount(token: &str) -> Result<crate::amount::TokenAmount, String> {
    parse_amount(token).map_err(|e| e.to_string())
}

/// Strips a trailing `by NAME` clause.
fn split_caller<'t>(tokens: &'t [String], accounts: &mut Accounts) -> Result<(&'t [String], Option<AccountRef>), String> {
    match tokens {
        [rest @ .., by, who] if by == "by" => Ok((rest, Some(accounts.resolve(who)?))),
        _ => Ok((tokens, None)),
    }
}

fn parse_command(tokens: &[String], accounts: &mut Accounts) -> Result<Command, String> {
    let (verb, args) = tokens.split_first().expect("non-empty line");
    let line = Line { tokens: args };
    let cmd = match verb.as_str() {
        "account" => {
            line.arity(verb, "NAME [0xADDRESS]", 1, 2)?;
            match args {
                [name] => Command::Account(accounts.resolve(name)?),
                [name, addr] => {
                    let address: Address = addr.parse().map_err(|e| format!("{e}"))?;
                    Command::Account(accounts.bind(name, address)?)
                }
                _ => unreachable!(),
            }
        }
        "mint_ft" => {
            let (args, caller) = split_caller(args, accounts)?;
            Line { tokens: args }.arity(verb, "RECIPIENT UNITS [by CALLER]", 2, 2)?;
            Command::MintFt {
                caller,
                recipient: accounts.resolve(&args[0])?,
                whole_units: int(&args[1], "whole units")?,
            }
        }
        "upload_channel" | "mint_nfst" => {
            let (args, caller) = split_caller(args, accounts)?;
            Line { tokens: args }.arity(verb, "CHANNEL LOCATION [by CALLER]", 2, 2)?;
            let (channel, location) = (args[0].clone(), args[1].clone());
            if verb == "upload_channel" {
                Command::UploadChannel {
                    caller,
                    channel,
                    location,
                }
            } else {
                Command::MintNfst {
                    caller,
                    channel,
                    location,
                }
            }
        }
        "transfer" => {
            line.arity(verb, "FROM TO AMOUNT", 3, 3)?;
            Command::Transfer {
                from: accounts.resolve(&args[0])?,
                to: accounts.resolve(&args[1])?,
                amount: amount(&args[2])?,
            }
        }
        "list_nfst" => {
            let (args, caller) = split_caller(args, accounts)?;
            Line { tokens: args }.arity(verb, "TOKEN PRICE DURATION [by CALLER]", 3, 3)?;
            Command::ListNfst {
                caller,
                token_id: int(&args[0], "token id")?,
                price: amount(&args[1])?,
                duration: int(&args[2], "duration")?,
            }
        }
        "rent_nfst" => {
            line.arity(verb, "TOKEN RENTER", 2, 2)?;
            Command::RentNfst {
                token_id: int(&args[0], "token id")?,
                renter: accounts.resolve(&args[1])?,
            }
        }
        "advance_time" => {
            line.arity(verb, "SECONDS", 1, 1)?;
            Command::AdvanceTime(int(&args[0], "seconds")?)
        }
        "dump" => {
            line.arity(verb, "[LABEL]", 0, 1)?;
            Command::Dump(args.first().cloned())
        }
        "assert" => Command::Assert(parse_assertion(args, accounts)?),
        "expect" => {
            let (kind, rest) = args
                .split_first()
                .ok_or_else(|| "usage: expect ERROR COMMAND...".to_owned())?;
            if !LedgerError::KINDS.contains(&kind.as_str()) {
                return Err(format!("unknown error kind {kind:?}"));
            }
            if rest.is_empty() {
                return Err("usage: expect ERROR COMMAND...".into());
            }
            let inner = parse_command(rest, accounts)?;
            if matches!(
                inner,
                Command::Account(_) | Command::Assert(_) | Command::Dump(_) | Command::Expect { .. }
            ) {
                return Err(format!("expect cannot wrap {}", inner.verb()));
            }
            Command::Expect {
                error: kind.clone(),
                command: Box::new(inner),
            }
        }
        other => return Err(format!("unknown command {other:?}")),
    };
    Ok(cmd)
}

fn parse_assertion(args: &[String], accounts: &mut Accounts) -> Result<Assertion, String> {
    let (what, rest) = args
        .split_first()
        .ok_or_else(|| "usage: assert WHAT ...".to_owned())?;
    let want = |n: usize, usage: &str| {
        if rest.len() == n {
            Ok(())
        } else {
            Err(format!("usage: assert {what} {usage}"))
        }
    };
    Ok(match what.as_str() {
        "balance" => {
            want(2, "ACCOUNT AMOUNT")?;
            Assertion::Balance {
                account: accounts.resolve(&rest[0])?,
                amount: amount(&rest[1])?,
            }
        }
        "nft_count" => {
            want(2, "ACCOUNT COUNT")?;
            Assertion::NftCount {
                account: accounts.resolve(&rest[0])?,
                count: int(&rest[1], "count")?,
            }
        }
        "user_of" => {
            want(2, "TOKEN ACCOUNT")?;
            Assertion::UserOf {
                token_id: int(&rest[0], "token id")?,
                account: accounts.resolve(&rest[1])?,
            }
        }
        "channel_of_nft" => {
            want(2, "TOKEN CHANNEL")?;
            Assertion::ChannelOfNft {
                token_id: int(&rest[0], "token id")?,
                channel: rest[1].clone(),
            }
        }
        "available_count" => {
            want(1, "COUNT")?;
            Assertion::AvailableCount(int(&rest[0], "count")?)
        }
        "expire_time" => {
            want(2, "TOKEN SECONDS")?;
            Assertion::ExpireTime {
                token_id: int(&rest[0], "token id")?,
                seconds: int(&rest[1], "seconds")?,
            }
        }
        "channels_match_supply" => {
            want(0, "")?;
            Assertion::ChannelsMatchSupply
        }
        other => return Err(format!("unknown assertion {other:?}")),
    })
}

/// Parses scenario text. Line numbers are 1-based.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut accounts = Accounts::default();
    let mut commands = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |reason: String| ParseError { line, reason };
        let tokens = tokenize(raw).map_err(err)?;
        if tokens.is_empty() {
            continue;
        }
        let command = parse_command(&tokens, &mut accounts).map_err(err)?;
        commands.push(ScenarioCommand { line_no: line, command });
    }
    let owner = match accounts.owner {
        Some(owner) => owner,
        None if commands.is_empty() => Address::from_name("owner"),
        None => {
            return Err(ParseError {
                line: commands[0].line_no,
                reason: "scenario never names an account to own the ledger".into(),
            })
        }
    };
    Ok(Scenario {
        owner,
        accounts: accounts.order,
        commands,
    })
}
