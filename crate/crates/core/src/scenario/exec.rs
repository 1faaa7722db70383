use serde::Serialize;

use super::{Assertion, Command, Scenario};
use crate::error::LedgerError;
use crate::invariants::{InvariantChecker, InvariantViolation};
use crate::ledger::{Address, Ledger, LedgerEvent};
use crate::snapshot::StateDocument;

#[derive(Clone, Copy, Debug, Default)]
pub struct ExecOptions {
    /// Run the full invariant suite after every command.
    pub check_invariants: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssertionOutcome {
    pub line_no: usize,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DumpRecord {
    pub line_no: usize,
    pub label: Option<String>,
    pub state: StateDocument,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    Command(LedgerError),
    UnexpectedSuccess { expected: String },
    WrongError { expected: String, actual: LedgerError },
    Invariant(InvariantViolation),
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailureReason::Command(e) => write!(f, "{}: {e}", e.kind()),
            FailureReason::UnexpectedSuccess { expected } => write!(f, "expected {expected}, command succeeded"),
            FailureReason::WrongError { expected, actual } => {
                write!(f, "expected {expected}, got {}: {actual}", actual.kind())
            }
            FailureReason::Invariant(v) => write!(f, "invariant violated: {v}"),
        }
    }
}

/// A command that stopped the run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunFailure {
    pub line_no: usize,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub commands_executed: usize,
    pub assertions: Vec<AssertionOutcome>,
    pub dumps: Vec<DumpRecord>,
    pub final_snapshot: StateDocument,
    pub events: Vec<LedgerEvent>,
    pub aborted: Option<RunFailure>,
}

impl RunReport {
    pub fn success(&self) -> bool {
        self.aborted.is_none() && self.assertions.iter().all(|a| a.passed)
    }

    /// Earliest line that failed an assertion or aborted the run.
    pub fn first_failing_line(&self) -> Option<usize> {
        let assertion = self.assertions.iter().find(|a| !a.passed).map(|a| a.line_no);
        let abort = self.aborted.as_ref().map(|f| f.line_no);
        match (assertion, abort) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct FailureView {
            line_no: usize,
            reason: String,
        }
        #[derive(Serialize)]
        struct ReportView<'a> {
            commands_executed: usize,
            success: bool,
            first_failing_line: Option<usize>,
            aborted: Option<FailureView>,
            assertions: &'a [AssertionOutcome],
            dumps: &'a [DumpRecord],
            final_snapshot: &'a StateDocument,
            events: &'a [LedgerEvent],
        }
        let view = ReportView {
            commands_executed: self.commands_executed,
            success: self.success(),
            first_failing_line: self.first_failing_line(),
            aborted: self.aborted.as_ref().map(|f| FailureView {
                line_no: f.line_no,
                reason: f.reason.to_string(),
            }),
            assertions: &self.assertions,
            dumps: &self.dumps,
            final_snapshot: &self.final_snapshot,
            events: &self.events,
        };
        let mut out = serde_json::to_string_pretty(&view).expect("report serializes");
        out.push('\n');
        out
    }
}

fn caller_or_owner(caller: &Option<super::AccountRef>, ledger: &Ledger) -> Address {
    caller.as_ref().map_or(ledger.owner(), |c| c.address)
}

fn apply(ledger: &mut Ledger, command: &Command) -> Result<(), LedgerError> {
    match command {
        Command::MintFt {
            caller,
            recipient,
            whole_units,
        } => ledger.mint_ft(caller_or_owner(caller, ledger), recipient.address, *whole_units),
        Command::UploadChannel {
            caller,
            channel,
            location,
        } => ledger
            .upload_channel(caller_or_owner(caller, ledger), channel, location)
            .map(drop),
        Command::Transfer { from, to, amount } => ledger.transfer(from.address, to.address, amount),
        Command::MintNfst {
            caller,
            channel,
            location,
        } => ledger
            .mint_nfst(caller_or_owner(caller, ledger), channel, location)
            .map(drop),
        Command::ListNfst {
            caller,
            token_id,
            price,
            duration,
        } => ledger.list_nfst(caller_or_owner(caller, ledger), *token_id, price, *duration),
        Command::RentNfst { token_id, renter } => ledger.rent_nfst_by_user(*token_id, renter.address),
        Command::AdvanceTime(seconds) => ledger.advance_time(*seconds).map(drop),
        Command::Account(_) | Command::Assert(_) | Command::Dump(_) | Command::Expect { .. } => Ok(()),
    }
}

fn evaluate(ledger: &Ledger, scenario: &Scenario, assertion: &Assertion) -> (String, String) {
    let now = ledger.now();
    match assertion {
        Assertion::Balance { account, amount } => (
            format!("balance {} = {}", account.name, amount.to_ft_string()),
            format!("balance {} = {}", account.name, ledger.balance_of(account.address).to_ft_string()),
        ),
        Assertion::NftCount { account, count } => (
            format!("nft_count {} = {count}", account.name),
            format!("nft_count {} = {}", account.name, ledger.nft_count(account.address)),
        ),
        Assertion::UserOf { token_id, account } => {
            let actual = match ledger.user_of(*token_id, now) {
                Ok(user) => scenario.name_of(user),
                Err(e) => format!("<{}>", e.kind()),
            };
            (
                format!("user_of {token_id} = {}", scenario.name_of(account.address)),
                format!("user_of {token_id} = {actual}"),
            )
        }
        Assertion::ChannelOfNft { token_id, channel } => (
            format!("channel_of_nft {token_id} = {channel}"),
            format!(
                "channel_of_nft {token_id} = {}",
                ledger.nft(*token_id).map_or("<none>", |n| n.channel.as_str())
            ),
        ),
        Assertion::AvailableCount(count) => (
            format!("available_count = {count}"),
            format!("available_count = {}", ledger.available_nfsts(now).len()),
        ),
        Assertion::ExpireTime { token_id, seconds } => (
            format!("expire_time {token_id} = {seconds}"),
            format!(
                "expire_time {token_id} = {}",
                ledger
                    .nfst(*token_id)
                    .map_or("<none>".to_owned(), |r| r.expire_time.to_string())
            ),
        ),
        Assertion::ChannelsMatchSupply => (
            format!("uploaded channels = {}", ledger.total_supply_nft()),
            format!("uploaded channels = {}", ledger.channels().len()),
        ),
    }
}

/// Runs every command against one fresh ledger owned by `scenario.owner`.
///
/// Failed assertions are recorded and the run continues; a command error,
/// an `expect` mismatch or an invariant violation stops it.
pub fn execute(scenario: &Scenario, options: ExecOptions) -> RunReport {
    let mut ledger = Ledger::new(scenario.owner).expect("parser never picks the zero address as owner");
    let mut checker = InvariantChecker::new();
    let mut assertions = Vec::new();
    let mut dumps = Vec::new();
    let mut executed = 0;
    let mut aborted = None;

    for step in &scenario.commands {
        executed += 1;
        let line_no = step.line_no;
        let outcome = match &step.command {
            Command::Assert(assertion) => {
                let (expected, actual) = evaluate(&ledger, scenario, assertion);
                assertions.push(AssertionOutcome {
                    line_no,
                    passed: expected == actual,
                    expected,
                    actual,
                });
                Ok(())
            }
            Command::Dump(label) => {
                dumps.push(DumpRecord {
                    line_no,
                    label: label.clone(),
                    state: ledger.snapshot(),
                });
                Ok(())
            }
            Command::Expect { error, command } => match apply(&mut ledger, command) {
                Err(e) if e.kind() == error => Ok(()),
                Err(e) => Err(FailureReason::WrongError {
                    expected: error.clone(),
                    actual: e,
                }),
                Ok(()) => Err(FailureReason::UnexpectedSuccess {
                    expected: error.clone(),
                }),
            },
            command => apply(&mut ledger, command).map_err(FailureReason::Command),
        };
        let outcome = outcome.and_then(|()| {
            if options.check_invariants {
                checker.check(&ledger).map_err(FailureReason::Invariant)
            } else {
                Ok(())
            }
        });
        if let Err(reason) = outcome {
            aborted = Some(RunFailure { line_no, reason });
            break;
        }
    }

    RunReport {
        commands_executed: executed,
        assertions,
        dumps,
        final_snapshot: ledger.snapshot(),
        events: ledger.events().to_vec(),
        aborted,
    }
}
