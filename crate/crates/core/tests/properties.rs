//! Randomised operation sequences against the reference model and the
//! invariant checker.

mod common;

use common::{accounts, Model, UNIT};
use proptest::prelude::*;
use spectrum_core::{InvariantChecker, Ledger, TokenAmount};

#[derive(Clone, Debug)]
enum Op {
    Transfer { from: usize, to: usize, wei: u128 },
    Upload,
    MintFt(u128),
    Advance(u64),
    MintNfst(usize),
    List { pick: usize, price_tenths: u128, duration: u64 },
    Rent { pick: usize, renter: usize },
}

fn op() -> impl Strategy<Value = Op> {
    let amount = prop_oneof![
        (0u128..4).prop_map(|u| u * UNIT),
        (0u128..4 * UNIT),
        (1u128..20).prop_map(|t| t * UNIT / 10),
    ];
    prop_oneof![
        8 => (0usize..6, 0usize..6, amount).prop_map(|(from, to, wei)| Op::Transfer { from, to, wei }),
        1 => Just(Op::Upload),
        1 => (1u128..3).prop_map(Op::MintFt),
        1 => (0u64..500).prop_map(Op::Advance),
        1 => (0usize..12).prop_map(Op::MintNfst),
        1 => (0usize..8, 0u128..4, 1u64..400).prop_map(|(pick, price_tenths, duration)| Op::List { pick, price_tenths, duration }),
        2 => (0usize..8, 0usize..6).prop_map(|(pick, renter)| Op::Rent { pick, renter }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold_and_balances_match_model(ops in prop::collection::vec(op(), 1..150)) {
        let accts = accounts(6);
        let pu = accts[0];
        let mut ledger = Ledger::new(pu).unwrap();
        let mut model = Model::new(pu);
        let mut checker = InvariantChecker::new();
        ledger.mint_ft(pu, pu, 6).unwrap();
        model.mint_ft(6);
        let mut uploaded = 0;
        for _ in 0..6 {
            uploaded += 1;
            ledger.upload_channel(pu, &format!("C{uploaded}"), "L").unwrap();
            model.upload(&format!("C{uploaded}"));
        }

        for op in ops {
            match op {
                Op::Transfer { from, to, wei } => {
                    let ok = ledger.transfer(accts[from], accts[to], &TokenAmount::from_wei(wei)).is_ok();
                    prop_assert_eq!(ok, model.transfer(accts[from], accts[to], wei));
                }
                Op::Upload => {
                    uploaded += 1;
                    ledger.upload_channel(pu, &format!("C{uploaded}"), "L").unwrap();
                    model.upload(&format!("C{uploaded}"));
                }
                Op::MintFt(units) => {
                    ledger.mint_ft(pu, pu, units).unwrap();
                    model.mint_ft(units);
                }
                Op::Advance(secs) => {
                    ledger.advance_time(secs).unwrap();
                }
                Op::MintNfst(n) => {
                    if ledger.mint_nfst(pu, &format!("C{n}"), "L").is_ok() {
                        model.next_id += 1;
                        model.events += 1;
                    }
                }
                Op::List { pick, price_tenths, duration } => {
                    let ids: Vec<u64> = ledger.nfsts().records().map(|r| r.token_id).collect();
                    if let Some(&id) = ids.get(pick % ids.len().max(1)) {
                        let price = TokenAmount::from_wei(price_tenths * UNIT / 10);
                        if ledger.list_nfst(pu, id, &price, duration).is_ok() {
                            model.events += 1;
                        }
                    }
                }
                Op::Rent { pick, renter } => {
                    let records: Vec<_> = ledger.nfsts().records().cloned().collect();
                    if let Some(rec) = records.get(pick % records.len().max(1)) {
                        if ledger.rent_nfst_by_user(rec.token_id, accts[renter]).is_ok() {
                            let price = rec.price.as_ref().unwrap().to_u128().unwrap();
                            prop_assert!(model.transfer(accts[renter], rec.owner, price));
                            model.events += 1;
                        }
                    }
                }
            }
            if let Err(v) = checker.check(&ledger) {
                return Err(TestCaseError::fail(v.to_string()));
            }
            for &a in &accts {
                prop_assert_eq!(ledger.balance_of(a).to_u128().unwrap(), model.balance(a));
                let ids: Vec<u64> = ledger.nfts_of(a).iter().map(|n| n.token_id).collect();
                prop_assert_eq!(ids, model.nft_ids(a));
            }
            prop_assert_eq!(ledger.events().len(), model.events);
        }
    }

    #[test]
    fn conservation_under_arbitrary_transfers(
        steps in prop::collection::vec((0usize..5, 0usize..5, 0u128..3 * UNIT), 0..200)
    ) {
        let accts = accounts(5);
        let pu = accts[0];
        let mut ledger = Ledger::new(pu).unwrap();
        ledger.mint_ft(pu, pu, 10).unwrap();
        for i in 0..10 {
            ledger.upload_channel(pu, &format!("C{i}"), "L").unwrap();
        }
        for (from, to, wei) in steps {
            let _ = ledger.transfer(accts[from], accts[to], &TokenAmount::from_wei(wei));
            let sum: u128 = accts.iter().map(|&a| ledger.balance_of(a).to_u128().unwrap()).sum();
            prop_assert_eq!(sum, 10 * UNIT);
            for &a in &accts[1..] {
                let units = ledger.balance_of(a).to_u128().unwrap() / UNIT;
                prop_assert_eq!(ledger.nft_count(a) as u128, units);
            }
            prop_assert_eq!(ledger.nft_count(pu), 0);
        }
    }
}
