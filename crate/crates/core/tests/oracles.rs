//! Ledger behaviour checked against independent oracles.

mod common;

use std::collections::BTreeSet;

use common::{accounts, Model, UNIT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectrum_core::scenario::{execute, parse_scenario, render_events, ExecOptions};
use spectrum_core::{parse_amount, Address, Ledger, TokenAmount};

fn wei(amount: &TokenAmount) -> u128 {
    amount.to_u128().unwrap()
}

/// Owner with `units` FT and as many channels, mirrored in a model.
fn setup(units: u128) -> (Ledger, Model, Vec<Address>) {
    let accts = accounts(8);
    let pu = accts[0];
    let mut ledger = Ledger::new(pu).unwrap();
    let mut model = Model::new(pu);
    ledger.mint_ft(pu, pu, units).unwrap();
    model.mint_ft(units);
    for i in 0..units {
        let name = format!("C{i}");
        ledger.upload_channel(pu, &name, "L").unwrap();
        model.upload(&name);
    }
    (ledger, model, accts)
}

fn random_amount(rng: &mut ChaCha8Rng, balance: u128) -> u128 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(0..=2) * UNIT,
        1 => rng.gen_range(0..=balance),
        2 => balance,
        _ => balance + rng.gen_range(1..UNIT),
    }
}

#[test]
fn floor_law_over_ten_thousand_random_transfers() {
    let (mut ledger, mut model, accts) = setup(24);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for step in 0..10_000 {
        let from = accts[rng.gen_range(0..accts.len())];
        let to = accts[rng.gen_range(0..accts.len())];
        let amount = random_amount(&mut rng, model.balance(from));
        let ok = ledger.transfer(from, to, &TokenAmount::from_wei(amount)).is_ok();
        assert_eq!(ok, model.transfer(from, to, amount), "step {step}");

        for &a in &accts {
            let expected = if a == accts[0] { 0 } else { (wei(&ledger.balance_of(a)) / UNIT) as usize };
            assert_eq!(ledger.nft_count(a), expected, "step {step} floor law for {a}");
        }
    }
}

#[test]
fn nft_ids_and_channels_match_model() {
    let (mut ledger, mut model, accts) = setup(12);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for step in 0..3_000 {
        let from = accts[rng.gen_range(0..accts.len())];
        let to = accts[rng.gen_range(0..accts.len())];
        let amount = random_amount(&mut rng, model.balance(from));
        let _ = ledger.transfer(from, to, &TokenAmount::from_wei(amount));
        model.transfer(from, to, amount);

        for &a in &accts {
            let ids: Vec<u64> = ledger.nfts_of(a).iter().map(|n| n.token_id).collect();
            assert_eq!(ids, model.nft_ids(a), "step {step}");
            for nft in ledger.nfts_of(a) {
                assert_eq!(Some(nft.channel.as_str()), model.channel_of(nft.token_id));
            }
        }
        assert_eq!(ledger.events().len(), model.events, "step {step} event count");
    }
}

#[test]
fn event_count_and_seq_match_instrumented_oracle() {
    let (mut ledger, mut model, accts) = setup(6);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let from = accts[rng.gen_range(0..4)];
        let to = accts[rng.gen_range(0..4)];
        let amount = random_amount(&mut rng, model.balance(from));
        let _ = ledger.transfer(from, to, &TokenAmount::from_wei(amount));
        model.transfer(from, to, amount);
    }
    assert_eq!(ledger.events().len(), model.events);
    for (i, ev) in ledger.events().iter().enumerate() {
        assert_eq!(ev.seq, i as u64);
    }
}

#[test]
fn global_nft_set_has_distinct_channels() {
    let (mut ledger, _, accts) = setup(16);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..2_000 {
        let from = accts[rng.gen_range(0..accts.len())];
        let to = accts[rng.gen_range(0..accts.len())];
        let amount = random_amount(&mut rng, wei(&ledger.balance_of(from)));
        let _ = ledger.transfer(from, to, &TokenAmount::from_wei(amount));

        let union: Vec<_> = accts.iter().flat_map(|&a| ledger.nfts_of(a)).collect();
        let live: Vec<_> = ledger.live_nfts().cloned().collect();
        assert_eq!(union.len(), live.len());
        let union_ids: BTreeSet<u64> = union.iter().map(|n| n.token_id).collect();
        let live_ids: BTreeSet<u64> = live.iter().map(|n| n.token_id).collect();
        assert_eq!(union_ids, live_ids);
        let channels: BTreeSet<&str> = live.iter().map(|n| n.channel.as_str()).collect();
        assert_eq!(channels.len(), live.len());

        let occupied = ledger.channel_list().iter().filter(|c| c.2).count();
        assert_eq!(occupied, live.len());
    }
}

#[test]
fn channel_list_matches_plain_list() {
    let pu = Address::from_name("PU");
    let mut ledger = Ledger::new(pu).unwrap();
    let mut oracle: Vec<(String, String)> = Vec::new();
    for i in 1..=8 {
        let (c, l) = (format!("C{i}"), format!("Loc{i}"));
        ledger.upload_channel(pu, &c, &l).unwrap();
        oracle.push((c, l));
    }
    // duplicates leave the list untouched
    ledger.upload_channel(pu, "C3", "elsewhere").unwrap();
    let listed: Vec<_> = ledger.channel_list().into_iter().map(|(c, l, _)| (c, l)).collect();
    assert_eq!(listed, oracle);
}

#[test]
fn transfer_path_equality_with_additive_oracle() {
    let (mut ledger, _, accts) = setup(30);
    let mut plain: std::collections::BTreeMap<Address, u128> = [(accts[0], 30 * UNIT)].into();
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for _ in 0..5_000 {
        let from = accts[rng.gen_range(0..accts.len())];
        let to = accts[rng.gen_range(0..accts.len())];
        let balance = plain.get(&from).copied().unwrap_or(0);
        let amount = rng.gen_range(0..=balance);
        if ledger.transfer(from, to, &TokenAmount::from_wei(amount)).is_ok() {
            *plain.entry(from).or_default() -= amount;
            *plain.entry(to).or_default() += amount;
        }
    }
    for &a in &accts {
        assert_eq!(wei(&ledger.balance_of(a)), plain.get(&a).copied().unwrap_or(0));
    }
}

fn ft(text: &str) -> TokenAmount {
    parse_amount(text).unwrap()
}

#[test]
fn relisting_changes_next_rental_price() {
    let (mut ledger, _, accts) = setup(4);
    let (pu, su) = (accts[0], accts[1]);
    let id = ledger.mint_nfst(pu, "C0", "L").unwrap();
    ledger.list_nfst(pu, id, &ft("0.1"), 100).unwrap();
    ledger.list_nfst(pu, id, &ft("0.25"), 100).unwrap();
    ledger.transfer(pu, su, &ft("0.5")).unwrap();
    let before = wei(&ledger.balance_of(su));
    ledger.rent_nfst_by_user(id, su).unwrap();
    assert_eq!(before - wei(&ledger.balance_of(su)), wei(&ft("0.25")));
}

#[test]
fn renter_with_exactly_one_ft_loses_its_nft() {
    let (mut ledger, mut model, accts) = setup(4);
    let (pu, su) = (accts[0], accts[1]);
    let id = ledger.mint_nfst(pu, "C0", "L").unwrap();
    model.next_id += 1;
    ledger.list_nfst(pu, id, &ft("0.1"), 100).unwrap();
    ledger.transfer(pu, su, &ft("1.0")).unwrap();
    model.transfer(pu, su, UNIT);
    assert_eq!(ledger.nft_count(su), 1);

    ledger.rent_nfst_by_user(id, su).unwrap();
    model.transfer(su, pu, UNIT / 10);
    assert_eq!(ledger.balance_of(su), ft("0.9"));
    assert_eq!(ledger.nft_count(su), model.nft_ids(su).len());
    assert_eq!(ledger.nft_count(su), 0);
    assert_eq!(ledger.nft_count(pu), 0);
}

#[test]
fn token_available_again_after_expiry_replay() {
    let text = "\
account PU
account SU
mint_ft PU 2
upload_channel C1 L1
upload_channel C2 L2
mint_nfst C1 L1
list_nfst 1 0.5 50
transfer PU SU 1
rent_nfst 1 SU
assert available_count 0
advance_time 50
assert available_count 0
advance_time 1
assert available_count 1
";
    let report = execute(&parse_scenario(text).unwrap(), ExecOptions { check_invariants: true });
    assert!(report.success(), "{:?}", report.assertions);
}

#[test]
fn snapshot_equals_snapshot_of_replay() {
    let (mut ledger, _, accts) = setup(10);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    // record commands as they run, then replay them on a second instance
    let mut commands: Vec<(Address, Address, u128)> = Vec::new();
    for _ in 0..300 {
        let from = accts[rng.gen_range(0..accts.len())];
        let to = accts[rng.gen_range(0..accts.len())];
        let amount = random_amount(&mut rng, wei(&ledger.balance_of(from)));
        if ledger.transfer(from, to, &TokenAmount::from_wei(amount)).is_ok() {
            commands.push((from, to, amount));
        }
    }
    let (mut replay, _, _) = setup(10);
    for (from, to, amount) in commands {
        replay.transfer(from, to, &TokenAmount::from_wei(amount)).unwrap();
    }
    assert_eq!(ledger.snapshot().to_json(), replay.snapshot().to_json());
    assert_eq!(render_events(ledger.events()), render_events(replay.events()));
}
