//! Serializable point-in-time view of a [`Ledger`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ledger::Ledger;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NftEntry {
    pub token_id: u64,
    pub channel: String,
    pub location: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelEntry {
    pub channel: String,
    pub location: String,
    pub occupied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfstEntry {
    pub token_id: u64,
    pub owner: String,
    pub channel: String,
    pub location: String,
    /// Wei, absent until listed.
    pub price: Option<String>,
    pub duration: Option<u64>,
    pub user: String,
    pub expire_time: u64,
}

/// Field order is fixed and every map is key-ordered, so two ledgers with
/// the same history serialize to the same bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDocument {
    pub owner: String,
    pub time: u64,
    /// Address to wei. Zero balances are omitted.
    pub ft_balances: BTreeMap<String, String>,
    pub nft_holdings: BTreeMap<String, Vec<NftEntry>>,
    pub channels: Vec<ChannelEntry>,
    pub nfst_records: Vec<NfstEntry>,
    #[serde(rename = "totalSupply_FT")]
    pub total_supply_ft: String,
    #[serde(rename = "totalSupply_NFT")]
    pub total_supply_nft: u128,
    pub next_token_id: u64,
}

impl StateDocument {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("state document serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

impl Ledger {
    pub fn snapshot(&self) -> StateDocument {
        let mut nft_holdings: BTreeMap<String, Vec<NftEntry>> = BTreeMap::new();
        for nft in self.live_nfts() {
            nft_holdings.entry(nft.holder.to_string()).or_default().push(NftEntry {
                token_id: nft.token_id,
                channel: nft.channel.clone(),
                location: nft.location.clone(),
            });
        }
        StateDocument {
            owner: self.owner().to_string(),
            time: self.now().seconds(),
            ft_balances: self
                .balances()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            nft_holdings,
            channels: self
                .channels()
                .iter()
                .map(|c| ChannelEntry {
                    channel: c.channel.clone(),
                    location: c.location.clone(),
                    occupied: c.occupied(),
                })
                .collect(),
            nfst_records: self
                .nfsts()
                .records()
                .map(|r| NfstEntry {
                    token_id: r.token_id,
                    owner: r.owner.to_string(),
                    channel: r.channel.clone(),
                    location: r.location.clone(),
                    price: r.price.as_ref().map(ToString::to_string),
                    duration: r.duration,
                    user: r.user.to_string(),
                    expire_time: r.expire_time.seconds(),
                })
                .collect(),
            total_supply_ft: self.total_supply_ft().to_string(),
            total_supply_nft: self.total_supply_nft(),
            next_token_id: self.next_token_id(),
        }
    }
}
