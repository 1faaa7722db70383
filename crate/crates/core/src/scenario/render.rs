use crate::ledger::LedgerEvent;

/// One compact JSON object per line:
/// `{"seq":0,"at":0,"event":"TransferFT","args":{"_from":…,"_to":…,"_amount":…}}`.
/// Argument keys keep their emission order.
pub fn render_events(events: &[LedgerEvent]) -> String {
    let mut out = String::new();
    for ev in events {
        out.push_str(&serde_json::to_string(ev).expect("events serialize"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{Address, Ledger};

    #[test]
    fn renders_mint_and_upload() {
        let pu: Address = "0x0aa7652B45d957B9d2dE60AFbbD90b2DaD3d1f60".parse().unwrap();
        let mut ledger = Ledger::new(pu).unwrap();
        ledger.mint_ft(pu, pu, 10).unwrap();
        ledger.upload_channel(pu, "Channel1", "Location1").unwrap();
        let text = render_events(ledger.events());
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            r#"{"seq":0,"at":0,"event":"TransferFT","args":{"_from":"0x0000000000000000000000000000000000000000","_to":"0x0aa7652b45d957b9d2de60afbbd90b2dad3d1f60","_amount":"10000000000000000000"}}"#
        );
        assert_eq!(
            lines[1],
            r#"{"seq":1,"at":0,"event":"UploadChannelInfo","args":{"_channel":"Channel1","_location":"Location1"}}"#
        );
    }

    #[test]
    fn empty_log_renders_nothing() {
        assert_eq!(render_events(&[]), "");
    }
}
