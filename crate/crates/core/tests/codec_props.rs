use proptest::prelude::*;
use swarmlink::codec::{
    decode, decode_bits, encode, CodecError, Frame, Packet, RoutingLedger, FRAME_BITS, HEADER_BITS,
    MAX_ADDR, MAX_PKG_ID,
};

fn packet() -> impl Strategy<Value = Packet> {
    (0..=MAX_PKG_ID, 0..=MAX_ADDR, 0..=MAX_ADDR, any::<u8>()).prop_map(
        |(pkg_id, sender, receiver, payload)| Packet {
            pkg_id,
            sender,
            receiver,
            payload,
        },
    )
}

/// Straight-line reference encoder: fields written MSB first, then the even
/// parity of the 22 header bits.
fn reference_bits(p: &Packet) -> Vec<bool> {
    let mut bits = Vec::new();
    let mut push = |value: u32, width: u32| {
        for k in (0..width).rev() {
            bits.push(value >> k & 1 == 1);
        }
    };
    push(u32::from(p.pkg_id), 10);
    push(u32::from(p.sender), 6);
    push(u32::from(p.receiver), 6);
    let ones = p.pkg_id.count_ones() + p.sender.count_ones() + p.receiver.count_ones();
    push(ones % 2, 1);
    push(u32::from(p.payload), 8);
    bits
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn round_trip(p in packet()) {
        let frame = encode(&p).unwrap();
        prop_assert_eq!(decode(frame).unwrap(), p);
        prop_assert_eq!(Frame::from_hex(&frame.to_hex()).unwrap(), frame);
        prop_assert_eq!(decode_bits(&frame.to_bits()).unwrap(), p);
    }

    #[test]
    fn layout_matches_reference(p in packet()) {
        let bits = encode(&p).unwrap().to_bits();
        prop_assert_eq!(bits.len(), FRAME_BITS);
        prop_assert_eq!(bits, reference_bits(&p));
    }

    #[test]
    fn hex_is_eight_digits_with_clear_top_bit(p in packet()) {
        let hex = encode(&p).unwrap().to_hex();
        prop_assert_eq!(hex.len(), 8);
        let raw = u32::from_str_radix(&hex, 16).unwrap();
        prop_assert_eq!(raw >> 31, 0);
    }

    #[test]
    fn header_flip_detected(p in packet(), pos in 0..=HEADER_BITS) {
        let frame = encode(&p).unwrap().flip_bit(pos);
        let is_parity_error = matches!(decode(frame), Err(CodecError::Parity { .. }));
        prop_assert!(is_parity_error);
    }

    #[test]
    fn payload_flip_changes_only_payload(p in packet(), pos in HEADER_BITS + 1..FRAME_BITS) {
        let got = decode(encode(&p).unwrap().flip_bit(pos)).unwrap();
        prop_assert_eq!((got.pkg_id, got.sender, got.receiver), (p.pkg_id, p.sender, p.receiver));
        prop_assert_eq!((got.payload ^ p.payload).count_ones(), 1);
    }

    #[test]
    fn wrong_lengths_rejected(len in 0usize..64) {
        prop_assume!(len != FRAME_BITS);
        prop_assert_eq!(decode_bits(&vec![false; len]), Err(CodecError::Length(len)));
    }

    #[test]
    fn ledger_never_exceeds_capacity(cap in 1usize..20, ids in prop::collection::vec((0..=MAX_PKG_ID, 0..=MAX_ADDR), 0..100)) {
        let mut ledger = RoutingLedger::new(cap);
        for (pkg, from) in ids {
            let fresh = !ledger.contains(pkg, from);
            prop_assert_eq!(ledger.insert(pkg, from), fresh);
            prop_assert!(ledger.contains(pkg, from));
            prop_assert!(ledger.len() <= cap);
            prop_assert_eq!(ledger.memory_bytes(), 3 * ledger.len());
        }
    }
}
