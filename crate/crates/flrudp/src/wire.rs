//! Bit-exact frame layout for all protocol datagrams.
//!
//! Every datagram carries exactly one [`Frame`]. All multi-byte integers are
//! big-endian.
//!
//! ```text
//! offset  size  field
//!      0     1  kind          (0 = DATA, 1 = NACK, 2 = COMPLETE_ACK)
//!      1     4  x             packet sequence number
//!      5     4  np            total packet count
//!      9     4  address       IPv4 octets of the originating node
//!     13     2  payload_len
//!     15     n  payload       hex text of one model chunk; DATA only
//! ```
//!
//! Total encoded length is always `15 + payload_len`. The sequence tuple
//! `(x, np, address)` follows one convention per kind:
//!
//! - DATA: `1 <= x <= np`, payload non-empty with an even number of hex
//!   characters;
//! - NACK: `1 <= x <= np`, `x` names one missing packet, payload empty;
//! - COMPLETE_ACK: `x = 0`, `np = 0`, payload empty — the whole transfer has
//!   been received.
//!
//! The explicit kind byte exists because a NACK tuple would otherwise be
//! byte-identical to a DATA header; it makes parsing unambiguous without
//! payload inspection.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Fixed header size on the wire.
pub const HEADER_LEN: usize = 15;

/// Errors produced by frame construction and parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    /// The datagram cannot be a well-formed frame; callers drop it silently.
    #[error("malformed frame: {0}")]
    MalformedFrame(&'static str),
    /// A frame constructor was given arguments violating a type invariant.
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
    /// Text did not parse as a dotted-quad IPv4 address.
    #[error("invalid address: {0:?}")]
    InvalidAddress(String),
}

/// IPv4 address of a node, as carried in the frame header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeAddress([u8; 4]);

impl NodeAddress {
    pub const fn new(octets: [u8; 4]) -> Self {
        Self(octets)
    }

    pub const fn octets(&self) -> [u8; 4] {
        self.0
    }
}

impl fmt::Display for NodeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}.{b}.{c}.{d}")
    }
}

impl FromStr for NodeAddress {
    type Err = WireError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut octets = [0u8; 4];
        let mut parts = s.split('.');
        for octet in &mut octets {
            let part = parts
                .next()
                .ok_or_else(|| WireError::InvalidAddress(s.to_string()))?;
            *octet = part
                .parse()
                .map_err(|_| WireError::InvalidAddress(s.to_string()))?;
        }
        if parts.next().is_some() {
            return Err(WireError::InvalidAddress(s.to_string()));
        }
        Ok(Self(octets))
    }
}

impl From<std::net::Ipv4Addr> for NodeAddress {
    fn from(ip: std::net::Ipv4Addr) -> Self {
        Self(ip.octets())
    }
}

/// Frame discriminator, first byte on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Data,
    Nack,
    CompleteAck,
}

impl FrameKind {
    fn to_byte(self) -> u8 {
        match self {
            FrameKind::Data => 0,
            FrameKind::Nack => 1,
            FrameKind::CompleteAck => 2,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(FrameKind::Data),
            1 => Some(FrameKind::Nack),
            2 => Some(FrameKind::CompleteAck),
            _ => None,
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameKind::Data => write!(f, "DATA"),
            FrameKind::Nack => write!(f, "NACK"),
            FrameKind::CompleteAck => write!(f, "COMPLETE_ACK"),
        }
    }
}

/// The `(x, np, address)` sequence tuple of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SequenceHeader {
    pub x: u32,
    pub np: u32,
    pub addr: NodeAddress,
}

/// One protocol datagram.
///
/// Invariants are enforced at construction, so an existing `Frame` always
/// encodes successfully and [`Frame::decode`] only returns frames that pass
/// the same checks. Fields are therefore only reachable through accessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    kind: FrameKind,
    header: SequenceHeader,
    payload: Vec<u8>,
}

impl Frame {
    /// Build a DATA frame carrying one hex-encoded chunk.
    pub fn data(x: u32, np: u32, addr: NodeAddress, payload: Vec<u8>) -> Result<Self, WireError> {
        if x == 0 || x > np {
            return Err(WireError::InvalidFrame("DATA requires 1 <= x <= np"));
        }
        if payload.is_empty() {
            return Err(WireError::InvalidFrame("DATA payload must be non-empty"));
        }
        if payload.len() % 2 != 0 {
            return Err(WireError::InvalidFrame(
                "DATA payload must be an even number of hex characters",
            ));
        }
        if payload.len() > u16::MAX as usize {
            return Err(WireError::InvalidFrame("payload exceeds 16-bit length"));
        }
        Ok(Self {
            kind: FrameKind::Data,
            header: SequenceHeader { x, np, addr },
            payload,
        })
    }

    /// Build a NACK naming one missing packet.
    pub fn nack(x: u32, np: u32, addr: NodeAddress) -> Result<Self, WireError> {
        if x == 0 || x > np {
            return Err(WireError::InvalidFrame("NACK requires 1 <= x <= np"));
        }
        Ok(Self {
            kind: FrameKind::Nack,
            header: SequenceHeader { x, np, addr },
            payload: Vec::new(),
        })
    }

    /// Build the `(0, 0, A)` transfer-complete acknowledgement.
    pub fn complete_ack(addr: NodeAddress) -> Self {
        Self {
            kind: FrameKind::CompleteAck,
            header: SequenceHeader { x: 0, np: 0, addr },
            payload: Vec::new(),
        }
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn x(&self) -> u32 {
        self.header.x
    }

    pub fn np(&self) -> u32 {
        self.header.np
    }

    pub fn addr(&self) -> NodeAddress {
        self.header.addr
    }

    pub fn header(&self) -> SequenceHeader {
        self.header
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Serialize into the canonical wire layout.
    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(HEADER_LEN + self.payload.len());
        buf.push(self.kind.to_byte());
        buf.extend_from_slice(&self.header.x.to_be_bytes());
        buf.extend_from_slice(&self.header.np.to_be_bytes());
        buf.extend_from_slice(&self.header.addr.octets());
        buf.extend_from_slice(&(self.payload.len() as u16).to_be_bytes());
        buf.extend_from_slice(&self.payload);
        buf
    }

    /// Encoded size in bytes without materializing the encoding.
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    /// Parse a datagram. Any byte sequence is accepted as input; anything
    /// that is not the exact encoding of a valid frame yields
    /// [`WireError::MalformedFrame`], never a panic.
    pub fn decode(data: &[u8]) -> Result<Self, WireError> {
        if data.len() < HEADER_LEN {
            return Err(WireError::MalformedFrame("shorter than header"));
        }
        let kind = FrameKind::from_byte(data[0])
            .ok_or(WireError::MalformedFrame("unknown kind byte"))?;
        let x = u32::from_be_bytes(data[1..5].try_into().unwrap());
        let np = u32::from_be_bytes(data[5..9].try_into().unwrap());
        let addr = NodeAddress([data[9], data[10], data[11], data[12]]);
        let declared = u16::from_be_bytes([data[13], data[14]]) as usize;
        if data.len() != HEADER_LEN + declared {
            return Err(WireError::MalformedFrame(
                "declared payload length disagrees with datagram length",
            ));
        }
        let payload = data[HEADER_LEN..].to_vec();
        match kind {
            FrameKind::Data => Frame::data(x, np, addr, payload)
                .map_err(|_| WireError::MalformedFrame("DATA invariant violation")),
            FrameKind::Nack => {
                if !payload.is_empty() {
                    return Err(WireError::MalformedFrame("NACK with payload"));
                }
                Frame::nack(x, np, addr)
                    .map_err(|_| WireError::MalformedFrame("NACK invariant violation"))
            }
            FrameKind::CompleteAck => {
                if !payload.is_empty() {
                    return Err(WireError::MalformedFrame("COMPLETE_ACK with payload"));
                }
                if x != 0 || np != 0 {
                    return Err(WireError::MalformedFrame(
                        "COMPLETE_ACK requires x = 0 and np = 0",
                    ));
                }
                Ok(Frame::complete_ack(addr))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn addr(s: &str) -> NodeAddress {
        s.parse().unwrap()
    }

    #[test]
    fn complete_ack_encoding_is_fifteen_bytes() {
        let frame = Frame::complete_ack(addr("10.1.2.5"));
        let bytes = frame.encode();
        assert_eq!(
            bytes,
            vec![2, 0, 0, 0, 0, 0, 0, 0, 0, 10, 1, 2, 5, 0, 0]
        );
    }

    #[test]
    fn data_frame_encoding_layout() {
        let frame = Frame::data(2, 4, addr("10.1.2.4"), b"abcd".to_vec()).unwrap();
        let bytes = frame.encode();
        assert_eq!(
            bytes,
            vec![0, 0, 0, 0, 2, 0, 0, 0, 4, 10, 1, 2, 4, 0, 4, 0x61, 0x62, 0x63, 0x64]
        );
    }

    #[test]
    fn nack_encoding_is_fifteen_bytes_kind_one() {
        let frame = Frame::nack(3, 4, addr("10.1.2.5")).unwrap();
        let bytes = frame.encode();
        assert_eq!(bytes.len(), 15);
        assert_eq!(bytes[0], 1);
        assert_eq!(&bytes[1..5], &[0, 0, 0, 3]);
        assert_eq!(&bytes[5..9], &[0, 0, 0, 4]);
    }

    #[test]
    fn roundtrip_simple_data_frame() {
        let frame = Frame::data(1, 1, addr("10.1.2.4"), b"00".to_vec()).unwrap();
        assert_eq!(Frame::decode(&frame.encode()).unwrap(), frame);
    }

    #[test]
    fn decode_too_short_is_malformed() {
        assert!(matches!(
            Frame::decode(&[1, 2, 3]),
            Err(WireError::MalformedFrame(_))
        ));
    }

    #[test]
    fn decode_unknown_kind_is_malformed() {
        let mut bytes = Frame::complete_ack(addr("0.0.0.0")).encode();
        bytes[0] = 7;
        assert!(matches!(
            Frame::decode(&bytes),
            Err(WireError::MalformedFrame(_))
        ));
    }

    #[test]
    fn decode_length_mismatch_is_malformed() {
        // Valid 15-byte header claiming a 100-byte payload with none present.
        let mut bytes = Frame::complete_ack(addr("10.1.2.5")).encode();
        bytes[13] = 0;
        bytes[14] = 100;
        assert!(matches!(
            Frame::decode(&bytes),
            Err(WireError::MalformedFrame(_))
        ));
    }

    #[test]
    fn decode_rejects_data_with_zero_x() {
        let mut bytes = Frame::data(1, 4, addr("10.1.2.4"), b"ab".to_vec())
            .unwrap()
            .encode();
        bytes[1..5].copy_from_slice(&0u32.to_be_bytes());
        assert!(Frame::decode(&bytes).is_err());
    }

    #[test]
    fn decode_rejects_data_with_x_above_np() {
        let mut bytes = Frame::data(1, 4, addr("10.1.2.4"), b"ab".to_vec())
            .unwrap()
            .encode();
        bytes[1..5].copy_from_slice(&5u32.to_be_bytes());
        assert!(Frame::decode(&bytes).is_err());
    }

    #[test]
    fn decode_rejects_nonzero_complete_ack() {
        let mut bytes = Frame::complete_ack(addr("10.1.2.5")).encode();
        bytes[4] = 1; // x = 1
        assert!(Frame::decode(&bytes).is_err());
    }

    #[test]
    fn decode_rejects_nack_with_payload() {
        let mut bytes = Frame::nack(1, 2, addr("10.1.2.5")).unwrap().encode();
        bytes[14] = 2;
        bytes.extend_from_slice(b"ab");
        assert!(Frame::decode(&bytes).is_err());
    }

    #[test]
    fn constructors_enforce_invariants() {
        let a = addr("10.1.2.4");
        assert!(Frame::data(0, 4, a, b"ab".to_vec()).is_err());
        assert!(Frame::data(5, 4, a, b"ab".to_vec()).is_err());
        assert!(Frame::data(1, 4, a, Vec::new()).is_err());
        assert!(Frame::data(1, 4, a, b"abc".to_vec()).is_err());
        assert!(Frame::nack(0, 0, a).is_err());
        assert!(Frame::nack(9, 4, a).is_err());
    }

    #[test]
    fn address_display_and_parse_roundtrip() {
        let a = NodeAddress::new([10, 1, 2, 4]);
        assert_eq!(a.to_string(), "10.1.2.4");
        assert_eq!("10.1.2.4".parse::<NodeAddress>().unwrap(), a);
        assert!("10.1.2".parse::<NodeAddress>().is_err());
        assert!("10.1.2.4.5".parse::<NodeAddress>().is_err());
        assert!("10.1.2.400".parse::<NodeAddress>().is_err());
        assert!("a.b.c.d".parse::<NodeAddress>().is_err());
    }

    prop_compose! {
        fn arb_addr()(octets in proptest::array::uniform4(any::<u8>())) -> NodeAddress {
            NodeAddress::new(octets)
        }
    }

    fn arb_frame() -> impl Strategy<Value = Frame> {
        let data = (1u32..=64, arb_addr(), 1usize..=32).prop_flat_map(|(np, addr, half_len)| {
            (1u32..=np, Just(np), Just(addr), proptest::collection::vec(any::<u8>(), half_len))
        });
        prop_oneof![
            data.prop_map(|(x, np, addr, raw)| {
                let hex = crate::codec::to_hex(&raw).into_bytes();
                Frame::data(x, np, addr, hex).unwrap()
            }),
            (1u32..=64, arb_addr()).prop_flat_map(|(np, addr)| {
                (1u32..=np, Just(np), Just(addr))
                    .prop_map(|(x, np, addr)| Frame::nack(x, np, addr).unwrap())
            }),
            arb_addr().prop_map(Frame::complete_ack),
        ]
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(frame in arb_frame()) {
            let bytes = frame.encode();
            prop_assert_eq!(bytes.len(), HEADER_LEN + frame.payload().len());
            prop_assert_eq!(bytes.len(), frame.encoded_len());
            prop_assert_eq!(Frame::decode(&bytes).unwrap(), frame);
        }

        #[test]
        fn decode_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            match Frame::decode(&bytes) {
                Ok(frame) => {
                    // Decoded frames always satisfy the type invariants.
                    match frame.kind() {
                        FrameKind::Data => {
                            prop_assert!(frame.x() >= 1 && frame.x() <= frame.np());
                            prop_assert!(!frame.payload().is_empty());
                            prop_assert_eq!(frame.payload().len() % 2, 0);
                        }
                        FrameKind::Nack => {
                            prop_assert!(frame.x() >= 1 && frame.x() <= frame.np());
                            prop_assert!(frame.payload().is_empty());
                        }
                        FrameKind::CompleteAck => {
                            prop_assert_eq!(frame.x(), 0);
                            prop_assert_eq!(frame.np(), 0);
                            prop_assert!(frame.payload().is_empty());
                        }
                    }
                }
                Err(WireError::MalformedFrame(_)) => {}
                Err(other) => prop_assert!(false, "unexpected error: {other:?}"),
            }
        }

        #[test]
        fn address_roundtrip(a in arb_addr()) {
            prop_assert_eq!(a.to_string().parse::<NodeAddress>().unwrap(), a);
        }
    }
}
