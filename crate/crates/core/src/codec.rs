//! 31-bit robot packet frame, duplicate-suppression ledger, and the
//! routing-memory model.
//!
//! Frame layout, most significant bit first:
//!
//! ```text
//!  30      21 20   15 14    9   8   7      0
//! +----------+-------+-------+---+--------+
//! |  pkg_id  | sender| recvr | P | payload|
//! +----------+-------+-------+---+--------+
//!    10 bit    6 bit   6 bit  1     8 bit
//! ```
//!
//! `P` is even parity over the 22 header bits. The payload is not covered.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub const FRAME_BITS: usize = 31;
pub const HEADER_BITS: usize = 22;

const PKG_ID_BITS: u32 = 10;
const ADDR_BITS: u32 = 6;
const PAYLOAD_BITS: u32 = 8;

const PAYLOAD_SHIFT: u32 = 0;
const PARITY_SHIFT: u32 = PAYLOAD_BITS;
const RECEIVER_SHIFT: u32 = PARITY_SHIFT + 1;
const SENDER_SHIFT: u32 = RECEIVER_SHIFT + ADDR_BITS;
const PKG_ID_SHIFT: u32 = SENDER_SHIFT + ADDR_BITS;

const FRAME_MASK: u32 = (1 << FRAME_BITS) - 1;
const HEADER_MASK: u32 = ((1 << HEADER_BITS) - 1) << RECEIVER_SHIFT;

pub const MAX_PKG_ID: u16 = (1 << PKG_ID_BITS) - 1;
pub const MAX_ADDR: u8 = (1 << ADDR_BITS) - 1;

/// Default bytes per ledger record: 16 bits of (pkg_id, sender) plus one byte
/// of bookkeeping.
pub const DEFAULT_RECORD_BYTES: usize = 3;
/// On-board data RAM of the robot.
pub const DEFAULT_RAM_BUDGET: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("field `{field}` = {value} does not fit in {bits} bits")]
    FieldRange {
        field: &'static str,
        value: u32,
        bits: u32,
    },
    #[error("frame must be exactly {FRAME_BITS} bits, got {0}")]
    Length(usize),
    #[error("header parity mismatch (stored {stored}, computed {computed})")]
    Parity { stored: u8, computed: u8 },
    #[error("malformed frame hex `{0}`")]
    Hex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Packet {
    pub pkg_id: u16,
    pub sender: u8,
    pub receiver: u8,
    pub payload: u8,
}

impl Packet {
    pub fn new(pkg_id: u16, sender: u8, receiver: u8, payload: u8) -> Result<Self, CodecError> {
        let packet = Packet {
            pkg_id,
            sender,
            receiver,
            payload,
        };
        packet.validate()?;
        Ok(packet)
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        check_range("pkg_id", self.pkg_id as u32, PKG_ID_BITS)?;
        check_range("sender", self.sender as u32, ADDR_BITS)?;
        check_range("receiver", self.receiver as u32, ADDR_BITS)?;
        Ok(())
    }
}

fn check_range(field: &'static str, value: u32, bits: u32) -> Result<(), CodecError> {
    if value >> bits != 0 {
        return Err(CodecError::FieldRange { field, value, bits });
    }
    Ok(())
}

/// A 31-bit frame held in the low bits of a `u32`. Bit 31 is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frame(u32);

impl Frame {
    pub fn from_raw(raw: u32) -> Result<Self, CodecError> {
        if raw & !FRAME_MASK != 0 {
            return Err(CodecError::Length(32));
        }
        Ok(Frame(raw))
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    /// Bits in transmission order (MSB of `pkg_id` first).
    pub fn to_bits(self) -> Vec<bool> {
        (0..FRAME_BITS)
            .map(|i| (self.0 >> (FRAME_BITS - 1 - i)) & 1 == 1)
            .collect()
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, CodecError> {
        if bits.len() != FRAME_BITS {
            return Err(CodecError::Length(bits.len()));
        }
        let raw = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        Ok(Frame(raw))
    }

    pub fn flip_bit(self, position: usize) -> Self {
        assert!(position < FRAME_BITS, "bit position out of range");
        Frame(self.0 ^ (1 << (FRAME_BITS - 1 - position)))
    }

    /// Eight hex digits; the 31-bit frame is left-padded with one zero bit.
    pub fn to_hex(self) -> String {
        format!("{:08x}", self.0)
    }

    pub fn from_hex(text: &str) -> Result<Self, CodecError> {
        let text = text.trim();
        if text.len() != 8 || !text.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(CodecError::Hex(text.to_string()));
        }
        let raw = u32::from_str_radix(text, 16).map_err(|_| CodecError::Hex(text.to_string()))?;
        Frame::from_raw(raw)
    }

    fn field(self, shift: u32, bits: u32) -> u32 {
        (self.0 >> shift) & ((1 << bits) - 1)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn header_parity(raw: u32) -> u8 {
    ((raw & HEADER_MASK).count_ones() & 1) as u8
}

pub fn encode(packet: &Packet) -> Result<Frame, CodecError> {
    packet.validate()?;
    let mut raw = (packet.pkg_id as u32) << PKG_ID_SHIFT
        | (packet.sender as u32) << SENDER_SHIFT
        | (packet.receiver as u32) << RECEIVER_SHIFT
        | (packet.payload as u32) << PAYLOAD_SHIFT;
    raw |= (header_parity(raw) as u32) << PARITY_SHIFT;
    Ok(Frame(raw))
}

pub fn decode(frame: Frame) -> Result<Packet, CodecError> {
    let stored = frame.field(PARITY_SHIFT, 1) as u8;
    let computed = header_parity(frame.0);
    if stored != computed {
        return Err(CodecError::Parity { stored, computed });
    }
    Ok(Packet {
        pkg_id: frame.field(PKG_ID_SHIFT, PKG_ID_BITS) as u16,
        sender: frame.field(SENDER_SHIFT, ADDR_BITS) as u8,
        receiver: frame.field(RECEIVER_SHIFT, ADDR_BITS) as u8,
        payload: frame.field(PAYLOAD_SHIFT, PAYLOAD_BITS) as u8,
    })
}

/// Decodes a frame given as a bit sequence in transmission order.
pub fn decode_bits(bits: &[bool]) -> Result<Packet, CodecError> {
    decode(Frame::from_bits(bits)?)
}

/// Bounded FIFO history of `(pkg_id, sender)` pairs used for duplicate
/// suppression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingLedger {
    capacity: usize,
    record_bytes: usize,
    order: VecDeque<(u16, u8)>,
    present: HashSet<(u16, u8)>,
}

impl RoutingLedger {
    pub fn new(capacity: usize) -> Self {
        Self::with_record_bytes(capacity, DEFAULT_RECORD_BYTES)
    }

    pub fn with_record_bytes(capacity: usize, record_bytes: usize) -> Self {
        RoutingLedger {
            capacity,
            record_bytes,
            order: VecDeque::with_capacity(capacity),
            present: HashSet::with_capacity(capacity),
        }
    }

    /// Records the pair. Returns `false` if it was already present. When the
    /// ledger is full the oldest record is evicted first.
    pub fn insert(&mut self, pkg_id: u16, sender: u8) -> bool {
        let key = (pkg_id, sender);
        if self.present.contains(&key) {
            return false;
        }
        if self.capacity == 0 {
            return true;
        }
        if self.order.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.present.remove(&old);
            }
        }
        self.order.push_back(key);
        self.present.insert(key);
        true
    }

    pub fn contains(&self, pkg_id: u16, sender: u8) -> bool {
        self.present.contains(&(pkg_id, sender))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn memory_bytes(&self) -> usize {
        self.order.len() * self.record_bytes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryModel {
    pub ram_budget: usize,
    pub record_bytes: usize,
    pub packages: usize,
}

impl MemoryModel {
    pub fn new(packages: usize) -> Self {
        MemoryModel {
            ram_budget: DEFAULT_RAM_BUDGET,
            record_bytes: DEFAULT_RECORD_BYTES,
            packages,
        }
    }

    pub fn required_bytes(&self) -> usize {
        routing_memory_bytes(self.packages, self.record_bytes)
    }
}

pub fn routing_memory_bytes(packages: usize, record_bytes: usize) -> usize {
    packages * record_bytes
}

/// Whether the package history fits in the RAM budget.
pub fn routing_feasible(model: &MemoryModel) -> bool {
    model.required_bytes() <= model.ram_budget
}
