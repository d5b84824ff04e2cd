//! Encodes a packet into a 31-bit frame, prints it in binary and hex, and
//! shows which single-bit errors the header parity catches.

use swarmlink::codec::{decode, encode, CodecError, Packet, FRAME_BITS, HEADER_BITS};

fn main() -> Result<(), CodecError> {
    let packet = Packet::new(513, 17, 42, 0b1010_0101)?;
    let frame = encode(&packet)?;
    let bits: String = frame
        .to_bits()
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    println!("{packet:?}");
    println!("  bits {bits}");
    println!("  hex  {}", frame.to_hex());
    println!("  back {:?}", decode(frame)?);

    let mut caught = 0;
    for pos in 0..FRAME_BITS {
        match decode(frame.flip_bit(pos)) {
            Err(CodecError::Parity { .. }) => caught += 1,
            Ok(p) => println!(
                "  flip of bit {pos:2} slips through, payload reads {:#010b}",
                p.payload
            ),
            Err(e) => println!("  flip of bit {pos:2}: {e}"),
        }
    }
    println!(
        "{caught} of {} header and parity flips detected",
        HEADER_BITS + 1
    );
    Ok(())
}
