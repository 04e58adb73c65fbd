//! The map `psi` from mini-file bits to channel symbols.
//!
//! Bits are Gray-mapped to unit-modulus QPSK symbols, two per symbol with
//! the most significant bit of each byte first, and every symbol is spread
//! over `P` chips of a DFT code `c_p[j] = exp(2 pi i p j / P)`. Distinct
//! codes of the same length are orthogonal, so a receiver separates
//! superposed streams exactly by despreading, and the cross terms vanish
//! from the transmit power.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::unit_root;

/// Chips of spreading code `code` out of `length` codes.
pub fn spreading_code(code: usize, length: usize) -> Vec<Complex64> {
    (0..length).map(|j| unit_root(code * j, length, 1.0)).collect()
}

/// Number of channel uses `psi` needs for `bytes` bytes with codes of
/// length `length`.
pub fn channel_uses(bytes: usize, length: usize) -> usize {
    bytes * 4 * length
}

fn qpsk(b0: u8, b1: u8) -> Complex64 {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(if b0 == 0 { h } else { -h }, if b1 == 0 { h } else { -h })
}

/// `psi(bits)` spread on code `code` of length `length`.
pub fn modulate(bytes: &[u8], code: usize, length: usize) -> Vec<Complex64> {
    let chips = spreading_code(code, length);
    let mut out = Vec::with_capacity(channel_uses(bytes.len(), length));
    for &byte in bytes {
        for pair in 0..4 {
            let shift = 6 - 2 * pair;
            let sym = qpsk((byte >> (shift + 1)) & 1, (byte >> shift) & 1);
            out.extend(chips.iter().map(|c| sym * c));
        }
    }
    out
}

/// Correlates `signal` with code `code`, one value per symbol.
pub fn despread(signal: &[Complex64], code: usize, length: usize) -> Vec<Complex64> {
    let chips = spreading_code(code, length);
    signal
        .chunks(length)
        .map(|chunk| chunk.iter().zip(&chips).map(|(y, c)| y * c.conj()).sum::<Complex64>() / length as f64)
        .collect()
}

/// Hard QPSK decisions on `symbols`, four per byte. Also returns the
/// largest distance from a symbol to its decided constellation point.
pub fn demodulate(symbols: &[Complex64]) -> (Vec<u8>, f64) {
    let mut worst: f64 = 0.0;
    let bytes = symbols
        .chunks(4)
        .map(|quad| {
            let mut byte = 0u8;
            for &s in quad {
                let b0 = u8::from(s.re < 0.0);
                let b1 = u8::from(s.im < 0.0);
                worst = worst.max((s - qpsk(b0, b1)).norm());
                byte = (byte << 2) | (b0 << 1) | b1;
            }
            byte
        })
        .collect();
    (bytes, worst)
}
