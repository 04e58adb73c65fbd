use num_traits::Float;

use crate::linalg::{unit_root, CMatrix};

/// The `v x v` discrete Fourier matrix scaled by `1/sqrt(v)`:
/// `U(w, i) = exp(-2 pi i w i / v) / sqrt(v)`.
///
/// Every entry has modulus `1/sqrt(v)`. For `v = 2` this is exactly the
/// normalized Hadamard matrix.
pub fn build_unitary(v: usize) -> CMatrix {
    assert!(v >= 1, "unitary dimension must be positive");
    let scale = Float::sqrt(1.0 / v as f64);
    CMatrix::from_fn(v, v, |w, i| unit_root(w * i, v, -1.0) * scale)
}
