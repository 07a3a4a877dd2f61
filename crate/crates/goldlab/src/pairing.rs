//! [Cantor pairing][pairing]: the standard bijection `ℕ² → ℕ`.
//!
//! ```text
//! ⟨x, y⟩ = (x + y)(x + y + 1)/2 + y
//! ```
//!
//! Used to encode function graphs as sets of naturals and to drive dovetailed
//! searches by a single index.
//!
//! [pairing]: https://en.wikipedia.org/wiki/Pairing_function#Cantor_pairing_function

/// Encodes a pair of naturals as a single natural.
pub fn pair_encode(x: u64, y: u64) -> u64 {
    let s = x + y;
    s * (s + 1) / 2 + y
}

/// Decodes a natural back into the pair it encodes.
///
/// Inverse of [`pair_encode`]: finds the diagonal `s` with
/// `s(s+1)/2 ≤ n < (s+1)(s+2)/2`, then reads off the offset.
pub fn pair_decode(n: u64) -> (u64, u64) {
    let s = diagonal_of(n);
    let y = n - s * (s + 1) / 2;
    (s - y, y)
}

/// First projection: `pair_decode(n).0`.
pub fn proj1(n: u64) -> u64 {
    pair_decode(n).0
}

/// Second projection: `pair_decode(n).1`.
pub fn proj2(n: u64) -> u64 {
    pair_decode(n).1
}

/// Largest `s` with `s(s+1)/2 ≤ n`.
fn diagonal_of(n: u64) -> u64 {
    // isqrt(2n) is off by at most one from the true diagonal; fix up locally.
    let mut s = (2 * n).isqrt();
    while s * (s + 1) / 2 > n {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= n {
        s += 1;
    }
    s
}
