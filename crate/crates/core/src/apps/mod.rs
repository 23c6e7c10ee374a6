//! The four applications: monotone submodular maximisation under a cardinality constraint,
//! sequential submodular ranking, multiple reserve prices, and non-monotone submodular
//! maximisation on a lattice.

pub mod coverage;
pub mod monotone_sm;
pub mod nsm;
pub mod ranking;
pub mod reserves;

pub use coverage::{CoverageFunction, SetFunction};

/// Bits `0..n` set.
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Appends little-endian `u32` indices after a tag byte.
pub(crate) fn encode_indices(tag: u8, idx: impl Iterator<Item = usize>) -> Vec<u8> {
    let mut out = vec![tag];
    for i in idx {
        out.extend_from_slice(&(i as u32).to_le_bytes());
    }
    out
}

/// Enumerates `{0..base}^len` in lexicographic order when it has at most `limit` points.
pub(crate) fn product_space(base: usize, len: usize, limit: u128) -> crate::Result<Vec<Vec<usize>>> {
    let size = (base as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if size > limit {
        return Err(crate::Error::TooLargeToEnumerate { size, limit });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < base {
                break;
            }
            cur[pos] = 0;
        }
    }
}
