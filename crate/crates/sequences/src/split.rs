use crate::SeqError;

/// Splits `n` into `q = floor(n/d)` widths, the first `d + (n mod d)` and the rest `d`.
///
/// Every width lies in `[d, 2d - 1]`.
pub fn split_blocks(n: u64, d: u64) -> Result<Vec<u64>, SeqError> {
    if d == 0 || d > n {
        return Err(SeqError::InvalidParameter(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
    }
    let q = n / d;
    let mut out = vec![d; q as usize];
    out[0] += n % d;
    Ok(out)
}

/// Splits `n` into `m` widths differing by at most one, the larger ones first.
pub fn split_blocks_even(n: u64, m: u64) -> Result<Vec<u64>, SeqError> {
    if m == 0 || n < m {
        // Zero widths would leave empty sub-rectangles.
        return Err(SeqError::InvalidParameter(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
    }
    let (q, r) = (n / m, n % m);
    Ok((0..m).map(|k| if k < r { q + 1 } else { q }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        assert_eq!(split_blocks(10, 3).unwrap(), vec![4, 3, 3]);
        assert_eq!(split_blocks(9, 3).unwrap(), vec![3, 3, 3]);
        assert_eq!(split_blocks(7, 7).unwrap(), vec![7]);
        assert!(split_blocks(3, 4).is_err());
        assert!(split_blocks(3, 0).is_err());
    }

    #[test]
    fn even_split_examples() {
        assert_eq!(split_blocks_even(10, 3).unwrap(), vec![4, 3, 3]);
        assert_eq!(split_blocks_even(10, 10).unwrap(), vec![1; 10]);
        assert!(split_blocks_even(5, 7).is_err());
    }
}
