use fpp_core::top_down_crossing_exists;
use randomness::WeightField;
use sequences::BlockSequence;
use wedge::WedgeGraph;

use crate::MartError;

/// Default number of blocks scanned past the start before giving up.
pub const DEFAULT_CAP: usize = 50;

/// Columns of `R'_j`, checked against the sequence and the graph.
pub fn block_columns(graph: &WedgeGraph, seq: &BlockSequence, j: usize) -> Result<(usize, usize), MartError> {
    let too_short = || MartError::SequenceTooShort { needed: 2 * j + 1, available: seq.len().saturating_sub(1) };
    let (lo, hi) = seq.region_prime(j).ok_or_else(too_short)?;
    if hi as usize > graph.n() {
        return Err(MartError::InvalidParameter(format!("block {j} ends at column {hi}, wedge width is {}", graph.n())));
    }
    Ok((lo as usize, hi as usize))
}

/// `m(i)`: the first `j` in `i..=i+cap` such that `R'_j` has a top-down open crossing.
pub fn find_m(graph: &WedgeGraph, field: &WeightField, seq: &BlockSequence, i: usize, cap: usize) -> Result<usize, MartError> {
    for j in i..=i + cap {
        let (lo, hi) = block_columns(graph, seq, j)?;
        if top_down_crossing_exists(graph, field, lo, hi) {
            return Ok(j);
        }
    }
    Err(MartError::CapExceeded { start: i, last: i + cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use randomness::WeightModel;
    use sequences::{build_sequence, Regime};
    use wedge::{EdgeDir, WedgeFunction};

    fn setup() -> (WedgeGraph, BlockSequence) {
        let f = WedgeFunction::log_log_log(1.0, 0.0).unwrap();
        let seq = build_sequence(&f, 0.5, None, Regime::Critical, 40).unwrap();
        let g = WedgeGraph::build(&f, seq.r[40] as usize).unwrap();
        (g, seq)
    }

    #[test]
    fn all_open_gives_m_equal_i() {
        let (g, seq) = setup();
        let f = WeightField::sample(&WeightModel::constant(1.0), &g, 0, 0);
        for i in 0..15 {
            assert_eq!(find_m(&g, &f, &seq, i, 3).unwrap(), i);
        }
    }

    #[test]
    fn first_open_block_is_found() {
        let (g, seq) = setup();
        // Closed everywhere except one vertical column inside R'_{i+4}.
        let i = 5;
        let (lo, _) = seq.region_prime(i + 4).unwrap();
        let x = lo as usize;
        let mut bits = vec![1u8; g.num_edges()];
        for y in 0..g.height(x) as usize {
            bits[g.edge_index(x, y, EdgeDir::Up).unwrap()] = 0;
        }
        let f = WeightField::from_bits(&WeightModel::constant(0.5), bits);
        assert_eq!(find_m(&g, &f, &seq, i, 10).unwrap(), i + 4);
        assert_eq!(find_m(&g, &f, &seq, i, 3), Err(MartError::CapExceeded { start: i, last: i + 3 }));
    }

    #[test]
    fn short_sequence_is_reported() {
        let (g, seq) = setup();
        let f = WeightField::sample(&WeightModel::constant(0.0), &g, 0, 0);
        assert!(matches!(find_m(&g, &f, &seq, 15, 50), Err(MartError::SequenceTooShort { .. })));
    }
}
