use randomness::WeightField;
use serde::{Deserialize, Serialize};
use wedge::{EdgeDir, WedgeGraph};

use crate::MartError;

/// Headings of the wall-follower: east, north, west, south.
const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const SOUTH: usize = 3;

/// Simpson panels per unit interval for the cap integral. Exact for
/// piecewise-linear wedges with integer breakpoints.
const SIMPSON_PANELS: usize = 16;

/// Size of the part of a block to the left of a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interior {
    /// Unit lattice faces strictly left of the crossing.
    pub faces: i64,
    /// `faces` plus the area between the lattice top and `f` over the columns
    /// left of the crossing's top vertex. This is the quantity minimized.
    pub measure: f64,
}

/// A block crossing as seen from block index `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingState {
    pub i: usize,
    pub m_i: usize,
    /// Vertex ids, top end first.
    pub gamma: Vec<usize>,
    pub interior_area: i64,
}

/// Open edge from `(x, y)` one step along `dir`, staying inside columns `lo..=hi`.
pub(crate) fn open_step(
    graph: &WedgeGraph,
    field: &WeightField,
    lo: usize,
    hi: usize,
    (x, y): (usize, usize),
    dir: usize,
) -> Option<(usize, usize)> {
    let (dx, dy) = STEPS[dir];
    let nx = x as i64 + dx;
    let ny = y as i64 + dy;
    if nx < lo as i64 || nx > hi as i64 || ny < 0 {
        return None;
    }
    let (nx, ny) = (nx as usize, ny as usize);
    if ny > graph.height(nx) as usize {
        return None;
    }
    let e = match dir {
        0 => graph.edge_index(x, y, EdgeDir::Right),
        1 => graph.edge_index(x, y, EdgeDir::Up),
        2 => graph.edge_index(nx, ny, EdgeDir::Right),
        _ => graph.edge_index(nx, ny, EdgeDir::Up),
    }?;
    (field.t(e) == 0).then_some((nx, ny))
}

/// Vertices of columns `lo..=hi` joined to the x-axis by open edges inside the block.
fn bottom_cluster(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize) -> Vec<bool> {
    let range = graph.columns(lo, hi);
    let base = range.start;
    let mut seen = vec![false; range.len()];
    let mut stack = Vec::new();
    for x in lo..=hi {
        let v = graph.vertex(x, 0).unwrap();
        seen[v - base] = true;
        stack.push(v);
    }
    while let Some(v) = stack.pop() {
        graph.for_each_neighbor(v, |w, e| {
            if range.contains(&w) && field.t(e) == 0 && !seen[w - base] {
                seen[w - base] = true;
                stack.push(w);
            }
        });
    }
    seen
}

/// Leftmost top-down open crossing of the block of columns `lo..=hi`.
///
/// Starts at the leftmost top vertex whose cluster reaches the axis and walks
/// down keeping the wall on the right (west) hand, trying right, straight,
/// left, then back at each vertex. The walk is loop-erased and stops at the
/// first vertex on the axis.
pub fn leftmost_crossing(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize) -> Result<Vec<usize>, MartError> {
    if lo > hi || hi > graph.n() {
        return Err(MartError::InvalidParameter(format!("block {lo}..={hi} outside wedge of width {}", graph.n())));
    }
    let cluster = bottom_cluster(graph, field, lo, hi);
    let base = graph.columns(lo, hi).start;
    let start = (lo..=hi)
        .map(|x| (x, graph.height(x) as usize))
        .find(|&(x, y)| cluster[graph.vertex(x, y).unwrap() - base])
        .ok_or(MartError::NoCrossing { lo, hi })?;

    let block_edges = graph.columns(lo, hi).len() * 2;
    let mut pos = start;
    let mut heading = SOUTH;
    let mut path = vec![graph.vertex(pos.0, pos.1).unwrap()];
    let mut index_of = std::collections::HashMap::new();
    index_of.insert(path[0], 0usize);
    let mut steps = 0usize;
    while pos.1 > 0 {
        steps += 1;
        if steps > 4 * block_edges + 4 {
            return Err(MartError::Internal(format!("wall-follower did not reach the axis in block {lo}..={hi}")));
        }
        let turn = [(heading + 3) % 4, heading, (heading + 1) % 4, (heading + 2) % 4]
            .into_iter()
            .find_map(|d| open_step(graph, field, lo, hi, pos, d).map(|p| (d, p)));
        let Some((d, next)) = turn else {
            return Err(MartError::Internal("wall-follower stuck on an isolated vertex".into()));
        };
        heading = d;
        pos = next;
        let v = graph.vertex(pos.0, pos.1).unwrap();
        if let Some(&k) = index_of.get(&v) {
            for w in path.drain(k + 1..) {
                index_of.remove(&w);
            }
        } else {
            index_of.insert(v, path.len());
            path.push(v);
        }
    }
    Ok(path)
}

/// `int_k^{k+1} f - floor f(k)`.
fn cap_strip(graph: &WedgeGraph, k: usize) -> Result<f64, MartError> {
    let f = graph.function();
    let h = 1.0 / SIMPSON_PANELS as f64;
    let mut sum = 0.0;
    for s in 0..=SIMPSON_PANELS {
        let w = if s == 0 || s == SIMPSON_PANELS {
            1.0
        } else if s % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * f.eval(k as f64 + s as f64 * h)?;
    }
    Ok(sum * h / 3.0 - graph.height(k) as f64)
}

/// Interior of a crossing of the block starting at column `lo`.
///
/// The boundary is the crossing (top to bottom), the axis back to `lo`, the
/// left side of the block, and the lattice top of the block up to the
/// crossing's first vertex.
pub fn interior(graph: &WedgeGraph, lo: usize, path: &[usize]) -> Result<Interior, MartError> {
    let Some(&first) = path.first() else {
        return Err(MartError::InvalidParameter("empty crossing".into()));
    };
    let (xs, _) = graph.coords(first);
    let mut poly: Vec<(i64, i64)> = path
        .iter()
        .map(|&v| {
            let (x, y) = graph.coords(v);
            (x as i64, y as i64)
        })
        .collect();
    poly.push((lo as i64, 0));
    poly.push((lo as i64, graph.height(lo) as i64));
    for k in lo..xs {
        poly.push((k as i64 + 1, graph.height(k) as i64));
        poly.push((k as i64 + 1, graph.height(k + 1) as i64));
    }
    let mut twice = 0i64;
    for idx in 0..poly.len() {
        let (x1, y1) = poly[idx];
        let (x2, y2) = poly[(idx + 1) % poly.len()];
        twice += x1 * y2 - x2 * y1;
    }
    // The boundary runs clockwise.
    if twice > 0 || twice % 2 != 0 {
        return Err(MartError::Internal(format!("crossing boundary has signed double area {twice}")));
    }
    let faces = -twice / 2;
    let mut cap = 0.0;
    for k in lo..xs {
        cap += cap_strip(graph, k)?;
    }
    Ok(Interior { faces, measure: faces as f64 + cap })
}

/// Whether `path` is a vertex self-avoiding open crossing of columns `lo..=hi`
/// from the top set to the axis, touching the axis only at its end.
pub fn is_top_down_crossing(graph: &WedgeGraph, field: &WeightField, lo: usize, hi: usize, path: &[usize]) -> bool {
    let Some((&first, &last)) = path.first().zip(path.last()) else {
        return false;
    };
    let (x0, y0) = graph.coords(first);
    if !(lo..=hi).contains(&x0) || y0 != graph.height(x0) as usize || graph.coords(last).1 != 0 {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    for (k, &v) in path.iter().enumerate() {
        let (x, y) = graph.coords(v);
        if !(lo..=hi).contains(&x) || !seen.insert(v) || (y == 0 && k + 1 != path.len()) {
            return false;
        }
    }
    path.windows(2).all(|w| {
        let mut open = false;
        graph.for_each_neighbor(w[0], |u, e| open |= u == w[1] && field.t(e) == 0);
        open
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use randomness::WeightModel;
    use wedge::WedgeFunction;

    fn flat(height: f64, width: usize) -> WedgeGraph {
        let mut values = vec![0.0];
        values.extend(std::iter::repeat_n(height, width));
        WedgeGraph::build(&WedgeFunction::Custom { values }, width).unwrap()
    }

    fn coords(g: &WedgeGraph, path: &[usize]) -> Vec<(usize, usize)> {
        path.iter().map(|&v| g.coords(v)).collect()
    }

    #[test]
    fn all_open_block_takes_the_left_column() {
        let g = flat(3.5, 6);
        let f = WeightField::sample(&WeightModel::constant(1.0), &g, 0, 0);
        let p = leftmost_crossing(&g, &f, 2, 4).unwrap();
        assert_eq!(coords(&g, &p), vec![(2, 3), (2, 2), (2, 1), (2, 0)]);
        let int = interior(&g, 2, &p).unwrap();
        assert_eq!(int.faces, 0);
        assert_eq!(int.measure, 0.0);
    }

    #[test]
    fn two_open_columns_pick_the_left_one() {
        let g = flat(3.5, 6);
        let mut bits = vec![1u8; g.num_edges()];
        for x in [3, 5] {
            for y in 0..3 {
                bits[g.edge_index(x, y, EdgeDir::Up).unwrap()] = 0;
            }
        }
        let f = WeightField::from_bits(&WeightModel::constant(0.5), bits);
        let p = leftmost_crossing(&g, &f, 2, 5).unwrap();
        assert_eq!(coords(&g, &p), vec![(3, 3), (3, 2), (3, 1), (3, 0)]);
        let int = interior(&g, 2, &p).unwrap();
        assert_eq!(int.faces, 3);
        assert!((int.measure - 3.5).abs() < 1e-12);
        assert!(is_top_down_crossing(&g, &f, 2, 5, &p));
    }

    #[test]
    fn dead_end_branches_are_erased() {
        // Column 2 is open from the top down to y = 1 only; the cluster reaches
        // the axis through a detour to column 3.
        let g = flat(3.5, 6);
        let mut bits = vec![1u8; g.num_edges()];
        for y in 1..3 {
            bits[g.edge_index(2, y, EdgeDir::Up).unwrap()] = 0;
        }
        bits[g.edge_index(2, 2, EdgeDir::Right).unwrap()] = 0;
        for y in 0..2 {
            bits[g.edge_index(3, y, EdgeDir::Up).unwrap()] = 0;
        }
        let f = WeightField::from_bits(&WeightModel::constant(0.5), bits);
        let p = leftmost_crossing(&g, &f, 2, 4).unwrap();
        assert_eq!(coords(&g, &p), vec![(2, 3), (2, 2), (3, 2), (3, 1), (3, 0)]);
        assert!(is_top_down_crossing(&g, &f, 2, 4, &p));
    }

    #[test]
    fn closed_block_has_no_crossing() {
        let g = flat(2.5, 4);
        let f = WeightField::sample(&WeightModel::constant(0.0), &g, 0, 0);
        assert_eq!(leftmost_crossing(&g, &f, 1, 3), Err(MartError::NoCrossing { lo: 1, hi: 3 }));
    }

    #[test]
    fn cap_strip_of_a_linear_piece() {
        let g = WedgeGraph::build(&WedgeFunction::Custom { values: vec![0.0, 1.5, 2.5] }, 2).unwrap();
        assert!((cap_strip(&g, 0).unwrap() - 0.75).abs() < 1e-12);
        assert!((cap_strip(&g, 1).unwrap() - 1.0).abs() < 1e-12);
    }
}
