//! Checks crossing certificates from the geometry alone, without the flow code
//! or the dual graph that produced them.

use std::collections::HashSet;

use randomness::{PercConfig, WeightField};
use wedge::{EdgeDir, WedgeGraph};

use crate::crossing::Segment;
use crate::dual::CrossingCount;
use crate::FppError;

fn bad(msg: String) -> FppError {
    FppError::BadCertificate(msg)
}

/// Verifies a `Y_r` or `Y_{r,j}` certificate: closed, edge-disjoint dual paths from
/// the top boundary (at level `j` if given) to the bottom boundary, staying left of `P(r)`.
pub fn verify_dual_certificate(
    graph: &WedgeGraph,
    field: &WeightField,
    r: usize,
    level: Option<u32>,
    count: &CrossingCount,
) -> Result<(), FppError> {
    let paths = count.certificate.as_ref().ok_or_else(|| bad("no certificate".into()))?;
    if paths.len() as u64 != count.value {
        return Err(bad(format!("{} paths for value {}", paths.len(), count.value)));
    }
    let h = |k: i64| graph.height(k as usize) as i64;
    let mut used = HashSet::new();
    for path in paths {
        let (&(x0, y0), &(x1, y1)) = match (path.first(), path.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(bad("empty path".into())),
        };
        // Starting point lies above the wedge: on or above column x0's top and
        // below the next column's top, or exactly one above a flat column.
        let on_top = (0..r as i64).contains(&x0) && y0 >= h(x0) && y0 <= h(x0).max(h(x0 + 1) - 1);
        if !on_top || level.is_some_and(|j| y0 != j as i64) {
            return Err(bad(format!("path starts at ({x0},{y0}), not on the top boundary")));
        }
        if !((0..r as i64).contains(&x1) && y1 == -1) {
            return Err(bad(format!("path ends at ({x1},{y1}), not below the axis")));
        }
        for w in path.windows(2) {
            let ((ax, ay), (bx, by)) = (w[0], w[1]);
            if !(0..r as i64).contains(&ax) || !(0..r as i64).contains(&bx) {
                return Err(bad(format!("dual step ({ax},{ay})-({bx},{by}) leaves the strip")));
            }
            // The dual step between two faces crosses the primal edge they share.
            let edge = if ax == bx && (ay - by).abs() == 1 {
                let y = ay.max(by);
                graph.edge_index(ax as usize, y as usize, EdgeDir::Right)
            } else if ay == by && (ax - bx).abs() == 1 {
                let x = ax.max(bx);
                (ay >= 0).then(|| graph.edge_index(x as usize, ay as usize, EdgeDir::Up)).flatten()
            } else {
                return Err(bad(format!("points ({ax},{ay}) and ({bx},{by}) are not adjacent")));
            };
            let e = edge.ok_or_else(|| bad(format!("step ({ax},{ay})-({bx},{by}) crosses no wedge edge")))?;
            if field.t(e) != 1 {
                return Err(bad(format!("edge {e} is open")));
            }
            if !used.insert(e) {
                return Err(bad(format!("edge {e} used twice")));
            }
        }
    }
    Ok(())
}

/// Verifies an open-crossing certificate on a rectangle configuration.
pub fn verify_open_certificate(cfg: &PercConfig, source: &Segment, sink: &Segment, count: &CrossingCount) -> Result<(), FppError> {
    let paths = count.certificate.as_ref().ok_or_else(|| bad("no certificate".into()))?;
    if paths.len() as u64 != count.value {
        return Err(bad(format!("{} paths for value {}", paths.len(), count.value)));
    }
    let global = |seg: &Segment| -> HashSet<(i64, i64)> {
        seg.points(cfg).into_iter().map(|(x, y)| (cfg.x0 + x as i64, cfg.y0 + y as i64)).collect()
    };
    let (src, dst) = (global(source), global(sink));
    let mut used = HashSet::new();
    for path in paths {
        if !path.first().is_some_and(|p| src.contains(p)) || !path.last().is_some_and(|p| dst.contains(p)) {
            return Err(bad("path endpoints outside the segments".into()));
        }
        for w in path.windows(2) {
            let ((ax, ay), (bx, by)) = (w[0], w[1]);
            let (lx, ly) = ((ax.min(bx) - cfg.x0) as usize, (ay.min(by) - cfg.y0) as usize);
            let dir = match ((ax - bx).abs(), (ay - by).abs()) {
                (1, 0) => EdgeDir::Right,
                (0, 1) => EdgeDir::Up,
                _ => return Err(bad(format!("points ({ax},{ay}) and ({bx},{by}) are not adjacent"))),
            };
            let inside = match dir {
                EdgeDir::Right => lx < cfg.w && ly <= cfg.h,
                EdgeDir::Up => lx <= cfg.w && ly < cfg.h,
            };
            if ax.min(bx) < cfg.x0 || ay.min(by) < cfg.y0 || !inside {
                return Err(bad("step leaves the rectangle".into()));
            }
            let idx = cfg.edge_index(lx, ly, dir);
            if !cfg.is_open(idx) {
                return Err(bad(format!("edge {idx} is closed")));
            }
            if !used.insert(idx) {
                return Err(bad(format!("edge {idx} used twice")));
            }
        }
    }
    Ok(())
}
