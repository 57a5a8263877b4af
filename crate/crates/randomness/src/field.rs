use wedge::{edge_key, WedgeGraph};

use crate::model::WeightModel;

/// Coupled weights `tau_e = t_e tau'_e` on the edges of one wedge graph.
///
/// `t` is stored densely. `tau'` is only stored when the positive law is not a
/// point mass, since a constant law needs no storage at all.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    model: WeightModel,
    seed: u64,
    stream: u64,
    t: Vec<u8>,
    tau_prime: Option<Vec<f64>>,
}

impl WeightField {
    /// Samples every edge of `graph` from `(seed, stream)`.
    pub fn sample(model: &WeightModel, graph: &WedgeGraph, seed: u64, stream: u64) -> Self {
        let mut t = vec![0u8; graph.num_edges()];
        let mut tau_prime = (!model.is_constant()).then(|| vec![0.0f64; graph.num_edges()]);
        for (e, x, y, dir) in graph.edges() {
            let key = edge_key(x as i64, y as i64, dir);
            t[e] = model.t_bit(seed, stream, key);
            if let Some(tp) = tau_prime.as_mut() {
                tp[e] = model.tau_prime(seed, stream, key);
            }
        }
        WeightField { model: model.clone(), seed, stream, t, tau_prime }
    }

    /// Samples only the edges of columns `lo..=hi` (both horizontal edges leaving a
    /// column and vertical edges inside it); every other edge gets `t = 1`.
    pub fn sample_columns(model: &WeightModel, graph: &WedgeGraph, seed: u64, stream: u64, lo: usize, hi: usize) -> Self {
        let mut t = vec![1u8; graph.num_edges()];
        let mut tau_prime = (!model.is_constant()).then(|| vec![model.delta; graph.num_edges()]);
        for x in lo..=hi.min(graph.n()) {
            let h = graph.height(x) as usize;
            for y in 0..=h {
                for dir in [wedge::EdgeDir::Right, wedge::EdgeDir::Up] {
                    if let Some(e) = graph.edge_index(x, y, dir) {
                        let key = edge_key(x as i64, y as i64, dir);
                        t[e] = model.t_bit(seed, stream, key);
                        if let Some(tp) = tau_prime.as_mut() {
                            tp[e] = model.tau_prime(seed, stream, key);
                        }
                    }
                }
            }
        }
        WeightField { model: model.clone(), seed, stream, t, tau_prime }
    }

    /// Field with prescribed `t` bits and `tau' = delta` (hand-built test configurations).
    pub fn from_bits(model: &WeightModel, t: Vec<u8>) -> Self {
        assert!(t.iter().all(|&b| b <= 1), "t bits must be 0 or 1");
        let tau_prime = (!model.is_constant()).then(|| vec![model.delta; t.len()]);
        WeightField { model: model.clone(), seed: 0, stream: 0, t, tau_prime }
    }

    /// Field with prescribed `t` and `tau'`.
    pub fn from_parts(model: &WeightModel, t: Vec<u8>, tau_prime: Vec<f64>) -> Self {
        assert_eq!(t.len(), tau_prime.len());
        assert!(tau_prime.iter().all(|&v| v >= model.delta), "tau' below the gap");
        WeightField { model: model.clone(), seed: 0, stream: 0, t, tau_prime: Some(tau_prime) }
    }

    pub fn model(&self) -> &WeightModel {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn num_edges(&self) -> usize {
        self.t.len()
    }

    #[inline]
    pub fn t(&self, e: usize) -> u8 {
        self.t[e]
    }

    pub fn t_bits(&self) -> &[u8] {
        &self.t
    }

    #[inline]
    pub fn tau_prime(&self, e: usize) -> f64 {
        match &self.tau_prime {
            Some(tp) => tp[e],
            None => self.model.delta,
        }
    }

    /// `tau_e = t_e tau'_e`.
    #[inline]
    pub fn tau(&self, e: usize) -> f64 {
        if self.t[e] == 0 {
            0.0
        } else {
            self.tau_prime(e)
        }
    }

    /// Flips a single `t` bit (used by monotonicity checks).
    pub fn set_t(&mut self, e: usize, bit: u8) {
        assert!(bit <= 1);
        self.t[e] = bit;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::PositiveLaw;
    use wedge::WedgeFunction;

    fn graph(n: usize) -> WedgeGraph {
        WedgeGraph::build(&WedgeFunction::log_log_log(1.0, 0.0).unwrap(), n).unwrap()
    }

    #[test]
    fn degenerate_probabilities() {
        let g = graph(50);
        let all_open = WeightField::sample(&WeightModel::constant(1.0), &g, 3, 0);
        assert!((0..g.num_edges()).all(|e| all_open.tau(e) == 0.0));
        let all_closed = WeightField::sample(&WeightModel::constant(0.0), &g, 3, 0);
        assert!((0..g.num_edges()).all(|e| all_closed.tau(e) == 1.0));
    }

    #[test]
    fn shared_edges_agree_across_widths() {
        let model = WeightModel::with_law(0.5, 1.0, PositiveLaw::ShiftedExponential { rate: 1.0 }).unwrap();
        let (small, big) = (graph(30), graph(90));
        let fs = WeightField::sample(&model, &small, 11, 4);
        let fb = WeightField::sample(&model, &big, 11, 4);
        for (e, x, y, dir) in small.edges() {
            let eb = big.edge_index(x, y, dir).unwrap();
            assert_eq!(fs.t(e), fb.t(eb));
            assert_eq!(fs.tau(e), fb.tau(eb));
        }
    }

    #[test]
    fn column_window_matches_full_sample() {
        let model = WeightModel::constant(0.5);
        let g = graph(120);
        let full = WeightField::sample(&model, &g, 5, 9);
        let part = WeightField::sample_columns(&model, &g, 5, 9, 20, 60);
        for (e, x, _, _) in g.edges() {
            if (20..=60).contains(&x) {
                assert_eq!(full.t(e), part.t(e));
            } else {
                assert_eq!(part.t(e), 1);
            }
        }
    }
}
