use proptest::prelude::*;
use randomness::{PercConfig, PositiveLaw, WeightField, WeightModel};
use rayon::prelude::*;
use wedge::{WedgeFunction, WedgeGraph};

#[test]
fn bernoulli_mean_over_a_million_edges() {
    let model = WeightModel::constant(0.5);
    let cfg = PercConfig::sample_rectangle(700, 700, 0.5, 2024, 0);
    assert!(cfg.num_edges() > 980_000);
    let open = cfg.bits().iter().map(|&b| b as f64).sum::<f64>() / cfg.num_edges() as f64;
    assert!((open - 0.5).abs() < 0.002, "open fraction {open}");

    let g = WedgeGraph::build(&WedgeFunction::log_log_log(80.0, 0.0).unwrap(), 1800).unwrap();
    assert!(g.num_edges() > 1_000_000);
    let f = WeightField::sample(&model, &g, 99, 1);
    let mean_t = f.t_bits().iter().map(|&b| b as f64).sum::<f64>() / g.num_edges() as f64;
    assert!((mean_t - 0.5).abs() < 0.002, "mean t {mean_t}");
}

#[test]
fn streams_are_uncorrelated() {
    let g = WedgeGraph::build(&WedgeFunction::log_log_log(20.0, 0.0).unwrap(), 1000).unwrap();
    assert!(g.num_edges() >= 100_000);
    let model = WeightModel::constant(0.5);
    let a = WeightField::sample(&model, &g, 5, 1);
    let b = WeightField::sample(&model, &g, 5, 2);
    let n = g.num_edges() as f64;
    let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for e in 0..g.num_edges() {
        let (x, y) = (a.t(e) as f64, b.t(e) as f64);
        sa += x;
        sb += y;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    let cov = sab / n - sa / n * sb / n;
    let rho = cov / ((saa / n - (sa / n).powi(2)) * (sbb / n - (sb / n).powi(2))).sqrt();
    assert!(rho.abs() < 0.01, "rho {rho}");
}

#[test]
fn identical_under_one_and_eight_workers() {
    let g = WedgeGraph::build(&WedgeFunction::log_log_log(1.0, 1.0).unwrap(), 500).unwrap();
    let model = WeightModel::with_law(0.4, 1.0, PositiveLaw::ParetoTail { exponent: 4.5, scale: 1.0 }).unwrap();
    let run = |threads: usize| -> Vec<Vec<u64>> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (0..64u64)
                .into_par_iter()
                .map(|s| {
                    let f = WeightField::sample(&model, &g, 17, s);
                    (0..g.num_edges()).map(|e| f.tau(e).to_bits()).collect()
                })
                .collect()
        })
    };
    assert_eq!(run(1), run(8));
}

#[test]
fn same_seed_and_stream_reproduce() {
    let g = WedgeGraph::build(&WedgeFunction::log_log_log(2.0, 0.0).unwrap(), 300).unwrap();
    let model = WeightModel::with_law(0.5, 0.5, PositiveLaw::ShiftedExponential { rate: 1.0 }).unwrap();
    assert_eq!(WeightField::sample(&model, &g, 1, 1), WeightField::sample(&model, &g, 1, 1));
    assert_ne!(WeightField::sample(&model, &g, 1, 1), WeightField::sample(&model, &g, 1, 2));
}

proptest! {
    #[test]
    fn gap_condition_always_holds(p in 0.0f64..1.0, delta in 0.01f64..5.0, seed in any::<u64>(), law in 0usize..3) {
        let law = match law {
            0 => PositiveLaw::Constant,
            1 => PositiveLaw::ShiftedExponential { rate: 0.7 },
            _ => PositiveLaw::ParetoTail { exponent: 4.5, scale: 2.0 },
        };
        let model = WeightModel::with_law(p, delta, law).unwrap();
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(1.5, 1.0).unwrap(), 60).unwrap();
        let f = WeightField::sample(&model, &g, seed, 0);
        for e in 0..g.num_edges() {
            let tau = f.tau(e);
            prop_assert!(f.t(e) <= 1);
            prop_assert!(tau == 0.0 || tau >= delta);
            prop_assert_eq!(tau == 0.0, f.t(e) == 0);
        }
    }
}
