use fpp_core::{passage_time, Endpoint, Mode, PassageQuery};
use martingale::*;
use mc_stats::Summary;
use randomness::{stream_id, PositiveLaw, WeightField, WeightModel};
use sequences::{build_sequence, Regime};
use wedge::{WedgeFunction, WedgeGraph};

fn critical(i0: usize, outer: usize, inner: usize, model: WeightModel, seed: u64) -> Martingale {
    let f = WedgeFunction::log_log_log(1.0, 0.0).unwrap();
    let seq = build_sequence(&f, 0.5, None, Regime::Critical, Martingale::required_len(i0, DEFAULT_CAP) + 2).unwrap();
    let cfg = MartingaleConfig { i0, outer, inner, cap: DEFAULT_CAP, seed, max_discard_fraction: 0.1 };
    Martingale::new(seq, model, cfg).unwrap()
}

#[test]
fn telescoping_and_zero_mean_in_case_one() {
    let m = critical(8, 200, 64, WeightModel::constant(0.5), 11);
    let records = m.run().unwrap();
    let tele = telescoping_check(&records).unwrap();
    assert!(tele.pass, "{tele:?}");
    assert!(tele.mean_se > 0.0);
    for mc in mean_checks(&records).unwrap() {
        assert!(mc.pass, "{mc:?}");
    }
}

fn span(g: &WedgeGraph, path: &[usize]) -> (usize, usize) {
    let xs = path.iter().map(|&v| g.coords(v).0);
    (xs.clone().min().unwrap(), xs.max().unwrap())
}

#[test]
fn crossings_nest_on_one_field() {
    let m = critical(12, 1, 1, WeightModel::constant(0.5), 5);
    for o in 0..40 {
        let field = m.outer_field(o);
        let states = m.crossings(&field).unwrap();
        for w in states.windows(2) {
            assert!(w[0].m_i <= w[1].m_i);
            if w[0].m_i == w[1].m_i {
                assert_eq!(w[0].gamma, w[1].gamma);
            } else {
                assert!(span(m.graph(), &w[0].gamma).1 < span(m.graph(), &w[1].gamma).0);
            }
        }
        for s in &states {
            assert!(s.m_i >= s.i);
            let (lo, hi) = block_columns(m.graph(), m.sequence(), s.m_i).unwrap();
            assert!(is_top_down_crossing(m.graph(), &field, lo, hi, &s.gamma));
        }
    }
}

/// Increment from the unshortened representation: inner fields are scanned all
/// the way to `m(i0)` and passage times are computed without column windows.
fn raw_delta(m: &Martingale, field: &WeightField, states: &[CrossingState], i: usize, inner: usize) -> (f64, f64) {
    let g = m.graph();
    let i0 = m.config().i0;
    let query = |from: Endpoint, to: &[usize], f: &WeightField| {
        passage_time(g, f, &PassageQuery::new(from, Endpoint::Set(to.to_vec()), Mode::General)).unwrap().value
    };
    let prev = if i == 0 { Endpoint::Vertex(0) } else { Endpoint::Set(states[i - 1].gamma.clone()) };
    let t_gap = query(prev.clone(), &states[i].gamma, field);
    let e_prev = i == 0 || states[i - 1].m_i < i0;
    let e_cur = states[i].m_i < i0;
    let mut ys = Vec::with_capacity(inner);
    for k in 0..inner {
        let w = WeightField::sample(m.model(), g, 99, stream_id(&[7, i as u64, k as u64]));
        let j = find_m(g, &w, m.sequence(), i0, m.config().cap).unwrap();
        let (lo, hi) = block_columns(g, m.sequence(), j).unwrap();
        let target = leftmost_crossing(g, &w, lo, hi).unwrap();
        let mut y = 0.0;
        if e_cur {
            y += query(Endpoint::Set(states[i].gamma.clone()), &target, &w);
        }
        if e_prev {
            y -= query(prev.clone(), &target, &w);
        }
        ys.push(y);
    }
    let s = Summary::from_samples(&ys).unwrap();
    (t_gap + s.mean, s.std_err())
}

#[test]
fn shortened_representation_matches_the_direct_one() {
    let m = critical(6, 4, 400, WeightModel::constant(0.5), 21);
    let mut compared = 0;
    for o in 0..4 {
        let field = m.outer_field(o);
        let states = m.crossings(&field).unwrap();
        let rec = m.outer_record(o).unwrap();
        for d in &rec.deltas {
            let (raw, raw_se) = raw_delta(&m, &field, &states, d.i, 400);
            let tol = 4.0 * (raw_se * raw_se + d.inner_se * d.inner_se).sqrt() + 1e-9;
            assert!((raw - d.delta_hat).abs() <= tol, "outer {o} i {}: {raw} vs {}", d.i, d.delta_hat);
            compared += 1;
        }
    }
    assert_eq!(compared, 28);
}

#[test]
fn second_moments_stay_in_a_band() {
    let m = critical(10, 500, 32, WeightModel::constant(0.5), 13);
    let records = m.run().unwrap();
    let report = check_moment_bounds(&records, 3, None).unwrap();
    assert!(report.lower_pass, "{report:?}");
    assert!(report.upper_pass, "{report:?}");
    assert_eq!(report.tail_pass, None);
}

#[test]
fn all_open_control_fails_the_lower_bound() {
    let m = critical(6, 20, 4, WeightModel::constant(1.0), 1);
    let records = m.run().unwrap();
    let report = check_moment_bounds(&records, 2, None).unwrap();
    assert!(report.rows.iter().all(|r| r.second_moment == 0.0));
    assert!(!report.lower_pass);
    assert!(!report.upper_pass);
}

#[test]
fn heavy_tailed_increments_decay_fast_enough() {
    let law = PositiveLaw::ParetoTail { exponent: 4.5, scale: 1.0 };
    let model = WeightModel { eta: Some(4.0), ..WeightModel::with_law(0.5, 1.0, law).unwrap() };
    let m = critical(10, 500, 32, model, 17);
    let records = m.run().unwrap();
    let report = check_moment_bounds(&records, 3, Some(4.0)).unwrap();
    let slope = report.tail_slope.expect("tail observed at x >= 2");
    assert!(slope <= -1.0, "{slope}");
    assert_eq!(report.tail_pass, Some(true));
}

#[test]
fn first_crossed_block_has_a_geometric_tail() {
    let f = WedgeFunction::log_log_log(1.0, 0.0).unwrap();
    let seq = build_sequence(&f, 0.5, None, Regime::Critical, 60).unwrap();
    let i = seq.audit_index().unwrap() + 2;
    let tail = geometric_tail(&seq, &WeightModel::constant(0.5), i, 6, 4000, 2).unwrap();
    assert!(tail.pass, "{tail:?}");
    assert!(tail.a1 > 0.25);
    assert!(tail.rows.windows(2).all(|w| w[0].estimate >= w[1].estimate));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let m = critical(6, 12, 8, WeightModel::constant(0.5), 3);
    let run = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| m.run().unwrap());
    assert_eq!(run(1), run(4));
}

#[test]
fn gamma_passage_time_moves_towards_normal() {
    // At desk scale the KS test still sees the skew; only the trend is asserted.
    let small = gamma_clt(&critical(4, 1, 1, WeightModel::constant(0.5), 3), 2000, 200).unwrap();
    let large = gamma_clt(&critical(12, 1, 1, WeightModel::constant(0.5), 3), 2000, 200).unwrap();
    assert!(large.summary.mean > small.summary.mean);
    assert!(large.ks.statistic < small.ks.statistic, "{small:?} {large:?}");
    assert!(large.summary.skew < small.summary.skew);
}
