use std::collections::VecDeque;

use fpp_core::{
    dual_level_count, dual_separating_count, left_right_crossings, line_passage_times, passage_time, path_weight,
    verify_dual_certificate, verify_open_certificate, DualGraph, Endpoint, Mode, PassageQuery, Segment, Side,
};
use proptest::prelude::*;
use randomness::{keyed_uniform, Lane, PercConfig, PositiveLaw, WeightField, WeightModel};
use wedge::{EdgeDir, WedgeFunction, WedgeGraph};

/// Textbook Edmonds-Karp on a dense residual matrix.
fn edmonds_karp(n: usize, edges: &[(usize, usize, i64, bool)], s: usize, t: usize) -> i64 {
    let mut cap = vec![vec![0i64; n]; n];
    for &(u, v, c, undirected) in edges {
        cap[u][v] += c;
        if undirected {
            cap[v][u] += c;
        }
    }
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for v in 0..n {
                if cap[u][v] > 0 && prev[v] == usize::MAX {
                    prev[v] = u;
                    q.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut push = i64::MAX;
        let mut v = t;
        while v != s {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            cap[prev[v]][v] -= push;
            cap[v][prev[v]] += push;
            v = prev[v];
        }
        flow += push;
    }
}

fn grid() -> Vec<WedgeFunction> {
    let mut out = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        for b in [0.0, a] {
            out.push(WedgeFunction::log_log_log(a, b).unwrap());
        }
    }
    out
}

#[test]
fn duality_holds_at_every_width() {
    // One field on G(60) serves every r <= 60, since weights are keyed by position.
    for f in grid() {
        let g = WedgeGraph::build(&f, 60).unwrap();
        for p in [0.3, 0.5, 0.7] {
            for seed in 0..6 {
                let field = WeightField::sample(&WeightModel::constant(p), &g, seed, 7);
                let t = line_passage_times(&g, &field, Mode::Bernoulli);
                for r in 1..=60 {
                    let y = dual_separating_count(&g, &field, r).unwrap();
                    assert_eq!(t[r], y.value as f64, "{} p={p} seed={seed} r={r}", f.label());
                    verify_dual_certificate(&g, &field, r, None, &y).unwrap();
                }
            }
        }
    }
}

#[test]
fn duality_on_separately_built_wedges() {
    for f in grid() {
        for n in [1, 2, 3, 7, 20] {
            let g = WedgeGraph::build(&f, n).unwrap();
            for seed in 0..20 {
                let field = WeightField::sample(&WeightModel::constant(0.5), &g, seed, 1);
                let q = PassageQuery::new(Endpoint::Vertex(0), Endpoint::Line(n), Mode::Bernoulli);
                let t = passage_time(&g, &field, &q).unwrap();
                assert_eq!(t.value, dual_separating_count(&g, &field, n).unwrap().value as f64);
                assert_eq!(path_weight(&g, &field, &t.path, Mode::Bernoulli), t.value);
            }
        }
    }
}

#[test]
fn level_counts_dominate_and_certify() {
    let f = WedgeFunction::log_log_log(1.0, 1.0).unwrap();
    let g = WedgeGraph::build(&f, 50).unwrap();
    for seed in 0..40 {
        let field = WeightField::sample(&WeightModel::constant(0.5), &g, seed, 3);
        let y = dual_separating_count(&g, &field, 50).unwrap().value;
        let mut total = 0;
        for j in 0..=g.height(50) + 1 {
            let c = dual_level_count(&g, &field, 50, j).unwrap();
            verify_dual_certificate(&g, &field, 50, Some(j), &c).unwrap();
            total += c.value;
        }
        assert_eq!(dual_level_count(&g, &field, 50, g.height(50) + 1).unwrap().value, 0);
        assert!(total >= y);
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let g = WedgeGraph::build(&WedgeFunction::log_log_log(1.0, 0.0).unwrap(), 30).unwrap();
    let field = WeightField::sample(&WeightModel::constant(0.0), &g, 0, 0);
    let y = dual_separating_count(&g, &field, 30).unwrap();
    let mut dup = y.clone();
    let first = dup.certificate.as_ref().unwrap()[0].clone();
    dup.certificate.as_mut().unwrap()[1] = first;
    assert!(verify_dual_certificate(&g, &field, 30, None, &dup).is_err());
    let mut short = y.clone();
    short.certificate.as_mut().unwrap()[0].pop();
    assert!(verify_dual_certificate(&g, &field, 30, None, &short).is_err());
    let opened = WeightField::sample(&WeightModel::constant(1.0), &g, 0, 0);
    assert!(verify_dual_certificate(&g, &opened, 30, None, &y).is_err());
}

#[test]
fn dinic_matches_edmonds_karp_and_min_cut() {
    for f in grid() {
        let g = WedgeGraph::build(&f, 40).unwrap();
        let dual = DualGraph::new(&g, 40).unwrap();
        assert!(dual.num_edges() <= 10_000);
        for seed in 0..5 {
            let field = WeightField::sample(&WeightModel::constant(0.45), &g, seed, 11);
            let nv = dual.num_vertices();
            let (s, t) = (nv, nv + 1);
            let mut edges: Vec<(usize, usize, i64, bool)> =
                dual.edges().iter().filter(|&&(_, _, e)| field.t(e) == 1).map(|&(a, b, _)| (a, b, 1, true)).collect();
            for j in 0..=g.height(40) as usize {
                for p in g.top_boundary(j) {
                    let v = (0..nv).find(|&v| dual.point(v) == *p).unwrap();
                    edges.push((s, v, 1 << 20, false));
                }
            }
            for v in (0..nv).filter(|&v| dual.point(v).y == -1) {
                edges.push((v, t, 1 << 20, false));
            }
            let ek = edmonds_karp(nv + 2, &edges, s, t);

            let mut net = fpp_core::FlowNetwork::new(nv + 2);
            for &(u, v, c, und) in &edges {
                let c = if c > 1 { fpp_core::INF_CAP } else { c as u32 };
                if und {
                    net.add_undirected(u, v, c);
                } else {
                    net.add_edge(u, v, c);
                }
            }
            let value = net.max_flow(s, t);
            assert_eq!(value as i64, ek);
            let side = net.residual_reachable(s);
            assert_eq!(net.cut_capacity(&side), value);
            assert_eq!(dual_separating_count(&g, &field, 40).unwrap().value, value);
        }
    }
}

/// Minimum weight over all self-avoiding paths from the origin to the line `x = n`,
/// with adjacency rebuilt from coordinates.
fn exhaustive_passage(g: &WedgeGraph, w: &dyn Fn(usize) -> f64) -> f64 {
    let n = g.n();
    let inside = |x: i64, y: i64| x >= 0 && x <= n as i64 && y >= 0 && y <= g.height(x as usize) as i64;
    let edge = |x: i64, y: i64, dx: i64, dy: i64| -> usize {
        let (lx, ly) = (x.min(x + dx) as usize, y.min(y + dy) as usize);
        let dir = if dx != 0 { EdgeDir::Right } else { EdgeDir::Up };
        g.edge_index(lx, ly, dir).unwrap()
    };
    fn dfs(
        x: i64,
        y: i64,
        acc: f64,
        n: i64,
        seen: &mut Vec<(i64, i64)>,
        best: &mut f64,
        inside: &dyn Fn(i64, i64) -> bool,
        edge: &dyn Fn(i64, i64, i64, i64) -> usize,
        w: &dyn Fn(usize) -> f64,
    ) {
        if x == n {
            *best = best.min(acc);
            return;
        }
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (x + dx, y + dy);
            if inside(nx, ny) && !seen.contains(&(nx, ny)) {
                seen.push((nx, ny));
                dfs(nx, ny, acc + w(edge(x, y, dx, dy)), n, seen, best, inside, edge, w);
                seen.pop();
            }
        }
    }
    let mut best = f64::INFINITY;
    dfs(0, 0, 0.0, n as i64, &mut vec![(0, 0)], &mut best, &inside, &edge, w);
    best
}

#[test]
fn passage_time_matches_path_enumeration() {
    let mut instances = Vec::new();
    for (a, b) in [(1.0, 0.0), (2.0, 0.0), (1.5, 1.0), (3.0, 0.0), (2.0, 2.0), (0.7, 0.7)] {
        for n in 1..10 {
            let g = WedgeGraph::build(&WedgeFunction::log_log_log(a, b).unwrap(), n).unwrap();
            if g.num_edges() <= 12 {
                instances.push(g);
            }
        }
    }
    assert!(instances.len() >= 8);
    let model = WeightModel::with_law(0.4, 0.5, PositiveLaw::ShiftedExponential { rate: 1.3 }).unwrap();
    let mut checked = 0;
    for k in 0..500u64 {
        let g = &instances[k as usize % instances.len()];
        let field = WeightField::sample(&model, g, k, 99);
        let tb = passage_time(g, &field, &PassageQuery::new(Endpoint::Vertex(0), Endpoint::Line(g.n()), Mode::Bernoulli)).unwrap();
        let tg = passage_time(g, &field, &PassageQuery::new(Endpoint::Vertex(0), Endpoint::Line(g.n()), Mode::General)).unwrap();
        assert_eq!(tb.value, exhaustive_passage(g, &|e| field.t(e) as f64));
        let oracle = exhaustive_passage(g, &|e| field.tau(e));
        assert!((tg.value - oracle).abs() <= 1e-12 * oracle.max(1.0), "{} vs {oracle}", tg.value);
        checked += 1;
    }
    assert_eq!(checked, 500);
}

/// All simple open paths from the left side to the right side, as edge sets.
fn crossing_paths(cfg: &PercConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for y0 in 0..=cfg.h {
        let mut seen = vec![false; cfg.num_vertices()];
        let mut edges = Vec::new();
        fn go(cfg: &PercConfig, v: usize, seen: &mut Vec<bool>, edges: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cfg.coords(v).0 == cfg.w {
                out.push(edges.clone());
                return;
            }
            let mut nbrs = Vec::new();
            cfg.for_each_neighbor(v, |w, e| nbrs.push((w, e)));
            for (w, e) in nbrs {
                // Paths re-entering the left side are redundant; keep them anyway.
                if cfg.is_open(e) && !seen[w] {
                    seen[w] = true;
                    edges.push(e);
                    go(cfg, w, seen, edges, out);
                    edges.pop();
                    seen[w] = false;
                }
            }
        }
        let v = cfg.vertex(0, y0);
        seen[v] = true;
        go(cfg, v, &mut seen, &mut edges, &mut out);
    }
    out
}

fn max_disjoint(paths: &[Vec<usize>], used: &mut Vec<bool>, from: usize) -> u64 {
    let mut best = 0;
    for i in from..paths.len() {
        if paths[i].iter().all(|&e| !used[e]) {
            paths[i].iter().for_each(|&e| used[e] = true);
            best = best.max(1 + max_disjoint(paths, used, i + 1));
            paths[i].iter().for_each(|&e| used[e] = false);
        }
    }
    best
}

#[test]
fn open_crossings_match_exhaustive_packing() {
    for (w, h) in [(2, 1), (1, 2), (2, 2), (3, 1)] {
        let edges = PercConfig::sample_rectangle(w, h, 1.0, 0, 0).num_edges();
        assert!(edges <= 12);
        for mask in 0u32..(1 << edges) {
            let bits = (0..edges).map(|i| ((mask >> i) & 1) as u8).collect();
            let cfg = PercConfig::from_bits(w, h, bits);
            let x = left_right_crossings(&cfg);
            let paths = crossing_paths(&cfg);
            assert_eq!(x.value, max_disjoint(&paths, &mut vec![false; edges], 0), "{w}x{h} mask {mask:b}");
            verify_open_certificate(&cfg, &Segment::whole(Side::Left, &cfg), &Segment::whole(Side::Right, &cfg), &x).unwrap();
        }
    }
}

#[test]
fn open_crossings_match_edmonds_karp() {
    for seed in 0..200 {
        let cfg = PercConfig::sample_rectangle(6, 6, 0.5, seed, 0);
        let nv = cfg.num_vertices();
        let (s, t) = (nv, nv + 1);
        let mut edges = Vec::new();
        for (idx, x, y, dir) in cfg.edge_list() {
            if cfg.is_open(idx) {
                let v = match dir {
                    EdgeDir::Right => cfg.vertex(x + 1, y),
                    EdgeDir::Up => cfg.vertex(x, y + 1),
                };
                edges.push((cfg.vertex(x, y), v, 1, true));
            }
        }
        for y in 0..=6 {
            edges.push((s, cfg.vertex(0, y), 100, false));
            edges.push((cfg.vertex(6, y), t, 100, false));
        }
        let x = left_right_crossings(&cfg);
        assert_eq!(x.value as i64, edmonds_karp(nv + 2, &edges, s, t));
        verify_open_certificate(&cfg, &Segment::whole(Side::Left, &cfg), &Segment::whole(Side::Right, &cfg), &x).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich_and_monotonicity(seed in any::<u64>(), p in 0.2f64..0.8, law in 0usize..3, a in 0.5f64..2.5) {
        let law = match law {
            0 => PositiveLaw::Constant,
            1 => PositiveLaw::ShiftedExponential { rate: 1.0 },
            _ => PositiveLaw::ParetoTail { exponent: 4.5, scale: 1.0 },
        };
        let delta = 0.75;
        let model = WeightModel::with_law(p, delta, law.clone()).unwrap();
        let g = WedgeGraph::build(&WedgeFunction::log_log_log(a, a / 2.0).unwrap(), 45).unwrap();
        let field = WeightField::sample(&model, &g, seed, 0);
        let tb = line_passage_times(&g, &field, Mode::Bernoulli);
        let tg = line_passage_times(&g, &field, Mode::General);
        for r in 1..=45 {
            prop_assert!(tb[r] >= tb[r - 1]);
            prop_assert!(tg[r] >= tg[r - 1] - 1e-12);
            prop_assert!(delta * tb[r] <= tg[r] + 1e-9);
            if law == PositiveLaw::Constant {
                prop_assert!((tg[r] - delta * tb[r]).abs() < 1e-9);
            }
        }
        let q = PassageQuery::new(Endpoint::Vertex(0), Endpoint::Line(45), Mode::Bernoulli);
        let gamma_b = passage_time(&g, &field, &q).unwrap().path;
        prop_assert!(tg[45] <= path_weight(&g, &field, &gamma_b, Mode::General) + 1e-9);

        // Lowering one weight (closing -> opening an edge) never raises T.
        let e = (keyed_uniform(seed, 1, 2, Lane::Bernoulli) * g.num_edges() as f64) as usize;
        let mut lowered = field.clone();
        lowered.set_t(e, 0);
        let tl = line_passage_times(&g, &lowered, Mode::General);
        prop_assert!(tl[45] <= tg[45] + 1e-12);
    }
}
