/// Residual capacity used for the super-source and super-sink arcs.
pub const INF_CAP: u32 = u32::MAX / 4;

/// Integer-capacity flow network solved by Dinic's algorithm.
///
/// Arcs are stored in pairs `(a, a ^ 1)`. A directed edge gets a reverse arc of
/// capacity 0; an undirected edge gets capacity `c` in both directions, which is
/// the standard reduction for edge-disjoint paths in an undirected graph.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    to: Vec<u32>,
    cap: Vec<u32>,
    orig: Vec<u32>,
    adj: Vec<Vec<u32>>,
    level: Vec<i32>,
    iter: Vec<u32>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            to: Vec::new(),
            cap: Vec::new(),
            orig: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: Vec::new(),
            iter: Vec::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    fn push_pair(&mut self, u: usize, v: usize, cu: u32, cv: u32) -> usize {
        let a = self.to.len();
        self.to.extend([v as u32, u as u32]);
        self.cap.extend([cu, cv]);
        self.orig.extend([cu, cv]);
        self.adj[u].push(a as u32);
        self.adj[v].push(a as u32 + 1);
        a
    }

    /// Adds `u -> v` with capacity `cap` and returns the arc id.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: u32) -> usize {
        self.push_pair(u, v, cap, 0)
    }

    /// Adds an undirected edge of capacity `cap`; the returned arc points `u -> v`.
    pub fn add_undirected(&mut self, u: usize, v: usize, cap: u32) -> usize {
        self.push_pair(u, v, cap, cap)
    }

    #[inline]
    fn from(&self, a: usize) -> usize {
        self.to[a ^ 1] as usize
    }

    /// Net flow on arc `a` in its own direction (negative when it runs backwards).
    pub fn flow(&self, a: usize) -> i64 {
        self.orig[a] as i64 - self.cap[a] as i64
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.clear();
        self.level.resize(self.adj.len(), -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let v = self.to[a as usize] as usize;
                if self.cap[a as usize] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    /// One augmenting path in the level graph, found without recursion.
    fn augment(&mut self, s: usize, t: usize, stack: &mut Vec<usize>) -> u32 {
        stack.clear();
        let mut v = s;
        loop {
            if v == t {
                let push = stack.iter().map(|&a| self.cap[a]).min().unwrap_or(0);
                for &a in stack.iter() {
                    self.cap[a] -= push;
                    self.cap[a ^ 1] += push;
                }
                return push;
            }
            let mut advanced = false;
            while (self.iter[v] as usize) < self.adj[v].len() {
                let a = self.adj[v][self.iter[v] as usize] as usize;
                let w = self.to[a] as usize;
                if self.cap[a] > 0 && self.level[w] == self.level[v] + 1 {
                    stack.push(a);
                    v = w;
                    advanced = true;
                    break;
                }
                self.iter[v] += 1;
            }
            if !advanced {
                if v == s {
                    return 0;
                }
                // Dead end: remove v from the level graph and retreat.
                self.level[v] = -1;
                let a = stack.pop().expect("non-source vertex has an incoming arc");
                v = self.from(a);
                self.iter[v] += 1;
            }
        }
    }

    /// Maximum flow from `s` to `t`. Can be called again after adding arcs.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        assert_ne!(s, t);
        let mut total = 0u64;
        let mut stack = Vec::new();
        while self.bfs(s, t) {
            self.iter.clear();
            self.iter.resize(self.adj.len(), 0);
            loop {
                let f = self.augment(s, t, &mut stack);
                if f == 0 {
                    break;
                }
                total += f as u64;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual network (the source side of a min cut).
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let v = self.to[a as usize] as usize;
                if self.cap[a as usize] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Original capacity of the arcs leaving `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> u64 {
        (0..self.to.len())
            .filter(|&a| side[self.from(a)] && !side[self.to[a] as usize])
            .map(|a| self.orig[a] as u64)
            .sum()
    }

    /// Splits the current flow into `s`-`t` node paths, one per unit, dropping cycles.
    pub fn decompose_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut rem: Vec<i64> = (0..self.to.len()).map(|a| self.flow(a).max(0)).collect();
        let mut ptr = vec![0usize; self.adj.len()];
        let mut pos = vec![usize::MAX; self.adj.len()];
        let mut paths = Vec::new();
        loop {
            let mut nodes = vec![s];
            let mut arcs: Vec<usize> = Vec::new();
            pos[s] = 0;
            let mut v = s;
            let mut stuck = false;
            while v != t {
                while ptr[v] < self.adj[v].len() && rem[self.adj[v][ptr[v]] as usize] == 0 {
                    ptr[v] += 1;
                }
                if ptr[v] == self.adj[v].len() {
                    stuck = true;
                    break;
                }
                let a = self.adj[v][ptr[v]] as usize;
                let w = self.to[a] as usize;
                if pos[w] != usize::MAX {
                    // Cancel the cycle w -> ... -> v -> w.
                    let k = pos[w];
                    rem[a] -= 1;
                    for &c in &arcs[k..] {
                        rem[c] -= 1;
                    }
                    for &u in &nodes[k + 1..] {
                        pos[u] = usize::MAX;
                    }
                    arcs.truncate(k);
                    nodes.truncate(k + 1);
                    v = w;
                    continue;
                }
                arcs.push(a);
                nodes.push(w);
                pos[w] = nodes.len() - 1;
                v = w;
            }
            for &u in &nodes {
                pos[u] = usize::MAX;
            }
            if stuck {
                debug_assert_eq!(v, s, "flow conservation violated");
                break;
            }
            for &a in &arcs {
                rem[a] -= 1;
            }
            paths.push(nodes);
        }
        paths
    }
}
