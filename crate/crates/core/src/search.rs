//! Exact solvers for `inv` and `tmr`.
//!
//! A family of `m` sets is the same thing as an assignment of a vector in
//! GF(2)^m to every vertex (its characteristic vector); arc `uv` is reversed
//! iff the two vectors have odd dot product. The solvers try `m = 0, 1, ...`
//! and, at each level, search assignments depth-first:
//!
//! * vertices are assigned in order of decreasing number of directed
//!   triangles through them, ties by index;
//! * the first assigned vertex only takes vectors of the form `1..10..0`,
//!   since permuting the sets preserves every dot product;
//! * the reachability relation of the partially flipped graph is maintained
//!   incrementally, and an extension that closes a directed cycle is
//!   rejected (induced subgraphs of acyclic graphs are acyclic, so no
//!   solution is lost).
//!
//! `tmr` uses the same engine. A rank-`k` symmetric matrix is `X Xᵀ` for some
//! `X` of width `k`, or of width `k+1` when `k` is even and the diagonal is
//! zero, so searching width-`k` assignments and, for even `k`, width-`(k+1)`
//! assignments whose Gram matrix has rank at most `k` covers every decycling
//! matrix of rank `k`.
//!
//! With `parallel_width > 1` the branches fixing the first two vertices'
//! vectors are distributed over a thread pool. The answer is always the
//! solution in the earliest branch, so output does not depend on scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::decycling::Certificate;
use crate::digraph::{bit, mask_iter, OrientedGraph, Tournament, VertexFamily};
use crate::error::Error;
use crate::gf2::{MatGF2, SymMatGF2};

/// Limits for one solver call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest family size (or rank) tried before giving up.
    pub max_m: usize,
    /// Abort after this many search nodes.
    pub node_limit: Option<u64>,
    /// Worker threads for the top-level branches.
    pub parallel_width: usize,
    /// Reject partial assignments that already contain a cycle. Turning this
    /// off only checks complete assignments; it exists to test pruning.
    pub prune: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_m: 16,
            node_limit: None,
            parallel_width: 1,
            prune: true,
        }
    }
}

impl SearchBudget {
    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.parallel_width = workers.max(1);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    /// The budget ran out. The true value lies in `lower..=upper`.
    #[error("inconclusive: value in [{lower}, {}] after {nodes} nodes", upper.map_or("?".to_string(), |u| u.to_string()))]
    Inconclusive {
        lower: usize,
        upper: Option<usize>,
        nodes: u64,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvSolution {
    pub value: usize,
    pub certificate: Certificate,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmrSolution {
    pub value: usize,
    pub certificate: Certificate,
    /// Whether some minimum-rank decycling matrix has a nonzero diagonal
    /// entry.
    pub nonzero_diagonal: bool,
    pub nodes: u64,
}

enum Level {
    Found(Vec<u64>),
    NotFound,
    Exhausted,
}

#[derive(PartialEq, Eq)]
enum Step {
    Found,
    NotFound,
    Abort,
}

fn assignment_order(g: &OrientedGraph) -> Vec<usize> {
    let tri = g.triangle_counts();
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(tri[v]), v));
    order
}

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Rank of the Gram matrix of `vs`, at most 64 vectors.
fn gram_rank(vs: &[u64]) -> usize {
    let mut rows: Vec<u64> = vs
        .iter()
        .map(|&a| {
            vs.iter()
                .enumerate()
                .filter(|(_, &b)| parity(a & b))
                .fold(0u64, |acc, (j, _)| acc | bit(j))
        })
        .collect();
    let mut rank = 0;
    for c in 0..vs.len() {
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> c & 1 == 1) {
            rows.swap(p, rank);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> c & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

struct Ctx<'a> {
    g: &'a OrientedGraph,
    order: Vec<usize>,
    /// `prefix[d]` is the set of vertices assigned before depth `d`.
    prefix: Vec<u64>,
    width: usize,
    rank_cap: Option<usize>,
    prune: bool,
    node_limit: Option<u64>,
    nodes: AtomicU64,
    exhausted: AtomicBool,
    best_branch: AtomicUsize,
}

impl<'a> Ctx<'a> {
    fn new(g: &'a OrientedGraph, width: usize, rank_cap: Option<usize>, budget: &SearchBudget) -> Self {
        let order = assignment_order(g);
        let mut prefix = Vec::with_capacity(order.len() + 1);
        let mut acc = 0u64;
        prefix.push(0);
        for &v in &order {
            acc |= bit(v);
            prefix.push(acc);
        }
        Self {
            g,
            order,
            prefix,
            width,
            rank_cap,
            prune: budget.prune,
            node_limit: budget.node_limit,
            nodes: AtomicU64::new(0),
            exhausted: AtomicBool::new(false),
            best_branch: AtomicUsize::new(usize::MAX),
        }
    }

    fn first_vectors(&self) -> impl Iterator<Item = u64> {
        (0..=self.width).map(|a| if a == 64 { u64::MAX } else { (1u64 << a) - 1 })
    }

    fn all_vectors(&self) -> impl Iterator<Item = u64> {
        0..1u64 << self.width
    }

    fn candidates(&self, depth: usize) -> Box<dyn Iterator<Item = u64>> {
        if depth == 0 {
            Box::new(self.first_vectors())
        } else {
            Box::new(self.all_vectors())
        }
    }
}

struct Worker<'c, 'a> {
    ctx: &'c Ctx<'a>,
    branch: usize,
    vecs: Vec<u64>,
    /// Row `d` holds, for each vertex, the set reachable from it among the
    /// first `d` assigned vertices after flipping.
    reach: Vec<u64>,
}

impl<'c, 'a> Worker<'c, 'a> {
    fn new(ctx: &'c Ctx<'a>, branch: usize) -> Self {
        let n = ctx.g.n();
        Self {
            ctx,
            branch,
            vecs: vec![0; n],
            reach: vec![0; (n + 1) * n],
        }
    }

    fn aborted(&self) -> bool {
        self.ctx.exhausted.load(Ordering::Relaxed)
            || self.ctx.best_branch.load(Ordering::Relaxed) < self.branch
    }

    fn count_node(&self) -> bool {
        let seen = self.ctx.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.ctx.node_limit {
            if seen > limit {
                self.ctx.exhausted.store(true, Ordering::Relaxed);
                return false;
            }
        }
        true
    }

    fn rank_ok(&self, depth: usize) -> bool {
        let Some(cap) = self.ctx.rank_cap else {
            return true;
        };
        let vs: Vec<u64> = self.ctx.order[..=depth].iter().map(|&v| self.vecs[v]).collect();
        gram_rank(&vs) <= cap
    }

    /// Assigns `x` to the vertex at `depth`; false if this closes a cycle or
    /// breaks the rank cap.
    fn try_extend(&mut self, depth: usize, x: u64) -> bool {
        let ctx = self.ctx;
        let g = ctx.g;
        let n = g.n();
        let w = ctx.order[depth];
        self.vecs[w] = x;
        let leaf = depth + 1 == n;

        if !ctx.prune {
            if !leaf {
                return true;
            }
            let flips: Vec<u64> = (0..n)
                .map(|u| {
                    (0..n)
                        .filter(|&v| v != u && parity(self.vecs[u] & self.vecs[v]))
                        .fold(0u64, |acc, v| acc | bit(v))
                })
                .collect();
            return g.flip(&flips).is_acyclic() && self.rank_ok(depth);
        }

        let assigned = ctx.prefix[depth];
        let mut flips = 0u64;
        for u in mask_iter(assigned & g.adj_mask(w)) {
            if parity(x & self.vecs[u]) {
                flips |= bit(u);
            }
        }
        let out_w = (g.out_mask(w) & assigned) ^ flips;
        let in_w = (g.adj_mask(w) & assigned) & !out_w;
        if !self.rank_ok(depth) {
            return false;
        }

        let (cur, next) = self.reach.split_at_mut((depth + 1) * n);
        let cur = &cur[depth * n..];
        let next = &mut next[..n];
        let mut reach_w = out_w;
        for o in mask_iter(out_w) {
            reach_w |= cur[o];
        }
        if reach_w & in_w != 0 {
            return false;
        }
        next.copy_from_slice(cur);
        next[w] = reach_w;
        let gained = reach_w | bit(w);
        for v in mask_iter(assigned) {
            if in_w & bit(v) != 0 || cur[v] & in_w != 0 {
                next[v] |= gained;
            }
        }
        true
    }

    fn dfs(&mut self, depth: usize) -> Step {
        if depth == self.ctx.order.len() {
            return Step::Found;
        }
        for x in self.ctx.candidates(depth) {
            if self.aborted() || !self.count_node() {
                return Step::Abort;
            }
            if self.try_extend(depth, x) {
                match self.dfs(depth + 1) {
                    Step::NotFound => {}
                    other => return other,
                }
            }
        }
        Step::NotFound
    }

    /// Runs the subtree below a fixed prefix of vectors.
    fn run_branch(&mut self, prefix: &[u64]) -> Step {
        for (depth, &x) in prefix.iter().enumerate() {
            if self.aborted() || !self.count_node() {
                return Step::Abort;
            }
            if !self.try_extend(depth, x) {
                return Step::NotFound;
            }
        }
        self.dfs(prefix.len())
    }
}

fn search_level(
    g: &OrientedGraph,
    width: usize,
    rank_cap: Option<usize>,
    budget: &SearchBudget,
    nodes: &mut u64,
) -> Level {
    let n = g.n();
    let ctx = Ctx::new(g, width, rank_cap, budget);
    let result = if budget.parallel_width <= 1 || n < 3 {
        let mut worker = Worker::new(&ctx, 0);
        match worker.dfs(0) {
            Step::Found => Level::Found(worker.vecs),
            Step::NotFound => Level::NotFound,
            Step::Abort => Level::Exhausted,
        }
    } else {
        let branches: Vec<[u64; 2]> = ctx
            .first_vectors()
            .flat_map(|a| ctx.all_vectors().map(move |b| [a, b]))
            .collect();
        let run = || {
            branches
                .par_iter()
                .enumerate()
                .map(|(i, prefix)| {
                    if ctx.best_branch.load(Ordering::Relaxed) < i {
                        return None;
                    }
                    let mut worker = Worker::new(&ctx, i);
                    match worker.run_branch(prefix) {
                        Step::Found => {
                            ctx.best_branch.fetch_min(i, Ordering::Relaxed);
                            Some((i, worker.vecs))
                        }
                        _ => None,
                    }
                })
                .flatten()
                .min_by_key(|(i, _)| *i)
        };
        let found = match rayon::ThreadPoolBuilder::new()
            .num_threads(budget.parallel_width)
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        };
        match found {
            Some((_, vecs)) => Level::Found(vecs),
            // an earlier branch may have been cut by the node limit
            None if ctx.exhausted.load(Ordering::Relaxed) => Level::Exhausted,
            None => Level::NotFound,
        }
    };
    *nodes += ctx.nodes.load(Ordering::Relaxed);
    result
}

/// Inverting `{u,v}` for every backward arc of a score order decycles any
/// oriented graph; its size bounds `inv` from above.
fn greedy_upper_bound(g: &OrientedGraph) -> usize {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.out_mask(v).count_ones()), v));
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    g.arcs().iter().filter(|&&(u, v)| pos[u] > pos[v]).count()
}

/// `inv(D)` with a minimum decycling family.
pub fn solve_inv(g: &OrientedGraph, budget: &SearchBudget) -> Result<InvSolution, SearchError> {
    let mut nodes = 0;
    for m in 0..=budget.max_m.min(63) {
        match search_level(g, m, None, budget, &mut nodes) {
            Level::Found(vecs) => {
                let family = VertexFamily::from_characteristic_vectors(m, &vecs);
                let certificate = Certificate::from_family(g, family)?;
                return Ok(InvSolution {
                    value: m,
                    certificate,
                    nodes,
                });
            }
            Level::NotFound => {}
            Level::Exhausted => {
                return Err(SearchError::Inconclusive {
                    lower: m,
                    upper: Some(greedy_upper_bound(g).max(m)),
                    nodes,
                })
            }
        }
    }
    Err(SearchError::Inconclusive {
        lower: budget.max_m + 1,
        upper: Some(greedy_upper_bound(g).max(budget.max_m + 1)),
        nodes,
    })
}

fn gram_of(vecs: &[u64], width: usize) -> SymMatGF2 {
    MatGF2::from_packed_rows(width, vecs).gram()
}

/// `tmr(T)` with a minimum-rank decycling matrix.
pub fn solve_tmr(t: &Tournament, budget: &SearchBudget) -> Result<TmrSolution, SearchError> {
    let g = t.as_graph();
    let mut nodes = 0;
    let inconclusive = |lower: usize, nodes: u64| SearchError::Inconclusive {
        lower,
        upper: Some(greedy_upper_bound(g).max(lower)),
        nodes,
    };
    for k in 0..=budget.max_m.min(62) {
        let mut attempts = vec![(k, None)];
        if k > 0 && k % 2 == 0 {
            attempts.push((k + 1, Some(k)));
        }
        for (width, cap) in attempts {
            match search_level(g, width, cap, budget, &mut nodes) {
                Level::Found(vecs) => {
                    let m = gram_of(&vecs, width);
                    debug_assert_eq!(m.rank(), k);
                    // only the plain width-k search can produce a nonzero diagonal
                    let nonzero_diagonal = cap.is_none() && m.has_nonzero_diagonal();
                    let certificate = Certificate::from_matrix(t, m)?;
                    return Ok(TmrSolution {
                        value: certificate.value,
                        certificate,
                        nonzero_diagonal,
                        nodes,
                    });
                }
                Level::NotFound => {}
                Level::Exhausted => return Err(inconclusive(k, nodes)),
            }
        }
    }
    Err(inconclusive(budget.max_m + 1, nodes))
}

/// Outcome of checking `inv ∈ {tmr, tmr+1}` and its side conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrichotomyReport {
    pub inv: usize,
    pub tmr: usize,
    pub transitive: bool,
    /// Some minimum-rank decycling matrix has a nonzero diagonal entry.
    pub nonzero_diagonal: bool,
    pub inv_certificate: Certificate,
    pub tmr_certificate: Certificate,
    /// Failed claims; empty when everything holds.
    pub violations: Vec<String>,
}

impl TrichotomyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_trichotomy(t: &Tournament, budget: &SearchBudget) -> Result<TrichotomyReport, SearchError> {
    let inv = solve_inv(t.as_graph(), budget)?;
    let tmr = solve_tmr(t, budget)?;
    let transitive = t.is_transitive();
    let mut violations = Vec::new();
    if inv.value != tmr.value && inv.value != tmr.value + 1 {
        violations.push(format!("inv = {} is neither tmr = {} nor tmr + 1", inv.value, tmr.value));
    }
    if inv.value == tmr.value + 1 {
        if tmr.value % 2 != 0 {
            violations.push(format!("inv = tmr + 1 with odd tmr = {}", tmr.value));
        }
        if !transitive && tmr.nonzero_diagonal {
            violations.push("inv = tmr + 1 but a minimum-rank matrix has a nonzero diagonal".into());
        }
    }
    if !transitive && inv.value == tmr.value && !tmr.nonzero_diagonal {
        violations.push("inv = tmr but every minimum-rank matrix has a zero diagonal".into());
    }
    Ok(TrichotomyReport {
        inv: inv.value,
        tmr: tmr.value,
        transitive,
        nonzero_diagonal: tmr.nonzero_diagonal,
        inv_certificate: inv.certificate,
        tmr_certificate: tmr.certificate,
        violations,
    })
}

/// Replays `c` against `d`; `Err` names the first claim that fails.
pub fn verify_certificate(d: &OrientedGraph, c: &Certificate) -> Result<(), String> {
    c.check(d)
}
