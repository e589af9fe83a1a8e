//! Oriented graphs, tournaments and vertex families.
//!
//! Vertices are `0..n` with `n <= 64`, so every vertex subset is a single
//! `u64` mask. A graph keeps one out-neighbour mask and one adjacency mask per
//! vertex; inverting a family is then a per-vertex XOR of the out mask with
//! the set of neighbours whose characteristic vectors have odd dot product.
//!
//! Text forms:
//!
//! * tournament: `n:b...` with one bit per pair `(i,j)`, `i<j`, in
//!   lexicographic pair order, `1` meaning `i->j`;
//! * oriented graph: `n;u>v,u>v,...`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

pub const MAX_VERTICES: usize = 64;

#[inline]
pub(crate) fn bit(v: usize) -> u64 {
    1u64 << v
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn mask_iter(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// Index of pair `(i,j)`, `i<j`, in lexicographic pair order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_VERTICES {
        Err(Error::TooManyVertices(n))
    } else {
        Ok(())
    }
}

/// A simple oriented graph: no loops, at most one arc per vertex pair.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrientedGraph {
    n: usize,
    out: Vec<u64>,
    adj: Vec<u64>,
}

impl OrientedGraph {
    /// The graph on `n` vertices with no arcs.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            n,
            out: vec![0; n],
            adj: vec![0; n],
        })
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    fn add_arc(&mut self, u: usize, v: usize) -> Result<()> {
        let tok = || format!("{u}>{v}");
        if u >= self.n || v >= self.n {
            return Err(parse_err(tok(), format!("vertex out of range 0..{}", self.n)));
        }
        if u == v {
            return Err(parse_err(tok(), "self-loop"));
        }
        if self.adj[u] & bit(v) != 0 {
            let reason = if self.out[u] & bit(v) != 0 {
                "duplicate arc"
            } else {
                "conflicts with the opposite arc"
            };
            return Err(parse_err(tok(), reason));
        }
        self.out[u] |= bit(v);
        self.adj[u] |= bit(v);
        self.adj[v] |= bit(u);
        Ok(())
    }

    /// Builds a graph directly from per-vertex out masks.
    ///
    /// Panics if the masks describe a loop or a 2-cycle; callers inside the
    /// crate only produce valid masks.
    pub(crate) fn from_out_masks(out: Vec<u64>) -> Self {
        let n = out.len();
        let mut adj = vec![0u64; n];
        for u in 0..n {
            assert_eq!(out[u] & bit(u), 0, "self-loop at {u}");
            for v in mask_iter(out[u]) {
                assert_eq!(out[v] & bit(u), 0, "2-cycle between {u} and {v}");
                adj[u] |= bit(v);
                adj[v] |= bit(u);
            }
        }
        Self { n, out, adj }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u] & bit(v) != 0
    }

    #[inline]
    pub fn out_mask(&self, u: usize) -> u64 {
        self.out[u]
    }

    #[inline]
    pub fn in_mask(&self, u: usize) -> u64 {
        self.adj[u] & !self.out[u]
    }

    #[inline]
    pub fn adj_mask(&self, u: usize) -> u64 {
        self.adj[u]
    }

    pub fn vertex_mask(&self) -> u64 {
        low_mask(self.n)
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Arcs `(u,v)` listed in lexicographic order of the pair `{u,v}`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::with_capacity(self.arc_count());
        for i in 0..self.n {
            for j in mask_iter(self.adj[i] & !low_mask(i + 1)) {
                if self.has_arc(i, j) {
                    arcs.push((i, j));
                } else {
                    arcs.push((j, i));
                }
            }
        }
        arcs
    }

    pub fn is_tournament(&self) -> bool {
        let all = self.vertex_mask();
        (0..self.n).all(|u| self.adj[u] == all & !bit(u))
    }

    /// True iff the graph has no directed cycle.
    ///
    /// Tournaments use the score test: a tournament is acyclic iff its
    /// out-degrees are exactly `0, 1, ..., n-1`.
    pub fn is_acyclic(&self) -> bool {
        if self.is_tournament() {
            let mut seen = 0u64;
            for u in 0..self.n {
                let d = self.out[u].count_ones() as usize;
                if seen & bit(d) != 0 {
                    return false;
                }
                seen |= bit(d);
            }
            return true;
        }
        self.topological_order().is_some()
    }

    /// Lexicographically least topological order, or `None` if cyclic.
    /// For an acyclic tournament this is its unique transitive order.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut remaining = self.vertex_mask();
        let mut order = Vec::with_capacity(self.n);
        while remaining != 0 {
            let sources = mask_iter(remaining).find(|&v| self.in_mask(v) & remaining == 0)?;
            order.push(sources);
            remaining &= !bit(sources);
        }
        Some(order)
    }

    /// Reverses every arc whose endpoints lie together in an odd number of
    /// the family's sets.
    pub fn invert(&self, family: &VertexFamily) -> Result<Self> {
        if family.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: family.n(),
            });
        }
        let mut flips = vec![0u64; self.n];
        for &set in family.sets() {
            for v in mask_iter(set) {
                flips[v] ^= set & !bit(v);
            }
        }
        Ok(self.flip(&flips))
    }

    /// Reverses the arc `uv` for every `v` in `flips[u]`. The flip masks must
    /// be symmetric; entries on absent pairs are ignored.
    pub(crate) fn flip(&self, flips: &[u64]) -> Self {
        let out = (0..self.n)
            .map(|u| self.out[u] ^ (flips[u] & self.adj[u]))
            .collect();
        Self {
            n: self.n,
            out,
            adj: self.adj.clone(),
        }
    }

    pub fn reverse(&self) -> Self {
        let out = (0..self.n).map(|u| self.in_mask(u)).collect();
        Self {
            n: self.n,
            out,
            adj: self.adj.clone(),
        }
    }

    /// `self -> other`: disjoint union, `self` first, every cross arc pointing
    /// from `self` to `other`.
    pub fn dijoin(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        check_n(n)?;
        let shift = self.n;
        let tail = low_mask(n) & !low_mask(shift);
        let mut out = Vec::with_capacity(n);
        let mut adj = Vec::with_capacity(n);
        for u in 0..self.n {
            out.push(self.out[u] | tail);
            adj.push(self.adj[u] | tail);
        }
        let head = low_mask(shift);
        for u in 0..other.n {
            out.push(other.out[u] << shift);
            adj.push((other.adj[u] << shift) | head);
        }
        Ok(Self { n, out, adj })
    }

    /// Left fold of [`dijoin`](Self::dijoin) over a nonempty list.
    pub fn njoin(parts: &[Self]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::Infeasible("n-join of an empty list".into()))?;
        rest.iter().try_fold(first.clone(), |acc, d| acc.dijoin(d))
    }

    /// Subgraph induced on `subset`, reindexed by increasing original index.
    pub fn induced(&self, subset: u64) -> Self {
        let subset = subset & self.vertex_mask();
        let verts: Vec<usize> = mask_iter(subset).collect();
        let compress = |m: u64| -> u64 {
            verts
                .iter()
                .enumerate()
                .filter(|(_, &v)| m & bit(v) != 0)
                .fold(0, |acc, (i, _)| acc | bit(i))
        };
        let out = verts.iter().map(|&v| compress(self.out[v])).collect();
        let adj = verts.iter().map(|&v| compress(self.adj[v])).collect();
        Self {
            n: verts.len(),
            out,
            adj,
        }
    }

    /// Relabels so that new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut inv = vec![0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let remap = |m: u64| mask_iter(m).fold(0u64, |acc, v| acc | bit(inv[v]));
        Self {
            n: self.n,
            out: perm.iter().map(|&p| remap(self.out[p])).collect(),
            adj: perm.iter().map(|&p| remap(self.adj[p])).collect(),
        }
    }

    /// True iff every arc of `sub` is an arc of `self` (same vertex count).
    pub fn contains(&self, sub: &Self) -> bool {
        self.n == sub.n && (0..self.n).all(|u| sub.out[u] & !self.out[u] == 0)
    }

    /// Number of directed triangles through each vertex.
    pub fn triangle_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for u in 0..self.n {
            // triangle u->v->w->u is determined by its out-neighbour v of u
            for v in mask_iter(self.out[u]) {
                counts[u] += (self.out[v] & self.in_mask(u)).count_ones() as usize;
            }
        }
        counts
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            arcs: self.arcs().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrientedGraph({self})")
    }
}

impl fmt::Display for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_tournament() {
            write!(f, "{}:", self.n)?;
            for i in 0..self.n {
                for j in i + 1..self.n {
                    f.write_str(if self.has_arc(i, j) { "1" } else { "0" })?;
                }
            }
            Ok(())
        } else {
            write!(f, "{};", self.n)?;
            for (k, (u, v)) in self.arcs().into_iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{u}>{v}")?;
            }
            Ok(())
        }
    }
}

fn parse_vertex(tok: &str, whole: &str) -> Result<usize> {
    tok.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(whole, format!("`{tok}` is not a vertex index")))
}

impl FromStr for OrientedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n_str, bits)) = s.split_once(':') {
            let n: usize = n_str
                .parse()
                .map_err(|_| parse_err(n_str, "vertex count is not an integer"))?;
            check_n(n)?;
            let expected = pair_count(n);
            if bits.len() != expected {
                return Err(parse_err(
                    bits,
                    format!("expected {expected} orientation bits for n={n}, found {}", bits.len()),
                ));
            }
            let mut out = vec![0u64; n];
            let mut chars = bits.chars();
            for i in 0..n {
                for j in i + 1..n {
                    match chars.next() {
                        Some('1') => out[i] |= bit(j),
                        Some('0') => out[j] |= bit(i),
                        Some(c) => {
                            return Err(parse_err(c.to_string(), "orientation bit must be 0 or 1"))
                        }
                        None => unreachable!(),
                    }
                }
            }
            let all = low_mask(n);
            let adj = (0..n).map(|u| all & !bit(u)).collect();
            Ok(Self { n, out, adj })
        } else if let Some((n_str, arcs)) = s.split_once(';') {
            let n: usize = n_str
                .parse()
                .map_err(|_| parse_err(n_str, "vertex count is not an integer"))?;
            let mut g = Self::empty(n)?;
            if !arcs.trim().is_empty() {
                for tok in arcs.split(',') {
                    let (u, v) = tok
                        .split_once('>')
                        .ok_or_else(|| parse_err(tok, "arc must have the form u>v"))?;
                    let u = parse_vertex(u, tok)?;
                    let v = parse_vertex(v, tok)?;
                    g.add_arc(u, v).map_err(|e| match e {
                        Error::Parse { reason, .. } => parse_err(tok.trim(), reason),
                        other => other,
                    })?;
                }
            }
            Ok(g)
        } else {
            Err(parse_err(s, "expected `n:bits` or `n;u>v,...`"))
        }
    }
}

/// JSON rendering `{"n":..., "arcs":[[u,v],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub arcs: Vec<[usize; 2]>,
}

/// An oriented graph with exactly one arc per vertex pair.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament(OrientedGraph);

impl Tournament {
    /// Transitive tournament with `i -> j` for all `i < j`.
    pub fn transitive(n: usize) -> Result<Self> {
        check_n(n)?;
        let all = low_mask(n);
        let out = (0..n).map(|u| all & !low_mask(u + 1)).collect();
        Ok(Self(OrientedGraph::from_out_masks(out)))
    }

    /// The directed triangle `0 -> 1 -> 2 -> 0`.
    pub fn c3() -> Self {
        Self(OrientedGraph::from_out_masks(vec![0b010, 0b100, 0b001]))
    }

    /// Decodes orientation bits, pair `(0,1)` at bit `pair_count(n)-1` of
    /// `code` (most significant first).
    pub fn from_code(n: usize, code: u64) -> Result<Self> {
        check_n(n)?;
        let pairs = pair_count(n);
        if pairs > 64 {
            return Err(Error::SizeLimit(format!("a {n}-vertex bit code")));
        }
        let mut out = vec![0u64; n];
        let mut k = pairs;
        for i in 0..n {
            for j in i + 1..n {
                k -= 1;
                if code >> k & 1 == 1 {
                    out[i] |= bit(j);
                } else {
                    out[j] |= bit(i);
                }
            }
        }
        Ok(Self(OrientedGraph::from_out_masks(out)))
    }

    /// Inverse of [`from_code`](Self::from_code); requires at most 11 vertices.
    pub fn code(&self) -> u64 {
        let n = self.n();
        debug_assert!(pair_count(n) <= 64);
        let mut code = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                code = code << 1 | self.has_arc(i, j) as u64;
            }
        }
        code
    }

    pub fn as_graph(&self) -> &OrientedGraph {
        &self.0
    }

    pub fn into_graph(self) -> OrientedGraph {
        self.0
    }

    pub fn reverse(&self) -> Self {
        Self(self.0.reverse())
    }

    pub fn dijoin(&self, other: &Self) -> Result<Self> {
        self.0.dijoin(&other.0).map(Self)
    }

    pub fn njoin(parts: &[Self]) -> Result<Self> {
        let graphs: Vec<OrientedGraph> = parts.iter().map(|t| t.0.clone()).collect();
        OrientedGraph::njoin(&graphs).map(Self)
    }

    pub fn induced(&self, subset: u64) -> Self {
        Self(self.0.induced(subset))
    }

    pub fn invert(&self, family: &VertexFamily) -> Result<Self> {
        self.0.invert(family).map(Self)
    }

    pub fn is_transitive(&self) -> bool {
        self.0.is_acyclic()
    }
}

impl std::ops::Deref for Tournament {
    type Target = OrientedGraph;

    fn deref(&self) -> &OrientedGraph {
        &self.0
    }
}

impl TryFrom<OrientedGraph> for Tournament {
    type Error = Error;

    fn try_from(g: OrientedGraph) -> Result<Self> {
        for u in 0..g.n() {
            let missing = g.vertex_mask() & !bit(u) & !g.adj_mask(u);
            if missing != 0 {
                let v = missing.trailing_zeros() as usize;
                return Err(Error::NotTournament(u.min(v), u.max(v)));
            }
        }
        Ok(Self(g))
    }
}

impl FromStr for Tournament {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrientedGraph::from_str(s)?.try_into()
    }
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament({})", self.0)
    }
}

/// An ordered list of vertex subsets `X_1, ..., X_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexFamily {
    n: usize,
    sets: Vec<u64>,
}

impl VertexFamily {
    pub fn new(n: usize, sets: Vec<u64>) -> Result<Self> {
        check_n(n)?;
        let all = low_mask(n);
        if let Some(bad) = sets.iter().find(|&&s| s & !all != 0) {
            let v = (bad & !all).trailing_zeros();
            return Err(parse_err(v.to_string(), format!("vertex out of range 0..{n}")));
        }
        Ok(Self { n, sets })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, sets: Vec::new() }
    }

    pub fn from_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let mut sets = Vec::with_capacity(lists.len());
        for list in lists {
            let mut s = 0u64;
            for &v in list {
                if v >= n {
                    return Err(parse_err(v.to_string(), format!("vertex out of range 0..{n}")));
                }
                s |= bit(v);
            }
            sets.push(s);
        }
        Self::new(n, sets)
    }

    /// Family whose `i`-th set holds the vertices whose vector has bit `i`.
    pub fn from_characteristic_vectors(width: usize, vectors: &[u64]) -> Self {
        let sets = (0..width)
            .map(|i| {
                vectors
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x >> i & 1 == 1)
                    .fold(0u64, |acc, (v, _)| acc | bit(v))
            })
            .collect();
        Self {
            n: vectors.len(),
            sets,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|&s| mask_iter(s).collect()).collect()
    }

    /// Bit `i` is set iff `v` belongs to `X_{i+1}`. Requires `m <= 64`.
    pub fn characteristic_vector(&self, v: usize) -> u64 {
        debug_assert!(self.sets.len() <= 64);
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, &s)| s & bit(v) != 0)
            .fold(0u64, |acc, (i, _)| acc | bit(i))
    }

    /// Moves every vertex `v` to `v + offset` inside an `n`-vertex frame.
    pub fn shifted(&self, offset: usize, n: usize) -> Result<Self> {
        check_n(n)?;
        if self.n + offset > n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: self.n + offset,
            });
        }
        Ok(Self {
            n,
            sets: self.sets.iter().map(|&s| s << offset).collect(),
        })
    }
}
