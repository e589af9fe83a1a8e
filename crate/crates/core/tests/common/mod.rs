//! Reference implementations used as test oracles. They work on plain
//! boolean adjacency matrices and share no code with the library beyond
//! reading arcs.

#![allow(dead_code)]

use std::io::Write;

use tourninv::{OrientedGraph, Tournament};

pub type Adj = Vec<Vec<bool>>;

pub fn adjacency(g: &OrientedGraph) -> Adj {
    let n = g.n();
    (0..n).map(|u| (0..n).map(|v| g.has_arc(u, v)).collect()).collect()
}

/// Directed-cycle test by depth-first search with three colours.
pub fn has_cycle(a: &Adj) -> bool {
    fn visit(a: &Adj, u: usize, colour: &mut [u8]) -> bool {
        colour[u] = 1;
        for v in 0..a.len() {
            if a[u][v] && (colour[v] == 1 || (colour[v] == 0 && visit(a, v, colour))) {
                return true;
            }
        }
        colour[u] = 2;
        false
    }
    let mut colour = vec![0u8; a.len()];
    (0..a.len()).any(|u| colour[u] == 0 && visit(a, u, &mut colour))
}

/// Reverses every arc `uv` with `flip[u][v]` set.
pub fn flipped(a: &Adj, flip: &[Vec<bool>]) -> Adj {
    let n = a.len();
    let mut b = a.clone();
    for u in 0..n {
        for v in 0..n {
            if flip[u][v] && (a[u][v] || a[v][u]) {
                b[u][v] = a[v][u];
            }
        }
    }
    b
}

/// Pairs lying together in an odd number of the given vertex sets.
pub fn family_flips(n: usize, sets: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let mut f = vec![vec![false; n]; n];
    for s in sets {
        for &u in s {
            for &v in s {
                if u != v {
                    f[u][v] ^= true;
                }
            }
        }
    }
    f
}

pub fn family_decycles(g: &OrientedGraph, sets: &[Vec<usize>]) -> bool {
    let a = adjacency(g);
    !has_cycle(&flipped(&a, &family_flips(g.n(), sets)))
}

/// All subsets of `0..n` as index lists.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0..1u32 << n)
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect()
}

/// `inv(g)` if it is at most 2, by trying every family of at most two
/// subsets; `None` otherwise.
pub fn naive_inv_at_most_2(g: &OrientedGraph) -> Option<usize> {
    let all = subsets(g.n());
    if family_decycles(g, &[]) {
        return Some(0);
    }
    if all.iter().any(|x| family_decycles(g, std::slice::from_ref(x))) {
        return Some(1);
    }
    for (i, x) in all.iter().enumerate() {
        for y in &all[i..] {
            if family_decycles(g, &[x.clone(), y.clone()]) {
                return Some(2);
            }
        }
    }
    None
}

/// Rank over GF(2) by plain row reduction.
pub fn rank(rows: &[Vec<u8>]) -> usize {
    let mut m: Vec<Vec<u8>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] == 1) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] == 1 {
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Symmetric matrix from upper-triangle bits, diagonal included, row by row.
pub fn sym_from_bits(n: usize, bits: u64) -> Vec<Vec<u8>> {
    let mut m = vec![vec![0u8; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let b = (bits >> k & 1) as u8;
            m[i][j] = b;
            m[j][i] = b;
            k += 1;
        }
    }
    m
}

pub fn matrix_decycles(a: &Adj, m: &[Vec<u8>]) -> bool {
    let flip: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect();
    !has_cycle(&flipped(a, &flip))
}

/// `(tmr, some minimum-rank decycling matrix has a nonzero diagonal)` by
/// trying every symmetric matrix.
pub fn brute_tmr(t: &Tournament) -> (usize, bool) {
    let n = t.n();
    let a = adjacency(t.as_graph());
    let mut best = (usize::MAX, false);
    for bits in 0..1u64 << (n * (n + 1) / 2) {
        let m = sym_from_bits(n, bits);
        let r = rank(&m);
        if r > best.0 || !matrix_decycles(&a, &m) {
            continue;
        }
        let diag = (0..n).any(|i| m[i][i] == 1);
        if r < best.0 {
            best = (r, diag);
        } else {
            best.1 |= diag;
        }
    }
    best
}

/// Inverse over GF(2) by Gauss-Jordan on `[m | I]`; `None` if singular.
pub fn inverse(m: &[Vec<u8>]) -> Option<Vec<Vec<u8>>> {
    let n = m.len();
    let mut aug: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut row = m[i].clone();
            row.extend((0..n).map(|j| (i == j) as u8));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| aug[i][c] == 1)?;
        aug.swap(c, p);
        for i in 0..n {
            if i != c && aug[i][c] == 1 {
                let pivot = aug[c].clone();
                for (x, y) in aug[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(0u8, |acc, k| acc ^ (row[k] & b[k][j])))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<u8>], cols: usize) -> Vec<Vec<u8>> {
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Every labeled oriented graph on `n` vertices: each pair absent,
/// forward or backward.
pub fn all_oriented(n: usize) -> Vec<OrientedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut arcs = Vec::new();
            for &(i, j) in &pairs {
                match code % 3 {
                    1 => arcs.push((i, j)),
                    2 => arcs.push((j, i)),
                    _ => {}
                }
                code /= 3;
            }
            OrientedGraph::from_arcs(n, &arcs).unwrap()
        })
        .collect()
}

/// Every labeled tournament on `n` vertices.
pub fn all_tournaments(n: usize) -> Vec<Tournament> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0..1u64 << pairs.len())
        .map(|code| {
            let arcs: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .map(|(k, &(i, j))| if code >> k & 1 == 1 { (i, j) } else { (j, i) })
                .collect();
            Tournament::try_from(OrientedGraph::from_arcs(n, &arcs).unwrap()).unwrap()
        })
        .collect()
}

/// Smallest adjacency string over all relabelings, as an isomorphism
/// invariant independent of the library's canonical form.
pub fn brute_canonical(t: &Tournament) -> Vec<bool> {
    let n = t.n();
    let a = adjacency(t.as_graph());
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<bool>> = None;
    loop {
        let s: Vec<bool> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[perm[i]][perm[j]])
            .collect();
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
        // next permutation in lexicographic order
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    best.unwrap_or_default()
}

/// Writes one line straight to the process stdout so it shows up even
/// when the test harness captures `println!`.
pub fn report_line(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}
