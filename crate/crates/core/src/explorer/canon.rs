//! Canonical forms and isomorphism-class enumeration of small tournaments.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::digraph::{bit, low_mask, mask_iter, pair_count, Tournament};
use crate::error::{Error, Result};

/// Largest order accepted by [`canonical_form`].
pub const MAX_CANONICAL_N: usize = 8;
/// Largest order enumerated up to isomorphism.
pub const MAX_ISO_N: usize = 7;
/// Largest order enumerated with labels.
pub const MAX_LABELED_N: usize = 8;

/// The lexicographically least orientation bit string of a tournament over
/// all relabelings, stored as its pair-order code (first pair most
/// significant), so smaller codes are smaller strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub code: u64,
}

impl CanonicalForm {
    pub fn tournament(&self) -> Tournament {
        Tournament::from_code(self.n, self.code).expect("canonical forms have at most 8 vertices")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        for k in (0..pair_count(self.n)).rev() {
            write!(f, "{}", self.code >> k & 1)?;
        }
        Ok(())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Partial {
    placed: Vec<usize>,
    /// Remaining vertices as an ordered list of cells.
    cells: Vec<u64>,
}

/// Canonical form by row-wise minimization.
///
/// Row `k` of the bit string holds the arcs from the vertex at position `k`
/// to all later positions. Once positions `0..k` are fixed, the later
/// positions are split into cells by their arcs to those vertices, and a
/// least row puts the in-neighbours of each cell first. Position `k` is
/// taken from the first cell; only candidates reaching the least row
/// survive, so every permutation achieving the minimum is still explored.
pub fn canonical_form(t: &Tournament) -> Result<CanonicalForm> {
    let n = t.n();
    if n > MAX_CANONICAL_N {
        return Err(Error::SizeLimit(format!(
            "canonical forms are limited to {MAX_CANONICAL_N} vertices, got {n}"
        )));
    }
    let mut frontier = vec![Partial {
        placed: Vec::with_capacity(n),
        cells: if n == 0 { vec![] } else { vec![low_mask(n)] },
    }];
    let mut code = 0u64;
    for k in 0..n {
        let width = n - 1 - k;
        let mut best = u64::MAX;
        let mut next = Vec::new();
        for p in &frontier {
            for v in mask_iter(p.cells[0]) {
                let mut row = 0u64;
                let mut cells = Vec::with_capacity(p.cells.len() + 1);
                for (ci, &cell) in p.cells.iter().enumerate() {
                    let cell = if ci == 0 { cell & !bit(v) } else { cell };
                    let outs = cell & t.out_mask(v);
                    let ins = cell & !outs;
                    let (i, o) = (ins.count_ones(), outs.count_ones());
                    row = (row << i) << o | low_mask(o as usize);
                    cells.extend([ins, outs].into_iter().filter(|&c| c != 0));
                }
                if row > best {
                    continue;
                }
                if row < best {
                    best = row;
                    next.clear();
                }
                let mut placed = p.placed.clone();
                placed.push(v);
                next.push(Partial { placed, cells });
            }
        }
        code = (code << width) | best;
        frontier = next;
    }
    Ok(CanonicalForm { n, code })
}

/// All labeled tournaments on `n` vertices in code order.
pub fn labeled_tournaments(n: usize) -> Result<impl Iterator<Item = Tournament>> {
    if n > MAX_LABELED_N {
        return Err(Error::SizeLimit(format!(
            "labeled enumeration is limited to {MAX_LABELED_N} vertices, got {n}"
        )));
    }
    let count = 1u64 << pair_count(n);
    Ok((0..count).map(move |code| Tournament::from_code(n, code).expect("size checked")))
}

/// One canonical representative per isomorphism class, ordered by
/// canonical code.
///
/// Classes on `n` vertices are grown from the classes on `n-1` vertices by
/// adding a last vertex with every possible neighbourhood; deleting a
/// vertex from any tournament lands in some smaller class, so nothing is
/// missed.
pub fn iso_classes(n: usize) -> Result<Vec<Tournament>> {
    if n > MAX_ISO_N {
        return Err(Error::SizeLimit(format!(
            "enumeration up to isomorphism is limited to {MAX_ISO_N} vertices, got {n}"
        )));
    }
    let mut reps = vec![CanonicalForm { n: 0, code: 0 }];
    for m in 1..=n {
        let mut seen = BTreeSet::new();
        for rep in &reps {
            let base = rep.tournament();
            for pattern in 0..1u64 << (m - 1) {
                // bit i of pattern set means i -> new vertex
                let mut out: Vec<u64> = (0..m - 1).map(|u| base.out_mask(u)).collect();
                let mut last = 0u64;
                for (u, row) in out.iter_mut().enumerate() {
                    if pattern >> u & 1 == 1 {
                        *row |= bit(m - 1);
                    } else {
                        last |= bit(u);
                    }
                }
                out.push(last);
                let t = Tournament::try_from(crate::digraph::OrientedGraph::from_out_masks(out))?;
                seen.insert(canonical_form(&t)?);
            }
        }
        reps = seen.into_iter().collect();
    }
    Ok(reps.iter().map(CanonicalForm::tournament).collect())
}

/// Streams tournaments on `n` vertices: one per isomorphism class
/// (`n <= 7`) or every labeled one (`n <= 8`).
pub fn enumerate_tournaments(n: usize, up_to_iso: bool) -> Result<Box<dyn Iterator<Item = Tournament>>> {
    if up_to_iso {
        Ok(Box::new(iso_classes(n)?.into_iter()))
    } else {
        Ok(Box::new(labeled_tournaments(n)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn t(s: &str) -> Tournament {
        s.parse().unwrap()
    }

    /// Minimum code over every vertex permutation.
    fn brute_force(t: &Tournament) -> u64 {
        let n = t.n();
        (0..n)
            .permutations(n)
            .map(|p| Tournament::try_from(t.permuted(&p)).unwrap().code())
            .min()
            .unwrap_or(0)
    }

    #[test]
    fn examples() {
        let c3 = Tournament::c3();
        let a = canonical_form(&c3).unwrap();
        assert_eq!(a, canonical_form(&c3.reverse()).unwrap());
        assert_eq!(a, canonical_form(&t("3:010")).unwrap());
        assert_eq!(canonical_form(&t("3:111")).unwrap(), canonical_form(&t("3:000")).unwrap());
        assert_ne!(a, canonical_form(&t("3:111")).unwrap());
        assert_eq!(canonical_form(&t("3:000")).unwrap().to_string(), "3:000");
        assert_eq!(canonical_form(&Tournament::transitive(0).unwrap()).unwrap().to_string(), "0:");
        let big = Tournament::transitive(9).unwrap();
        assert!(matches!(canonical_form(&big), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn matches_brute_force_on_all_labeled_up_to_five() {
        for n in 0..=5 {
            for t in labeled_tournaments(n).unwrap() {
                assert_eq!(canonical_form(&t).unwrap().code, brute_force(&t), "{t}");
            }
        }
    }

    #[test]
    fn class_counts() {
        let expected = [1, 1, 1, 2, 4, 12, 56];
        for (n, &want) in expected.iter().enumerate() {
            assert_eq!(iso_classes(n).unwrap().len(), want, "n = {n}");
        }
        assert!(iso_classes(8).is_err());
        assert!(labeled_tournaments(9).is_err());
    }

    #[test]
    fn labeled_dedup_oracle() {
        // orbit dedup with brute-force minimization, independent of the refinement
        for n in 0..=5 {
            let forms: BTreeSet<u64> = labeled_tournaments(n).unwrap().map(|t| brute_force(&t)).collect();
            let classes: Vec<u64> = iso_classes(n).unwrap().iter().map(|t| t.code()).collect();
            assert_eq!(forms.into_iter().collect::<Vec<_>>(), classes);
        }
    }

    #[test]
    fn representatives_are_canonical() {
        for t in iso_classes(6).unwrap() {
            assert_eq!(canonical_form(&t).unwrap().code, t.code());
        }
    }
}
