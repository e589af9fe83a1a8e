//! Block elimination on decycling matrices of dijoins.
//!
//! A decycling matrix of `D1 -> D2`, rows ordered `D1` then `D2`, has the
//! block form `[[A, C], [C^T, B]]`. Eliminating a nonsingular principal
//! block `A'` of `A` leaves `B' = B + C'^T A'^{-1} C'` in place of `B`,
//! where `C'` is the rows of `C` indexed like `A'`. Whether `B'` still
//! decycles `D2` is what these probes record.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::canon::iso_classes;
use super::report::{ScanReport, ScanScope, Violation};
use crate::decycling::is_decycling_matrix;
use crate::digraph::{bit, low_mask, mask_iter, Tournament};
use crate::error::{Error, Result};
use crate::gf2::{full_rank_principal, schur_update, PrincipalTarget, SymMatGF2};

/// Outcome of eliminating one principal block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchurRecord {
    /// Rows of `A` forming `A'`, in increasing order.
    pub a_indices: Vec<usize>,
    pub a_rank: usize,
    pub b_prime: SymMatGF2,
    pub b_prime_decycles: bool,
    /// `A'` decycles the sub-tournament of `D1` on `a_indices`.
    pub a_prime_decycles_induced: bool,
    /// For a 3x3 `A'`: whether it decycles the directed triangle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_prime_decycles_c3: Option<bool>,
}

fn check_shape(d1: &Tournament, d2: &Tournament, m: &SymMatGF2) -> Result<Tournament> {
    let d = d1.dijoin(d2)?;
    if m.n() != d.n() {
        return Err(Error::SizeMismatch {
            expected: d.n(),
            found: m.n(),
        });
    }
    if !is_decycling_matrix(&d, m)? {
        return Err(Error::InvalidCertificate("matrix does not decycle the dijoin".into()));
    }
    Ok(d)
}

/// Probes `m` with the largest nonsingular principal block of `A` found by
/// [`full_rank_principal`].
pub fn schur_probe(d1: &Tournament, d2: &Tournament, m: &SymMatGF2) -> Result<SchurRecord> {
    check_shape(d1, d2, m)?;
    let a = m.principal(&(0..d1.n()).collect::<Vec<_>>());
    let idx = full_rank_principal(&a, PrincipalTarget::Max)?;
    probe_unchecked(d1, d2, m, idx)
}

/// Probes `m` with the principal block of `A` on `indices`, which must be
/// nonsingular.
pub fn schur_probe_at(d1: &Tournament, d2: &Tournament, m: &SymMatGF2, indices: &[usize]) -> Result<SchurRecord> {
    check_shape(d1, d2, m)?;
    if let Some(&bad) = indices.iter().find(|&&i| i >= d1.n()) {
        return Err(Error::Infeasible(format!("index {bad} is outside the first operand")));
    }
    let idx: Vec<usize> = indices.iter().copied().sorted().dedup().collect();
    probe_unchecked(d1, d2, m, idx)
}

fn probe_unchecked(d1: &Tournament, d2: &Tournament, m: &SymMatGF2, idx: Vec<usize>) -> Result<SchurRecord> {
    let (n1, n) = (d1.n(), m.n());
    let a_prime = m.principal(&idx);
    let rest: Vec<usize> = (n1..n).collect();
    let c = m.as_mat().submatrix(&idx, &rest);
    let b = m.principal(&rest);
    let b_prime = schur_update(&a_prime, &c, &b)?;
    let mask = idx.iter().fold(0u64, |acc, &i| acc | bit(i));
    let a_prime_decycles_c3 = if idx.len() == 3 {
        Some(is_decycling_matrix(&Tournament::c3(), &a_prime)?)
    } else {
        None
    };
    Ok(SchurRecord {
        a_rank: idx.len(),
        b_prime_decycles: is_decycling_matrix(d2, &b_prime)?,
        a_prime_decycles_induced: is_decycling_matrix(&d1.induced(mask), &a_prime)?,
        a_prime_decycles_c3,
        a_indices: idx,
        b_prime,
    })
}

/// Upper-triangle bits (diagonal included) of every symmetric `n x n`
/// matrix that decycles `t`.
fn decycling_blocks(t: &Tournament) -> Vec<u64> {
    let n = t.n();
    let count = n * (n + 1) / 2;
    (0..1u64 << count)
        .filter(|&bits| is_decycling_matrix(t, &SymMatGF2::from_upper_bits(n, bits)).expect("sizes match"))
        .collect()
}

/// `[[a, c], [c^T, b]]` with row `i` of `c` in bits `i*n2..(i+1)*n2` of
/// `cross`.
fn with_cross(a: &SymMatGF2, b: &SymMatGF2, cross: u64) -> SymMatGF2 {
    let (n1, n2) = (a.n(), b.n());
    let mut m = SymMatGF2::block_diag(a, b);
    for i in 0..n1 {
        for j in mask_iter(cross >> (i * n2) & low_mask(n2)) {
            m.set(i, n1 + j, true);
        }
    }
    m
}

/// Calls `f` on every decycling matrix of `d1 -> d2`.
///
/// Both diagonal blocks of a decycling matrix decycle their operand, so
/// only those blocks are combined with every cross block.
fn for_each_decycling_matrix(d1: &Tournament, d2: &Tournament, mut f: impl FnMut(&SymMatGF2)) {
    let (n1, n2) = (d1.n(), d2.n());
    let d = d1.dijoin(d2).expect("small");
    let a_blocks = decycling_blocks(d1);
    let b_blocks = decycling_blocks(d2);
    for &a in &a_blocks {
        let a = SymMatGF2::from_upper_bits(n1, a);
        for &b in &b_blocks {
            let b = SymMatGF2::from_upper_bits(n2, b);
            for cross in 0..1u64 << (n1 * n2) {
                let m = with_cross(&a, &b, cross);
                if is_decycling_matrix(&d, &m).expect("sizes match") {
                    f(&m);
                }
            }
        }
    }
}

/// Largest first operand and total order for exhaustive enumeration.
const MAX_SCHUR_N1: usize = 4;
const MAX_SCHUR_TOTAL: usize = 6;
/// Largest operand order for sampling.
const MAX_SAMPLED_N: usize = 5;

/// Draw `samples` decycling matrices per operand pair, uniformly, from a
/// generator seeded with `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub samples: u64,
}

/// Accumulates probe records into a report.
struct Tally {
    report: ScanReport,
    /// 3x3 pattern (upper bits) decycling C3 -> (some B' failed, first instance)
    patterns: BTreeMap<u64, (bool, Vec<String>)>,
}

impl Tally {
    fn record(&mut self, d1: &Tournament, d2: &Tournament, m: &SymMatGF2) {
        let n1 = d1.n();
        let report = &mut self.report;
        report.instances_checked += 1;
        let a = m.principal(&(0..n1).collect::<Vec<_>>());
        let r = a.rank();
        if r == 0 {
            report.tally("A = 0");
            return;
        }
        let inst = vec![d1.to_string(), d2.to_string()];
        for idx in (0..n1).combinations(r) {
            if a.principal(&idx).rank() != r {
                continue;
            }
            let rec = probe_unchecked(d1, d2, m, idx).expect("nonsingular block");
            let fails = !rec.b_prime_decycles;
            let cyclic = rec.a_prime_decycles_induced && !is_transitive_block(d1, &rec.a_indices);
            report.tally(format!(
                "{r}x{r}: A' decycles {} induced, B' {}",
                if cyclic { "cyclic" } else { "transitive" },
                if fails { "fails" } else { "decycles" }
            ));
            let replay = format!(
                "tourninv dijoin {d1} {d2}; matrix {}",
                serde_json::to_string(&m.to_rows()).expect("rows")
            );
            if let Some(c3) = rec.a_prime_decycles_c3 {
                report.tally(format!(
                    "3x3: A' decycles C3 = {c3}, B' decycles D2 = {}",
                    rec.b_prime_decycles
                ));
                report.assert_check(!fails || c3, || Violation {
                    statement: "B' fails to decycle D2 => A' decycles C3".into(),
                    instance: inst.clone(),
                    expected: "A' decycles C3".into(),
                    observed: format!("A' rows {:?}, B' fails", rec.a_indices),
                    replay: replay.clone(),
                });
                if c3 {
                    let key = upper_bits(&m.principal(&rec.a_indices));
                    let e = self.patterns.entry(key).or_insert((false, inst.clone()));
                    e.0 |= fails;
                }
            } else if fails && !cyclic {
                report.counterexamples.push(Violation {
                    statement: "B' fails to decycle D2 => A' decycles a non-transitive tournament".into(),
                    instance: inst.clone(),
                    expected: "A' decycles a cyclic induced tournament".into(),
                    observed: format!("A' rows {:?}", rec.a_indices),
                    replay,
                });
            }
        }
    }

    fn finish(mut self, rerun: String, assert_patterns: bool) -> ScanReport {
        for (bits, (seen_failure, first)) in std::mem::take(&mut self.patterns) {
            self.report.tally("3x3: patterns decycling C3");
            if !assert_patterns {
                if !seen_failure {
                    self.report.tally("3x3: patterns without a failing sample");
                }
                continue;
            }
            self.report.assert_check(seen_failure, || Violation {
                statement: "every 3x3 A' decycling C3 makes B' fail for some decycling matrix".into(),
                instance: first,
                expected: "some failing B'".into(),
                observed: format!("A' upper bits {bits:06b} never fails"),
                replay: rerun.clone(),
            });
        }
        self.report
    }
}

/// Runs the block-elimination probe on decycling matrices of every dijoin
/// `D1 -> D2` with `|D1| = n1` and `1 <= |D2| <= n2`, over every
/// nonsingular principal block of `A` of size `rank(A)`.
///
/// Without `sampling` every decycling matrix is visited. For 3x3 blocks
/// two statements are asserted: `B'` never fails to decycle `D2` unless
/// `A'` decycles the directed triangle, and (exhaustive runs with
/// `n2 >= 3`) every 3x3 pattern that decycles the triangle makes `B'` fail
/// for some matrix.
/// Other block sizes are evidence for the general question; a failure
/// where `A'` only decycles a transitive induced sub-tournament is a
/// counterexample.
pub fn scan_schur(n1: usize, n2: usize, sampling: Option<Sampling>) -> Result<ScanReport> {
    match sampling {
        None if n1 > MAX_SCHUR_N1 || n1 + n2 > MAX_SCHUR_TOTAL => {
            return Err(Error::SizeLimit(format!(
                "exhaustive block elimination needs n1 <= {MAX_SCHUR_N1} and n1 + n2 <= {MAX_SCHUR_TOTAL}"
            )))
        }
        Some(_) if n1.max(n2) > MAX_SAMPLED_N => {
            return Err(Error::SizeLimit(format!(
                "sampled block elimination needs operands of at most {MAX_SAMPLED_N} vertices"
            )))
        }
        _ => {}
    }
    let mut tally = Tally {
        report: ScanReport::new(ScanScope {
            scan: "schur".into(),
            n1: Some(n1),
            n2: Some(n2),
            seed: sampling.map(|s| s.seed),
            samples: sampling.map(|s| s.samples),
            ..Default::default()
        }),
        patterns: BTreeMap::new(),
    };
    let mut rng = sampling.map(|s| ChaCha8Rng::seed_from_u64(s.seed));
    for d1 in &iso_classes(n1)? {
        for size2 in 1..=n2 {
            for d2 in iso_classes(size2)? {
                match (&mut rng, sampling) {
                    (Some(rng), Some(s)) => {
                        for m in sample_decycling_matrices(d1, &d2, s.samples, rng) {
                            tally.record(d1, &d2, &m);
                        }
                    }
                    _ => for_each_decycling_matrix(d1, &d2, |m| tally.record(d1, &d2, m)),
                }
            }
        }
    }
    let mut rerun = format!("tourninv scan schur --n1 {n1} --n2 {n2}");
    if let Some(s) = sampling {
        rerun += &format!(" --seed {} --samples {}", s.seed, s.samples);
    }
    // a tournament on at most two vertices is acyclic whatever B' is
    Ok(tally.finish(rerun, sampling.is_none() && n2 >= 3))
}

/// Uniform samples from the decycling matrices of `d1 -> d2`: uniform
/// diagonal blocks that decycle their operands and a uniform cross block,
/// kept only if the whole matrix decycles the dijoin. Gives up after
/// `64 * count` draws.
fn sample_decycling_matrices(d1: &Tournament, d2: &Tournament, count: u64, rng: &mut ChaCha8Rng) -> Vec<SymMatGF2> {
    let (n1, n2) = (d1.n(), d2.n());
    let d = d1.dijoin(d2).expect("small");
    let a_blocks = decycling_blocks(d1);
    let b_blocks = decycling_blocks(d2);
    let mut out = Vec::new();
    for _ in 0..count.saturating_mul(64) {
        if out.len() as u64 == count {
            break;
        }
        let a = SymMatGF2::from_upper_bits(n1, a_blocks[rng.gen_range(0..a_blocks.len())]);
        let b = SymMatGF2::from_upper_bits(n2, b_blocks[rng.gen_range(0..b_blocks.len())]);
        let m = with_cross(&a, &b, rng.gen::<u64>() & low_mask(n1 * n2));
        if is_decycling_matrix(&d, &m).expect("sizes match") {
            out.push(m);
        }
    }
    out
}

fn is_transitive_block(d1: &Tournament, idx: &[usize]) -> bool {
    d1.induced(idx.iter().fold(0, |acc, &i| acc | bit(i))).is_transitive()
}

fn upper_bits(m: &SymMatGF2) -> u64 {
    let n = m.n();
    let mut bits = 0u64;
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            bits |= (m.get(i, j) as u64) << k;
            k += 1;
        }
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decycling::family_to_matrix;
    use crate::digraph::VertexFamily;
    use crate::search::{solve_inv, SearchBudget};

    #[test]
    fn block_diagonal_leaves_b_unchanged() {
        let c3 = Tournament::c3();
        let a = family_to_matrix(&VertexFamily::from_lists(3, &[vec![0, 1]]).unwrap());
        let m = SymMatGF2::block_diag(&a, &a);
        let rec = schur_probe(&c3, &c3, &m).unwrap();
        assert_eq!(rec.b_prime, a);
        assert!(rec.b_prime_decycles);
        assert!(rec.a_prime_decycles_induced);
        assert_eq!(rec.a_rank, 1);
        assert_eq!(rec.a_prime_decycles_c3, None);
    }

    #[test]
    fn optimal_certificate_probe() {
        let c3 = Tournament::c3();
        let d = c3.dijoin(&c3).unwrap();
        let sol = solve_inv(&d, &SearchBudget::default()).unwrap();
        let m = family_to_matrix(sol.certificate.family().unwrap());
        let rec = schur_probe(&c3, &c3, &m).unwrap();
        assert_eq!(rec.a_rank, m.principal(&[0, 1, 2]).rank());
        assert!(rec.a_prime_decycles_induced);
    }

    #[test]
    fn rejects_non_decycling_input() {
        let c3 = Tournament::c3();
        assert!(schur_probe(&c3, &c3, &SymMatGF2::zeros(6)).is_err());
        assert!(schur_probe(&c3, &c3, &SymMatGF2::zeros(5)).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let t2 = Tournament::transitive(2).unwrap();
        let c3 = Tournament::c3();
        let d = c3.dijoin(&t2).unwrap();
        let mut fast = Vec::new();
        for_each_decycling_matrix(&c3, &t2, |m| fast.push(upper_bits(m)));
        fast.sort_unstable();
        let slow: Vec<u64> = (0..1u64 << 15)
            .map(|b| SymMatGF2::from_upper_bits(5, b))
            .filter(|m| is_decycling_matrix(&d, m).unwrap())
            .map(|m| upper_bits(&m))
            .sorted()
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn small_scan() {
        let r = scan_schur(3, 1, None).unwrap();
        assert!(r.instances_checked > 0);
        assert!(r.holds());
        assert!(scan_schur(5, 1, None).is_err());
        assert!(scan_schur(6, 1, Some(Sampling { seed: 1, samples: 1 })).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let s = Some(Sampling { seed: 7, samples: 20 });
        let a = scan_schur(3, 3, s).unwrap();
        assert_eq!(a, scan_schur(3, 3, s).unwrap());
        assert!(a.holds());
        assert_eq!(a.scope.seed, Some(7));
        let c3 = Tournament::c3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = c3.dijoin(&c3).unwrap();
        for m in sample_decycling_matrices(&c3, &c3, 50, &mut rng) {
            assert!(is_decycling_matrix(&d, &m).unwrap());
        }
    }
}
