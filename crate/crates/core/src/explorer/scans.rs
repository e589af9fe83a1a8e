//! Exhaustive checks over pairs and triples of small tournaments.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::canon::{canonical_form, iso_classes, MAX_ISO_N};
use super::report::{Inconclusive, ScanReport, ScanScope, Violation};
use crate::digraph::Tournament;
use crate::error::{Error, Result};
use crate::search::{solve_inv, solve_tmr, SearchBudget, SearchError};

/// Solver results for one tournament.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Facts {
    pub inv: usize,
    pub tmr: usize,
    /// Some minimum-rank decycling matrix has a nonzero diagonal entry.
    pub nonzero_diagonal: bool,
}

impl Facts {
    pub fn compute(t: &Tournament, budget: &SearchBudget) -> std::result::Result<Self, SearchError> {
        let inv = solve_inv(t.as_graph(), budget)?.value;
        let tmr = solve_tmr(t, budget)?;
        Ok(Self {
            inv,
            tmr: tmr.value,
            nonzero_diagonal: tmr.nonzero_diagonal,
        })
    }

    /// `inv = tmr + 1`.
    pub fn has_gap(&self) -> bool {
        self.inv == self.tmr + 1
    }
}

/// Isomorphism classes of every order up to a bound, with their facts.
pub struct FactTable {
    classes: Vec<Vec<Tournament>>,
    facts: Vec<Vec<std::result::Result<Facts, SearchError>>>,
}

impl FactTable {
    pub fn build(max_n: usize, budget: &SearchBudget, workers: usize) -> Result<Self> {
        let classes = (0..=max_n).map(iso_classes).collect::<Result<Vec<_>>>()?;
        let flat: Vec<&Tournament> = classes.iter().flatten().collect();
        let budget = instance_budget(budget, workers);
        let mut computed = run_parallel(&flat, workers, |t| Facts::compute(t, &budget)).into_iter();
        let facts = classes
            .iter()
            .map(|c| computed.by_ref().take(c.len()).collect())
            .collect();
        Ok(Self { classes, facts })
    }

    pub fn max_n(&self) -> usize {
        self.classes.len() - 1
    }

    pub fn classes(&self, n: usize) -> &[Tournament] {
        &self.classes[n]
    }

    pub fn facts(&self, n: usize, i: usize) -> std::result::Result<Facts, &SearchError> {
        self.facts[n][i].as_ref().copied()
    }

    fn index_of(&self, t: &Tournament) -> Option<usize> {
        let code = canonical_form(t).ok()?.code;
        self.classes.get(t.n())?.iter().position(|c| c.code() == code)
    }

    /// Records the trichotomy checks on every class and tallies the
    /// diagonal behaviour of minimum-rank matrices.
    fn check_classes(&self, report: &mut ScanReport) {
        for (n, list) in self.classes.iter().enumerate() {
            for (i, t) in list.iter().enumerate() {
                let f = match self.facts(n, i) {
                    Ok(f) => f,
                    Err(e) => {
                        report.inconclusive.push(Inconclusive::from_error(t.to_string(), "inv/tmr", e));
                        continue;
                    }
                };
                let transitive = t.is_transitive();
                let ok = if f.inv == f.tmr {
                    transitive || f.nonzero_diagonal
                } else {
                    f.has_gap() && f.tmr % 2 == 0 && !f.nonzero_diagonal
                };
                report.assert_check(ok, || Violation {
                    statement: "inv = tmr with a nonzero-diagonal optimum, or inv = tmr + 1 with even tmr and only zero-diagonal optima".into(),
                    instance: vec![t.to_string()],
                    expected: "trichotomy".into(),
                    observed: format!("inv = {}, tmr = {}, nonzero diagonal = {}", f.inv, f.tmr, f.nonzero_diagonal),
                    replay: format!("tourninv tmr {t}"),
                });
                if !transitive {
                    let kind = if f.nonzero_diagonal { "nonzero" } else { "zero only" };
                    report.tally(format!("classes n={n}: minimum-rank diagonal {kind}"));
                }
                if f.has_gap() {
                    report.tally(format!("classes n={n}: inv = tmr + 1"));
                }
            }
        }
    }
}

fn instance_budget(budget: &SearchBudget, workers: usize) -> SearchBudget {
    let mut b = budget.clone();
    if workers > 1 {
        b.parallel_width = 1;
    }
    b
}

/// Maps `f` over `items` on `workers` threads, keeping input order.
fn run_parallel<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.par_iter().map(f).collect())
}

/// An ordered pair of classes `(size, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Pair {
    a: (usize, usize),
    b: (usize, usize),
}

fn pairs(table: &FactTable, n1: usize, n2: usize, max_total: Option<usize>) -> Vec<Pair> {
    let mut out = Vec::new();
    for a in 1..=n1 {
        for b in 1..=n2 {
            if max_total.is_some_and(|m| a + b > m) {
                continue;
            }
            for i in 0..table.classes(a).len() {
                for j in 0..table.classes(b).len() {
                    out.push(Pair { a: (a, i), b: (b, j) });
                }
            }
        }
    }
    out
}

fn class_limit(n: usize) -> Result<()> {
    if n > MAX_ISO_N {
        Err(Error::SizeLimit(format!(
            "operands are enumerated up to {MAX_ISO_N} vertices, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn joined(parts: &[&Tournament]) -> Tournament {
    let owned: Vec<Tournament> = parts.iter().map(|&t| t.clone()).collect();
    Tournament::njoin(&owned).expect("operands are small")
}

fn names(parts: &[&Tournament]) -> Vec<String> {
    parts.iter().map(|t| t.to_string()).collect()
}

/// Checks the dijoin and n-join theorems on every pair of classes with
/// `n1 + n2 <= max_n`, and the 3-join identities on every triple within
/// the same size whose premises hold.
pub fn verify_dijoin_theorems(max_n: usize, budget: &SearchBudget, workers: usize) -> Result<ScanReport> {
    class_limit(max_n.saturating_sub(1))?;
    let table = FactTable::build(max_n.saturating_sub(1), budget, workers)?;
    let scope = ScanScope {
        scan: "verify-theorems".into(),
        max_n: Some(max_n),
        node_limit: budget.node_limit,
        ..Default::default()
    };
    let mut report = ScanReport::new(scope);
    table.check_classes(&mut report);
    let t = |(n, i): (usize, usize)| &table.classes(n)[i];
    let facts = |(n, i): (usize, usize)| table.facts(n, i).ok();

    let top = table.max_n();
    let all_pairs = pairs(&table, top, top, Some(max_n));
    let ib = instance_budget(budget, workers);
    let pair_inv = run_parallel(&all_pairs, workers, |p| {
        let d = t(p.a).dijoin(t(p.b)).expect("small");
        solve_inv(d.as_graph(), &ib).map(|s| s.value)
    });
    let index: HashMap<Pair, usize> = all_pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let inv_of = |p: Pair| index.get(&p).and_then(|&k| pair_inv[k].as_ref().ok().copied());
    let c3 = if top >= 3 { table.index_of(&Tournament::c3()).map(|i| (3, i)) } else { None };

    for (k, &p) in all_pairs.iter().enumerate() {
        let (d1, d2) = (t(p.a), t(p.b));
        let d = d1.dijoin(d2).expect("small");
        let x = match &pair_inv[k] {
            Ok(x) => *x,
            Err(e) => {
                report.inconclusive.push(Inconclusive::from_error(d.to_string(), "inv", e));
                continue;
            }
        };
        let (Some(f1), Some(f2)) = (facts(p.a), facts(p.b)) else {
            continue;
        };
        report.instances_checked += 1;
        let inst = names(&[d1, d2]);
        let replay = format!("tourninv inv {d}");
        let violation = |statement: &str, expected: String| Violation {
            statement: statement.into(),
            instance: inst.clone(),
            expected,
            observed: format!("inv(D1->D2) = {x}"),
            replay: replay.clone(),
        };
        let r = &mut report;
        if f1.inv == 0 || f2.inv == 0 {
            let want = f1.inv + f2.inv;
            r.tally("checked: transitive operand");
            r.assert_check(x == want, || {
                violation("a transitive operand adds nothing: inv(D1->D2) = inv(D1) + inv(D2)", want.to_string())
            });
        }
        if f1.inv == 2 {
            let want = f2.tmr + 2;
            r.tally("checked: inv(D1)=2 gives tmr(D2)+2");
            r.assert_check(x == want, || violation("inv(D1) = 2 => inv(D1->D2) = tmr(D2) + 2", want.to_string()));

            let k2 = f2.inv;
            let shape = x == k2 + 2 || (x == k2 + 1 && k2 % 2 == 1);
            r.assert_check(shape, || {
                violation(
                    "inv(D1) = 2 => inv(D1->D2) is k+2, or k+1 with k = inv(D2) odd",
                    format!("{} or {} (odd k)", k2 + 2, k2 + 1),
                )
            });
            if let Some(c3) = c3 {
                if let Some(y) = inv_of(Pair { a: c3, b: p.b }) {
                    r.tally("checked: inv(D1)=2 drop iff inv(C3->D2)=inv(D2)");
                    r.assert_check((x == k2 + 1) == (y == k2), || {
                        violation(
                            "inv(D1) = 2 => (inv(D1->D2) = inv(D2) + 1 <=> inv(C3->D2) = inv(D2))",
                            format!("drop = {}", y == k2),
                        )
                    });
                }
            }
        }
        if f1.inv == 1 || f1.inv == 2 {
            if let Some(y) = inv_of(Pair { a: p.b, b: p.a }) {
                r.tally("checked: switch");
                r.assert_check(x == y, || {
                    violation("inv(D1) in {1,2} => inv(D1->D2) = inv(D2->D1)", format!("inv(D2->D1) = {y}"))
                });
            }
            let lhs = if f1.inv == 1 { x == f2.inv } else { x == f2.inv + 1 };
            r.tally(format!("checked: equivalence with inv(D1)={}", f1.inv));
            r.assert_check(lhs == f2.has_gap(), || {
                violation(
                    "inv(D1) = 1: inv(D1->D) = inv(D) <=> inv(D) = tmr(D) + 1; inv(D1) = 2: inv(D1->D) = inv(D) + 1 <=> same",
                    format!("gap(D2) = {}", f2.has_gap()),
                )
            });
        }
        if let Some(want) = njoin_prediction(&[f1, f2]) {
            r.tally("checked: n-join formula, n=2");
            r.assert_check(x == want, || violation("n-join formula", want.to_string()));
        }
    }

    // triples
    let mut triples = Vec::new();
    for p in &all_pairs {
        for c in 1..=max_n.saturating_sub(p.a.0 + p.b.0).min(top) {
            for l in 0..table.classes(c).len() {
                let parts = [p.a, p.b, (c, l)];
                let Some(fs) = parts.iter().map(|&q| facts(q)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                let three_join = (1..=2).contains(&fs[0].inv) && (1..=2).contains(&fs[1].inv);
                if three_join || njoin_prediction(&fs).is_some() {
                    triples.push(parts);
                }
            }
        }
    }
    let triple_inv = run_parallel(&triples, workers, |parts| {
        let d = joined(&parts.map(&t));
        solve_inv(d.as_graph(), &ib).map(|s| s.value)
    });
    for (parts, res) in triples.iter().zip(&triple_inv) {
        let ts = parts.map(&t);
        let d = joined(&ts);
        let x = match res {
            Ok(x) => *x,
            Err(e) => {
                report.inconclusive.push(Inconclusive::from_error(d.to_string(), "inv", e));
                continue;
            }
        };
        let fs: Vec<Facts> = parts.iter().map(|&q| facts(q).expect("filtered")).collect();
        report.instances_checked += 1;
        let inst = names(&ts);
        let replay = format!("tourninv inv {d}");
        let violation = |statement: &str, expected: String| Violation {
            statement: statement.into(),
            instance: inst.clone(),
            expected,
            observed: format!("inv([D1,D2,D3]) = {x}"),
            replay: replay.clone(),
        };
        if (1..=2).contains(&fs[0].inv) && (1..=2).contains(&fs[1].inv) {
            if let Some(y) = inv_of(Pair { a: parts[1], b: parts[2] }) {
                let want = fs[0].inv + y;
                let r = &mut report;
                r.tally("checked: 3-join");
                r.assert_check(x == want, || {
                    violation(
                        "inv(D1), inv(D2) in {1,2} => inv([D1,D2,D3]) = inv(D1) + inv(D2->D3)",
                        want.to_string(),
                    )
                });
            }
        }
        if let Some(want) = njoin_prediction(&fs) {
            let r = &mut report;
            r.tally("checked: n-join formula, n=3");
            r.assert_check(x == want, || violation("n-join formula", want.to_string()));
        }
    }
    Ok(report)
}

/// The n-join formula: if one part `j` has `inv >= 1` and every other part
/// has `inv` in `{1,2}`, the join has `sum(inv) - 1` inversions when
/// `inv(D_j) = tmr(D_j) + 1` and `sum(inv)` otherwise. `None` when the
/// premise fails.
fn njoin_prediction(fs: &[Facts]) -> Option<usize> {
    let small = |f: &Facts| f.inv == 1 || f.inv == 2;
    let j = (0..fs.len()).find(|&j| fs[j].inv >= 1 && fs.iter().enumerate().all(|(i, f)| i == j || small(f)))?;
    let sum: usize = fs.iter().map(|f| f.inv).sum();
    Some(sum - fs[j].has_gap() as usize)
}

fn pair_scan_setup(
    scan: &str,
    n1: usize,
    n2: usize,
    max_total: Option<usize>,
    budget: &SearchBudget,
    workers: usize,
) -> Result<(FactTable, Vec<Pair>, ScanReport)> {
    class_limit(n1.max(n2))?;
    let table = FactTable::build(n1.max(n2), budget, workers)?;
    let list = pairs(&table, n1, n2, max_total);
    let mut report = ScanReport::new(ScanScope {
        scan: scan.into(),
        max_n: max_total,
        n1: Some(n1),
        n2: Some(n2),
        node_limit: budget.node_limit,
        ..Default::default()
    });
    table.check_classes(&mut report);
    Ok((table, list, report))
}

/// Compares `tmr(D1->D2)` with `tmr(D1) + tmr(D2)` on every pair with
/// `|D1| <= n1`, `|D2| <= n2` (and `|D1| + |D2| <= max_total` if given).
///
/// Asserted: additivity when either operand has `tmr <= 2`, the bound
/// `tmr(D1->D2) >= tmr(D2) + 2` when `tmr(D1) >= 2`, and
/// `tmr(D1->D2) >= max(tmr(D1), tmr(D2))`. Pairs with both ranks above 2
/// are evidence; a non-additive one is reported as a counterexample.
pub fn scan_tmr_additivity(
    n1: usize,
    n2: usize,
    max_total: Option<usize>,
    budget: &SearchBudget,
    workers: usize,
) -> Result<ScanReport> {
    let (table, list, mut report) = pair_scan_setup("tmr-additivity", n1, n2, max_total, budget, workers)?;
    let ib = instance_budget(budget, workers);
    let t = |(n, i): (usize, usize)| &table.classes(n)[i];
    let results = run_parallel(&list, workers, |p| {
        let d = t(p.a).dijoin(t(p.b)).expect("small");
        solve_tmr(&d, &ib).map(|s| s.value)
    });
    for (p, res) in list.iter().zip(results) {
        let (d1, d2) = (t(p.a), t(p.b));
        let d = d1.dijoin(d2).expect("small");
        let x = match res {
            Ok(x) => x,
            Err(e) => {
                report.inconclusive.push(Inconclusive::from_error(d.to_string(), "tmr", &e));
                continue;
            }
        };
        let (Ok(f1), Ok(f2)) = (table.facts(p.a.0, p.a.1), table.facts(p.b.0, p.b.1)) else {
            continue;
        };
        report.instances_checked += 1;
        let sum = f1.tmr + f2.tmr;
        let violation = |statement: &str, expected: String| Violation {
            statement: statement.into(),
            instance: names(&[d1, d2]),
            expected,
            observed: format!("tmr(D1->D2) = {x}"),
            replay: format!("tourninv tmr {d}"),
        };
        report.assert_check(x >= f1.tmr.max(f2.tmr), || {
            violation("tmr(D1->D2) >= max(tmr(D1), tmr(D2))", format!(">= {}", f1.tmr.max(f2.tmr)))
        });
        if f1.tmr >= 2 {
            report.assert_check(x >= f2.tmr + 2, || {
                violation("tmr(D1) >= 2 => tmr(D1->D2) >= tmr(D2) + 2", format!(">= {}", f2.tmr + 2))
            });
        }
        if f1.tmr <= 2 || f2.tmr <= 2 {
            report.tally(format!("asserted: min(tmr) = {}", f1.tmr.min(f2.tmr)));
            report.assert_check(x == sum, || {
                violation("tmr(D1) or tmr(D2) <= 2 => tmr(D1->D2) = tmr(D1) + tmr(D2)", sum.to_string())
            });
        } else {
            report.tally(format!("evidence: tmr pair ({}, {})", f1.tmr, f2.tmr));
            if x == sum {
                report.tally("evidence: additive");
            } else {
                report.tally("evidence: not additive");
                report
                    .counterexamples
                    .push(violation("tmr(D1->D2) = tmr(D1) + tmr(D2)", sum.to_string()));
            }
        }
    }
    Ok(report)
}

/// Checks `inv(D1->D2) >= inv(D1) + inv(D2) - 1` and tabulates when it is
/// tight against `inv(Di) = tmr(Di) + 1`.
///
/// Pairs where either operand has `inv <= 2` are covered by the n-join
/// formula and asserted in full. Other pairs are evidence: a broken bound,
/// or equality disagreeing with the gap condition, is a counterexample.
/// Pairs with a transitive operand are tallied but not used for the
/// equality condition, which cannot hold for them.
pub fn scan_inv_lower_bound(
    n1: usize,
    n2: usize,
    max_total: Option<usize>,
    budget: &SearchBudget,
    workers: usize,
) -> Result<ScanReport> {
    let (table, list, mut report) = pair_scan_setup("inv-lower-bound", n1, n2, max_total, budget, workers)?;
    let ib = instance_budget(budget, workers);
    let t = |(n, i): (usize, usize)| &table.classes(n)[i];
    let results = run_parallel(&list, workers, |p| {
        let d = t(p.a).dijoin(t(p.b)).expect("small");
        solve_inv(d.as_graph(), &ib).map(|s| s.value)
    });
    for (p, res) in list.iter().zip(results) {
        let (d1, d2) = (t(p.a), t(p.b));
        let d = d1.dijoin(d2).expect("small");
        let x = match res {
            Ok(x) => x,
            Err(e) => {
                report.inconclusive.push(Inconclusive::from_error(d.to_string(), "inv", &e));
                continue;
            }
        };
        let (Ok(f1), Ok(f2)) = (table.facts(p.a.0, p.a.1), table.facts(p.b.0, p.b.1)) else {
            continue;
        };
        report.instances_checked += 1;
        let violation = |statement: &str, expected: String| Violation {
            statement: statement.into(),
            instance: names(&[d1, d2]),
            expected,
            observed: format!("inv(D1->D2) = {x}"),
            replay: format!("tourninv inv {d}"),
        };
        let bound = (f1.inv + f2.inv).saturating_sub(1);
        let gap = f1.has_gap() || f2.has_gap();
        let tight = x == bound && f1.inv + f2.inv > 0;
        if f1.inv == 0 || f2.inv == 0 {
            report.tally("transitive operand");
            report.assert_check(x == f1.inv + f2.inv, || {
                violation("a transitive operand adds nothing", (f1.inv + f2.inv).to_string())
            });
            continue;
        }
        report.tally(format!(
            "{}, {}",
            if tight { "equality" } else { "strict" },
            if gap { "gap" } else { "no gap" }
        ));
        if f1.inv <= 2 || f2.inv <= 2 {
            let want = f1.inv + f2.inv - gap as usize;
            report.assert_check(x == want, || {
                violation("inv(D1) or inv(D2) <= 2 => n-join formula", want.to_string())
            });
        } else {
            report.tally("evidence pairs");
            if x < bound {
                report
                    .counterexamples
                    .push(violation("inv(D1->D2) >= inv(D1) + inv(D2) - 1", format!(">= {bound}")));
            } else if tight != gap {
                report.counterexamples.push(violation(
                    "inv(D1->D2) = inv(D1) + inv(D2) - 1 <=> some inv(Di) = tmr(Di) + 1",
                    format!("equality = {gap}"),
                ));
            }
        }
    }
    Ok(report)
}
