//! Explicit constructions: a decycling family for a dijoin built from
//! certificates of its operands, block-diagonal decycling matrices, and the
//! extension of an oriented graph to a tournament with the same inversion
//! number.

use crate::decycling::{is_decycling_family, is_decycling_matrix, matrix_to_family, Certificate, CertificateKind};
use crate::digraph::{bit, low_mask, OrientedGraph, Tournament, VertexFamily};
use crate::error::{Error, Result};
use crate::gf2::SymMatGF2;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCertificate(msg.into())
}

/// A decycling family for `d1 -> d2` with `|f1| + k` sets.
///
/// `cert2` selects the case:
///
/// * a family of `k` sets, or a matrix of rank `k` with a nonzero diagonal
///   entry (factored into `k` sets): the two families are concatenated;
/// * a zero-diagonal matrix of even rank `k`: its `k+1`-set factor has
///   vectors `y` with `y·y = 1·y = 0`, so every one of those sets can absorb
///   `X_1` (the first set of `f1`) without changing any dot product inside
///   `d1` or across the join. The result is
///   `Y_1 ∪ X_1, ..., Y_{k+1} ∪ X_1, X_2, ..., X_l`.
///
/// The second case needs `f1` nonempty.
pub fn compose_dijoin_family(
    d1: &OrientedGraph,
    f1: &VertexFamily,
    d2: &OrientedGraph,
    cert2: &Certificate,
) -> Result<VertexFamily> {
    if !is_decycling_family(d1, f1)? {
        return Err(invalid("first family does not decycle the first operand"));
    }
    cert2.check(d2).map_err(invalid)?;
    let n1 = d1.n();
    let n = n1 + d2.n();
    let left = f1.shifted(0, n)?;

    let (second, absorb) = match &cert2.kind {
        CertificateKind::Family(f2) => (f2.clone(), false),
        CertificateKind::Matrix(m) => {
            let f2 = matrix_to_family(m);
            let absorb = f2.len() == m.rank() + 1;
            (f2, absorb)
        }
    };
    let right = second.shifted(n1, n)?;

    let sets = if absorb {
        let (&x1, rest) = left.sets().split_first().ok_or_else(|| {
            invalid("a zero-diagonal matrix for the second operand needs a nonempty first family")
        })?;
        right
            .sets()
            .iter()
            .map(|&y| y | x1)
            .chain(rest.iter().copied())
            .collect()
    } else {
        left.sets().iter().chain(right.sets()).copied().collect()
    };
    let out = VertexFamily::new(n, sets)?;
    debug_assert!(is_decycling_family(&d1.dijoin(d2)?, &out)?);
    Ok(out)
}

/// `[[a, 0], [0, b]]`, a decycling matrix for `t1 -> t2` of rank
/// `rank(a) + rank(b)`.
pub fn block_diag_certificate(
    t1: &Tournament,
    a: &SymMatGF2,
    t2: &Tournament,
    b: &SymMatGF2,
) -> Result<SymMatGF2> {
    if !is_decycling_matrix(t1, a)? {
        return Err(invalid("first matrix does not decycle the first operand"));
    }
    if !is_decycling_matrix(t2, b)? {
        return Err(invalid("second matrix does not decycle the second operand"));
    }
    Ok(SymMatGF2::block_diag(a, b))
}

/// A tournament containing `d` that `family` still decycles.
///
/// Inverting `family` gives an acyclic `E`; its lexicographically least
/// topological order defines a transitive tournament containing `E`, and
/// inverting `family` there gives a tournament containing `d`.
pub fn extend_to_tournament(d: &OrientedGraph, family: &VertexFamily) -> Result<Tournament> {
    let e = d.invert(family)?;
    let order = e
        .topological_order()
        .ok_or_else(|| invalid("family does not decycle the graph"))?;
    let n = d.n();
    let mut out = vec![0u64; n];
    let mut later = low_mask(n);
    for &v in &order {
        later &= !bit(v);
        out[v] = later;
    }
    let transitive = OrientedGraph::from_out_masks(out);
    let result = Tournament::try_from(transitive.invert(family)?)?;
    debug_assert!(result.contains(d));
    Ok(result)
}

/// Family certificate for `d1 -> d2` built by [`compose_dijoin_family`].
pub fn dijoin_certificate(
    d1: &OrientedGraph,
    f1: &VertexFamily,
    d2: &OrientedGraph,
    cert2: &Certificate,
) -> Result<Certificate> {
    let family = compose_dijoin_family(d1, f1, d2, cert2)?;
    Certificate::from_family(&d1.dijoin(d2)?, family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decycling::family_to_matrix;
    use crate::search::{solve_inv, solve_tmr, SearchBudget};

    fn fam(n: usize, lists: &[&[usize]]) -> VertexFamily {
        VertexFamily::from_lists(n, &lists.iter().map(|l| l.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dijoin_of_two_triangles() {
        let c3 = Tournament::c3();
        let f = fam(3, &[&[0, 1]]);
        let cert2 = Certificate::from_family(&c3, f.clone()).unwrap();
        let out = compose_dijoin_family(&c3, &f, &c3, &cert2).unwrap();
        assert_eq!(out.len(), 2);
        let d = c3.dijoin(&c3).unwrap();
        assert!(is_decycling_family(&d, &out).unwrap());
        assert_eq!(solve_inv(&d, &SearchBudget::default()).unwrap().value, 2);
    }

    #[test]
    fn transitive_operands() {
        let c3 = Tournament::c3();
        let t2 = Tournament::transitive(2).unwrap();
        let f = fam(3, &[&[0, 1]]);
        let cert_t = Certificate::from_family(&t2, VertexFamily::empty(2)).unwrap();
        let out = compose_dijoin_family(&c3, &f, &t2, &cert_t).unwrap();
        assert_eq!(out, f.shifted(0, 5).unwrap());

        let cert_c = Certificate::from_family(&c3, f.clone()).unwrap();
        let out = compose_dijoin_family(&t2, &VertexFamily::empty(2), &c3, &cert_c).unwrap();
        assert_eq!(out, f.shifted(2, 5).unwrap());
    }

    #[test]
    fn matrix_certificate_with_nonzero_diagonal_is_concatenated() {
        let c3 = Tournament::c3();
        let m = family_to_matrix(&fam(3, &[&[0, 1]]));
        let cert2 = Certificate::from_matrix(&c3, m).unwrap();
        let out = compose_dijoin_family(&c3, &fam(3, &[&[1, 2]]), &c3, &cert2).unwrap();
        assert_eq!(out.len(), 2);
        assert!(is_decycling_family(&c3.dijoin(&c3).unwrap(), &out).unwrap());
    }

    #[test]
    fn zero_diagonal_case_absorbs_first_set() {
        // flipping {0,1} and {1,2} in 0->1->2->0 leaves 2 < 1 < 0
        let c3 = Tournament::c3();
        let mut m = SymMatGF2::zeros(3);
        m.set(0, 1, true);
        m.set(1, 2, true);
        assert!(!m.has_nonzero_diagonal());
        assert_eq!(m.rank(), 2);
        assert!(is_decycling_matrix(&c3, &m).unwrap());
        let cert2 = Certificate::from_matrix(&c3, m).unwrap();
        let f1 = fam(3, &[&[0, 1]]);
        let out = compose_dijoin_family(&c3, &f1, &c3, &cert2).unwrap();
        assert_eq!(out.len(), 1 + 2);
        assert!(is_decycling_family(&c3.dijoin(&c3).unwrap(), &out).unwrap());
        // every D2 set carries X_1 along
        for &s in &out.sets()[..3] {
            assert_eq!(s & 0b111, 0b011);
        }
        // without a first set there is nothing to absorb into
        let t3 = Tournament::transitive(3).unwrap();
        assert!(compose_dijoin_family(&t3, &VertexFamily::empty(3), &c3, &cert2).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let c3 = Tournament::c3();
        let cert = Certificate::from_family(&c3, fam(3, &[&[0, 1]])).unwrap();
        assert!(compose_dijoin_family(&c3, &VertexFamily::empty(3), &c3, &cert).is_err());
        let mut lie = cert.clone();
        lie.kind = CertificateKind::Family(VertexFamily::empty(3));
        lie.value = 0;
        assert!(compose_dijoin_family(&c3, &fam(3, &[&[0, 1]]), &c3, &lie).is_err());
    }

    #[test]
    fn block_diagonal_examples() {
        let c3 = Tournament::c3();
        let t3 = Tournament::transitive(3).unwrap();
        let a = family_to_matrix(&fam(3, &[&[0, 1]]));
        let m = block_diag_certificate(&c3, &a, &c3, &a).unwrap();
        assert_eq!(m.rank(), 2);
        let d = c3.dijoin(&c3).unwrap();
        assert!(is_decycling_matrix(&d, &m).unwrap());
        assert_eq!(solve_tmr(&d, &SearchBudget::default()).unwrap().value, 2);

        let z = SymMatGF2::zeros(3);
        let m = block_diag_certificate(&t3, &z, &t3, &z).unwrap();
        assert!(m.is_zero());
        assert!(is_decycling_matrix(&t3.dijoin(&t3).unwrap(), &m).unwrap());

        let m = block_diag_certificate(&t3, &z, &c3, &a).unwrap();
        assert_eq!(m.rank(), 1);
        assert!(is_decycling_matrix(&t3.dijoin(&c3).unwrap(), &m).unwrap());

        assert!(block_diag_certificate(&c3, &z, &c3, &a).is_err());
    }

    #[test]
    fn extension_examples() {
        let c3 = Tournament::c3();
        let f = fam(3, &[&[0, 1]]);
        assert_eq!(extend_to_tournament(&c3, &f).unwrap(), c3);

        let path: OrientedGraph = "3;0>1,1>2".parse().unwrap();
        let ext = extend_to_tournament(&path, &VertexFamily::empty(3)).unwrap();
        assert_eq!(ext.to_string(), "3:111");

        let cycle: OrientedGraph = "4;0>1,1>2,2>3,3>0".parse().unwrap();
        let f = fam(4, &[&[0, 1]]);
        let ext = extend_to_tournament(&cycle, &f).unwrap();
        assert!(ext.contains(&cycle));
        assert!(is_decycling_family(&ext, &f).unwrap());
        assert_eq!(solve_inv(&ext, &SearchBudget::default()).unwrap().value, 1);

        assert!(extend_to_tournament(&cycle, &VertexFamily::empty(4)).is_err());
    }
}
