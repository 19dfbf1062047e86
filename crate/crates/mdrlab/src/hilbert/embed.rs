//! Embedding of one- and two-site operators into a composite space.

use super::matrix::{CMatrix, Complex64};

/// Mixed-radix digits of `index` for the given dims, most significant first.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Embeds a single-site operator at `site` (0-based) of a composite space.
pub fn embed_site(op: &CMatrix, site: usize, dims: &[usize]) -> CMatrix {
    assert!(site < dims.len(), "site out of range");
    assert_eq!(op.rows(), dims[site], "operator does not fit the site");
    let mut out = CMatrix::identity(1);
    for (k, &d) in dims.iter().enumerate() {
        let factor = if k == site { op.clone() } else { CMatrix::identity(d) };
        out = out.kron(&factor);
    }
    out
}

/// Embeds a two-site operator on the ordered pair (site_a, site_b).
///
/// The operator is indexed with site_a most significant; the sites need not
/// be adjacent or ordered within the composite space.
pub fn embed_pair(op: &CMatrix, site_a: usize, site_b: usize, dims: &[usize]) -> CMatrix {
    assert!(site_a != site_b, "sites must differ");
    assert!(site_a < dims.len() && site_b < dims.len(), "site out of range");
    let (da, db) = (dims[site_a], dims[site_b]);
    assert_eq!(op.rows(), da * db, "operator does not fit the site pair");
    let total: usize = dims.iter().product();
    let mut out = CMatrix::zeros(total, total);
    for row in 0..total {
        let rd = digits(row, dims);
        for col in 0..total {
            let cd = digits(col, dims);
            let mut spectator_match = true;
            for k in 0..dims.len() {
                if k != site_a && k != site_b && rd[k] != cd[k] {
                    spectator_match = false;
                    break;
                }
            }
            if !spectator_match {
                continue;
            }
            let op_row = rd[site_a] * db + rd[site_b];
            let op_col = cd[site_a] * db + cd[site_b];
            let v = op.get(op_row, op_col);
            if v != Complex64::new(0.0, 0.0) {
                out.set(row, col, v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{pauli_x, pauli_z};
    use super::super::sample::random_unitary;
    use super::*;

    #[test]
    fn embed_site_matches_explicit_kron() {
        let z = pauli_z();
        let expect = CMatrix::identity(2).kron(&z).kron(&CMatrix::identity(2));
        let got = embed_site(&z, 1, &[2, 2, 2]);
        assert!(got.max_abs_diff(&expect) == 0.0);
    }

    #[test]
    fn embed_pair_on_adjacent_ordered_sites_matches_kron() {
        let op = pauli_z().kron(&pauli_x());
        let expect = op.kron(&CMatrix::identity(3));
        let got = embed_pair(&op, 0, 1, &[2, 2, 3]);
        assert!(got.max_abs_diff(&expect) == 0.0);
    }

    #[test]
    fn embed_pair_skipping_middle_site_agrees_with_commuting_factors() {
        // Z on site 0 and X on site 2 commute, so the pair embedding of
        // Z(x)X must equal the product of single-site embeddings.
        let op = pauli_z().kron(&pauli_x());
        let got = embed_pair(&op, 0, 2, &[2, 2, 2]);
        let expect = embed_site(&pauli_z(), 0, &[2, 2, 2]).mul(&embed_site(&pauli_x(), 2, &[2, 2, 2]));
        assert!(got.max_abs_diff(&expect) == 0.0);
    }

    #[test]
    fn embed_pair_preserves_unitarity_and_reversed_order() {
        let u = random_unitary(4, 3);
        let e = embed_pair(&u, 2, 0, &[2, 3, 2]);
        assert!(e.unitarity_residual() < 1e-12);
    }
}
