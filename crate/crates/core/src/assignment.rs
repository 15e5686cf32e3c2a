//! Linear assignment on square cost matrices.
//!
//! [`hungarian`] is the O(n³) shortest-augmenting-path variant with row and
//! column potentials. [`lexicographic_optimum`] layers a deterministic
//! tie-break on top: among co-optimal assignments it returns the one whose
//! image `(σ(0), σ(1), …)` is lexicographically smallest. [`exhaustive`]
//! enumerates all permutations and is kept as the reference for small `n`.

/// Tolerance for deciding that two assignment costs tie.
pub const TIE_TOL: f64 = 1e-12;

/// Minimum-cost assignment for an `n x n` row-major matrix.
///
/// Returns `assign` with `assign[row] = column` and the total cost.
pub fn hungarian(cost: &[f64], n: usize) -> (Vec<usize>, f64) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based indexing with a virtual column 0, following the classic
    // potential formulation.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        matched_row[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = matched_row[col0];
            let mut delta = inf;
            let mut col1 = 0usize;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let cur = cost[(r0 - 1) * n + (col - 1)] - u[r0] - v[col];
                if cur < minv[col] {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[matched_row[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if matched_row[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            matched_row[col0] = matched_row[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for col in 1..=n {
        assign[matched_row[col] - 1] = col - 1;
    }
    let total = assignment_cost(cost, n, &assign);
    (assign, total)
}

/// Sum of `cost[i][assign[i]]`, accumulated in row order.
pub fn assignment_cost(cost: &[f64], n: usize, assign: &[usize]) -> f64 {
    assign.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum()
}

fn submatrix(cost: &[f64], n: usize, rows: &[usize], cols: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for &r in rows {
        for &c in cols {
            out.push(cost[r * n + c]);
        }
    }
    out
}

/// Optimal assignment with the lexicographically smallest image among ties.
///
/// Rows are fixed in order; each takes the smallest free column for which an
/// optimal completion of the remaining rows still reaches the global optimum.
/// Costs `O(n^5)` in the worst case, which is fine for the map counts IFSs
/// carry.
pub fn lexicographic_optimum(cost: &[f64], n: usize) -> (Vec<usize>, f64) {
    let (_, best) = hungarian(cost, n);
    let tol = TIE_TOL * best.abs().max(1.0);
    let mut assign = Vec::with_capacity(n);
    let mut free: Vec<usize> = (0..n).collect();
    let mut fixed = 0.0;
    for row in 0..n {
        let rest_rows: Vec<usize> = (row + 1..n).collect();
        let mut chosen = None;
        for (slot, &col) in free.iter().enumerate() {
            let rest_cols: Vec<usize> = free.iter().copied().filter(|&c| c != col).collect();
            let sub = submatrix(cost, n, &rest_rows, &rest_cols);
            let (_, rest) = hungarian(&sub, rest_rows.len());
            if fixed + cost[row * n + col] + rest <= best + tol {
                chosen = Some(slot);
                break;
            }
        }
        // Some column always completes to the optimum; fall back to the
        // cheapest one if rounding hides it.
        let slot = chosen.unwrap_or_else(|| {
            (0..free.len())
                .min_by(|&a, &b| cost[row * n + free[a]].total_cmp(&cost[row * n + free[b]]))
                .unwrap()
        });
        let col = free.remove(slot);
        fixed += cost[row * n + col];
        assign.push(col);
    }
    let total = assignment_cost(cost, n, &assign);
    (assign, total)
}

/// Exhaustive minimum over all `n!` permutations, visited in lexicographic
/// order so the first minimum found is the lexicographically smallest.
pub fn exhaustive(cost: &[f64], n: usize) -> (Vec<usize>, f64) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (perm.clone(), assignment_cost(cost, n, &perm));
    while next_permutation(&mut perm) {
        let c = assignment_cost(cost, n, &perm);
        if c < best.1 {
            best = (perm.clone(), c);
        }
    }
    best
}

/// Advances to the next permutation in lexicographic order.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_known_problem() {
        let c = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let (a, cost) = hungarian(&c, 3);
        assert_eq!(cost, 5.0);
        assert_eq!(assignment_cost(&c, 3, &a), 5.0);
        assert_eq!(exhaustive(&c, 3).1, 5.0);
    }

    #[test]
    fn ties_resolve_to_identity() {
        let c = vec![0.25; 16];
        let (a, cost) = lexicographic_optimum(&c, 4);
        assert_eq!(a, vec![0, 1, 2, 3]);
        assert_eq!(cost, 1.0);
    }

    #[test]
    fn partial_tie_prefers_smaller_image() {
        // identity and swap both cost 1, third row forced.
        let c = [0.5, 0.5, 9.0, 0.5, 0.5, 9.0, 9.0, 9.0, 0.0];
        assert_eq!(lexicographic_optimum(&c, 3).0, vec![0, 1, 2]);
        let c = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(lexicographic_optimum(&c, 2).0, vec![1, 0]);
    }

    #[test]
    fn permutation_enumeration_count() {
        let mut p: Vec<usize> = (0..5).collect();
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 120);
        assert!(!next_permutation(&mut []));
    }

    #[test]
    fn empty_problem() {
        assert_eq!(hungarian(&[], 0), (vec![], 0.0));
        assert_eq!(lexicographic_optimum(&[], 0), (vec![], 0.0));
    }
}
