//! Dense square linear assignment by shortest augmenting paths, O(n^3).
//!
//! Forbidden pairs carry an infinite cost. After solving, the optimal dual
//! potentials define the equality graph of pairs with reduced cost at most
//! `tie_eps`; every optimal assignment lives in it, so the lexicographically
//! smallest optimal assignment is found by a greedy pass over that graph.

pub(crate) struct Lap {
    /// `row_to_col[i]` is the column assigned to row `i`.
    pub row_to_col: Vec<usize>,
}

struct Duals {
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Solves the `n x n` problem with row-major `costs`. `None` when no finite
/// perfect assignment exists.
pub(crate) fn solve(n: usize, costs: &[f64], tie_eps: f64) -> Option<Lap> {
    debug_assert_eq!(costs.len(), n * n);
    if n == 0 {
        return Some(Lap { row_to_col: Vec::new() });
    }
    let (mut row_to_col, duals) = hungarian(n, costs)?;
    lex_canonicalize(n, costs, &duals, tie_eps, &mut row_to_col);
    Some(Lap { row_to_col })
}

fn hungarian(n: usize, costs: &[f64]) -> Option<(Vec<usize>, Duals)> {
    let inf = f64::INFINITY;
    // 1-based with a sentinel column 0, as in the classic formulation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = &costs[(i0 - 1) * n..i0 * n];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !delta.is_finite() {
                return None;
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    let duals = Duals { u: u[1..].to_vec(), v: v[1..].to_vec() };
    Some((row_to_col, duals))
}

fn lex_canonicalize(n: usize, costs: &[f64], duals: &Duals, tie_eps: f64, row_to_col: &mut [usize]) {
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    let c = costs[i * n + j];
                    c.is_finite() && c - duals.u[i] - duals.v[j] <= tie_eps
                })
                .collect()
        })
        .collect();
    let mut col_to_row = vec![0usize; n];
    for (i, &j) in row_to_col.iter().enumerate() {
        col_to_row[j] = i;
    }
    let mut fixed_col = vec![false; n];
    let mut visited = vec![false; n];

    for i in 0..n {
        let current = row_to_col[i];
        for &j in tight[i].iter().take_while(|&&j| j < current) {
            if fixed_col[j] {
                continue;
            }
            let other = col_to_row[j];
            visited.iter_mut().for_each(|b| *b = false);
            visited[j] = true;
            // Re-home `other` onto `current` through an alternating path
            // among rows that are not yet fixed.
            if augment(other, current, &tight, &fixed_col, &mut visited, row_to_col, &mut col_to_row) {
                row_to_col[i] = j;
                col_to_row[j] = i;
                break;
            }
        }
        fixed_col[row_to_col[i]] = true;
    }
}

fn augment(
    row: usize,
    target: usize,
    tight: &[Vec<usize>],
    fixed_col: &[bool],
    visited: &mut [bool],
    row_to_col: &mut [usize],
    col_to_row: &mut [usize],
) -> bool {
    for &c in &tight[row] {
        if fixed_col[c] || visited[c] {
            continue;
        }
        visited[c] = true;
        if c == target {
            row_to_col[row] = c;
            col_to_row[c] = row;
            return true;
        }
        let next = col_to_row[c];
        if augment(next, target, tight, fixed_col, visited, row_to_col, col_to_row) {
            row_to_col[row] = c;
            col_to_row[c] = row;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(lap: &Lap, n: usize, c: &[f64]) -> f64 {
        lap.row_to_col.iter().enumerate().map(|(i, &j)| c[i * n + j]).sum()
    }

    #[test]
    fn small_integer_instance() {
        let c = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let lap = solve(3, &c, 1e-9).unwrap();
        assert_eq!(cost(&lap, 3, &c), 5.0);
    }

    #[test]
    fn ties_resolve_to_lexicographically_smallest() {
        let c = [1.0; 9];
        let lap = solve(3, &c, 1e-9).unwrap();
        assert_eq!(lap.row_to_col, vec![0, 1, 2]);
        // Row 1 must take column 0; rows 0 and 2 split columns 1 and 2.
        let c = [5.0, 1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 1.0, 1.0];
        let lap = solve(3, &c, 1e-9).unwrap();
        assert_eq!(lap.row_to_col, vec![1, 0, 2]);
    }

    #[test]
    fn forbidden_pairs() {
        let inf = f64::INFINITY;
        let c = [inf, 1.0, 2.0, inf];
        let lap = solve(2, &c, 1e-9).unwrap();
        assert_eq!(lap.row_to_col, vec![1, 0]);
        let c = [inf, 1.0, inf, 2.0];
        assert!(solve(2, &c, 1e-9).is_none());
    }

    #[test]
    fn empty_instance() {
        assert!(solve(0, &[], 1e-9).unwrap().row_to_col.is_empty());
    }
}
