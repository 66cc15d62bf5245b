//! Independent LP oracle: enumerate every basic solution of
//! `min c·x, A x ≥ d, x ≥ 0` and keep the cheapest feasible one.
#![allow(dead_code)]

use resourcetune::rates::CoveringLp;

/// Optimal objective by brute force, or `None` when infeasible. Meant for at
/// most a handful of variables and rows.
pub fn vertex_enumeration(lp: &CoveringLp) -> Option<f64> {
    let n = lp.costs.len();
    let m = lp.rows();
    if n == 0 {
        return lp.demands.iter().all(|&d| d <= 0.0).then_some(0.0);
    }
    // All constraints as rows `g·x ≥ h`: covering rows then `x_j ≥ 0`.
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m + n);
    for i in 0..m {
        let g = (0..n)
            .map(|j| if lp.columns[j].contains(&(i as u32)) { 1.0 } else { 0.0 })
            .collect();
        rows.push((g, lp.demands[i]));
    }
    for j in 0..n {
        let mut g = vec![0.0; n];
        g[j] = 1.0;
        rows.push((g, 0.0));
    }

    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        if let Some(x) = solve_equalities(&rows, &subset, n) {
            let feasible = rows
                .iter()
                .all(|(g, h)| g.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() >= h - 1e-9);
            if feasible {
                let obj: f64 = lp.costs.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        if !next_subset(&mut subset, rows.len()) {
            break;
        }
    }
    best
}

fn next_subset(s: &mut [usize], total: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < total - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the square system of the chosen rows held at equality; `None`
/// when singular.
fn solve_equalities(rows: &[(Vec<f64>, f64)], chosen: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = chosen
        .iter()
        .map(|&r| {
            let mut row = rows[r].0.clone();
            row.push(rows[r].1);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for k in col..=n {
                        a[r][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}
