//! Convergence acceleration for slowly convergent and oscillating series.

use num_complex::Complex64;

/// Sum of `Σ_{k≥0} (-1)^k a_k` by the Euler transform.
///
/// The first `direct` terms are summed as given; the alternating tail
/// `(-1)^direct Σ_j (-1)^j a_{direct+j}` is replaced by
/// `Σ_n (-1)^n Δ^n a_direct / 2^{n+1}` with `order` difference levels.
pub fn euler_alternating<F: Fn(usize) -> Complex64>(a: F, direct: usize, order: usize) -> Complex64 {
    let mut head = Complex64::new(0.0, 0.0);
    for k in 0..direct {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        head += a(k) * sign;
    }
    let mut diffs: Vec<Complex64> = (0..=order).map(|j| a(direct + j)).collect();
    let mut tail = Complex64::new(0.0, 0.0);
    let mut scale = 0.5;
    for n in 0..=order {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        tail += diffs[0] * (sign * scale);
        scale *= 0.5;
        for j in 0..order - n {
            diffs[j] = diffs[j + 1] - diffs[j];
        }
    }
    let sign = if direct.is_multiple_of(2) { 1.0 } else { -1.0 };
    head + tail * sign
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
///
/// Returns the estimate from the highest complete even column and the
/// difference to the estimate obtained from the same table one row earlier.
/// Vanishing differences mean the table has converged and end the recursion,
/// so series with zero terms should be summed in complex form `Σ a_k e^{ikt}`.
pub fn wynn_epsilon(partial: &[Complex64]) -> (Complex64, f64) {
    let n = partial.len();
    assert!(n >= 3, "wynn_epsilon needs at least three partial sums");
    // prev = ε_{k-1}, cur = ε_k columns, indexed by starting position.
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut best_prev = partial[n - 2];
    let mut k = 0;
    'table: while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d.norm() <= f64::EPSILON * cur[j + 1].norm() {
                if k % 2 == 0 {
                    best_prev = best;
                    best = cur[j + 1];
                }
                break 'table;
            }
            next.push(prev[j + 1] + d.inv());
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 && cur.len() >= 2 {
            let last = cur[cur.len() - 1];
            let before = cur[cur.len() - 2];
            if last.re.is_finite() && last.im.is_finite() && before.re.is_finite() && before.im.is_finite() {
                best = last;
                best_prev = before;
            }
        }
    }
    (best, (best - best_prev).norm())
}
