use std::cmp::Ordering;

/// `a / b` with `0/0 = 1` and `a/0 = ∞` for `a > 0`.
#[inline]
pub fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        a / b
    }
}

/// `n choose r` as a float, for budget checks.
pub(crate) fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lexicographic order on `(distance, index)` pairs.
#[inline]
pub(crate) fn by_dist_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Visits every size-`r` subset of `items` in lexicographic order of
/// positions. The callback returns `false` to stop early.
pub(crate) fn for_each_combination(
    items: &[usize],
    r: usize,
    mut visit: impl FnMut(&[usize]) -> bool,
) {
    let n = items.len();
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut current: Vec<usize> = idx.iter().map(|&p| items[p]).collect();
    loop {
        if !visit(&current) {
            return;
        }
        let Some(pos) = (0..r).rev().find(|&p| idx[p] != p + n - r) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
        for q in pos..r {
            current[q] = items[idx[q]];
        }
    }
}
