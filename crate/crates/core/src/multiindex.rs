//! Multi-indices in dimension 1 or 2, ordered by total order and then
//! lexicographically.

/// All multi-indices of total order at most `n`.
pub fn multi_indices(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(count(dim, n));
    for total in 0..=n {
        match dim {
            1 => out.push(vec![total]),
            _ => out.extend((0..=total).map(|a| vec![a, total - a])),
        }
    }
    out
}

/// Number of multi-indices of total order at most `n`.
pub fn count(dim: usize, n: usize) -> usize {
    match dim {
        1 => n + 1,
        _ => (n + 1) * (n + 2) / 2,
    }
}

/// Position of `alpha` in the enumeration of [`multi_indices`].
pub fn index(alpha: &[usize]) -> usize {
    match alpha {
        [a] => *a,
        [a, b] => {
            let total = a + b;
            total * (total + 1) / 2 + a
        }
        _ => panic!("multi-indices have one or two components"),
    }
}

pub fn total(alpha: &[usize]) -> usize {
    alpha.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order_and_index() {
        let all = multi_indices(2, 3);
        assert_eq!(all.len(), count(2, 3));
        assert_eq!(all[..4], [vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2]]);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(index(a), i);
        }
        let one = multi_indices(1, 4);
        assert_eq!(one.len(), 5);
        assert_eq!(index(&one[3]), 3);
    }
}
