//! Uniform and logarithmic sample grids.

/// `n` points from `a` to `b` inclusive, uniformly spaced.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
                .collect()
        }
    }
}

/// `n` points from `a` to `b` inclusive, uniformly spaced in `ln`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0, "log grid endpoints must be positive");
    let mut g: Vec<f64> = linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect();
    if let Some(first) = g.first_mut() {
        *first = a;
    }
    if n > 1 {
        g[n - 1] = b;
    }
    g
}

/// Refines a sorted grid by inserting `factor - 1` log-spaced points in every gap.
pub fn refine_log(grid: &[f64], factor: usize) -> Vec<f64> {
    if grid.len() < 2 || factor <= 1 {
        return grid.to_vec();
    }
    let mut out = Vec::with_capacity((grid.len() - 1) * factor + 1);
    for w in grid.windows(2) {
        let (la, lb) = (w[0].ln(), w[1].ln());
        out.push(w[0]);
        for j in 1..factor {
            out.push((la + (lb - la) * j as f64 / factor as f64).exp());
        }
    }
    out.push(*grid.last().unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = log_grid(0.1, 100.0, 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 100.0);
        assert_eq!(linspace(-2.0, 2.0, 5), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn refine_contains_original() {
        let g = log_grid(1.0, 1e4, 5);
        let r = refine_log(&g, 10);
        assert_eq!(r.len(), 41);
        for (i, v) in g.iter().enumerate() {
            assert_eq!(r[i * 10], *v);
        }
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }
}
