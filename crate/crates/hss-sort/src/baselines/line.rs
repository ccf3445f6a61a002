//! The line algorithm: repeated uniform draws on a shrinking unit interval,
//! the abstraction of one-sample-per-round splitter-interval shrinkage.
//!
//! Starting from `w_0` uniform on `[0, 1)`, each round draws `w_{i+1}`
//! uniformly from `[0, w_i)`. The distribution of `w_i` has the closed-form
//! CDF `F^i(x) = x * sum_{k=0..i} ln^k(1/x) / k!`.

use rand::prelude::*;

/// `F^i(x)`: probability that the point after `i` rounds is at most `x`.
pub fn line_cdf(x: f64, rounds: u32) -> f64 {
    assert!(x > 0.0 && x <= 1.0, "line_cdf domain is (0, 1]");
    let t = (1.0 / x).ln();
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..=rounds {
        term *= t / k as f64;
        sum += term;
    }
    (x * sum).min(1.0)
}

/// Number of draws until the point falls at or below `w_star`; the initial
/// uniform draw counts as round zero.
pub fn line_rounds_until(w_star: f64, rng: &mut impl Rng) -> u32 {
    assert!(w_star > 0.0);
    let mut w: f64 = rng.random();
    let mut rounds = 0;
    while w > w_star {
        w = rng.random_range(0.0..w);
        rounds += 1;
    }
    rounds
}

/// Monte Carlo estimate of `P[w_r > w_star] = 1 - F^r(w_star)`.
pub fn line_tail_estimate(w_star: f64, r: u32, trials: u64, rng: &mut impl Rng) -> f64 {
    assert!(trials > 0);
    let mut exceed = 0u64;
    for _ in 0..trials {
        let mut w: f64 = rng.random();
        for _ in 0..r {
            w = rng.random_range(0.0..w);
        }
        if w > w_star {
            exceed += 1;
        }
    }
    exceed as f64 / trials as f64
}

/// Smallest round count `r` with `1 - F^r(w_star) < p_star`.
pub fn line_rounds_for_tail(w_star: f64, p_star: f64) -> u32 {
    assert!(p_star > 0.0 && p_star < 1.0);
    let mut r = 0;
    while 1.0 - line_cdf(w_star, r) >= p_star {
        r += 1;
        assert!(r < 10_000, "tail target unreachable");
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cdf_closed_forms() {
        assert_relative_eq!(line_cdf(0.5, 0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(line_cdf(0.5, 1), 0.5 * (1.0 + 2f64.ln()), epsilon = 1e-12);
        // Taylor limit: F^i(x) -> 1 as i grows.
        assert!((line_cdf(0.01, 60) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_a_valid_cdf() {
        for rounds in [0u32, 1, 3, 10] {
            let mut prev = 0.0;
            for step in 1..=1000 {
                let x = step as f64 / 1000.0;
                let f = line_cdf(x, rounds);
                assert!(f >= prev - 1e-12, "monotone violated at {x} r={rounds}");
                assert!(f <= 1.0 + 1e-12);
                prev = f;
            }
            assert!(line_cdf(1e-12, rounds) < 1e-3, "must vanish at 0+");
            assert_relative_eq!(line_cdf(1.0, rounds), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn monte_carlo_matches_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let est = line_tail_estimate(0.5, 1, 100_000, &mut rng);
        let exact = 1.0 - line_cdf(0.5, 1);
        assert!((est - exact).abs() <= 0.01, "estimate {est} vs exact {exact}");
    }

    #[test]
    fn w_star_one_needs_zero_rounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            assert_eq!(line_rounds_until(1.0, &mut rng), 0);
        }
    }

    #[test]
    fn rounds_until_agrees_with_analytic_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let trials = 50_000;
        let w_star = 0.3;
        let exceeded_after_2 = (0..trials)
            .filter(|_| line_rounds_until(w_star, &mut rng) > 2)
            .count() as f64
            / trials as f64;
        let exact = 1.0 - line_cdf(w_star, 2);
        assert!((exceeded_after_2 - exact).abs() < 0.01);
    }

    #[test]
    fn round_requirement_tracks_log_over_loglog() {
        // r(p*) for p* = 1/p grows along ln(1/p*)/lnln(1/p*): a one-factor
        // fit explains the data and the round counts keep increasing.
        let mut xs = Vec::new();
        let mut rs = Vec::new();
        for exp in [6, 8, 10, 12, 14, 16] {
            let p = (1u64 << exp) as f64;
            let x = p.ln() / p.ln().ln();
            xs.push(x);
            rs.push(line_rounds_for_tail(0.02, 1.0 / p) as f64);
        }
        assert!(rs.windows(2).all(|w| w[1] >= w[0]), "rounds must not decrease");
        let c = xs.iter().zip(&rs).map(|(x, r)| x * r).sum::<f64>()
            / xs.iter().map(|x| x * x).sum::<f64>();
        let mean = rs.iter().sum::<f64>() / rs.len() as f64;
        let ss_tot: f64 = rs.iter().map(|r| (r - mean).powi(2)).sum();
        let ss_res: f64 =
            xs.iter().zip(&rs).map(|(x, r)| (r - c * x).powi(2)).sum();
        let r2 = 1.0 - ss_res / ss_tot;
        assert!(r2 > 0.9, "poor fit: R^2 = {r2}, c = {c}");
    }
}
