//! Brownian bridge helpers. A bridge runs from `x0` to `x1` over `dt` with
//! variance rate `s2`.

use rand::Rng;
use rand_distr::{Open01, StandardNormal};

/// Probability that the bridge reaches `level` (from below).
pub fn crossing_probability(level: f64, x0: f64, x1: f64, s2: f64, dt: f64) -> f64 {
    if x0 >= level || x1 >= level {
        return 1.0;
    }
    if s2 <= 0.0 || dt <= 0.0 {
        return 0.0;
    }
    (-2.0 * (level - x0) * (level - x1) / (s2 * dt)).exp()
}

/// Bridge value at time `h` in `(0, dt)`.
pub fn sample_point<R: Rng + ?Sized>(rng: &mut R, x0: f64, x1: f64, s2: f64, dt: f64, h: f64) -> f64 {
    let mean = x0 + (x1 - x0) * h / dt;
    let var = (s2 * h * (dt - h) / dt).max(0.0);
    mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal)
}

/// Running maximum of the bridge.
pub fn sample_maximum<R: Rng + ?Sized>(rng: &mut R, x0: f64, x1: f64, s2: f64, dt: f64) -> f64 {
    if s2 <= 0.0 || dt <= 0.0 {
        return x0.max(x1);
    }
    let u: f64 = rng.sample(Open01);
    let d = x1 - x0;
    0.5 * (x0 + x1 + (d * d - 2.0 * s2 * dt * u.ln()).sqrt())
}

const MAX_REJECTIONS: usize = 1_000_000;

/// First hitting time of `level` in `(0, dt)` for a bridge known to reach
/// it, by recursive halving. Each midpoint is drawn from the bridge law
/// conditioned on the crossing (rejection with acceptance `P(cross | mid)`).
pub fn locate_crossing<R: Rng + ?Sized>(
    rng: &mut R,
    level: f64,
    x0: f64,
    x1: f64,
    s2: f64,
    dt: f64,
    resolution: f64,
) -> f64 {
    let (mut s0, mut y0, mut s1, mut y1) = (0.0, x0, dt, x1);
    while s1 - s0 > resolution {
        let h = s1 - s0;
        let mut tries = 0;
        let (m, left) = loop {
            let m = sample_point(rng, y0, y1, s2, h, 0.5 * h);
            let pl = crossing_probability(level, y0, m, s2, 0.5 * h);
            let pr = crossing_probability(level, m, y1, s2, 0.5 * h);
            let pc = 1.0 - (1.0 - pl) * (1.0 - pr);
            let u: f64 = rng.random();
            tries += 1;
            // accept with P(cross | m), then left with P(left crosses | m)
            if u < pl || tries >= MAX_REJECTIONS {
                break (m, true);
            }
            if u < pc {
                break (m, false);
            }
        };
        let mid = s0 + 0.5 * h;
        if left {
            s1 = mid;
            y1 = m;
        } else {
            s0 = mid;
            y0 = m;
        }
        if y0 >= level {
            break;
        }
    }
    0.5 * (s0 + s1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn crossing_probability_edges() {
        assert_eq!(crossing_probability(1.0, 0.0, 1.5, 1.0, 1.0), 1.0);
        assert_eq!(crossing_probability(1.0, 0.0, 0.0, 0.0, 1.0), 0.0);
        let p = crossing_probability(1.0, 0.0, 0.0, 1.0, 1.0);
        assert!((p - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn maximum_matches_reflection_law() {
        // bridge 0 -> 0 over unit time: P(M >= m) = exp(-2 m^2)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let hits = (0..n).filter(|_| sample_maximum(&mut rng, 0.0, 0.0, 1.0, 1.0) >= 0.5).count();
        let p = hits as f64 / n as f64;
        let exact = (-0.5f64).exp();
        assert!((p - exact).abs() < 4.0 * (exact * (1.0 - exact) / n as f64).sqrt());
    }

    #[test]
    fn located_crossing_lies_inside_interval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let t = locate_crossing(&mut rng, 0.3, 0.0, 1.0, 1.0, 2.0, 1e-9);
            assert!(t > 0.0 && t < 2.0);
        }
    }
}
