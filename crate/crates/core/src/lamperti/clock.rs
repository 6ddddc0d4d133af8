//! The time change `phi(s) = int_0^s exp(alpha xi_u) du` on a path that is
//! linear between knots.

use rand::Rng;

use crate::sim::bridge;
use crate::sim::Segment;

/// Linear stretch of the MAP path with its clock values at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockPiece {
    pub s0: f64,
    pub s1: f64,
    pub x0: f64,
    pub x1: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub state: usize,
}

/// `int_0^h exp(alpha (x0 + (x1 - x0) u / h)) du`.
pub fn linear_integral(alpha: f64, x0: f64, x1: f64, h: f64) -> f64 {
    let k = alpha * (x1 - x0);
    let base = (alpha * x0).exp() * h;
    if k.abs() < 1e-12 {
        base * (1.0 + 0.5 * k)
    } else {
        base * k.exp_m1() / k
    }
}

impl ClockPiece {
    /// MAP time within the piece at which the clock reaches `phi`.
    pub fn invert(&self, alpha: f64, phi: f64) -> f64 {
        let h = self.s1 - self.s0;
        if h <= 0.0 {
            return self.s0;
        }
        let slope = (self.x1 - self.x0) / h;
        let d = (phi - self.phi0).max(0.0);
        let u = if (alpha * slope).abs() * h < 1e-12 {
            d * (-alpha * self.x0).exp()
        } else {
            let k = alpha * slope;
            (k * d * (-alpha * self.x0).exp()).ln_1p() / k
        };
        (self.s0 + u).clamp(self.s0, self.s1)
    }

    /// Path value at MAP time `s` within the piece.
    pub fn value_at(&self, s: f64) -> f64 {
        let h = self.s1 - self.s0;
        if h <= 0.0 {
            self.x1
        } else {
            self.x0 + (self.x1 - self.x0) * (s - self.s0) / h
        }
    }
}

/// Relative agreement required between the clock on `K` and `K/2` knots.
pub const BROWNIAN_CLOCK_TOLERANCE: f64 = 1e-4;
pub const BROWNIAN_KNOTS: usize = 32;
pub const MAX_BROWNIAN_KNOTS: usize = 1024;

/// Bridge knots for a Brownian segment, refined by halving until the clock
/// integral changes by less than the tolerance.
pub fn brownian_knots<R: Rng + ?Sized>(rng: &mut R, seg: &Segment, alpha: f64) -> Vec<f64> {
    let dt = seg.duration();
    let mut k = BROWNIAN_KNOTS;
    let mut knots = Vec::with_capacity(k + 1);
    knots.push(seg.x0);
    let h = dt / k as f64;
    for i in 1..k {
        let prev = knots[i - 1];
        knots.push(bridge::sample_point(rng, prev, seg.x1, seg.sigma2, dt - (i - 1) as f64 * h, h));
    }
    knots.push(seg.x1);
    let integral = |knots: &[f64], stride: usize| {
        let h = dt / (knots.len() - 1) as f64 * stride as f64;
        knots
            .iter()
            .step_by(stride)
            .zip(knots.iter().step_by(stride).skip(1))
            .map(|(&a, &b)| linear_integral(alpha, a, b, h))
            .sum::<f64>()
    };
    loop {
        let fine = integral(&knots, 1);
        let coarse = integral(&knots, 2);
        if (fine - coarse).abs() <= BROWNIAN_CLOCK_TOLERANCE * fine || k >= MAX_BROWNIAN_KNOTS {
            return knots;
        }
        let h = dt / k as f64;
        let mut refined = Vec::with_capacity(2 * k + 1);
        for w in knots.windows(2) {
            refined.push(w[0]);
            refined.push(bridge::sample_point(rng, w[0], w[1], seg.sigma2, h, 0.5 * h));
        }
        refined.push(seg.x1);
        knots = refined;
        k *= 2;
    }
}

/// Appends the clock pieces of `seg`, starting the clock at `phi`.
/// Returns the clock value at the segment end.
pub fn push_pieces<R: Rng + ?Sized>(rng: &mut R, seg: &Segment, alpha: f64, phi: f64, out: &mut Vec<ClockPiece>) -> f64 {
    let mut phi = phi;
    let mut push = |s0: f64, s1: f64, x0: f64, x1: f64, phi: &mut f64| {
        let inc = linear_integral(alpha, x0, x1, s1 - s0);
        out.push(ClockPiece {
            s0,
            s1,
            x0,
            x1,
            phi0: *phi,
            phi1: *phi + inc,
            state: seg.state,
        });
        *phi += inc;
    };
    if seg.is_brownian() && seg.duration() > 0.0 {
        let knots = brownian_knots(rng, seg, alpha);
        let h = seg.duration() / (knots.len() - 1) as f64;
        for (i, w) in knots.windows(2).enumerate() {
            let s0 = seg.t0 + i as f64 * h;
            let s1 = if i + 2 == knots.len() { seg.t1 } else { s0 + h };
            push(s0, s1, w[0], w[1], &mut phi);
        }
    } else {
        push(seg.t0, seg.t1, seg.x0, seg.x1, &mut phi);
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_drift_closed_form() {
        // xi_s = s, alpha = 1: phi(t) = e^t - 1
        let v = linear_integral(1.0, 0.0, 2.0, 2.0);
        assert!((v - 2f64.exp_m1()).abs() < 1e-14);
        let v = linear_integral(2.0, 0.0, 1.0, 1.0);
        assert!((v - 2f64.exp_m1() / 2.0).abs() < 1e-14);
        assert_eq!(linear_integral(1.0, 0.0, 0.0, 3.0), 3.0);
    }

    proptest! {
        #[test]
        fn invert_round_trips(alpha in 0.1f64..3.0, x0 in -3.0f64..3.0, x1 in -3.0f64..3.0, h in 1e-3f64..5.0, u in 0.0f64..1.0) {
            let phi1 = linear_integral(alpha, x0, x1, h);
            let piece = ClockPiece { s0: 1.0, s1: 1.0 + h, x0, x1, phi0: 0.5, phi1: 0.5 + phi1, state: 0 };
            let s = 1.0 + u * h;
            let partial = linear_integral(alpha, x0, piece.value_at(s), s - 1.0);
            let back = piece.invert(alpha, 0.5 + partial);
            prop_assert!((back - s).abs() <= 1e-10 * (1.0 + h), "{} vs {}", back, s);
        }
    }
}
