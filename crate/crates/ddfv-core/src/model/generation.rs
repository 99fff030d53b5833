//! External photogeneration profiles.

/// Axis-aligned closed box restricting the support of a profile.
/// One-dimensional supports use an unbounded second axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl SupportBox {
    pub fn interval(x0: f64, x1: f64) -> Self {
        SupportBox { lo: [x0, f64::NEG_INFINITY], hi: [x1, f64::INFINITY] }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        x[0] >= self.lo[0] && x[0] <= self.hi[0] && x[1] >= self.lo[1] && x[1] <= self.hi[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenerationProfile {
    Zero,
    /// G(x) = 1_E(x) G0 exp(-(x - origin) . direction), absorption along a
    /// unit illumination direction starting at `origin`.
    ExponentialDecay {
        amplitude: f64,
        direction: [f64; 2],
        origin: [f64; 2],
        support: SupportBox,
    },
    /// G(x) = G0 exp(-(|x - center|^2) / (2 sigma^2)), a focused beam.
    GaussianBeam { amplitude: f64, center: [f64; 2], sigma: f64 },
}

impl GenerationProfile {
    /// G(x) >= 0.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match *self {
            GenerationProfile::Zero => 0.0,
            GenerationProfile::ExponentialDecay { amplitude, direction, origin, support } => {
                if !support.contains(x) {
                    return 0.0;
                }
                let proj = (x[0] - origin[0]) * direction[0] + (x[1] - origin[1]) * direction[1];
                amplitude * (-proj).exp()
            }
            GenerationProfile::GaussianBeam { amplitude, center, sigma } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                amplitude * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            GenerationProfile::Zero => 0.0,
            GenerationProfile::ExponentialDecay { amplitude, .. }
            | GenerationProfile::GaussianBeam { amplitude, .. } => amplitude,
        }
    }

    /// Rescale the amplitude (continuation over G0 and G0-sweeps).
    pub fn set_amplitude(&mut self, g0: f64) {
        match self {
            GenerationProfile::Zero => {}
            GenerationProfile::ExponentialDecay { amplitude, .. }
            | GenerationProfile::GaussianBeam { amplitude, .. } => *amplitude = g0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psc_profile(g0: f64) -> GenerationProfile {
        GenerationProfile::ExponentialDecay {
            amplitude: g0,
            direction: [1.0, 0.0],
            origin: [1.0, 0.0],
            support: SupportBox::interval(1.0, 5.0),
        }
    }

    #[test]
    fn decay_starts_at_absorber_edge() {
        let g = psc_profile(1.0);
        assert_eq!(g.eval([1.0, 0.0]), 1.0);
        assert_eq!(g.eval([0.5, 0.0]), 0.0); // inside the transport layer
        let expect = (-(2.5f64 - 1.0)).exp();
        assert!((g.eval([2.5, 0.0]) - expect).abs() < 1e-15);
        assert_eq!(g.eval([5.5, 0.0]), 0.0);
    }

    #[test]
    fn beam_center_value() {
        let g = GenerationProfile::GaussianBeam { amplitude: 1.0, center: [4.0, 2.0], sigma: 0.5 };
        assert_eq!(g.eval([4.0, 2.0]), 1.0);
        let off = g.eval([4.5, 2.0]);
        assert!((off - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn nonnegative_everywhere() {
        let profiles = [
            GenerationProfile::Zero,
            psc_profile(3.0),
            GenerationProfile::GaussianBeam { amplitude: 2.0, center: [0.0, 0.0], sigma: 0.5 },
        ];
        let mut x = -2.0;
        while x < 9.0 {
            for g in &profiles {
                assert!(g.eval([x, 0.3 * x]) >= 0.0);
            }
            x += 0.11;
        }
    }

    #[test]
    fn amplitude_rescaling() {
        let mut g = psc_profile(1.0);
        g.set_amplitude(100.0);
        assert_eq!(g.eval([1.0, 0.0]), 100.0);
        assert_eq!(g.amplitude(), 100.0);
    }
}
