//! Electron-hole recombination-generation.
//!
//! The rate has the generic form
//! `R(n_n, n_p) = r(n_n, n_p) n_n n_p (1 - exp(-F_n^{-1}(n_n) - F_p^{-1}(n_p)))`
//! with a bounded prefactor combining a radiative constant with a
//! Shockley-Read-Hall term. `1 - exp(-s)` is evaluated as `-expm1(-s)`; near
//! equilibrium s vanishes and the naive form loses all significant digits.

use super::statistics::{StatisticsError, StatisticsFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrhParams {
    /// Dimensionless carrier lifetimes.
    pub tau_n: f64,
    pub tau_p: f64,
    /// Dimensionless reference densities.
    pub n_n_ref: f64,
    pub n_p_ref: f64,
}

impl Default for SrhParams {
    fn default() -> Self {
        SrhParams { tau_n: 1.0, tau_p: 1.0, n_n_ref: 1.0, n_p_ref: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecombinationModel {
    /// Radiative prefactor r_{0,rad} >= 0.
    pub r0_rad: f64,
    /// Trap-assisted contribution; `None` disables it.
    pub srh: Option<SrhParams>,
}

impl RecombinationModel {
    pub fn radiative(r0_rad: f64) -> Self {
        RecombinationModel { r0_rad, srh: None }
    }

    pub fn with_srh(r0_rad: f64, srh: SrhParams) -> Self {
        RecombinationModel { r0_rad, srh: Some(srh) }
    }

    /// The combined rate prefactor r(n_n, n_p).
    pub fn rate(&self, n_n: f64, n_p: f64) -> f64 {
        let mut r = self.r0_rad;
        if let Some(s) = self.srh {
            r += 1.0 / (s.tau_n * (n_n + s.n_n_ref) + s.tau_p * (n_p + s.n_p_ref));
        }
        r
    }

    /// d r / d n_n and d r / d n_p.
    fn rate_derivatives(&self, n_n: f64, n_p: f64) -> (f64, f64) {
        match self.srh {
            None => (0.0, 0.0),
            Some(s) => {
                let den = s.tau_n * (n_n + s.n_n_ref) + s.tau_p * (n_p + s.n_p_ref);
                (-s.tau_n / (den * den), -s.tau_p / (den * den))
            }
        }
    }

    /// R(n_n, n_p) given the statistics of both carriers.
    pub fn recombination(
        &self,
        f_n: &StatisticsFunction,
        f_p: &StatisticsFunction,
        n_n: f64,
        n_p: f64,
    ) -> Result<f64, StatisticsError> {
        let s = f_n.inverse(n_n)? + f_p.inverse(n_p)?;
        Ok(self.recombination_at(n_n, n_p, s))
    }

    /// R with the exponent s = F_n^{-1}(n_n) + F_p^{-1}(n_p) already known
    /// (in assembly s = eta_n + eta_p comes straight from the state).
    pub fn recombination_at(&self, n_n: f64, n_p: f64, s: f64) -> f64 {
        self.rate(n_n, n_p) * n_n * n_p * (-f64::exp_m1(-s))
    }

    /// R and its derivatives with respect to eta_n and eta_p, with
    /// dn_n = F_n'(eta_n), dn_p = F_p'(eta_p).
    pub fn recombination_with_derivatives(
        &self,
        n_n: f64,
        dn_n: f64,
        n_p: f64,
        dn_p: f64,
        s: f64,
    ) -> (f64, f64, f64) {
        let r = self.rate(n_n, n_p);
        let (drn, drp) = self.rate_derivatives(n_n, n_p);
        let em = -f64::exp_m1(-s); // 1 - exp(-s)
        let es = (-s).exp();
        let value = r * n_n * n_p * em;
        let d_eta_n = (drn * n_n + r) * n_p * dn_n * em + r * n_n * n_p * es;
        let d_eta_p = (drp * n_p + r) * n_n * dn_p * em + r * n_n * n_p * es;
        (value, d_eta_n, d_eta_p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_mass_action_equilibrium() {
        // Boltzmann both, n_n * n_p = 1 => exponent vanishes
        let m = RecombinationModel::with_srh(3.0, SrhParams::default());
        let b = StatisticsFunction::Boltzmann;
        let r = m.recombination(&b, &b, 2.0, 0.5).unwrap();
        assert!(r.abs() < 1e-14, "{r}");
    }

    #[test]
    fn radiative_spec_value() {
        // r0 = 1, SRH off, Boltzmann, n_n = n_p = e: R = e^2 (1 - e^{-2})
        let m = RecombinationModel::radiative(1.0);
        let b = StatisticsFunction::Boltzmann;
        let e = std::f64::consts::E;
        let r = m.recombination(&b, &b, e, e).unwrap();
        assert!((r - 6.38905609893065).abs() < 1e-12, "{r}");
    }

    #[test]
    fn srh_only_depletion_limit() {
        // As both densities vanish the recombination part r n_n n_p goes to
        // zero while the generation part tends to -r(0,0): for Boltzmann
        // R = r (n_n n_p - 1) -> -1/(tau_n n_ref + tau_p n_ref) = -1/2.
        let m = RecombinationModel::with_srh(0.0, SrhParams::default());
        let b = StatisticsFunction::Boltzmann;
        let mut n = 1e-2;
        while n > 1e-12 {
            let total = m.recombination(&b, &b, n, n).unwrap();
            let recomb_part = m.rate(n, n) * n * n;
            assert!(recomb_part < n, "recombination part must vanish: {recomb_part}");
            assert!((total + m.rate(0.0, 0.0)).abs() < 2.0 * n, "limit miss at n={n}: {total}");
            n *= 1e-2;
        }
    }

    #[test]
    fn rate_bounded() {
        let srh = SrhParams { tau_n: 2.0, tau_p: 3.0, n_n_ref: 0.5, n_p_ref: 0.25 };
        let m = RecombinationModel::with_srh(1.5, srh);
        let bound = 1.5 + 1.0 / (2.0 * 0.5f64).min(3.0 * 0.25);
        let mut x = 1e-6;
        while x < 1e6 {
            let r = m.rate(x, 2.0 * x);
            assert!(r >= 0.0 && r <= bound + 1e-15);
            x *= 10.0;
        }
    }

    #[test]
    fn sign_follows_exponent() {
        let m = RecombinationModel::radiative(1.0);
        let b = StatisticsFunction::Boltzmann;
        assert!(m.recombination(&b, &b, 2.0, 1.0).unwrap() > 0.0);
        assert!(m.recombination(&b, &b, 0.5, 1.0).unwrap() < 0.0);
    }

    #[test]
    fn equivalent_modified_rate_form() {
        // R = r~ (exp(s) - 1) with r~ = r n_n n_p exp(-s), against the expm1 form
        let m = RecombinationModel::with_srh(0.7, SrhParams::default());
        let f = StatisticsFunction::FermiDiracHalf;
        let mut seed = 12345u64;
        let mut rng = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let n_n = 1e-3 + 20.0 * rng();
            let n_p = 1e-3 + 20.0 * rng();
            let s = f.inverse(n_n).unwrap() + f.inverse(n_p).unwrap();
            let direct = m.recombination_at(n_n, n_p, s);
            let tilde = m.rate(n_n, n_p) * n_n * n_p * (-s).exp() * f64::exp_m1(s);
            let scale = direct.abs().max(tilde.abs()).max(1e-300);
            assert!((direct - tilde).abs() / scale < 1e-12, "{direct} vs {tilde}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let m = RecombinationModel::with_srh(1.0, SrhParams::default());
        let f = StatisticsFunction::FermiDiracHalf;
        for (eta_n, eta_p) in [(0.3, -0.2), (-1.0, 2.0), (1.5, 1.5)] {
            let n_n = f.eval(eta_n).unwrap();
            let n_p = f.eval(eta_p).unwrap();
            let dn_n = f.derivative(eta_n).unwrap();
            let dn_p = f.derivative(eta_p).unwrap();
            let (_, da, db) =
                m.recombination_with_derivatives(n_n, dn_n, n_p, dn_p, eta_n + eta_p);
            let h = 1e-6;
            let at = |en: f64, ep: f64| {
                let nn = f.eval(en).unwrap();
                let np = f.eval(ep).unwrap();
                m.recombination_at(nn, np, en + ep)
            };
            let fa = (at(eta_n + h, eta_p) - at(eta_n - h, eta_p)) / (2.0 * h);
            let fb = (at(eta_n, eta_p + h) - at(eta_n, eta_p - h)) / (2.0 * h);
            assert!((fa - da).abs() < 1e-5 * (1.0 + da.abs()), "{fa} vs {da}");
            assert!((fb - db).abs() < 1e-5 * (1.0 + db.abs()), "{fb} vs {db}");
        }
    }
}
