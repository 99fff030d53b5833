//! Solution state in quasi-Fermi-potential variables.

/// Cellwise (psi, v_n, v_p) plus the single global ion quasi-Fermi level.
/// Densities are derived through the state equation `n = F(v - z psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub psi: Vec<f64>,
    pub v_n: Vec<f64>,
    pub v_p: Vec<f64>,
    /// Present exactly when the scenario carries an ionic species.
    pub v_a: Option<f64>,
}

impl StateVector {
    pub fn constant(n_cells: usize, psi: f64, v_n: f64, v_p: f64, v_a: Option<f64>) -> Self {
        StateVector {
            psi: vec![psi; n_cells],
            v_n: vec![v_n; n_cells],
            v_p: vec![v_p; n_cells],
            v_a,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.psi.len()
    }
}
