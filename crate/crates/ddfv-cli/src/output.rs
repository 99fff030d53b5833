//! Deterministic text outputs: CSV files and the run manifest.
//!
//! Floats are printed with Rust's shortest round-trip formatting, so identical
//! runs produce byte-identical files. The manifest is the full configuration
//! in TOML followed by the run record as comment lines; it parses as a config
//! again, which makes any manifest directly re-runnable.

use ddfv_core::bounds::BoundVerdict;
use ddfv_core::fvm::{DiscreteSystem, FvmError, StateVector};
use ddfv_core::newton::SolveReport;
use ddfv_core::scenarios::{LbicSignal, SweepResult};

pub fn profile_csv(sys: &DiscreteSystem, state: &StateVector) -> Result<String, FvmError> {
    let table = sys.density_table(state)?;
    let mesh = &sys.scenario.mesh;
    let two_d = mesh.dim == 2;
    let ions = sys.scenario.ions_active();
    let mut s = String::new();
    s.push_str(if two_d { "x,y," } else { "x," });
    s.push_str("psi,v_n,v_p,n_n,n_p");
    if ions {
        s.push_str(",n_a");
    }
    s.push('\n');
    for k in 0..mesh.n_cells() {
        let c = &mesh.cells[k];
        if two_d {
            s.push_str(&format!("{},{},", c.center[0], c.center[1]));
        } else {
            s.push_str(&format!("{},", c.center[0]));
        }
        s.push_str(&format!(
            "{},{},{},{},{}",
            state.psi[k], state.v_n[k], state.v_p[k], table.n_n[k], table.n_p[k]
        ));
        if ions {
            if sys.is_ion_cell(k) {
                s.push_str(&format!(",{}", table.n_a[k]));
            } else {
                s.push(',');
            }
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn sweep_csv(param: &str, result: &SweepResult) -> String {
    let mut s = String::from(
        "param,value,n_n_inf,n_p_inf,n_a_inf,psi_inf,v_n_inf,v_p_inf,v_a,I_d1,I_d2,bounds_hard,bounds_certificate\n",
    );
    for row in &result.rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            param,
            row.value,
            row.norms.n_n,
            row.norms.n_p,
            opt(row.norms.n_a),
            row.norms.psi,
            row.norms.v_n,
            row.norms.v_p,
            opt(row.norms.v_a),
            row.current_d1,
            row.current_d2,
            row.bounds_hard_ok,
            row.bounds_certificate_ok,
        ));
    }
    s
}

pub fn lbic_csv(signal: &LbicSignal) -> String {
    let mut s = String::from("x0,y0,I\n");
    for p in &signal.points {
        s.push_str(&format!("{},{},{}\n", p.x0, p.y0, p.current));
    }
    s
}

pub struct ManifestBuilder {
    lines: Vec<String>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config_toml: &str) -> Self {
        let mut lines = vec![
            format!("# ddfv manifest (command: {command})"),
            "# the configuration below re-runs this case verbatim".to_string(),
            String::new(),
            config_toml.trim_end().to_string(),
            String::new(),
            "# --- run record ---".to_string(),
        ];
        lines.push(String::new());
        lines.pop();
        ManifestBuilder { lines }
    }

    pub fn note(&mut self, text: &str) {
        for line in text.lines() {
            self.lines.push(format!("# {line}"));
        }
    }

    pub fn reports(&mut self, label: &str, reports: &[(String, &SolveReport)]) {
        self.note(label);
        for (tag, rep) in reports {
            self.note(&format!(
                "  {tag}: iters={} residual={:e} converged={}",
                rep.iterations.len(),
                rep.residual_norm,
                rep.converged
            ));
        }
    }

    pub fn verdict(&mut self, verdict: &BoundVerdict) {
        self.note("bound verification");
        for line in verdict.to_string().lines() {
            self.note(&format!("  {line}"));
        }
    }

    pub fn build(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}
