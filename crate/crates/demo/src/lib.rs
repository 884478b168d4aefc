//! Browser bindings. Every export returns a JSON string; errors come back
//! as `{"error": "..."}` so the page needs no exception plumbing.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use certilab::certify::{certify_general, CertifyMethod, DEFAULT_EPS};
use certilab::objectives::{ObjectiveName, ObjectiveSpec};
use certilab::phase::{run_phase_experiment, PhaseConfig};
use certilab::sensing::{gaussian_matrix, MeasurementKind, DEFAULT_PERTURB_SCALE};
use certilab::signals::{gen_signal, SignalSpec, Structure, ValueClass};
use certilab::solver::FEAS_TOL;
use certilab::statdim::{minimize_closed_form, ClosedFormProfile};

fn wrap(r: certilab::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn setup(objective: &str) -> certilab::Result<(ObjectiveName, Structure, ValueClass)> {
    let name: ObjectiveName = objective.parse()?;
    let structure = if name.case.is_sparse() { Structure::Sparse } else { Structure::GradientSparse1d };
    let class = if name.case.is_box() {
        ValueClass::Binary
    } else if matches!(name.case, certilab::objectives::ObjectiveCase::F2 | certilab::objectives::ObjectiveCase::F5) {
        ValueClass::Nonnegative
    } else {
        ValueClass::Real
    };
    Ok((name, structure, class))
}

/// Draws a signal for `objective` (`f1` .. `f6-1d`), measures it with an
/// `m x n` Gaussian matrix and certifies it.
#[wasm_bindgen]
pub fn certify_random(objective: &str, n: usize, rho: f64, m: usize, seed: u64) -> String {
    wrap((|| {
        let (name, structure, class) = setup(objective)?;
        let x = gen_signal(&SignalSpec { n, rho, class, structure, seed })?;
        let spec = ObjectiveSpec::from_name(name, n)?;
        let a = gaussian_matrix(m, n, seed.wrapping_add(1))?;
        let res = certify_general(&a, &spec, &x, CertifyMethod::EpsilonLp, DEFAULT_EPS, FEAS_TOL)?;
        Ok(json!({
            "signal": x,
            "verdict": res.verdict,
            "condition_i": res.condition_i,
            "t_star": res.t_star.filter(|t| t.is_finite()),
        }))
    })())
}

/// `min_τ J(τ)` of the l1 cases for every sparsity `s = 1..n-1`.
#[wasm_bindgen]
pub fn statdim_curve(objective: &str, n: usize) -> String {
    wrap((|| {
        let (name, _, _) = setup(objective)?;
        if !name.case.is_sparse() {
            return Err(certilab::Error::InvalidInput("the closed form covers f1, f2 and f3".into()));
        }
        let mut points = Vec::new();
        for s in 1..n {
            let est = minimize_closed_form(&ClosedFormProfile::from_counts(name.case, n, s)?, 1e-10)?;
            points.push(json!({ "rho": s as f64 / n as f64, "j_star": est.j_star }));
        }
        Ok(json!({ "n": n, "points": points }))
    })())
}

/// A small Gaussian phase diagram: success rate per cell, `ρ`-major.
#[wasm_bindgen]
pub fn phase_diagram(objective: &str, n: usize, trials: usize, seed: u64) -> String {
    wrap((|| {
        let (name, structure, class) = setup(objective)?;
        let rho_grid: Vec<f64> = (1..10).map(|k| k as f64 * 0.1).collect();
        let m_grid: Vec<usize> = (1..=n / 2).map(|k| 2 * k).collect();
        let cfg = PhaseConfig {
            objective: name.case,
            class,
            structure,
            n,
            rho_grid,
            m_grid,
            trials,
            measurement: MeasurementKind::Gaussian,
            master_seed: seed,
            method: CertifyMethod::EpsilonLp,
            statdim_samples: 500,
            statdim_draws: 1,
            with_statdim: name.case.is_sparse(),
            perturb_scale: DEFAULT_PERTURB_SCALE,
            eps: DEFAULT_EPS,
            feas_tol: FEAS_TOL,
        };
        let d = run_phase_experiment(&cfg)?;
        let rates: Vec<f64> = d.cells.iter().map(|c| c.success_rate()).collect();
        let statdim: Vec<f64> = d.statdim.iter().map(|p| p.j_star).collect();
        Ok(json!({
            "rho": cfg.rho_grid,
            "m": cfg.m_grid,
            "rates": rates,
            "statdim": statdim,
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn certify_random_reports_a_verdict() {
        let v = parse(&certify_random("f1", 30, 0.1, 25, 4));
        assert_eq!(v["verdict"], "unique");
        assert_eq!(v["signal"].as_array().unwrap().len(), 30);
        let v = parse(&certify_random("f9", 30, 0.1, 25, 4));
        assert!(v["error"].is_string());
    }

    #[test]
    fn statdim_curve_is_increasing() {
        let v = parse(&statdim_curve("f1", 20));
        let j: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| p["j_star"].as_f64().unwrap()).collect();
        assert_eq!(j.len(), 19);
        assert!(j.windows(2).all(|w| w[1] > w[0]));
        assert!(parse(&statdim_curve("f4-1d", 20))["error"].is_string());
    }

    #[test]
    fn phase_diagram_shape() {
        let v = parse(&phase_diagram("f1", 12, 2, 1));
        assert_eq!(v["rates"].as_array().unwrap().len(), 9 * 6);
        assert_eq!(v["statdim"].as_array().unwrap().len(), 9);
    }
}
