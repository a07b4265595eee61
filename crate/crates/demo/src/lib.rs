//! wasm-bindgen exports for the static page in `www/`. Every export returns
//! a JSON string; failures come back as `{"error": "..."}`.

use std::sync::Arc;

use serde_json::{json, Value};
use ssr_core::group::{make_group, Representation, CATALOG};
use ssr_core::io::parse_rep;
use ssr_core::linalg::{c64, CMatrix, CVector, DensityOperator, PureState, Sampler};
use ssr_core::resources::{asymmetry, extractable_work, resource_report, work_under_ssr};
use ssr_core::states::random_symmetric_state_sized;
use ssr_core::twirl::{ChargeOperator, Symmetry, TwirlKind, U1Action};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Catalog group names for the page's selectors.
#[wasm_bindgen]
pub fn groups() -> String {
    json!(CATALOG).to_string()
}

/// `W`, `W_U` and `A_U` of `cos(θ/2)|1⟩ + e^{iφ} sin(θ/2)|−1⟩` for `steps + 1`
/// values of θ in `[0, π]`.
#[wasm_bindgen]
pub fn spin_sweep(steps: u32, phi: f64) -> String {
    respond(spin_sweep_value(steps.max(1), phi))
}

fn spin_sweep_value(steps: u32, phi: f64) -> Result<Value, String> {
    let jz = Symmetry::U1(U1Action::single(ChargeOperator::spin_half_z()));
    let mut rows = Vec::new();
    for k in 0..=steps {
        let theta = std::f64::consts::PI * f64::from(k) / f64::from(steps);
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let v = CVector::from_vec(vec![c64(c, 0.0), c64(s * phi.cos(), s * phi.sin())]);
        let rho = PureState::normalized(v, vec![2]).map_err(err)?.density();
        rows.push(json!({
            "theta": theta,
            "W": extractable_work(&rho).map_err(err)?,
            "W_U": work_under_ssr(&rho, &jz).map_err(err)?,
            "A_U": asymmetry(&rho, &jz).map_err(err)?,
        }));
    }
    Ok(json!({ "rows": rows }))
}

/// Terms of `W_G = W_GxG-L + E_GxG + A_sh` on a random globally symmetric
/// pure state of the named group.
#[wasm_bindgen]
pub fn triality(group: &str, seed: u64) -> String {
    respond(triality_value(group, seed))
}

fn triality_value(group: &str, seed: u64) -> Result<Value, String> {
    let g = Arc::new(make_group(group).map_err(err)?);
    let st = random_symmetric_state_sized(g, seed, 4).map_err(err)?;
    let rho = st.density();
    let report = resource_report(&rho, st.symmetry(), Some(&st)).map_err(err)?;
    let q = |k: &str| report.get(k).unwrap_or(f64::NAN);
    let sectors: Vec<Value> = st
        .sectors()
        .iter()
        .map(
            |s| json!({ "weight": s.weight, "color_dim": s.color_dim, "flavor_entanglement": s.flavor_entanglement() }),
        )
        .collect();
    Ok(json!({
        "group": group,
        "beta": st.beta(),
        "dims": rho.dims(),
        "W_G": q("W_G"),
        "W_GxG-L": q("W_GxG-L"),
        "E_GxG": q("E_GxG"),
        "A_sh": q("A_sh"),
        "E": q("E"),
        "H_ch": q("H_ch"),
        "H_co": q("H_co"),
        "residual": (q("W_G") - q("W_GxG-L") - q("E_GxG") - q("A_sh")).abs(),
        "sectors": sectors,
    }))
}

/// Entry magnitudes of a random state before and after the chosen twirl.
/// `rep` follows the CLI syntax (`regular`, `0,2` or `a/b`); `kind` is
/// `global`, `local`, `left` or `right`.
#[wasm_bindgen]
pub fn twirl_heatmap(group: &str, rep: &str, kind: &str, seed: u64) -> String {
    respond(twirl_heatmap_value(group, rep, kind, seed))
}

fn magnitudes(m: &CMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).collect()).collect()
}

fn twirl_heatmap_value(group: &str, rep: &str, kind: &str, seed: u64) -> Result<Value, String> {
    let g = Arc::new(make_group(group).map_err(err)?);
    let rep: Representation = parse_rep(&g, rep).map_err(err)?;
    let kind = match kind {
        "global" => TwirlKind::Global,
        "local" => TwirlKind::Local,
        "left" => TwirlKind::Left,
        "right" => TwirlKind::Right,
        other => return Err(format!("unknown twirl kind {other}")),
    };
    if rep.dim() > 36 {
        return Err(format!("dimension {} is too large to draw", rep.dim()));
    }
    let dims = match rep.split() {
        Some(s) => vec![s.dim_a(), s.dim_b()],
        None => vec![rep.dim()],
    };
    let rho = Sampler::new(seed).pure_state(&dims).density();
    let sym = Symmetry::Group(rep);
    let out: DensityOperator = sym.twirl(&rho, kind).map_err(err)?;
    Ok(json!({
        "dims": dims,
        "before": magnitudes(rho.matrix()),
        "after": magnitudes(out.matrix()),
        "entropy_before": rho.entropy().map_err(err)?,
        "entropy_after": out.entropy().map_err(err)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn sweep_endpoints() {
        let v = parse(spin_sweep(4, 0.0));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 5);
        assert!((rows[0]["W_U"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!((rows[2]["A_U"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        for r in rows {
            let (w, wu, au) = (r["W"].as_f64().unwrap(), r["W_U"].as_f64().unwrap(), r["A_U"].as_f64().unwrap());
            assert!((w - wu - au).abs() < 1e-9);
        }
    }

    #[test]
    fn triality_terms_add_up() {
        for g in ["Z3", "S3", "Q8"] {
            let v = parse(triality(g, 11));
            assert!(v["residual"].as_f64().unwrap() < 1e-8, "{v}");
        }
    }

    #[test]
    fn local_twirl_removes_more() {
        let before = parse(twirl_heatmap("Z3", "regular/regular", "global", 5));
        let after = parse(twirl_heatmap("Z3", "regular/regular", "local", 5));
        assert_eq!(before["after"].as_array().unwrap().len(), 9);
        assert!(after["entropy_after"].as_f64().unwrap() >= before["entropy_after"].as_f64().unwrap() - 1e-9);
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse(triality("Z99", 0))["error"].is_string());
        assert!(parse(twirl_heatmap("Z2", "regular", "sideways", 0))["error"].is_string());
        assert_eq!(parse(groups()).as_array().unwrap().len(), CATALOG.len());
    }
}
