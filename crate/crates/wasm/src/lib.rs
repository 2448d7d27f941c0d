//! Browser bindings for the odd-gon explorer page.
//!
//! Three interactive operations over a weight vector `(a_1, …, a_{2k-1})`:
//! describe the dual complex, print the bigraded Betti table with its
//! closed-form cross-check and Buchstaber numbers, and flip at a polygon
//! position. All results are JSON strings; errors come back as the thrown
//! `JsValue` message.

use torcomb::betti::{koszul_betti_capped, polygon_betti_closed_form};
use torcomb::buchstaber::{s_int, s_real};
use torcomb::families::{h_closed_form, polygon_complex, polygon_flip, PolygonPresentation};
use wasm_bindgen::prelude::*;

fn parse_weights(weights: &str) -> Result<PolygonPresentation, JsValue> {
    let parsed: Result<Vec<usize>, _> = weights
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(str::parse::<usize>)
        .collect();
    let w = parsed.map_err(|e| JsValue::from_str(&format!("bad weight list: {e}")))?;
    PolygonPresentation::new(w).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn err_js(e: torcomb::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// m, n, f/h-vectors, chromatic number, flag defect, minimal non-faces
/// and maximal faces of the dual complex.
#[wasm_bindgen]
pub fn describe(weights: &str) -> Result<String, JsValue> {
    let p = parse_weights(weights)?;
    let k = polygon_complex(&p).map_err(err_js)?;
    let h = k.h_polynomial().map_err(err_js)?;
    let out = serde_json::json!({
        "weights": p.weights(),
        "k": p.k(),
        "m": p.m(),
        "n": p.n(),
        "f": k.f_vector().entries(),
        "h": h.coeffs(),
        "chromatic_number": k.one_skeleton_chromatic_number(),
        "flag": k.flag_defect().0,
        "least_k_flag": k.flag_defect().1,
        "minimal_non_faces": k.minimal_non_faces(),
        "maximal_faces": k.maximal_faces(),
    });
    Ok(out.to_string())
}

/// Bigraded Betti table (both the Koszul computation and the closed form)
/// plus the Buchstaber numbers with certificates.
#[wasm_bindgen]
pub fn invariants(weights: &str) -> Result<String, JsValue> {
    let p = parse_weights(weights)?;
    let k = polygon_complex(&p).map_err(err_js)?;
    if p.m() > 12 {
        return Err(JsValue::from_str("demo cap: m <= 12 (the CLI goes further)"));
    }
    let betti = koszul_betti_capped(&k, 12, 1).map_err(err_js)?;
    let closed = polygon_betti_closed_form(&p);
    let (sr, sr_cert) = s_real(&k).map_err(err_js)?;
    let range = s_int(&k).map_err(err_js)?;
    let out = serde_json::json!({
        "betti": betti,
        "betti_grid": betti.grid(),
        "closed_form_match": betti == closed,
        "s_real": sr,
        "s_real_certificate": sr_cert,
        "s_lower": range.lower,
        "s_upper": range.upper,
        "s_exact": range.exact,
        "s_certificate": range.certificate,
        "provenance": range.provenance,
    });
    Ok(out.to_string())
}

/// Flip the presentation at `pos` (1-based); reports the new weights and
/// the h-polynomial change.
#[wasm_bindgen]
pub fn flip(weights: &str, pos: usize) -> Result<String, JsValue> {
    let p = parse_weights(weights)?;
    let rec = polygon_flip(&p, pos).map_err(err_js)?;
    let out = serde_json::json!({
        "flip_type": rec.flip_type,
        "before": rec.before.weights(),
        "after": rec.after.weights(),
        "h_before": h_closed_form(&rec.before).map_err(err_js)?.coeffs(),
        "h_after": h_closed_form(&rec.after).map_err(err_js)?.coeffs(),
        "h_change": rec.h_change().to_string(),
    });
    Ok(out.to_string())
}

/// Positions where a flip is admissible, for the UI.
#[wasm_bindgen]
pub fn admissible_flips(weights: &str) -> Result<String, JsValue> {
    let p = parse_weights(weights)?;
    let positions: Vec<usize> =
        (1..=p.weights().len()).filter(|&pos| polygon_flip(&p, pos).is_ok()).collect();
    Ok(serde_json::json!(positions).to_string())
}
