//! JSON, CSV and SVG emitters. Exact numbers are written both as canonical
//! exact strings and as 30-digit decimals.

use std::fmt::Write as _;

use astro_float::RoundingMode;
use serde_json::{json, Value};

use crate::dynamics::{SyncResult, SyncStatus};
use crate::exact::ExactNumber;
use crate::hiprec;
use crate::natext::{DomainApprox, MeasureBracket};
use crate::simulation::{McConfig, McEstimate};

pub const DECIMALS: usize = 30;

pub fn exact_json(x: &ExactNumber) -> Value {
    json!({ "exact": x.to_exact_string(), "decimal": x.to_decimal(DECIMALS) })
}

pub fn sync_json(r: &SyncResult) -> Value {
    let mut out = json!({
        "alpha": exact_json(&r.alpha),
        "status": r.status_name(),
    });
    let m = out.as_object_mut().expect("object");
    match &r.status {
        SyncStatus::Synchronizing { v, k, k_prime, data } => {
            m.insert("v".into(), json!(v.to_string()));
            m.insert("v_hat".into(), json!(data.vhat.to_string()));
            m.insert("k".into(), json!(k));
            m.insert("k_prime".into(), json!(k_prime));
            m.insert("zeta".into(), exact_json(&data.zeta));
            m.insert("eta".into(), exact_json(&data.eta));
            m.insert("chi".into(), exact_json(&data.chi));
            m.insert("len_diff".into(), json!(data.len_diff));
        }
        SyncStatus::NonSynchronizing { certificate, right_endpoint_of } => {
            m.insert(
                "certificate".into(),
                json!({ "preperiod": seq_json(&certificate.pre), "period": seq_json(&certificate.period) }),
            );
            if let Some(v) = right_endpoint_of {
                m.insert("right_endpoint_of".into(), json!(v.to_string()));
            }
        }
        SyncStatus::Undecided { depth } => {
            m.insert("depth".into(), json!(depth));
        }
    }
    out
}

fn seq_json(a: &[u64]) -> Value {
    Value::Array(
        a.iter()
            .map(|&x| if x == crate::words::INF { json!("inf") } else { json!(x) })
            .collect(),
    )
}

pub fn measure_json(b: &MeasureBracket) -> Value {
    json!({
        "alpha": exact_json(&b.alpha),
        "mu_lo": hiprec::to_fixed(&b.lo, DECIMALS, RoundingMode::Down),
        "mu_hi": hiprec::to_fixed(&b.hi, DECIMALS, RoundingMode::Up),
        "h_lo": hiprec::to_fixed(&b.h_lo, DECIMALS, RoundingMode::Down),
        "h_hi": hiprec::to_fixed(&b.h_hi, DECIMALS, RoundingMode::Up),
        "depth": b.depth,
        "certified": b.certified,
    })
}

pub fn mc_json(alpha: f64, est: &McEstimate, cfg: &McConfig) -> Value {
    json!({
        "alpha": alpha,
        "h_est": est.estimate,
        "stderr": est.stderr,
        "iterations": cfg.iterations,
        "seed": cfg.seed,
    })
}

/// One row per rectangle: `x1,x2,y1,y2,word` with exact endpoints.
pub fn domain_csv(d: &DomainApprox) -> String {
    let mut s = String::from("x1,x2,y1,y2,word\n");
    for r in &d.rectangles {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.x1.to_exact_string(),
            r.x2.to_exact_string(),
            r.y1.to_exact_string(),
            r.y2.to_exact_string(),
            r.word
        );
    }
    s
}

pub fn cloud_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("x,y\n");
    for (x, y) in points {
        let _ = writeln!(s, "{},{}", x, y);
    }
    s
}

#[derive(Clone, Debug)]
pub struct SvgStyle {
    pub width_px: u32,
    pub height_px: u32,
    pub fill: String,
    pub frontier_fill: String,
    pub grid: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            width_px: 800,
            height_px: 800,
            fill: "#4a78b5".into(),
            frontier_fill: "#d95f5f".into(),
            grid: "#999999".into(),
        }
    }
}

/// Rectangles in the window `[alpha-1, alpha] x [0, 1]` with `y` pointing
/// up, and vertical gridlines at `boundaries`.
pub fn domain_svg(d: &DomainApprox, boundaries: &[f64], style: &SvgStyle) -> String {
    let a = d.alpha.to_f64();
    let x0 = a - 1.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} -1 1 1" preserveAspectRatio="none">"#,
        style.width_px, style.height_px, x0
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)">"#);
    for r in &d.rectangles {
        let (x1, x2, y1, y2) = (r.x1.to_f64(), r.x2.to_f64(), r.y1.to_f64(), r.y2.to_f64());
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"><title>{}</title></rect>"#,
            x1,
            y1,
            x2 - x1,
            y2 - y1,
            style.fill,
            r.word
        );
    }
    for &(x1, x2, y1, y2) in &d.frontier {
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" fill-opacity="0.5"/>"#,
            x1,
            y1,
            x2 - x1,
            y2 - y1,
            style.frontier_fill
        );
    }
    for &b in boundaries {
        let _ = writeln!(
            s,
            r#"<line x1="{b}" y1="0" x2="{b}" y2="1" stroke="{}" stroke-width="1" vector-effect="non-scaling-stroke"/>"#,
            style.grid
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
