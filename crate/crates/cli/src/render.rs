//! Table, JSON and CSV output.

use std::fmt::Write as _;

use neumann_core::checker::{BifReport, CheckError, CheckReport, ProblemSpec, Verdict};
use neumann_core::degree::IndexReport;
use neumann_core::galerkin::{Branch, BranchPoint, GalerkinBasis, Termination};
use neumann_core::spectra::SpectralLine;
use neumann_core::{Coeff, Coordinate, PartialEulerElement, Tri};
use serde_json::{json, Value};

use crate::{Format, SpectrumFormat};

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn spectrum(lines: &[SpectralLine], format: SpectrumFormat) -> String {
    let labels = |l: &SpectralLine| l.labels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    match format {
        SpectrumFormat::Table => {
            let mut s = format!("{:>18}  {:>9}  {:<24}  labels\n", "eigenvalue", "dimension", "rep");
            for l in lines {
                let _ = writeln!(s, "{:>18.10}  {:>9}  {:<24}  {}", l.eigenvalue, l.dimension(), l.rep.to_string(), labels(l));
            }
            s
        }
        SpectrumFormat::Csv => {
            let mut s = String::from("eigenvalue,dimension,rep,labels\n");
            for l in lines {
                let _ = writeln!(s, "{},{},{},\"{}\"", l.eigenvalue, l.dimension(), l.rep, labels(l));
            }
            s
        }
        SpectrumFormat::Json => pretty(&Value::Array(
            lines
                .iter()
                .map(|l| {
                    json!({
                        "eigenvalue": l.eigenvalue,
                        "dimension": l.dimension(),
                        "rep": l.rep.to_string(),
                        "labels": l.labels.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )),
    }
}

fn coeff_json(c: Coeff) -> Value {
    match c {
        Coeff::Known(v) => json!({"status": "Known", "value": v}),
        Coeff::Unknown => json!({"status": "Unknown"}),
    }
}

fn coordinate_json(c: Coordinate, v: Coeff) -> Value {
    let mut out = coeff_json(v);
    out["coordinate"] = Value::String(c.to_string());
    out
}

fn partial_json(e: &PartialEulerElement) -> Value {
    let mut coords = vec![coordinate_json(Coordinate::So2, e.get(Coordinate::So2))];
    coords.extend(
        e.known_coords()
            .filter(|(c, _)| *c != Coordinate::So2)
            .map(|(c, v)| coordinate_json(c, Coeff::Known(v))),
    );
    coords.extend(
        e.unknown_coords()
            .filter(|c| *c != Coordinate::So2)
            .map(|c| coordinate_json(c, Coeff::Unknown)),
    );
    json!({
        "display": e.to_string(),
        "coordinates": coords,
        "remaining_coordinates": if e.tail_known_zero() { "Known zero" } else { "Unknown" },
    })
}

fn opt_ls(v: Option<i64>) -> String {
    v.map_or("?".into(), |x| x.to_string())
}

fn tri_word(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "nonzero",
        Tri::No => "zero",
        Tri::Undetermined => "undetermined",
    }
}

fn slope_of(spec: &ProblemSpec, z: f64) -> Option<f64> {
    spec.zeros.iter().find(|d| d.value == z).map(|d| d.slope)
}

pub fn index(spec: &ProblemSpec, r: &IndexReport, format: Format) -> String {
    match format {
        Format::Table => {
            let mut s = format!("{:<26}  {:>20}  {:>6}  gradient index\n", "location", "slope", "LS");
            let _ = writeln!(
                s,
                "{:<26}  {:>20}  {:>6}  {}",
                "infinity",
                spec.slope_inf,
                opt_ls(r.ls_at_infinity),
                r.grad_at_infinity
            );
            for ((z, ls), (_, g)) in r.ls_locals.iter().zip(&r.grad_locals) {
                let slope = slope_of(spec, *z).map_or("?".into(), |v| v.to_string());
                let _ = writeln!(s, "{:<26}  {:>20}  {:>6}  {}", format!("z = {z}"), slope, opt_ls(*ls), g);
            }
            let _ = writeln!(s, "LS total: {}", opt_ls(r.ls_total));
            let _ = writeln!(s, "gradient total: {} ({})", r.grad_total, tri_word(r.grad_total.partial_is_nonzero()));
            s
        }
        Format::Json => pretty(&index_json(spec, r)),
    }
}

fn index_json(spec: &ProblemSpec, r: &IndexReport) -> Value {
    json!({
        "infinity": {
            "slope": spec.slope_inf,
            "ls": coeff_json(r.ls_at_infinity.map_or(Coeff::Unknown, Coeff::Known)),
            "gradient": partial_json(&r.grad_at_infinity),
        },
        "zeros": r.ls_locals.iter().zip(&r.grad_locals).map(|((z, ls), (_, g))| json!({
            "value": z,
            "slope": slope_of(spec, *z),
            "ls": coeff_json(ls.map_or(Coeff::Unknown, Coeff::Known)),
            "gradient": partial_json(g),
        })).collect::<Vec<_>>(),
        "ls_total": coeff_json(r.ls_total.map_or(Coeff::Unknown, Coeff::Known)),
        "gradient_total": partial_json(&r.grad_total),
        "gradient_total_nonzero": tri_word(r.grad_total.partial_is_nonzero()),
    })
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "theorem": v.theorem.to_string(),
        "applies": v.applies,
        "alternative": v.alternative,
        "witness": if v.applies { Value::String(v.witness.to_string()) } else { Value::Null },
        "index_crosscheck": v.index_crosscheck.to_string(),
        "notes": v.notes,
    })
}

pub fn check(spec: &ProblemSpec, report: &CheckReport, format: Format) -> String {
    match format {
        Format::Table => {
            let mut s = format!("domain: {}\n", spec.domain);
            let _ = writeln!(s, "slope at infinity: {}", spec.slope_inf);
            for z in &spec.zeros {
                let _ = writeln!(s, "zero {} with slope {}", z.value, z.slope);
            }
            for n in &report.notes {
                let _ = writeln!(s, "note: {n}");
            }
            let mut any = false;
            for v in report.applying() {
                any = true;
                let alt = v.alternative.map_or(String::new(), |a| format!(" (alternative {a})"));
                let _ = writeln!(s, "Theorem {} applies{alt}; witness {}", v.theorem, v.witness);
            }
            if !any {
                let _ = writeln!(s, "no theorem applies");
            }
            for v in report.verdicts.iter().filter(|v| !v.applies) {
                let why = if v.notes.is_empty() { String::new() } else { format!(": {}", v.notes.join("; ")) };
                let _ = writeln!(s, "  {} does not apply{why}", v.theorem);
            }
            if let Some(r) = &report.index {
                let g = match r.grad_total.partial_is_nonzero() {
                    Tri::Yes => "≠ Θ",
                    Tri::No => "= Θ",
                    Tri::Undetermined => "undetermined",
                };
                let _ = writeln!(s, "ls_total = {}; grad_total = {} {g}", opt_ls(r.ls_total), r.grad_total);
            }
            s
        }
        Format::Json => pretty(&json!({
            "domain": spec.domain.to_string(),
            "slope_at_infinity": spec.slope_inf,
            "zeros": spec.zeros.iter().map(|z| json!({"value": z.value, "slope": z.slope})).collect::<Vec<_>>(),
            "verdicts": report.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
            "applying": report.applying().map(|v| v.theorem.to_string()).collect::<Vec<_>>(),
            "index": report.index.as_ref().map(|r| index_json(spec, r)),
            "notes": report.notes,
        })),
    }
}

pub fn bif(r: &BifReport, meets: &Result<Verdict, CheckError>, format: Format) -> String {
    match format {
        Format::Table => {
            let mut s = format!("slope at infinity: {} -> {}\n", r.slope_minus, r.slope_plus);
            let _ = writeln!(s, "BIF = {} ({})", r.element, if r.nonzero { "≠ Θ" } else { "= Θ" });
            let _ = writeln!(
                s,
                "criterion: nontrivial eigenspace crossed: {}; total dimension crossed: {} ({}); criterion {}",
                r.crosses_nontrivial,
                r.dimension_between,
                if r.dimension_between % 2 == 1 { "odd" } else { "even" },
                if r.criterion() { "holds" } else { "fails" }
            );
            match meets {
                Ok(v) if v.applies => {
                    let _ = writeln!(s, "Theorem bif-meets applies; witness {}", v.witness);
                }
                Ok(v) => {
                    let _ = writeln!(s, "bif-meets does not apply: {}", v.notes.join("; "));
                }
                Err(e) => {
                    let _ = writeln!(s, "bif-meets does not apply: {e}");
                }
            }
            s
        }
        Format::Json => pretty(&json!({
            "element": r.element.to_string(),
            "nonzero": r.nonzero,
            "slope_minus": r.slope_minus,
            "slope_plus": r.slope_plus,
            "crosses_nontrivial": r.crosses_nontrivial,
            "dimension_between": r.dimension_between,
            "criterion": r.criterion(),
            "meets": match meets {
                Ok(v) => verdict_json(v),
                Err(e) => json!({"theorem": "bif-meets", "applies": false, "error": e.to_string()}),
            },
        })),
    }
}

pub fn solutions(basis: &GalerkinBasis, found: &[BranchPoint], format: Format) -> String {
    match format {
        Format::Table => {
            let mut s = format!(
                "{:>3}  {:>10}  {:>14}  {:>14}  {:>12}  {:>5}  {:>14}\n",
                "#", "lambda", "l2_norm", "h1_norm", "residual_inf", "iters", "dist_to_const"
            );
            for (i, p) in found.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{:>3}  {:>10}  {:>14.8}  {:>14.8}  {:>12.3e}  {:>5}  {:>14.8}",
                    i,
                    p.lambda,
                    p.l2_norm,
                    p.h1_norm,
                    p.residual_inf,
                    p.newton_iters,
                    basis.distance_to_constants(&p.coeffs)
                );
            }
            s
        }
        Format::Json => pretty(&Value::Array(
            found
                .iter()
                .map(|p| {
                    json!({
                        "lambda": p.lambda,
                        "l2_norm": p.l2_norm,
                        "h1_norm": p.h1_norm,
                        "residual_inf": p.residual_inf,
                        "newton_iters": p.newton_iters,
                        "distance_to_constants": basis.distance_to_constants(&p.coeffs),
                        "coefficients": p.coeffs.iter().collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )),
    }
}

pub fn branch_csv(points: &[BranchPoint], coefficients: bool) -> String {
    let mut s = String::from("lambda,l2_norm,h1_norm,residual_inf,newton_iters");
    if coefficients {
        if let Some(p) = points.first() {
            for i in 0..p.coeffs.len() {
                let _ = write!(s, ",c{i}");
            }
        }
    }
    s.push('\n');
    for p in points {
        let _ = write!(s, "{},{},{},{},{}", p.lambda, p.l2_norm, p.h1_norm, p.residual_inf, p.newton_iters);
        if coefficients {
            for c in p.coeffs.iter() {
                let _ = write!(s, ",{c}");
            }
        }
        s.push('\n');
    }
    s
}

pub fn branch_summary(b: &Branch, blowup: Option<f64>) -> String {
    let how = match b.termination {
        Termination::RangeExit => "left the parameter range",
        Termination::NormCap => "exceeded the norm cap",
        Termination::StepUnderflow => "step size underflow",
        Termination::MaxSteps => "step limit reached",
    };
    let mut s = format!("{} points; stopped: {how}\n", b.points.len());
    if let (Some(first), Some(last)) = (b.points.first(), b.points.last()) {
        let _ = writeln!(s, "lambda {} -> {}", first.lambda, last.lambda);
    }
    for d in &b.degeneracies {
        let _ = writeln!(s, "{:?} near lambda = {} (after point {})", d.kind, d.lambda, d.after);
    }
    if let Some(l) = blowup {
        let _ = writeln!(s, "blow-up estimate: lambda = {l}");
    }
    s
}
