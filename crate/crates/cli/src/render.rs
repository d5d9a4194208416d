//! JSON and table output.

use std::fmt::Write;

use laplace_core::coefficients::Expansion;
use laplace_core::multiindex::{MultiIndex, SphereMoment};
use laplace_core::number::{rational_to_f64, Rational, Real};
use laplace_core::oracle::{LevelStatus, QuadratureReport};
use serde_json::{json, Value};

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn exact_or_dash(x: &Real) -> String {
    if x.is_exact() {
        x.to_string()
    } else {
        "-".into()
    }
}

fn header(e: &Expansion) -> String {
    let mut out = String::new();
    let p = &e.params;
    let _ = writeln!(
        out,
        "pathway {}   d = {}   ν = {}   λ = {}   N = {}",
        e.pathway, p.dim, p.nu, p.lambda, p.order
    );
    if let Some(n) = &e.normalization {
        let _ = writeln!(out, "det H = {} ({:.12e})", n.det_hessian, n.det_hessian.to_f64());
        let rows: Vec<String> = n
            .p
            .iter()
            .map(|r| r.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" "))
            .collect();
        let _ = writeln!(out, "P = [{}]", rows.join("; "));
    }
    let kind = match e.remainder.kind {
        laplace_core::coefficients::RemainderKind::BigO => "O",
        laplace_core::coefficients::RemainderKind::LittleO => "o",
    };
    let _ = writeln!(out, "remainder {kind}(k^-({}))", e.remainder.exponent);
    out
}

pub fn expansion(e: &Expansion, json: bool) -> String {
    if json {
        return pretty(&e.to_json());
    }
    let mut out = header(e);
    let rows: Vec<[String; 4]> = e
        .terms
        .iter()
        .map(|t| {
            [
                t.j.to_string(),
                format!("k^-({})", t.power),
                exact_or_dash(&t.zeta),
                format!("{:.16e}", t.zeta.to_f64()),
            ]
        })
        .collect();
    table(&mut out, ["j", "power", "ζ_j exact", "ζ_j"], &rows);
    out
}

fn table<const N: usize>(out: &mut String, head: [&str; N], rows: &[[String; N]]) {
    let mut width: [usize; N] = head.map(|h| h.chars().count());
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(head.to_vec()));
    for r in rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

fn status(s: LevelStatus) -> &'static str {
    match s {
        LevelStatus::Pass => "pass",
        LevelStatus::Fail => "FAIL",
        LevelStatus::FloorLimited => "floor-limited",
    }
}

pub fn report(e: &Expansion, r: &QuadratureReport, json: bool) -> String {
    if json {
        return pretty(&json!({
            "expansion": e.to_json(),
            "report": serde_json::to_value(r).expect("serializable"),
        }));
    }
    let mut out = header(e);
    out.push('\n');
    let rows: Vec<[String; 4]> = r
        .k_values
        .iter()
        .enumerate()
        .map(|(i, k)| {
            [
                format!("{k:.4e}"),
                format!("{:.16e}", r.integrals[i]),
                format!("{:.2e}", r.error_estimates[i]),
                r.nodes[i].to_string(),
            ]
        })
        .collect();
    table(&mut out, ["k", "I(k)", "error", "nodes"], &rows);
    out.push('\n');
    let rows: Vec<[String; 5]> = r
        .levels
        .iter()
        .map(|l| {
            [
                l.level.to_string(),
                format!("{:.3}", l.target_slope),
                l.fitted_slope.map_or("-".into(), |s| format!("{s:.3}")),
                l.points_used.to_string(),
                status(l.status).into(),
            ]
        })
        .collect();
    table(&mut out, ["level", "target", "slope", "points", "status"], &rows);
    let _ = writeln!(out, "\n{}", if r.pass { "PASS" } else { "FAIL" });
    out
}

pub fn stirling(c: &[Rational], json: bool) -> String {
    if json {
        return pretty(&Value::Array(
            c.iter()
                .enumerate()
                .map(|(j, v)| json!({"j": j, "c": v.to_string(), "value": rational_to_f64(v)}))
                .collect(),
        ));
    }
    let rows: Vec<[String; 3]> = c
        .iter()
        .enumerate()
        .map(|(j, v)| [j.to_string(), v.to_string(), format!("{:.16e}", rational_to_f64(v))])
        .collect();
    let mut out = String::new();
    table(&mut out, ["j", "c_j", "decimal"], &rows);
    out
}

pub fn moment(a: &MultiIndex, m: &SphereMoment, json: bool) -> String {
    let exact = m.to_closed().to_string();
    if json {
        return pretty(&json!({"alpha": a.key(), "exact": exact, "value": m.to_f64()}));
    }
    format!("{exact}\n{:.16e}\n", m.to_f64())
}

pub fn inverted(b: &[Real], json: bool) -> String {
    if json {
        return pretty(&Value::Array(
            b.iter()
                .enumerate()
                .map(|(j, v)| {
                    json!({
                        "j": j,
                        "b": if v.is_exact() { json!(v.to_string()) } else { json!(v.to_f64()) },
                        "value": v.to_f64(),
                    })
                })
                .collect(),
        ));
    }
    let rows: Vec<[String; 3]> = b
        .iter()
        .enumerate()
        .map(|(j, v)| [j.to_string(), exact_or_dash(v), format!("{:.16e}", v.to_f64())])
        .collect();
    let mut out = String::new();
    table(&mut out, ["j", "b_j exact", "b_j"], &rows);
    out
}
