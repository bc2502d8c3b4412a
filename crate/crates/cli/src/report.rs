use std::fmt::Write;

use serde::Serialize;

use bglfrps::data::ReferenceFit;
use bglfrps::fitting::FitReport;
use bglfrps::gof::GofReport;

/// Everything `fit` emits; the JSON form serializes this directly.
#[derive(Debug, Serialize)]
pub struct FitOutput<'a> {
    pub data: String,
    pub scale: f64,
    pub fit: &'a FitReport,
    pub gof: &'a GofReport,
}

const KS_NAMES: [&str; 3] = ["y1", "y2", "max"];

impl FitOutput<'_> {
    /// `key: value` lines followed by a `trace:` block of `iteration loglik` rows.
    pub fn to_text(&self) -> String {
        let fit = self.fit;
        let v = fit.mle.to_vec();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}: {v}");
        };
        kv("data", self.data.clone());
        kv("scale", self.scale.to_string());
        kv("family", fit.family.clone());
        kv("n", self.gof.n.to_string());
        kv("m0", fit.m0.to_string());
        kv("m1", fit.m1.to_string());
        kv("m2", fit.m2.to_string());
        for (name, value) in ["alpha1", "alpha2", "alpha3", "beta", "gamma", "theta"]
            .iter()
            .zip(v)
        {
            kv(name, format!("{value:.6}"));
        }
        kv("loglik", format!("{:.6}", fit.loglik));
        kv("iterations", fit.iterations.to_string());
        kv("best_iteration", fit.best_iteration.to_string());
        kv("converged", fit.converged.to_string());
        kv(
            "active_clamps",
            if fit.active_clamps.is_empty() {
                "none".into()
            } else {
                fit.active_clamps.join(",")
            },
        );
        kv("k", self.gof.k.to_string());
        kv("aic", format!("{:.4}", self.gof.aic));
        kv("aicc", format!("{:.4}", self.gof.aicc));
        kv("bic", format!("{:.4}", self.gof.bic));
        for (name, ks) in KS_NAMES.iter().zip(self.gof.ks) {
            kv(&format!("ks_{name}"), format!("{:.4}", ks.statistic));
            kv(&format!("ks_{name}_p"), format!("{:.4}", ks.p_value));
        }
        out.push_str("trace:\n");
        for (i, ll) in fit.loglik_trace.iter().enumerate() {
            let _ = writeln!(out, "{i} {ll:.8}");
        }
        out
    }
}

/// One row of the reproduction table.
#[derive(Debug, Serialize)]
pub struct ReproRow<'a> {
    pub label: &'static str,
    pub fit: &'a FitReport,
    pub gof: &'a GofReport,
    #[serde(skip)]
    pub reference: &'a ReferenceFit,
    pub reference_loglik: f64,
    pub reference_lrt: Option<f64>,
}

pub fn reproduce_text(rows: &[ReproRow<'_>], counts: (usize, usize, usize)) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "data: embedded, scale 0.01");
    let _ = writeln!(out, "m0: {}\nm1: {}\nm2: {}", counts.0, counts.1, counts.2);
    let _ = writeln!(out);

    let header = |out: &mut String, title: &str| {
        let _ = write!(out, "{title:<10}");
        for r in rows {
            let _ = write!(out, "{:>30}", r.label);
        }
        out.push('\n');
    };
    header(&mut out, "statistic");
    let cell = |ours: f64, theirs: f64, digits: usize| {
        format!(
            "{:.d$} ({:.d$}, {:+.d$})",
            ours,
            theirs,
            ours - theirs,
            d = digits
        )
    };
    let names = ["alpha1", "alpha2", "alpha3", "beta", "gamma", "theta"];
    for (i, name) in names.iter().enumerate() {
        let _ = write!(out, "{name:<10}");
        for r in rows {
            let ours = r.fit.mle.to_vec()[i];
            let theirs = r.reference.estimates[i];
            if i == 5 && r.fit.mle.family.is_degenerate() {
                let _ = write!(out, "{:>30}", "-");
            } else {
                let _ = write!(out, "{:>30}", cell(ours, theirs, 4));
            }
        }
        out.push('\n');
    }
    let mut line =
        |name: &str, ours: &dyn Fn(&ReproRow<'_>) -> f64, theirs: &dyn Fn(&ReferenceFit) -> f64| {
            let _ = write!(out, "{name:<10}");
            for r in rows {
                let _ = write!(out, "{:>30}", cell(ours(r), theirs(r.reference), 4));
            }
            out.push('\n');
        };
    line("loglik", &|r| r.fit.loglik, &|f| f.loglik);
    line("aic", &|r| r.gof.aic, &|f| f.aic);
    line("aicc", &|r| r.gof.aicc, &|f| f.aicc);
    line("bic", &|r| r.gof.bic, &|f| f.bic);
    for (k, name) in KS_NAMES.iter().enumerate() {
        line(&format!("ks_{name}"), &|r| r.gof.ks[k].statistic, &|f| {
            f.ks[k].0
        });
        line(&format!("ks_{name}_p"), &|r| r.gof.ks[k].p_value, &|f| {
            f.ks[k].1
        });
    }
    let _ = write!(out, "{:<10}", "lrt");
    for r in rows {
        let text = r
            .reference_lrt
            .map_or_else(|| "-".to_string(), |v| format!("(recorded {v:.4})"));
        let _ = write!(out, "{text:>30}");
    }
    out.push('\n');
    let _ = write!(out, "{:<10}", "converged");
    for r in rows {
        let _ = write!(
            out,
            "{:>30}",
            format!("{} ({} it)", r.fit.converged, r.fit.iterations)
        );
    }
    out.push('\n');
    out.push_str("\ncells read: ours (reference, ours - reference)\n");
    out
}
