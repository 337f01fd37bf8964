//! Text and JSON rendering of command results.

use std::path::Path;

use hatlab_core::bounds::BoundRecord;
use hatlab_core::exact::rational::{float_to_significant, to_f64};
use hatlab_core::exact::{rational_to_string, to_decimal, BigRational};
use hatlab_core::game::{self, FinitePair, PairFile};
use hatlab_core::machine::ClosedForm;
use hatlab_core::monte_carlo::SimulationReport;
use hatlab_core::search::{SearchConfig, SearchMode, SearchReport};
use serde_json::{json, Value};

const DIGITS: usize = 15;

/// `"7/20 = 0.35"`.
fn exact_and_decimal(r: &BigRational) -> String {
    format!("{} = {}", rational_to_string(r), to_decimal(r, DIGITS))
}

fn emit(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn pair_json(pair: &FinitePair) -> Value {
    serde_json::to_value(PairFile::from_pair(pair)).expect("serializable")
}

pub fn eval(pair: &FinitePair, p: &BigRational, value: &BigRational, json: bool) -> String {
    let counts = game::evaluate_pair(pair);
    let poly = counts.polynomial();
    if json {
        return emit(json!({
            "p": rational_to_string(p),
            "win_probability": rational_to_string(value),
            "decimal": to_decimal(value, DIGITS),
            "win_counts": counts.counts(),
            "polynomial": poly.to_string(),
        }));
    }
    format!(
        "win probability at p = {}: {}\nwin counts by white hats: {:?}\nwin polynomial: {}\n",
        rational_to_string(p),
        exact_and_decimal(value),
        counts.counts(),
        poly
    )
}

fn compact(s: String) -> String {
    s.replace(' ', "")
}

pub fn closed_form(
    name: &str,
    cf: &ClosedForm,
    exact: bool,
    at: Option<(BigRational, BigRational)>,
    json: bool,
) -> String {
    let formula = if exact {
        cf.value.to_exact_string()
    } else {
        compact(cf.value.to_string())
    };
    if json {
        let mut v = json!({
            "strategy": name,
            "value": compact(cf.value.to_string()),
            "exact": cf.value.to_exact_string(),
            "system_size": cf.system_size,
            "continuation_ratios": cf
                .continuation_ratios
                .iter()
                .map(|(s, r)| json!({"state": s.to_string(), "ratio": compact(r.to_string())}))
                .collect::<Vec<_>>(),
        });
        if let Some((p, val)) = &at {
            v["p"] = json!(rational_to_string(p));
            v["value_at_p"] = json!(rational_to_string(val));
            v["decimal_at_p"] = json!(to_decimal(val, DIGITS));
        }
        return emit(v);
    }
    let mut out = format!("V(p) = {formula}\nrenewal unknowns: {}\n", cf.system_size);
    if let Some((p, val)) = at {
        out.push_str(&format!(
            "V({}) = {}\n",
            rational_to_string(&p),
            exact_and_decimal(&val)
        ));
    }
    out
}

pub fn search(cfg: &SearchConfig, r: &SearchReport, json: bool) -> String {
    let mode = match (cfg.mode, cfg.symmetric) {
        (SearchMode::Exhaustive, false) => "exhaustive",
        (SearchMode::Exhaustive, true) => "symmetric",
        (SearchMode::HillClimb, _) => "hillclimb",
    };
    if json {
        return emit(json!({
            "mode": mode,
            "hats": cfg.hats,
            "p": rational_to_string(&cfg.p),
            "symmetric": cfg.symmetric,
            "best_value": rational_to_string(&r.best_value),
            "decimal": to_decimal(&r.best_value, DIGITS),
            "best_win_counts": r.best_win_counts.counts(),
            "optimum_count": r.optimum_count,
            "class_count": r.class_count,
            "witnesses": r.witnesses.iter().map(pair_json).collect::<Vec<_>>(),
            "iterations": r.iterations,
            "converged_restarts": r.converged_restarts,
        }));
    }
    let mut out = format!(
        "{mode} search, {} hats, p = {}\nbest value: {}\nwin counts by white hats: {:?}\n",
        cfg.hats,
        rational_to_string(&cfg.p),
        exact_and_decimal(&r.best_value),
        r.best_win_counts.counts()
    );
    if let Some(c) = r.optimum_count {
        out.push_str(&format!("optimal pairs: {c}\n"));
    }
    if let Some(c) = r.class_count {
        out.push_str(&format!("renumbering classes: {c}\n"));
    }
    if let Some(c) = r.converged_restarts {
        out.push_str(&format!("converged restarts: {c} of {}\n", cfg.restarts));
    }
    out.push_str(&format!("iterations: {}\n", r.iterations));
    for (i, w) in r.witnesses.iter().enumerate() {
        out.push_str(&format!("witness {}: {}", i + 1, PairFile::render(w)));
    }
    out
}

fn upper_text(r: &BoundRecord) -> String {
    if r.upper_exact {
        exact_and_decimal(&r.upper)
    } else {
        format!(
            "{} (floating point)",
            float_to_significant(to_f64(&r.upper), DIGITS)
        )
    }
}

pub fn bounds(r: &BoundRecord, json: bool) -> String {
    if json {
        return emit(json!({
            "p": rational_to_string(&r.p),
            "lower": rational_to_string(&r.lower),
            "lower_decimal": to_decimal(&r.lower, DIGITS),
            "lower_witness": r.lower_witness.name(),
            "upper": if r.upper_exact { json!(rational_to_string(&r.upper)) } else { Value::Null },
            "upper_decimal": float_to_significant(to_f64(&r.upper), DIGITS),
            "upper_exact": r.upper_exact,
            "binomial_exponent": r.binomial_exponent.to_string(),
        }));
    }
    format!(
        "p = {}\nlower: {} ({})\nupper: {}\nbinomial exponent: {}\n",
        rational_to_string(&r.p),
        exact_and_decimal(&r.lower),
        r.lower_witness,
        upper_text(r),
        r.binomial_exponent
    )
}

pub fn curve(out: &Path, rows: usize, json: bool) -> String {
    if json {
        return emit(json!({"out": out.display().to_string(), "rows": rows}));
    }
    format!("wrote {rows} rows to {}\n", out.display())
}

pub fn simulation(r: &SimulationReport, json: bool) -> String {
    if json {
        return emit(serde_json::to_value(r).expect("serializable"));
    }
    let e = &r.event_counts;
    let mut out = format!(
        "trials: {}\nwins: {}\nestimate: {:.6} (stderr {:.2e})\nevents: WW {} WB {} BW {} BB {} unresolved {}\nseed: {}\n",
        r.trials, r.wins, r.estimate, r.stderr, e.ww, e.wb, e.bw, e.bb, e.unresolved, r.seed
    );
    if let Some(m) = r.max_blocks {
        out.push_str(&format!("max blocks: {m}\n"));
    }
    out
}
