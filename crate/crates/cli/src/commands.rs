//! One runner per subcommand. Each returns a [`RunReport`] whose failures
//! list the internal checks that did not hold.

use serde_json::json;

use chanent::channel::{isotropic_ppt_threshold, swap_channel, swap_unitary};
use chanent::measures::{
    diamond_bounds, eh_maximize, generalized_robustness, inequality_suite, max_overlap_ppt, nielsen_unitary_robustness,
    smoothed_log_robustness, standard_robustness, RobustnessKind, SolverSettings, Structure,
};
use chanent::report::RunReport;
use chanent::superchannel::{
    catalytic_dilution, cost_bound_harness, distill_bound_harness, growth_suite, monotonicity_suite, seppsc_certify,
    twirl_image_rank, twisted_twirl, GrowthConfig, MonotonicityConfig, Verdict,
};
use chanent::{Error, Result};

use crate::specs;

pub struct Common {
    pub settings: SolverSettings,
    pub seed: u64,
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain data serializes")
}

pub fn golden_units(c: &Common, max_k: usize) -> Result<RunReport> {
    if !(2..=4).contains(&max_k) {
        return Err(Error::Invalid(format!("--max-k must be between 2 and 4, got {max_k}")));
    }
    let mut rep = RunReport::new("golden-units", c.settings, c.seed, json!({ "max_k": max_k }));
    let mut rows = Vec::new();
    for k in 2..=max_k {
        let f = swap_channel(k)?;
        let exact = (k * k - 1) as f64;
        let rs = standard_robustness(&f, &c.settings)?;
        let rg = generalized_robustness(&f, &c.settings)?;
        let nielsen = nielsen_unitary_robustness(&swap_unitary(k), k, k)?.value();
        rep.check((rs.value - exact).abs() <= 1e-5, format!("standard robustness of F^{k} is {} not {exact}", rs.value));
        rep.check((rg.value - exact).abs() <= 1e-5, format!("generalized robustness of F^{k} is {} not {exact}", rg.value));
        rep.check(
            nielsen.is_some_and(|v| (v - rs.value).abs() <= 1e-5),
            format!("unitary formula {nielsen:?} disagrees with the SDP value {}", rs.value),
        );
        rep.reports.push(rs.report);
        rep.reports.push(rg.report);
        rows.push(json!({
            "k": k,
            "standard_robustness": rs.value,
            "generalized_robustness": rg.value,
            "unitary_formula": nielsen,
            "expected": exact,
        }));
    }
    let mut thresholds = Vec::new();
    for k in 2..=4 {
        let t = isotropic_ppt_threshold(k, 1e-9)?;
        let overlap = max_overlap_ppt(k, &c.settings)?;
        rep.check((t - 1.0 / k as f64).abs() <= 1e-6, format!("isotropic PPT threshold at k = {k} is {t}"));
        rep.check((overlap - 1.0 / k as f64).abs() <= 1e-6, format!("PPT overlap with Phi_{k} is {overlap}"));
        thresholds.push(json!({ "k": k, "isotropic_threshold": t, "ppt_overlap": overlap, "expected": 1.0 / k as f64 }));
    }
    rep.details = json!({ "swap": rows, "isotropic": thresholds });
    Ok(rep)
}

pub fn robustness(c: &Common, channel: &str, eps: f64) -> Result<RunReport> {
    let n = specs::channel(channel)?;
    let mut rep = RunReport::new("robustness", c.settings, c.seed, json!({ "channel": channel, "eps": eps }));
    let mut details = serde_json::Map::new();
    for (name, kind) in [("standard", RobustnessKind::Standard), ("generalized", RobustnessKind::Generalized)] {
        let sm = smoothed_log_robustness(&n, eps, kind, Structure::Auto, &c.settings)?;
        details.insert(name.into(), json!({ "robustness": sm.robustness, "log_robustness": sm.value }));
        rep.reports.push(sm.report);
    }
    rep.details = serde_json::Value::Object(details);
    Ok(rep)
}

pub fn diamond(c: &Common, channel: &str, other: &str) -> Result<RunReport> {
    let n = specs::channel(channel)?;
    let m = specs::channel(other)?;
    let mut rep = RunReport::new("diamond", c.settings, c.seed, json!({ "channel": channel, "other": other }));
    let (b, _) = diamond_bounds(&n, &m, &c.settings)?;
    rep.check(b.lower <= b.upper + 1e-9, format!("diamond bracket is inverted: {} > {}", b.lower, b.upper));
    rep.reports.push(chanent::measures::diamond_distance(&n, &m, &c.settings)?);
    rep.details = to_json(&b);
    Ok(rep)
}

pub fn eh(c: &Common, channel: &str, eps: f64, restarts: usize) -> Result<RunReport> {
    let n = specs::channel(channel)?;
    let mut rep =
        RunReport::new("eh", c.settings, c.seed, json!({ "channel": channel, "eps": eps, "restarts": restarts }));
    let r = eh_maximize(&n, eps, restarts, c.seed, &c.settings)?;
    rep.check(r.acceptance >= 1.0 - eps - 1e-6, format!("optimal test accepts N with probability {}", r.acceptance));
    rep.details = json!({ "value": r.value, "acceptance": r.acceptance, "free_acceptance": r.free_acceptance });
    rep.reports.push(r.report);
    Ok(rep)
}

pub fn cost_bounds(c: &Common, channel: &str, eps: f64, probes: usize) -> Result<RunReport> {
    let n = specs::channel(channel)?;
    let mut rep =
        RunReport::new("cost-bounds", c.settings, c.seed, json!({ "channel": channel, "eps": eps, "probes": probes }));
    let b = cost_bound_harness(&n, eps, probes, c.seed, &c.settings)?;
    rep.check(b.within_bounds, format!("realized {} outside [{}, {}]", b.realized, b.lower, b.upper));
    rep.check(b.simulation_residual <= 1e-7, format!("simulation residual {:.3e}", b.simulation_residual));
    let cap = 1.0 / (b.k * b.k) as f64 + 1e-9;
    rep.check(b.max_free_overlap <= cap, format!("separable probe overlap {} exceeds 1/K^2", b.max_free_overlap));
    rep.check(
        b.certificate.verdict == Verdict::Pass,
        format!("separable probe mapped to robustness {}", b.certificate.max_output_robustness),
    );
    if let Some(d) = b.target_distance {
        rep.check(d <= eps + 1e-6, format!("smoothed channel is {d} from the input"));
    }
    rep.reports.extend(b.reports.iter().cloned());
    rep.details = to_json(&b);
    Ok(rep)
}

pub fn distill_bounds(c: &Common, channel: &str, eps: f64, restarts: usize) -> Result<RunReport> {
    let n = specs::channel(channel)?;
    let mut rep = RunReport::new(
        "distill-bounds",
        c.settings,
        c.seed,
        json!({ "channel": channel, "eps": eps, "restarts": restarts }),
    );
    let d = distill_bound_harness(&n, eps, restarts, c.seed, &c.settings)?;
    rep.check(d.error_within_eps, format!("distilled channel is {} from F^{}", d.diamond_error, d.k));
    rep.check(d.upper_holds, format!("realized {} above E_H at 2 eps = {}", d.realized, d.eh_double));
    rep.check(
        d.realized >= d.lower_guaranteed - 1e-5,
        format!("realized {} below floor(E_H) - 1 = {}", d.realized, d.lower_guaranteed),
    );
    rep.check(
        d.lower_holds,
        format!(
            "realized {} below the odd-case bound E_H - 1 = {}; only floor(E_H) - 1 = {} is guaranteed",
            d.realized, d.lower, d.lower_guaranteed
        ),
    );
    rep.reports.extend(d.reports.iter().cloned());
    rep.details = to_json(&d);
    Ok(rep)
}

pub fn catalysis(c: &Common, channel: &str, l: usize, delta: f64, eps: f64, probes: usize) -> Result<RunReport> {
    let n = specs::channel(channel)?;
    let mut rep = RunReport::new(
        "catalysis",
        c.settings,
        c.seed,
        json!({ "channel": channel, "l": l, "delta": delta, "eps": eps, "probes": probes }),
    );
    let cat = catalytic_dilution(&n, l, delta, eps, &c.settings)?;
    let b = cat.bounds;
    rep.check(cat.simulation_residual <= 1e-7, format!("simulation residual {:.3e}", cat.simulation_residual));
    let cap = 1.0 / ((l * l) as f64 - 1.0) + 1e-6;
    rep.check(cat.miss_robustness <= cap, format!("miss channel robustness {} exceeds 1/(L^2 - 1)", cat.miss_robustness));
    rep.check(
        cat.realized >= b.lower - 1e-5 && cat.realized <= b.upper + 1e-5,
        format!("realized {} outside [{}, {}]", cat.realized, b.lower, b.upper),
    );
    let mut details = json!({
        "k": cat.k,
        "l": cat.l,
        "r": cat.r,
        "realized": cat.realized,
        "epsilon": cat.epsilon,
        "epsilon_prime": cat.epsilon_prime,
        "bounds": to_json(&b),
        "miss_robustness": cat.miss_robustness,
        "simulation_residual": cat.simulation_residual,
    });
    if probes > 0 {
        let cert = seppsc_certify(&cat.superchannel, probes, delta, c.seed, &c.settings)?;
        rep.check(
            cert.verdict == Verdict::Pass,
            format!("separable probe mapped to robustness {} > delta", cert.max_output_robustness),
        );
        details["certificate"] = to_json(&cert);
    }
    rep.reports.push(cat.report);
    rep.details = details;
    Ok(rep)
}

pub fn twirl(c: &Common, k: usize, probes: usize) -> Result<RunReport> {
    let mut rep = RunReport::new("twirl", c.settings, c.seed, json!({ "k": k, "probes": probes }));
    let f = swap_channel(k)?;
    let t = twisted_twirl(&f)?;
    let fixed = (t.choi() - f.choi()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    rep.check(fixed <= 1e-10, format!("twirl moves F^{k} by {fixed:.3e}"));
    let mut idem: f64 = 0.0;
    for j in 0..probes.min(5) {
        let e = chanent::channel::random_channel([k; 4], c.seed.wrapping_add(j as u64))?;
        let once = twisted_twirl(&e)?;
        let twice = twisted_twirl(&once)?;
        idem = idem.max((once.choi() - twice.choi()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    rep.check(idem <= 1e-10, format!("twirl is not idempotent ({idem:.3e})"));
    let rank = twirl_image_rank(k, k, probes, c.seed)?;
    rep.check(rank == 4, format!("twirl image has rank {rank}, not 4"));
    rep.details = json!({ "swap_residual": fixed, "idempotence_residual": idem, "image_rank": rank });
    Ok(rep)
}

pub fn inequalities(c: &Common, pairs: usize) -> Result<RunReport> {
    let mut rep = RunReport::new("inequalities", c.settings, c.seed, json!({ "pairs": pairs }));
    let s = inequality_suite(pairs, c.seed, &c.settings)?;
    rep.check(s.violations == 0, format!("{} inequality violations", s.violations));
    rep.details = to_json(&s);
    Ok(rep)
}

pub fn monotonicity(c: &Common, channels: usize, superchannels: usize, eh_eps: f64, w: f64) -> Result<RunReport> {
    let mut rep = RunReport::new(
        "monotonicity",
        c.settings,
        c.seed,
        json!({ "channels": channels, "superchannels": superchannels, "eh_eps": eh_eps, "w": w }),
    );
    let cfg = MonotonicityConfig { channels, superchannels, eh_eps, seed: c.seed, ..Default::default() };
    let m = monotonicity_suite(cfg, &c.settings)?;
    rep.check(m.violations() == 0, format!("{} monotonicity violations", m.violations()));
    let g = growth_suite(GrowthConfig { w, channels, seed: c.seed, ..Default::default() }, &c.settings)?;
    rep.check(g.violations() == 0, format!("{} growth violations", g.violations()));
    rep.details = json!({ "monotonicity": to_json(&m), "growth": to_json(&g) });
    Ok(rep)
}

pub fn certify(c: &Common, superchannel: &str, delta: f64, samples: usize) -> Result<RunReport> {
    let theta = specs::superchannel(superchannel, &c.settings)?;
    let mut rep = RunReport::new(
        "certify",
        c.settings,
        c.seed,
        json!({ "superchannel": superchannel, "delta": delta, "samples": samples }),
    );
    let cert = seppsc_certify(&theta, samples, delta, c.seed, &c.settings)?;
    rep.check(cert.verdict == Verdict::Pass, format!("worst output robustness {}", cert.max_output_robustness));
    rep.details = to_json(&cert);
    Ok(rep)
}
