use std::path::Path;

use serde::Serialize;
use serde_json::json;

use chowla_core::correlations::{
    ch_battery, davenport_scan, strong_sarnak_sum, ClaimKind, CorrelationSpec, Observable, OrbitSampler,
};
use chowla_core::empirics::{complexity_profile, entropy_estimate, hat_extension_test_with_mass};
use chowla_core::entbounds::{audit_entropy_pair, EntropyPair};
use chowla_core::io;
use chowla_core::numbergen::{liouville_prefix, mobius_prefix, mu_b_prefix, BSet};
use chowla_core::symbolicgen::{
    bernoulli_prefix, coded_example_prefix, determinize_step, example_aa_prefix, signed_sturmian_prefix,
    squares_needed_prefix, sturmian_prefix, ternary_sturmian_prefix, BernoulliParams, DeterminizeParams,
    SturmianParams,
};
use chowla_core::toeplitz::{
    build_toeplitz, interval_analytics, toeplitz_correlation, toeplitz_entropy_bound, IntervalParams, ToeplitzSpec,
};
use chowla_core::{square_map, SignSeq, Symbol};

use crate::args::Observable as ArgObservable;
use crate::args::*;
use crate::report::{to_value, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] chowla_core::Error),
    #[error("invalid value for `--{flag}`: {reason}")]
    Usage { flag: &'static str, reason: String },
    #[error("cannot read `{path}`: {source}")]
    Input {
        path: String,
        source: chowla_core::Error,
    },
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(flag: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Usage {
        flag,
        reason: reason.into(),
    }
}

fn load(path: &Path) -> CliResult<SignSeq> {
    io::load(path).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn prefix(z: SignSeq, n: Option<usize>) -> CliResult<SignSeq> {
    match n {
        Some(n) => Ok(z.prefix(n)?),
        None => Ok(z),
    }
}

/// Longest sum length a prefix of `len` terms supports with lags up to `max_lag`.
fn default_len(len: usize, max_lag: usize, flag: &'static str) -> CliResult<usize> {
    if len <= max_lag {
        return Err(usage(flag, format!("lag {max_lag} leaves no terms in a prefix of {len}")));
    }
    Ok(len - max_lag)
}

fn sturmian_params(alpha: Option<f64>, beta: f64) -> CliResult<SturmianParams> {
    let alpha = alpha.unwrap_or(SturmianParams::golden().alpha);
    let p = SturmianParams::new(alpha, beta)?;
    if let Some((num, den)) = p.near_rational() {
        eprintln!("warning: alpha = {alpha} is within 1e-12 of {num}/{den}; p_n = n + 1 will fail");
    }
    Ok(p)
}

fn parse_bset(spec: &str, n: usize) -> CliResult<BSet> {
    if spec == "prime-squares" {
        return Ok(BSet::prime_squares_with_roots(n as u64)?);
    }
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage("bset", format!("`{spec}`: {e}")))?;
    Ok(BSet::from_squares(&values)?)
}

pub fn generate(a: &GenerateArgs) -> CliResult<Outcome> {
    let n = a.n;
    let seq = match a.kind {
        Kind::Mobius => mobius_prefix(n)?,
        Kind::Liouville => liouville_prefix(n)?,
        Kind::MuB => mu_b_prefix(&parse_bset(&a.bset, n)?, n)?,
        Kind::Sturmian => sturmian_prefix(&sturmian_params(a.alpha, a.beta)?, n)?,
        Kind::Bernoulli => {
            let alphabet: &[Symbol] = match a.probs.len() {
                2 => &[Symbol::NEG, Symbol::POS],
                3 => &[Symbol::NEG, Symbol::ZERO, Symbol::POS],
                k => return Err(usage("probs", format!("need 2 or 3 probabilities, got {k}"))),
            };
            bernoulli_prefix(alphabet, &BernoulliParams::new(a.probs.clone(), a.seed)?, n)?
        }
        Kind::Coded => coded_example_prefix(a.k0, a.seed, n)?,
        Kind::SquaresNeeded => squares_needed_prefix(a.seed, n)?,
        Kind::ExampleAa => example_aa_prefix(n)?,
        Kind::SignedSturmian => signed_sturmian_prefix(&sturmian_params(a.alpha, a.beta)?, a.seed, n)?,
        Kind::TernarySturmian => ternary_sturmian_prefix(&sturmian_params(a.alpha, a.beta)?, a.seed, n)?,
    };
    io::save(&a.out, &seq)?;
    let result = json!({
        "out": a.out.display().to_string(),
        "len": seq.len(),
        "bytes": io::HEADER_LEN + seq.len(),
        "support_density": seq.support_density(),
    });
    let mut o = Outcome::new("generate", a, &result);
    o.seed = a.kind.is_random().then_some(a.seed);
    o.n = Some(n);
    Ok(o)
}

pub fn chowla(a: &ChowlaArgs) -> CliResult<Outcome> {
    let z = load(&a.input)?;
    let n = match a.n {
        Some(n) => n,
        None => default_len(z.len(), a.max_lag, "max-lag")?,
    };
    let claim = match a.claim {
        Claim::Theorem => ClaimKind::Theorem,
        Claim::Consistency => ClaimKind::Consistency,
    };
    let report = ch_battery(&z, a.max_lag, a.max_r, n, a.tol, claim)?;
    let verdict = match a.family {
        Family::Full => &report.full,
        Family::Linear => &report.linear,
    };
    let mut o = Outcome::new("chowla", a, &report);
    o.n = Some(n);
    o.passed = Some(verdict.passed);
    o.failure_note = verdict.witness.map(|i| {
        let w = &report.results[i];
        format!("worst spec {}: value {:.6}, tol {}", w.spec, w.value, a.tol)
    });
    o.curves = report
        .results
        .iter()
        .map(|r| (r.spec.to_string(), r.curve.checkpoints.clone()))
        .collect();
    Ok(o)
}

pub fn sarnak(a: &SarnakArgs) -> CliResult<Outcome> {
    let z = load(&a.input)?;
    let sampler = match a.system {
        System::Rotation => {
            let f = match a.f {
                ArgObservable::Cos => Observable::Cos,
                ArgObservable::Sin => Observable::Sin,
            };
            OrbitSampler::rotation(a.alpha, a.x0, f)?
        }
        System::Periodic => OrbitSampler::periodic(a.pattern.clone())?,
        System::Subshift => {
            let path = a.orbit.as_ref().ok_or_else(|| usage("orbit", "required for the subshift system"))?;
            OrbitSampler::subshift(load(path)?)
        }
    };
    let spec = if a.lags.is_empty() && a.exponents.is_empty() {
        CorrelationSpec::mean()
    } else {
        let exponents = if a.exponents.is_empty() {
            vec![1; a.lags.len() + 1]
        } else {
            a.exponents.clone()
        };
        CorrelationSpec::new(a.lags.clone(), exponents)?
    };
    let n = match a.n {
        Some(n) => n,
        None => {
            let mut n = default_len(z.len(), spec.max_lag(), "lags")?;
            if let OrbitSampler::Subshift { w } = &sampler {
                n = n.min(w.len().saturating_sub(1));
            }
            n
        }
    };
    let curve = strong_sarnak_sum(&sampler, &z, &spec, n)?;
    let value = curve.final_value();
    let result = json!({
        "spec": spec,
        "sampler": sampler,
        "value": value,
        "curve": curve,
    });
    let mut o = Outcome::new("sarnak", a, &result);
    o.n = Some(n);
    o.passed = a.tol.map(|t| value.abs() < t);
    o.failure_note = a.tol.map(|t| format!("|value| {:.6} >= tol {t}", value.abs()));
    o.curves = vec![("sarnak".into(), curve.checkpoints)];
    Ok(o)
}

pub fn davenport(a: &DavenportArgs) -> CliResult<Outcome> {
    let z = load(&a.input)?;
    let n = a.n.unwrap_or(z.len());
    let scan = davenport_scan(&z, n, a.grid)?;
    let mut o = Outcome::new("davenport", a, &scan);
    o.n = Some(n);
    o.passed = a.tol.map(|t| scan.max_value < t);
    o.failure_note = a
        .tol
        .map(|t| format!("max {:.6} at theta {} >= tol {t}", scan.max_value, scan.argmax_theta));
    o.curves = vec![("max".into(), scan.curve.clone())];
    Ok(o)
}

pub fn entropy(a: &EntropyArgs) -> CliResult<Outcome> {
    let z = prefix(load(&a.input)?, a.n)?;
    let n_lo = a.n_lo.unwrap_or((a.n_max / 2).max(1));
    let pz = complexity_profile(&z, a.n_max)?;
    let psq = complexity_profile(&square_map(&z), a.n_max)?;
    let ez = entropy_estimate(&pz, n_lo, a.n_max)?;
    let esq = entropy_estimate(&psq, n_lo, a.n_max)?;
    let audit = match EntropyPair::new(esq.value, ez.value) {
        Ok(pair) => to_value(&audit_entropy_pair(pair, false)?),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let result = json!({
        "profile": pz,
        "profile_square": psq,
        "estimate": ez,
        "estimate_square": esq,
        "pair_audit": audit,
    });
    let slopes = |p: &chowla_core::empirics::ComplexityProfile| {
        p.entropy_slope.iter().enumerate().map(|(i, &s)| (i + 1, s)).collect::<Vec<_>>()
    };
    let mut o = Outcome::new("entropy", a, &result);
    o.n = Some(z.len());
    o.curves = vec![("slope".into(), slopes(&pz)), ("slope_square".into(), slopes(&psq))];
    Ok(o)
}

pub fn hat_test(a: &HatTestArgs) -> CliResult<Outcome> {
    let z = prefix(load(&a.input)?, a.n)?;
    let r = hat_extension_test_with_mass(&z, a.k, a.tol, a.min_mass.unwrap_or(a.tol))?;
    let mut o = Outcome::new("hat-test", a, &r);
    o.n = Some(z.len());
    o.passed = Some(r.passed);
    o.failure_note = Some(format!(
        "violation {:.6} at {}, shortest violating block {}",
        r.max_violation,
        r.witness.as_ref().map_or("-".into(), |b| b.to_string()),
        r.shortest_witness.as_ref().map_or("-".into(), |b| b.to_string()),
    ));
    Ok(o)
}

pub fn toeplitz_build(a: &ToeplitzBuildArgs) -> CliResult<Outcome> {
    let z = load(&a.reference)?;
    let n = a.n.unwrap_or(z.len());
    let spec = ToeplitzSpec::new(a.q, z)?;
    let t = build_toeplitz(&spec, n)?;
    io::save(&a.out, &t)?;
    let corr = toeplitz_correlation(&spec, n)?;
    let curves = vec![
        ("correlation".into(), corr.checkpoints.iter().map(|p| (p.n, p.value)).collect()),
        ("lower_bound".into(), corr.checkpoints.iter().map(|p| (p.n, p.lower_bound)).collect()),
    ];
    let result = json!({
        "out": a.out.display().to_string(),
        "len": t.len(),
        "correlation": corr,
    });
    let mut o = Outcome::new("toeplitz-build", a, &result);
    o.n = Some(n);
    o.passed = Some(corr.holds);
    o.failure_note = Some(format!("correlation {:.6} below bound {:.6}", corr.value, corr.lower_bound));
    o.curves = curves;
    Ok(o)
}

pub fn toeplitz_analyze(a: &ToeplitzAnalyzeArgs) -> CliResult<Outcome> {
    let p = IntervalParams::new(a.q, a.m, a.ell, a.k)?;
    let intervals = interval_analytics(&p)?;
    let entropy = match &a.reference {
        Some(path) => {
            let spec = ToeplitzSpec::new(a.q, load(path)?)?;
            Some(toeplitz_entropy_bound(&spec, &p, a.scan_offsets)?)
        }
        None => None,
    };
    let passed = intervals.within_bound && intervals.masks_identical && intervals.type1_exact;
    let note = format!(
        "non-good fraction {} (bound {:e}), type-1 counts {:?} vs {}, masks identical: {}",
        intervals.non_good_fraction,
        intervals.non_good_bound,
        intervals.observed_type1,
        intervals.expected_type1,
        intervals.masks_identical
    );
    let result = json!({ "intervals": intervals, "entropy": entropy });
    let mut o = Outcome::new("toeplitz-analyze", a, &result);
    o.n = Some(p.span());
    o.passed = Some(passed);
    o.failure_note = Some(note);
    Ok(o)
}

pub fn bounds(a: &BoundsArgs) -> CliResult<Outcome> {
    let v = audit_entropy_pair(EntropyPair::new(a.h_square, a.h_full)?, a.recurrent)?;
    let mut o = Outcome::new("bounds", a, &v);
    o.passed = Some(v.passed);
    o.failure_note = Some(format!(
        "upper margin {:.3e}, lower margin {}",
        v.upper_margin,
        v.lower_margin.map_or("-".into(), |m| format!("{m:.3e}"))
    ));
    Ok(o)
}

#[derive(Serialize)]
struct StepSummary {
    step: u32,
    params: DeterminizeParams,
    heavy_threshold: f64,
    image_bound: f64,
    outer_blocks: usize,
    acceptable_blocks: usize,
    heavy_blocks: usize,
    distinct_blocks: usize,
    changed_fraction: f64,
    non_acceptable_fraction: f64,
    non_good_fraction: f64,
    image_bound_holds: bool,
    changed_bound_holds: bool,
}

pub fn determinize(a: &DeterminizeArgs) -> CliResult<Outcome> {
    if a.steps == 0 {
        return Err(usage("steps", "must be at least 1"));
    }
    let mut u = load(&a.input)?;
    let mut steps = Vec::new();
    for l in 0..a.steps {
        let eps = a.epsilon / 2f64.powi(l as i32);
        let p = DeterminizeParams::new(eps, a.n_block, a.big_n)?;
        let r = determinize_step(&u, &p)?;
        let changed = r.changed_fraction(p.big_n);
        steps.push(StepSummary {
            step: l,
            params: p,
            heavy_threshold: p.heavy_threshold(),
            image_bound: p.image_bound(),
            outer_blocks: r.outer_blocks,
            acceptable_blocks: r.acceptable_blocks,
            heavy_blocks: r.heavy_blocks,
            distinct_blocks: r.distinct_blocks,
            changed_fraction: changed,
            non_acceptable_fraction: r.non_acceptable_fraction(),
            non_good_fraction: r.non_good_fraction,
            image_bound_holds: (r.distinct_blocks as f64) < p.image_bound() + 1.0,
            changed_bound_holds: changed < eps + r.non_acceptable_fraction(),
        });
        u = r.seq;
    }
    if let Some(out) = &a.out {
        io::save(out, &u)?;
    }
    let failed = steps.iter().find(|s| !(s.image_bound_holds && s.changed_bound_holds));
    let note = failed.map(|s| {
        format!(
            "step {}: {} distinct blocks (bound {:.3}), changed {:.4}",
            s.step, s.distinct_blocks, s.image_bound, s.changed_fraction
        )
    });
    let mut o = Outcome::new("determinize", a, &json!({ "steps": steps, "len": u.len() }));
    o.n = Some(u.len());
    o.passed = Some(failed.is_none());
    o.failure_note = note;
    o.curves = vec![
        ("changed_fraction".into(), steps.iter().map(|s| (s.step as usize, s.changed_fraction)).collect()),
        ("distinct_blocks".into(), steps.iter().map(|s| (s.step as usize, s.distinct_blocks as f64)).collect()),
    ];
    Ok(o)
}
