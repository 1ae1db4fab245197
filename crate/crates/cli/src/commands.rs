//! One function per subcommand; each returns a [`Record`] carrying both the
//! JSON result and a flat table for CSV.

use cardguess::combinatorial::{dyck_return_dist, urn_equality_dist, verify_mirror_fibers};
use cardguess::exact::{balanced_w_mass_local_form, balanced_w_mass_misprinted_form};
use cardguess::limits::{
    convergence_distance, correlation_coefficient, joint_product_distance, limit_law as regime_limit_law, min_correlation,
    regime_indicators, JointLimitLaw, LimitLaw, RegimeSpec,
};
use cardguess::moments::{asym_raw_moment_chat_equal, factorial_moment_chat, factorial_moment_w, raw_moment_chat};
use cardguess::oracles::{enumerate_decks, series_fhat, PhiTable, DEFAULT_COEFFICIENT_BUDGET};
use cardguess::pmf::to_f64;
use cardguess::simulate::{chi_square_against, simulate_many, CounterName, SimulationConfig};
use cardguess::{
    joint_cdf_wt, joint_pmf_wt, marginal_t, marginal_w, one_sided_cdf_wt, pmf_c, pmf_l, pmf_p_from_w,
    DeckComposition, DiscretePmf, JointPmf, Rational,
};
use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::output::{decimal, exact, exact_decimal, Record, Table};
use crate::{CdfKind, CliError, DeckArgs, PmfKind, RegimeArgs, RegimeKind};

/// Highest moment order accepted by `moments`.
pub const MAX_MOMENT_ORDER: u32 = 64;
/// Hard ceiling for `verify oracles --enumeration-cap`.
pub const MAX_ENUMERATION_CAP: u32 = 24;
/// Hard ceiling for `verify oracles --series-max-m1`.
pub const MAX_SERIES_M1: u32 = 30;
/// Significance level of the `simulate --check` goodness-of-fit tests.
pub const CHECK_ALPHA: f64 = 1e-3;

type Outcome = Result<Record, CliError>;

/// Parses a deck given as `m1,m2`.
pub fn parse_deck(text: &str) -> Result<(u32, u32), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected \"m1,m2\", got {text:?}"))?;
    let parse = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("{s:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn deck_of(args: DeckArgs) -> Result<DeckComposition, CliError> {
    Ok(DeckComposition::new(args.m1, args.m2)?)
}

fn deck_parameters(deck: &DeckComposition) -> Map<String, Value> {
    let mut p = Map::new();
    p.insert("m1".into(), json!(deck.m1()));
    p.insert("m2".into(), json!(deck.m2()));
    p
}

fn pair(value: &Rational) -> Value {
    json!({ "exact": exact(value), "decimal": exact_decimal(value) })
}

fn record(command: &str, parameters: Map<String, Value>, result: Value, table: Table) -> Record {
    Record {
        command: command.into(),
        parameters,
        result,
        seed: None,
        table,
    }
}

fn univariate_result(pmf: &DiscretePmf, table: &mut Table) -> Value {
    let mut exact_map = Map::new();
    let mut decimal_map = Map::new();
    for (v, p) in pmf.iter() {
        exact_map.insert(v.to_string(), exact(p));
        decimal_map.insert(v.to_string(), json!(exact_decimal(p)));
        table.push(vec![v.to_string(), crate::output::exact_string(p), exact_decimal(p)]);
    }
    json!({
        "exact": exact_map,
        "decimal": decimal_map,
        "mean": pair(&pmf.mean()),
    })
}

fn joint_result(joint: &JointPmf, table: &mut Table) -> Value {
    let mut exact_map = Map::new();
    let mut decimal_map = Map::new();
    for ((k, l), p) in joint.iter() {
        let key = format!("{k},{l}");
        exact_map.insert(key.clone(), exact(p));
        decimal_map.insert(key, json!(exact_decimal(p)));
        table.push(vec![k.to_string(), l.to_string(), crate::output::exact_string(p), exact_decimal(p)]);
    }
    json!({ "exact": exact_map, "decimal": decimal_map })
}

pub fn pmf(law: PmfKind, args: DeckArgs) -> Outcome {
    let deck = deck_of(args)?;
    let mut parameters = deck_parameters(&deck);
    let name = match law {
        PmfKind::Joint => "joint",
        PmfKind::T => "T",
        PmfKind::W => "W",
        PmfKind::L => "L",
        PmfKind::P => "P",
        PmfKind::C => "C",
    };
    parameters.insert("law".into(), json!(name));
    if law == PmfKind::Joint {
        let mut table = Table::new(&["k", "l", "exact", "decimal"]);
        let result = joint_result(&joint_pmf_wt(&deck), &mut table);
        return Ok(record("pmf", parameters, result, table));
    }
    let pmf = match law {
        PmfKind::T => marginal_t(&deck)?,
        PmfKind::W => marginal_w(&deck),
        PmfKind::L => pmf_l(&deck),
        PmfKind::P => pmf_p_from_w(&deck),
        PmfKind::C => pmf_c(&deck)?,
        PmfKind::Joint => unreachable!("handled above"),
    };
    let mut table = Table::new(&["value", "exact", "decimal"]);
    let result = univariate_result(&pmf, &mut table);
    Ok(record("pmf", parameters, result, table))
}

pub fn cdf(kind: CdfKind, args: DeckArgs, k: i64, l: i64) -> Outcome {
    let deck = deck_of(args)?;
    let (name, value) = match kind {
        CdfKind::Joint => ("joint", joint_cdf_wt(&deck, k, l)?),
        CdfKind::OneSided => ("one-sided", one_sided_cdf_wt(&deck, k, l)?),
    };
    let mut parameters = deck_parameters(&deck);
    parameters.insert("kind".into(), json!(name));
    parameters.insert("k".into(), json!(k));
    parameters.insert("l".into(), json!(l));
    let mut table = Table::new(&["k", "l", "exact", "decimal"]);
    table.push(vec![k.to_string(), l.to_string(), crate::output::exact_string(&value), exact_decimal(&value)]);
    Ok(record("cdf", parameters, pair(&value), table))
}

pub fn moments(args: DeckArgs, max_order: u32) -> Outcome {
    let deck = deck_of(args)?;
    let balanced = deck.m1() == deck.m2() && deck.m1() > 0;
    let mut parameters = deck_parameters(&deck);
    parameters.insert("max_order".into(), json!(max_order));
    let mut table = Table::new(&[
        "s",
        "factorial_w",
        "factorial_w_decimal",
        "factorial_chat",
        "factorial_chat_decimal",
        "raw_chat",
        "raw_chat_decimal",
        "asymptotic_raw_chat",
        "ratio",
    ]);
    let mut orders = Vec::new();
    for s in 1..=max_order {
        let fw = factorial_moment_w(&deck, s)?;
        let fc = factorial_moment_chat(&deck, s)?;
        let rc = raw_moment_chat(&deck, s)?;
        let (asymptotic, ratio) = if balanced {
            let a = asym_raw_moment_chat_equal(deck.m1(), s)?;
            (Some(a), (a != 0.0).then(|| to_f64(&rc) / a))
        } else {
            (None, None)
        };
        let opt = |x: Option<f64>| x.map(decimal);
        orders.push(json!({
            "s": s,
            "factorial_w": pair(&fw),
            "factorial_chat": pair(&fc),
            "raw_chat": pair(&rc),
            "asymptotic_raw_chat": opt(asymptotic),
            "ratio": opt(ratio),
        }));
        table.push(vec![
            s.to_string(),
            crate::output::exact_string(&fw),
            exact_decimal(&fw),
            crate::output::exact_string(&fc),
            exact_decimal(&fc),
            crate::output::exact_string(&rc),
            exact_decimal(&rc),
            opt(asymptotic).unwrap_or_default(),
            opt(ratio).unwrap_or_default(),
        ]);
    }
    Ok(record("moments", parameters, json!({ "orders": orders }), table))
}

pub fn simulate(args: DeckArgs, trials: u64, seed: u64, streams: u32, check: bool) -> Result<(Record, bool), CliError> {
    let deck = deck_of(args)?;
    let config = SimulationConfig::new(deck, trials, seed).with_streams(streams);
    let summary = simulate_many(&config)?;
    let mut parameters = deck_parameters(&deck);
    parameters.insert("trials".into(), json!(trials));
    parameters.insert("streams".into(), json!(streams));
    parameters.insert("check".into(), json!(check));

    let mut table = Table::new(&["counter", "value", "count", "frequency"]);
    let mut means = Map::new();
    let mut frequencies = Map::new();
    for counter in CounterName::ALL {
        means.insert(counter.name().into(), json!(decimal(summary.mean(counter))));
        let freqs = summary.frequencies(counter);
        let mut per_value = Map::new();
        for (value, count) in summary.histogram(counter) {
            let f = freqs.get(&value).copied().unwrap_or(0.0);
            per_value.insert(value.to_string(), json!({ "count": count, "frequency": decimal(f) }));
            table.push(vec![counter.name().into(), value.to_string(), count.to_string(), decimal(f)]);
        }
        frequencies.insert(counter.name().into(), Value::Object(per_value));
    }

    let mut result = json!({
        "means": means,
        "frequencies": frequencies,
        "invariant_violations": summary.invariant_violations,
    });
    let mut passed = summary.invariant_violations == 0;
    if check {
        let mut tests = Map::new();
        let laws = [
            (CounterName::W, marginal_w(&deck)),
            (CounterName::T, marginal_t(&deck)?),
            (CounterName::C, pmf_c(&deck)?),
        ];
        for (counter, law) in laws {
            let gof = chi_square_against(&summary, counter, &law)?;
            let accepted = gof.accepts(CHECK_ALPHA);
            passed &= accepted;
            tests.insert(
                counter.name().into(),
                json!({
                    "statistic": decimal(gof.statistic),
                    "degrees_of_freedom": gof.degrees_of_freedom,
                    "p_value": decimal(gof.p_value),
                    "impossible_observations": gof.impossible_observations,
                    "accepted": accepted,
                }),
            );
        }
        result["goodness_of_fit"] = json!({ "alpha": CHECK_ALPHA, "tests": tests });
    }
    Ok((
        Record {
            command: "simulate".into(),
            parameters,
            result,
            seed: Some(seed),
            table,
        },
        passed,
    ))
}

fn regime_name(kind: RegimeKind) -> String {
    kind.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn regime_of(args: RegimeArgs) -> Result<RegimeSpec, CliError> {
    let need_rho = || {
        args.rho
            .ok_or_else(|| CliError::Usage(format!("regime {} needs --rho", regime_name(args.regime))))
    };
    let spec = match args.regime {
        RegimeKind::TFixedM2 => RegimeSpec::TFixedM2 {
            m2: args
                .fixed_m2
                .ok_or_else(|| CliError::Usage("regime t-fixed-m2 needs --fixed-m2".into()))?,
        },
        RegimeKind::TSublinear => RegimeSpec::TSublinear,
        RegimeKind::TLinear => RegimeSpec::TLinear { rho: need_rho()? },
        RegimeKind::WSublinear => RegimeSpec::WSublinear,
        RegimeKind::WLinear => RegimeSpec::WLinear { rho: need_rho()? },
        RegimeKind::WLargeD => RegimeSpec::WNearDiagonalLargeD,
        RegimeKind::WAlpha => RegimeSpec::WNearDiagonalAlpha {
            alpha: args
                .alpha
                .ok_or_else(|| CliError::Usage("regime w-alpha needs --alpha".into()))?,
        },
        RegimeKind::WSmallD => RegimeSpec::WNearDiagonalSmallD,
        RegimeKind::JointCentral => RegimeSpec::JointCentral { rho: need_rho()? },
    };
    spec.validate()?;
    Ok(spec)
}

fn regime_parameters(spec: &RegimeSpec, args: RegimeArgs) -> Map<String, Value> {
    let mut p = Map::new();
    p.insert("regime".into(), json!(spec.to_string()));
    if let Some(rho) = args.rho {
        p.insert("rho".into(), json!(rho));
    }
    if let Some(alpha) = args.alpha {
        p.insert("alpha".into(), json!(alpha));
    }
    if let Some(m2) = args.fixed_m2 {
        p.insert("fixed_m2".into(), json!(m2));
    }
    p
}

/// Smallest `x` with `F(x) >= q`, by bisection.
fn quantile(law: &LimitLaw, q: f64) -> f64 {
    let mut hi = 1.0;
    while law.cdf(hi) < q && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if law.cdf(mid) >= q {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn limit_law(args: RegimeArgs, points: u32, upper: Option<f64>) -> Outcome {
    let spec = regime_of(args)?;
    let mut parameters = regime_parameters(&spec, args);
    parameters.insert("points".into(), json!(points));
    if let Some(u) = upper {
        if !(u.is_finite() && u > 0.0) {
            return Err(CliError::Library(cardguess::Error::InvalidParameter {
                name: "upper",
                value: u.to_string(),
                reason: "must be positive and finite",
            }));
        }
        parameters.insert("upper".into(), json!(u));
    }

    if let RegimeSpec::JointCentral { rho } = spec {
        let joint = JointLimitLaw::new(rho)?;
        let n = points.min(100);
        let mut table = Table::new(&["k", "l", "pmf"]);
        let mut grid = Vec::new();
        for k in 0..n {
            for l in 1..=n {
                let p = joint.pmf(k, l);
                table.push(vec![k.to_string(), l.to_string(), decimal(p)]);
                grid.push(json!({ "k": k, "l": l, "pmf": decimal(p) }));
            }
        }
        let result = json!({
            "law": format!("joint central limit (rho = {rho})"),
            "discrete": true,
            "correlation": decimal(correlation_coefficient(rho)?),
            "points": grid,
        });
        return Ok(record("limits law", parameters, result, table));
    }

    let law = regime_limit_law(&spec)?;
    let right = upper.unwrap_or_else(|| quantile(&law, 0.999));
    let mut grid = Vec::new();
    let mut table;
    if law.is_discrete() {
        table = Table::new(&["x", "cdf", "pmf"]);
        let first = i64::from(matches!(law, LimitLaw::GeometricMixture { .. }));
        let last = (right.ceil() as i64).max(first);
        for x in (first..=last).take(points as usize) {
            let cdf = law.cdf(x as f64);
            let mass = law.pmf(x).unwrap_or(0.0);
            table.push(vec![x.to_string(), decimal(cdf), decimal(mass)]);
            grid.push(json!({ "x": x, "cdf": decimal(cdf), "pmf": decimal(mass) }));
        }
    } else {
        table = Table::new(&["x", "cdf", "density"]);
        let steps = points.saturating_sub(1).max(1);
        for i in 0..points {
            let x = right * f64::from(i) / f64::from(steps);
            let cdf = law.cdf(x);
            let density = law.density(x).unwrap_or(f64::NAN);
            table.push(vec![decimal(x), decimal(cdf), decimal(density)]);
            grid.push(json!({ "x": decimal(x), "cdf": decimal(cdf), "density": decimal(density) }));
        }
    }
    let result = json!({
        "law": law.to_string(),
        "discrete": law.is_discrete(),
        "mean": decimal(law.mean()),
        "points": grid,
    });
    Ok(record("limits law", parameters, result, table))
}

pub fn limit_distance(args: RegimeArgs, decks: &[(u32, u32)], joint: bool) -> Outcome {
    let spec = regime_of(args)?;
    let mut parameters = regime_parameters(&spec, args);
    parameters.insert("joint".into(), json!(joint));
    parameters.insert("decks".into(), json!(decks.iter().map(|&(a, b)| format!("{a},{b}")).collect::<Vec<_>>()));
    let kind = if joint {
        "joint-kolmogorov"
    } else if matches!(spec, RegimeSpec::JointCentral { .. }) || regime_limit_law(&spec)?.is_discrete() {
        "total-variation"
    } else {
        "kolmogorov"
    };
    let mut table = Table::new(&["m1", "m2", "distance"]);
    let mut rows = Vec::new();
    for &(m1, m2) in decks {
        let deck = DeckComposition::new(m1, m2)?;
        let distance = if joint {
            joint_product_distance(&deck, &spec)?
        } else {
            convergence_distance(&deck, &spec)?
        };
        let ind = regime_indicators(&deck)?;
        table.push(vec![m1.to_string(), m2.to_string(), decimal(distance)]);
        rows.push(json!({
            "m1": m1,
            "m2": m2,
            "distance": decimal(distance),
            "ratio": decimal(ind.ratio),
            "difference_over_sqrt_m1": decimal(ind.difference_over_sqrt),
        }));
    }
    let result = json!({ "metric": kind, "decks": rows });
    Ok(record("limits distance", parameters, result, table))
}

pub fn correlate_curve(points: u32) -> Outcome {
    let mut parameters = Map::new();
    parameters.insert("points".into(), json!(points));
    let mut table = Table::new(&["rho", "correlation"]);
    let mut curve = Vec::new();
    for i in 0..points {
        let rho = f64::from(i) / f64::from(points - 1);
        let c = correlation_coefficient(rho)?;
        table.push(vec![decimal(rho), decimal(c)]);
        curve.push(json!({ "rho": decimal(rho), "correlation": decimal(c) }));
    }
    Ok(record("correlate curve", parameters, json!({ "points": curve }), table))
}

pub fn correlate_min() -> Outcome {
    let min = min_correlation()?;
    let mut table = Table::new(&["rho", "correlation", "grid_rho"]);
    table.push(vec![decimal(min.rho), decimal(min.correlation), decimal(min.grid_rho)]);
    let result = json!({
        "rho": decimal(min.rho),
        "correlation": decimal(min.correlation),
        "grid_rho": decimal(min.grid_rho),
    });
    Ok(record("correlate min", Map::new(), result, table))
}

/// Collects per-check outcomes of a `verify` subcommand.
struct Checks {
    table: Table,
    checked: u64,
    mismatches: Vec<Value>,
}

impl Checks {
    fn new() -> Self {
        Self {
            table: Table::new(&["check", "m1", "m2", "equal"]),
            checked: 0,
            mismatches: Vec::new(),
        }
    }

    fn record(&mut self, check: &str, deck: &DeckComposition, equal: bool) {
        self.checked += 1;
        self.table
            .push(vec![check.into(), deck.m1().to_string(), deck.m2().to_string(), equal.to_string()]);
        if !equal {
            self.mismatches.push(json!({ "check": check, "m1": deck.m1(), "m2": deck.m2() }));
        }
    }

    fn finish(self, command: &str, parameters: Map<String, Value>, mut extra: Value) -> (Record, bool) {
        let passed = self.mismatches.is_empty();
        extra["checks"] = json!(self.checked);
        extra["status"] = json!(if passed { "all equal" } else { "mismatch" });
        extra["mismatches"] = json!(self.mismatches);
        (record(command, parameters, extra, self.table), passed)
    }
}

pub fn verify_oracles(max_total: u32, enumeration_cap: u32, series_max_m1: u32) -> Result<(Record, bool), CliError> {
    let mut parameters = Map::new();
    parameters.insert("max_total".into(), json!(max_total));
    parameters.insert("enumeration_cap".into(), json!(enumeration_cap));
    parameters.insert("series_max_m1".into(), json!(series_max_m1));
    if max_total > enumeration_cap {
        return Err(CliError::Library(cardguess::Error::CapExceeded {
            what: "deck size for enumeration",
            requested: u64::from(max_total),
            cap: u64::from(enumeration_cap),
        }));
    }
    let series_max_m1 = series_max_m1.min(max_total);
    let series = if series_max_m1 >= 1 {
        Some(series_fhat(series_max_m1, DEFAULT_COEFFICIENT_BUDGET)?)
    } else {
        None
    };
    let phi = PhiTable::build(max_total, max_total / 2);
    let mut checks = Checks::new();
    for deck in DeckComposition::all_up_to(max_total) {
        let law = enumerate_decks(&deck, enumeration_cap)?;
        let joint = joint_pmf_wt(&deck);
        checks.record("joint (W,T) vs enumeration", &deck, joint == law.joint_wt());
        checks.record("W vs enumeration", &deck, marginal_w(&deck) == law.marginal_w());
        checks.record("L vs enumeration", &deck, pmf_l(&deck) == law.marginal_l());
        checks.record("P vs enumeration", &deck, pmf_p_from_w(&deck) == law.marginal_p());
        checks.record("C vs enumeration", &deck, pmf_c(&deck).ok() == Some(law.marginal_c()));
        if deck.m2() >= 1 {
            checks.record("T vs enumeration", &deck, marginal_t(&deck).ok() == Some(law.marginal_t()));
        }
        if let Some(poly) = phi.get(&deck) {
            checks.record("joint (W,T) vs recurrence", &deck, poly.to_joint_wt(&deck) == joint);
        }
        if let Some(series) = &series {
            if deck.m1() <= series.max_m1() {
                checks.record("joint (W,T) vs series", &deck, series.joint_wt(&deck)? == joint);
            }
        }
    }
    Ok(checks.finish("verify oracles", parameters, json!({})))
}

pub fn verify_bijections(max_total: u32, mirror_max_total: u32, cap: u32) -> Result<(Record, bool), CliError> {
    let mut parameters = Map::new();
    parameters.insert("max_total".into(), json!(max_total));
    parameters.insert("mirror_max_total".into(), json!(mirror_max_total));
    parameters.insert("cap".into(), json!(cap));
    let mut checks = Checks::new();
    let mut fibers = 0usize;
    for deck in DeckComposition::all_up_to(max_total) {
        let w = marginal_w(&deck);
        checks.record("urn equality visits vs W", &deck, urn_equality_dist(&deck, cap)? == w);
        let altitude = i64::from(deck.m2()) - i64::from(deck.m1());
        checks.record(
            "Dyck returns vs W",
            &deck,
            dyck_return_dist(deck.total(), altitude, cap)? == w,
        );
        if deck.total() <= mirror_max_total {
            let report = verify_mirror_fibers(&deck, cap);
            if let Ok(r) = &report {
                fibers += r.wedge_paths;
            }
            checks.record("mirror-map fibers", &deck, report.is_ok());
        }
    }
    Ok(checks.finish("verify bijections", parameters, json!({ "mirror_fibers": fibers })))
}

pub fn verify_local_limit(max_m: u32) -> Result<(Record, bool), CliError> {
    let mut parameters = Map::new();
    parameters.insert("max_m".into(), json!(max_m));
    let mut checks = Checks::new();
    let mut misprint_disagreements = 0u64;
    for m in 1..=max_m {
        let deck = DeckComposition::new(m, m)?;
        let w = marginal_w(&deck);
        let equal = (1..=m).all(|k| balanced_w_mass_local_form(m, k).ok() == Some(w.mass(i64::from(k))));
        checks.record("local form vs W", &deck, equal);
        if m >= 2 {
            misprint_disagreements += (1..=m)
                .filter(|&k| balanced_w_mass_misprinted_form(m, k).ok() != Some(w.mass(i64::from(k))))
                .count() as u64;
        }
    }
    Ok(checks.finish(
        "verify local-limit",
        parameters,
        json!({ "lower_index_m_minus_2_disagreements": misprint_disagreements }),
    ))
}
