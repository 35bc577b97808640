//! One function per subcommand: compute, then emit in the chosen format.

use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use idxdiv::divgraph::{build_graph, export_graph, open_question_scan, GraphFormat};
use idxdiv::divset::{div_set_window, in_div_set, member_periods};
use idxdiv::permlocal::{
    injectivity_resultant_check, prime_in_divset_via_period, profile_mod_p, restriction_predicates,
    INJECTIVITY_PRIME_LIMIT,
};
use idxdiv::poly::parse_poly_with_param;
use idxdiv::primes::prime_sieve;
use idxdiv::zsigmondy::{check_growth, finiteness_verdict, primitive_split_prefix};

use crate::config::{at_least_one, Common, Format, Target};
use crate::CliError;

pub const DEFAULT_BOUND: u64 = 1000;
pub const DEFAULT_DENSITY_BOUND: u64 = 1_000_000;
const DENSITY_BOUND_LIMIT: u64 = 10_000_000;

#[derive(Serialize)]
struct Provenance {
    tool: &'static str,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

#[derive(Serialize)]
struct Record<R: Serialize> {
    command: &'static str,
    config: Value,
    result: R,
    provenance: Provenance,
}

fn record<R: Serialize>(common: &Common, command: &'static str, config: Value, result: R, start: Instant) -> String {
    let rec = Record {
        command,
        config,
        result,
        provenance: Provenance {
            tool: "idxdiv",
            version: env!("CARGO_PKG_VERSION"),
            elapsed_ms: common.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        },
    };
    let mut text = serde_json::to_string_pretty(&rec).expect("records serialize");
    text.push('\n');
    text
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io)?;
            out.flush().map_err(io)
        }
    }
}

fn csv_table<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV output is UTF-8")
}

fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Usage(format!("{command} does not support --format {}", format_name(format)))
}

fn format_name(format: Format) -> &'static str {
    match format {
        Format::Records => "records",
        Format::Dot => "dot",
        Format::Csv => "csv",
    }
}

fn target_echo(target: &Target) -> Value {
    json!({
        "polynomial": target.polynomial.to_string(),
        "trinomial": target.trinomial,
    })
}

pub fn divset(common: &Common, target: Target, bound: u64) -> Result<(), CliError> {
    let bound = at_least_one(bound, "--N")?;
    if common.format == Format::Dot {
        return Err(unsupported("divset", common.format));
    }
    let start = Instant::now();
    let window = div_set_window(&target.polynomial, bound);
    let periods = member_periods(&window);
    let text = match common.format {
        Format::Csv => csv_table(
            &["n", "tail", "cycle"],
            periods.iter().map(|m| [m.n.to_string(), m.tail.to_string(), m.cycle.to_string()]),
        ),
        _ => {
            let mut config = target_echo(&target);
            config["N"] = json!(bound);
            let result = json!({
                "degenerate": window.degenerate,
                "count": window.members.len(),
                "members": window.members,
                "periods": periods,
            });
            record(common, "divset", config, result, start)
        }
    };
    emit(common, &text)
}

pub fn graph(common: &Common, target: Target, bound: u64) -> Result<(), CliError> {
    let bound = at_least_one(bound, "--N")?;
    let start = Instant::now();
    let g = build_graph(&target.polynomial, bound)?;
    let text = match common.format {
        Format::Dot => export_graph(&g, GraphFormat::Dot),
        Format::Csv => export_graph(&g, GraphFormat::Csv),
        Format::Records => {
            let mut config = target_echo(&target);
            config["N"] = json!(bound);
            record(common, "graph", config, &g, start)
        }
    };
    emit(common, &text)
}

pub fn zsig(common: &Common, target: Target, n_max: usize, bits: u64, bound: u64) -> Result<(), CliError> {
    let n_max = at_least_one(n_max, "--n-max")?;
    let bits = at_least_one(bits, "--bits")?;
    let bound = at_least_one(bound, "--N")?;
    if common.format == Format::Dot {
        return Err(unsupported("zsig", common.format));
    }
    let start = Instant::now();
    let f = &target.polynomial;
    let splits = primitive_split_prefix(f, n_max, Some(bits))?;
    let text = match common.format {
        Format::Csv => csv_table(
            &["n", "primitive", "nonprimitive"],
            splits
                .iter()
                .map(|s| [s.n.to_string(), s.primitive.to_string(), s.nonprimitive.to_string()]),
        ),
        _ => {
            let zsigmondy: Vec<usize> = splits.iter().filter(|s| s.primitive == BigInt::from(1)).map(|s| s.n).collect();
            let trinomial = f.as_trinomial();
            let growth = match trinomial {
                Some(_) => Some(check_growth(f, n_max, Some(bits))?),
                None => None,
            };
            let verdict = match trinomial {
                Some((d, e, c)) => {
                    let c = c
                        .to_i64()
                        .ok_or_else(|| CliError::Usage("constant term does not fit 64 bits".into()))?;
                    Some(finiteness_verdict(d, e, c, bound)?)
                }
                None => None,
            };
            let mut config = target_echo(&target);
            config["n_max"] = json!(n_max);
            config["bits"] = json!(bits);
            config["N"] = json!(bound);
            let disagrees = verdict.as_ref().is_some_and(|v| !v.window_agrees());
            let text = record(
                common,
                "zsig",
                config,
                json!({
                    "splits": splits,
                    "zsigmondy": zsigmondy,
                    "growth": growth,
                    "finiteness": verdict,
                }),
                start,
            );
            if disagrees {
                emit(common, &text)?;
                return Err(CliError::Invariant(format!(
                    "window of D({f}) up to {bound} disagrees with the finiteness classification"
                )));
            }
            text
        }
    };
    emit(common, &text)
}

pub fn perm(common: &Common, target: Target, p: u64) -> Result<(), CliError> {
    if common.format != Format::Records {
        return Err(unsupported("perm", common.format));
    }
    let start = Instant::now();
    let f = &target.polynomial;
    let profile = profile_mod_p(f, p)?;
    let member = prime_in_divset_via_period(f, p)?;
    let injectivity = if p <= INJECTIVITY_PRIME_LIMIT {
        Some(injectivity_resultant_check(f, p)?)
    } else {
        None
    };
    let triple = target.trinomial.or_else(|| {
        f.as_trinomial()
            .and_then(|(d, e, c)| c.to_i64().map(|c| (d, e, c)))
    });
    let restrictions = match triple {
        Some((d, e, c)) => Some(restriction_predicates(d as u64, e as u64, c, p)?),
        None => None,
    };
    let mut config = target_echo(&target);
    config["p"] = json!(p);
    let text = record(
        common,
        "perm",
        config,
        json!({
            "in_divset": member,
            "profile": profile,
            "restrictions": restrictions,
            "injectivity": injectivity,
        }),
        start,
    );
    emit(common, &text)?;
    if member != in_div_set(f, p) {
        return Err(CliError::Invariant(format!("period criterion and direct check disagree for {p}")));
    }
    if member && restrictions.as_ref().is_some_and(|r| r.excluded) {
        return Err(CliError::Invariant(format!("{p} is in D({f}) but an exclusion predicate fired")));
    }
    Ok(())
}

pub fn survey(common: &Common, family: &str, (lo, hi): (i64, i64), bound: u64) -> Result<(), CliError> {
    let bound = at_least_one(bound, "--N")?;
    if common.format == Format::Dot {
        return Err(unsupported("survey", common.format));
    }
    let start = Instant::now();
    let members = (lo..=hi)
        .map(|c| {
            parse_poly_with_param(family, 'c', &BigInt::from(c))
                .map_err(|e| CliError::Usage(format!("--family {family:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = open_question_scan(&members, bound)?;
    let bad = report.counterexample_count();
    let text = match common.format {
        Format::Csv => csv_table(
            &["polynomial", "members", "edges", "type1_only", "type2_only", "both", "untyped"],
            report.entries.iter().map(|e| {
                [
                    e.f.to_string(),
                    e.members.to_string(),
                    e.edges.to_string(),
                    e.type1_only.to_string(),
                    e.type2_only.to_string(),
                    e.both.to_string(),
                    e.counterexamples.len().to_string(),
                ]
            }),
        ),
        _ => {
            let config = json!({ "family": family, "c": [lo, hi], "N": bound });
            let edges: usize = report.entries.iter().map(|e| e.edges).sum();
            let result = json!({
                "polynomials": report.entries.len(),
                "edges": edges,
                "counterexamples": bad,
                "entries": report.entries,
            });
            record(common, "survey", config, result, start)
        }
    };
    emit(common, &text)?;
    if bad > 0 {
        return Err(CliError::Invariant(format!("{bad} edges are neither type 1 nor type 2")));
    }
    Ok(())
}

pub fn primes(common: &Common, bound: u64) -> Result<(), CliError> {
    if bound < 2 {
        return Err(CliError::Usage(format!("--P must be at least 2, got {bound}")));
    }
    let start = Instant::now();
    let ps = prime_sieve(bound);
    let text = match common.format {
        Format::Csv => csv_table(&["p"], ps.iter().map(|p| [p.to_string()])),
        Format::Dot => return Err(unsupported("primes", common.format)),
        Format::Records => record(
            common,
            "primes",
            json!({ "P": bound }),
            json!({ "count": ps.len(), "primes": ps }),
            start,
        ),
    };
    emit(common, &text)
}

pub fn density(common: &Common, bound: u64) -> Result<(), CliError> {
    if !(2..=DENSITY_BOUND_LIMIT).contains(&bound) {
        return Err(CliError::Usage(format!("--P must lie in 2..={DENSITY_BOUND_LIMIT}, got {bound}")));
    }
    if common.format != Format::Records {
        return Err(unsupported("density", common.format));
    }
    let start = Instant::now();
    let scan = idxdiv::permlocal::density_scan(bound);
    emit(common, &record(common, "density", json!({ "P": bound }), scan, start))
}
