//! Matrix file parsing, subcommand dispatch and report rendering for the
//! `metzler-sign` binary.
//!
//! File format: `#` starts a comment line, `@name` opens a named matrix,
//! each following nonblank line is one row of whitespace-separated tokens
//! (`+`, `-`, `0`, `?` for sign entries, anything else a real literal; a
//! bare `-` is the negative sign, `-0` the real zero). A blank line or the
//! next `@` ends the block.
//!
//! Exit codes: 0 holds/true, 1 fails/false, 2 unknown, 64 usage,
//! 65 parse error, 66 domain error, 70 internal disagreement between
//! equivalent statements, 74 I/O error.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{json, Value};

use crate::applications::{
    delay_ct_structural, delay_dt_structural, ergodicity_structural, impulsive_common_vector,
    impulsive_structural, nonlinear_invariance_structural, switched_structural,
    ReactionNetworkSigns,
};
use crate::blocks::{
    block_hurwitz, block_sign_stable, BlockSystem, Coupling, MultiplierCertificate,
    MultiplierForm,
};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::hull::{hull_sign_stable, hull_sign_stable_enumerated, Family};
use crate::kernel::{is_lplus, ker_b_sign_stable, KerBOptions, KerBStatus};
use crate::mixed::{mixed_bipartite_graph, mixed_sign_stable, MixedSystem};
use crate::numeric::{real_inverse_with_residual, LpCertificate, Tolerances};
use crate::signs::{
    parse_entry_token, IntMatrix, MixedEntry, MixedMatrix, QualMatrix, RealMatrix,
};
use crate::stability::{
    instability_witness, monte_carlo_soundness, potentially_sign_stable, schur_sign_stable,
    schur_sign_stable_checked, sign_stable, sign_stable_checked, SignStabilityVerdict,
};
use crate::{kernel, Verdict};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_DOMAIN: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;
pub const EXIT_IO: i32 = 74;

/// Parse a matrix file into named mixed matrices, with line numbers in every
/// error.
pub fn parse_matrix_file(text: &str) -> Result<Vec<(String, MixedMatrix)>> {
    let mut out: Vec<(String, Vec<Vec<MixedEntry>>)> = Vec::new();
    let mut open = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            open = false;
            continue;
        }
        if let Some(rest) = line.strip_prefix('@') {
            let mut parts = rest.split_whitespace();
            let name = parts.next().unwrap_or("").to_string();
            if name.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "matrix name missing after '@'".into(),
                });
            }
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "unexpected text after matrix name".into(),
                });
            }
            if out.iter().any(|(n, _)| n == &name) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate matrix name '{name}'"),
                });
            }
            out.push((name, Vec::new()));
            open = true;
            continue;
        }
        if !open {
            return Err(Error::Parse {
                line: line_no,
                message: "matrix row outside any '@name' block".into(),
            });
        }
        let block = out.last_mut().expect("open block exists");
        let row: Vec<MixedEntry> = line
            .split_whitespace()
            .map(|tok| {
                parse_entry_token(tok).map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("unknown token '{tok}'"),
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = block.1.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "ragged row: expected {} entries, got {}",
                        first.len(),
                        row.len()
                    ),
                });
            }
        }
        block.1.push(row);
    }
    let mut matrices = Vec::with_capacity(out.len());
    for (name, rows) in out {
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: format!("matrix '{name}' has no rows"),
            });
        }
        matrices.push((name, MixedMatrix::from_rows(rows)?));
    }
    Ok(matrices)
}

/// Inverse of the parser: `parse_matrix_file(format_matrix_file(x)) == x`.
/// Sign entries print as their tokens; the real zero prints as `-0` so it
/// stays distinguishable from the sign zero.
pub fn format_matrix_file(entries: &[(String, MixedMatrix)]) -> String {
    let mut out = String::new();
    for (k, (name, m)) in entries.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push('@');
        out.push_str(name);
        out.push('\n');
        for r in 0..m.rows() {
            let row: Vec<String> = (0..m.cols())
                .map(|c| match m.get(r, c) {
                    MixedEntry::Sign(s) => s.token().to_string(),
                    MixedEntry::Real(v) => {
                        if v == 0.0 {
                            "-0".to_string()
                        } else {
                            format!("{v}")
                        }
                    }
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Options {
    command: String,
    sub: Option<String>,
    input: Option<String>,
    json: bool,
    dot: Option<String>,
    seed: u64,
    samples: usize,
    scale: f64,
    cap_sq: usize,
    cap_lplus: usize,
    full_check: bool,
    form: MultiplierForm,
    irreducible: bool,
}

const USAGE: &str = "usage: metzler-sign <command> [--input FILE] [--json] [--dot FILE]
                    [--seed N] [--samples N] [--scale X] [--cap-sq P]
                    [--cap-lplus L] [--form lumped|factored] [--irreducible]
                    [--full-check]

commands:
  check      sign-stability of a Metzler sign pattern
  potential  potential sign-stability
  schur      Schur sign-stability of a nonnegative pattern
  inverse    sign inverse of a pattern / numeric inverse of a real matrix
  lplus      L+ decision for a sign pattern
  kerb       kernel-constrained sign-stability (pattern, then constraints)
  block      block interconnection (names A1..AN, Bi_j, Ci_j)
  hull       convex-hull sign-stability of all matrices in the file
  mixed      mixed block matrix (sign block, real block, two couplings)
  witness    instability witness for a pattern that is not sign-stable
  sample     draw a member of the qualitative class
  app        delay-ct | delay-dt | switched | impulsive | nonlinear | ergodic";

fn parse_args(args: &[String]) -> std::result::Result<Options, String> {
    let mut it = args.iter();
    let Some(command) = it.next() else {
        return Err("missing command".into());
    };
    let mut opts = Options {
        command: command.clone(),
        sub: None,
        input: None,
        json: false,
        dot: None,
        seed: 0,
        samples: 0,
        scale: 1.0,
        cap_sq: kernel::DEFAULT_SQ_CAP,
        cap_lplus: kernel::DEFAULT_LPLUS_CAP,
        full_check: false,
        form: MultiplierForm::Factored,
        irreducible: false,
    };
    if opts.command == "app" {
        match it.next() {
            Some(sub) => opts.sub = Some(sub.clone()),
            None => return Err("app needs a subcommand".into()),
        }
    }
    while let Some(arg) = it.next() {
        let mut value = |what: &str| -> std::result::Result<String, String> {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{what} needs a value"))
        };
        match arg.as_str() {
            "--input" => opts.input = Some(value("--input")?),
            "--json" => opts.json = true,
            "--dot" => opts.dot = Some(value("--dot")?),
            "--seed" => {
                opts.seed = value("--seed")?
                    .parse()
                    .map_err(|_| "--seed expects an unsigned integer".to_string())?
            }
            "--samples" => {
                opts.samples = value("--samples")?
                    .parse()
                    .map_err(|_| "--samples expects an unsigned integer".to_string())?
            }
            "--scale" => {
                opts.scale = value("--scale")?
                    .parse()
                    .map_err(|_| "--scale expects a positive real".to_string())?
            }
            "--cap-sq" => {
                opts.cap_sq = value("--cap-sq")?
                    .parse()
                    .map_err(|_| "--cap-sq expects an unsigned integer".to_string())?
            }
            "--cap-lplus" => {
                opts.cap_lplus = value("--cap-lplus")?
                    .parse()
                    .map_err(|_| "--cap-lplus expects an unsigned integer".to_string())?
            }
            "--full-check" => opts.full_check = true,
            "--irreducible" => opts.irreducible = true,
            "--form" => {
                opts.form = match value("--form")?.as_str() {
                    "lumped" => MultiplierForm::Lumped,
                    "factored" => MultiplierForm::Factored,
                    other => return Err(format!("unknown multiplier form '{other}'")),
                }
            }
            other => return Err(format!("unknown option '{other}'")),
        }
    }
    Ok(opts)
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Disagreement { .. } => EXIT_INTERNAL,
        _ => EXIT_DOMAIN,
    }
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Holds => EXIT_HOLDS,
        Verdict::Fails => EXIT_FAILS,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn qual_json(m: &QualMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| {
                Value::Array(
                    (0..m.cols())
                        .map(|c| Value::String(m.get(r, c).token().to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn real_json(m: &RealMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| json!((0..m.cols()).map(|c| m.get(r, c)).collect::<Vec<f64>>()))
            .collect(),
    )
}

fn int_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| json!((0..m.cols()).map(|c| m.get(r, c)).collect::<Vec<i64>>()))
            .collect(),
    )
}

fn cert_json(c: &LpCertificate) -> Value {
    json!({"point": c.point, "margin": c.margin})
}

fn multiplier_json(c: &MultiplierCertificate) -> Value {
    let ell: BTreeMap<String, Vec<f64>> = c
        .multipliers
        .iter()
        .map(|(&(i, j), v)| (format!("{}->{}", i + 1, j + 1), v.clone()))
        .collect();
    json!({"v": c.v, "multipliers": ell, "margin": c.margin})
}

fn kind_of(m: &MixedMatrix) -> &'static str {
    if m.is_pure_sign() {
        "sign"
    } else if m.is_pure_real() {
        "real"
    } else {
        "mixed"
    }
}

fn inputs_json(matrices: &[(String, MixedMatrix)]) -> Value {
    Value::Array(
        matrices
            .iter()
            .map(|(name, m)| {
                json!({
                    "name": name,
                    "rows": m.rows(),
                    "cols": m.cols(),
                    "kind": kind_of(m),
                })
            })
            .collect(),
    )
}

fn stability_statements(v: &SignStabilityVerdict) -> Value {
    json!({
        "graph": v.graph_path,
        "lp": v.lp_path,
        "permutation": v.permutation_path,
    })
}

fn stability_witnesses(v: &SignStabilityVerdict) -> Value {
    let mut w = serde_json::Map::new();
    if let Some(i) = v.bad_diagonal {
        w.insert("bad_diagonal".into(), json!(i));
    }
    if let Some(c) = &v.cycle {
        w.insert("cycle".into(), json!(c.nodes));
    }
    if let Some(m) = &v.counterexample {
        w.insert("counterexample".into(), real_json(m));
    }
    Value::Object(w)
}

fn stability_certificates(v: &SignStabilityVerdict) -> Value {
    let mut c = serde_json::Map::new();
    if let Some(cert) = &v.lyapunov {
        c.insert("lyapunov".into(), cert_json(cert));
    }
    if let Some(p) = &v.permutation {
        c.insert("permutation".into(), json!(p));
    }
    Value::Object(c)
}

struct Outcome {
    exit: i32,
    verdict: &'static str,
    statements: Value,
    certificates: Value,
    witnesses: Value,
    extra_diagnostics: serde_json::Map<String, Value>,
    /// DOT rendering to write when --dot was given.
    dot: Option<String>,
    /// Full text-body override (sample/inverse print matrices).
    body: Option<String>,
}

impl Outcome {
    fn new(exit: i32, verdict: &'static str) -> Self {
        Outcome {
            exit,
            verdict,
            statements: json!({}),
            certificates: json!({}),
            witnesses: json!({}),
            extra_diagnostics: serde_json::Map::new(),
            dot: None,
            body: None,
        }
    }
}

fn need(matrices: &[(String, MixedMatrix)], k: usize) -> Result<&MixedMatrix> {
    matrices.get(k).map(|(_, m)| m).ok_or_else(|| Error::Invalid {
        message: format!("input file must contain at least {} matrices", k + 1),
    })
}

fn as_pattern(m: &MixedMatrix) -> QualMatrix {
    m.to_qual()
}

fn choose_sign_stable(full: bool, a: &QualMatrix) -> Result<SignStabilityVerdict> {
    if full {
        sign_stable_checked(a)
    } else {
        sign_stable(a)
    }
}

fn run_command(opts: &Options, matrices: &[(String, MixedMatrix)]) -> Result<Outcome> {
    match opts.command.as_str() {
        "check" => {
            let a = as_pattern(need(matrices, 0)?);
            let v = choose_sign_stable(opts.full_check, &a)?;
            let mut out = Outcome::new(
                if v.verdict { EXIT_HOLDS } else { EXIT_FAILS },
                if v.verdict { "holds" } else { "fails" },
            );
            out.statements = stability_statements(&v);
            out.certificates = stability_certificates(&v);
            out.witnesses = stability_witnesses(&v);
            out.dot = Some(Digraph::of_matrix(&a)?.to_dot());
            if v.verdict && opts.samples > 0 {
                let sweep = monte_carlo_soundness(
                    &a,
                    opts.samples,
                    opts.seed,
                    &[1e-3, 1.0, 1e3],
                )?;
                if !sweep.all_consistent() {
                    return Err(Error::Disagreement {
                        context: format!(
                            "{} Monte-Carlo draws contradicted the verdict",
                            sweep.failures.len()
                        ),
                    });
                }
                out.extra_diagnostics
                    .insert("monte_carlo_samples".into(), json!(sweep.samples));
            }
            Ok(out)
        }
        "potential" => {
            let a = as_pattern(need(matrices, 0)?);
            let (yes, witness) = potentially_sign_stable(&a)?;
            let mut out = Outcome::new(
                if yes { EXIT_HOLDS } else { EXIT_FAILS },
                if yes { "holds" } else { "fails" },
            );
            out.statements = json!({"negative_diagonal": yes});
            if let Some(w) = witness {
                out.certificates = json!({"hurwitz_member": real_json(&w)});
            }
            out.dot = Some(Digraph::of_matrix(&a)?.to_dot());
            Ok(out)
        }
        "schur" => {
            let a = as_pattern(need(matrices, 0)?);
            let v = if opts.full_check {
                schur_sign_stable_checked(&a)?
            } else {
                schur_sign_stable(&a)?
            };
            let mut out = Outcome::new(
                if v.verdict { EXIT_HOLDS } else { EXIT_FAILS },
                if v.verdict { "holds" } else { "fails" },
            );
            out.statements = stability_statements(&v);
            out.certificates = stability_certificates(&v);
            out.witnesses = stability_witnesses(&v);
            out.dot = Some(Digraph::of_matrix(&a)?.to_dot());
            Ok(out)
        }
        "inverse" => {
            let m = need(matrices, 0)?;
            let mut out = Outcome::new(EXIT_HOLDS, "holds");
            if m.is_pure_sign() {
                let inv = kernel::sign_inverse(&m.to_qual())?;
                out.certificates = json!({"sign_inverse": qual_json(&inv)});
                out.body = Some(format!("{inv}\n"));
            } else {
                let (inv, residual) = real_inverse_with_residual(&m.to_real()?)?;
                out.certificates = json!({"inverse": real_json(&inv)});
                out.extra_diagnostics
                    .insert("residual".into(), json!(residual));
                out.body = Some(format!("{inv}\n"));
            }
            Ok(out)
        }
        "lplus" => {
            let r = as_pattern(need(matrices, 0)?);
            let res = is_lplus(&r, opts.cap_lplus)?;
            let mut out = Outcome::new(
                if res.is_lplus { EXIT_HOLDS } else { EXIT_FAILS },
                if res.is_lplus { "holds" } else { "fails" },
            );
            out.statements = json!({"lplus": res.is_lplus});
            if let Some(d) = res.witness {
                out.witnesses = json!({"scaling": d});
            }
            Ok(out)
        }
        "kerb" => {
            let a = as_pattern(need(matrices, 0)?);
            let b = need(matrices, 1)?.to_real()?;
            let kerb_opts = KerBOptions {
                cap_sq: opts.cap_sq,
                cap_lplus: opts.cap_lplus,
                samples: opts.samples,
                seed: opts.seed,
                scale: opts.scale,
            };
            let verdict = ker_b_sign_stable(&a, &b, &kerb_opts)?;
            let yes = verdict.status == KerBStatus::SufficientYes;
            let mut out = Outcome::new(
                if yes { EXIT_HOLDS } else { EXIT_UNKNOWN },
                if yes { "holds" } else { "unknown" },
            );
            out.statements = json!({
                "members_lplus": yes,
                "checked_members": verdict.checked_count,
            });
            out.extra_diagnostics
                .insert("kernel_pattern".into(), qual_json(&verdict.pattern));
            if let Some((idx, d)) = &verdict.failing_member {
                out.witnesses = json!({"member": idx, "scaling": d});
            }
            if !verdict.certificates.is_empty() {
                out.certificates = json!({
                    "samples": verdict
                        .certificates
                        .iter()
                        .map(|c| json!({
                            "seed": c.seed,
                            "v": c.v,
                            "margin": c.margin,
                            "b_residual": c.b_residual,
                        }))
                        .collect::<Vec<Value>>()
                });
            }
            Ok(out)
        }
        "block" => run_block(opts, matrices),
        "hull" => {
            let members: Vec<QualMatrix> = matrices.iter().map(|(_, m)| m.to_qual()).collect();
            let family = Family::new(members)?;
            let report = hull_sign_stable(&family)?;
            let mut out = Outcome::new(verdict_exit(report.verdict), report.verdict.label());
            let mut statements = serde_json::Map::new();
            statements.insert(
                "summable".into(),
                json!(report.conflict_position.is_none()),
            );
            statements.insert(
                "sum_sign_stable".into(),
                json!(report.sum_verdict.as_ref().map(|v| v.verdict)),
            );
            if opts.full_check {
                let enumerated = hull_sign_stable_enumerated(&family)?;
                if enumerated != report.verdict {
                    return Err(Error::Disagreement {
                        context: format!(
                            "hull enumeration says {enumerated} but the sum test says {}",
                            report.verdict
                        ),
                    });
                }
                statements.insert("enumerated".into(), json!(enumerated.holds()));
            }
            out.statements = Value::Object(statements);
            let mut witnesses = serde_json::Map::new();
            if let Some(p) = report.conflict_position {
                witnesses.insert("conflict_position".into(), json!(p));
            }
            if let Some((m, j)) = report.diagonal_violation {
                witnesses.insert("diagonal_violation".into(), json!({"member": m, "index": j}));
            }
            if let Some(sv) = &report.sum_verdict {
                out.certificates = stability_certificates(sv);
                if let Some(c) = &sv.cycle {
                    witnesses.insert("cycle".into(), json!(c.nodes));
                }
                out.dot = Some(Digraph::of_matrix(&family.sum())?.to_dot());
            }
            out.witnesses = Value::Object(witnesses);
            Ok(out)
        }
        "mixed" => {
            let a_sigma = as_pattern(need(matrices, 0)?);
            let a_phi = need(matrices, 1)?.to_real()?;
            let b_phi = need(matrices, 2)?.to_real()?;
            let c_phi = need(matrices, 3)?.to_real()?;
            let sys = MixedSystem::new(a_sigma, a_phi, b_phi, c_phi)?;
            let report = mixed_sign_stable(&sys)?;
            let mut out = Outcome::new(
                if report.verdict { EXIT_HOLDS } else { EXIT_FAILS },
                if report.verdict { "holds" } else { "fails" },
            );
            out.statements = json!({
                "sigma_sign_stable": report.sigma_verdict.verdict,
                "phi_hurwitz": report.phi_report.verdict,
                "nilpotency": report.nilpotency_path,
                "bipartite": report.bipartite_path,
                "lp": report.lp_path,
            });
            let mut certs = serde_json::Map::new();
            if let Some(ms) = &report.m_sigma {
                certs.insert("m_sigma".into(), int_json(ms));
            }
            if let Some(mp) = &report.m_phi {
                certs.insert("m_phi".into(), real_json(mp));
            }
            if let Some((v, w, z)) = &report.lp_certificates {
                certs.insert("sigma_vector".into(), cert_json(v));
                certs.insert("phi_vector".into(), cert_json(w));
                certs.insert("product_vector".into(), cert_json(z));
            }
            out.certificates = Value::Object(certs);
            if let Some(c) = &report.bipartite_cycle {
                out.witnesses = json!({"bipartite_cycle": c.nodes});
            }
            if let Some(rho) = report.rho_diagnostic {
                out.extra_diagnostics
                    .insert("rho_float_diagnostic".into(), json!(rho));
            }
            if report.sigma_verdict.verdict && report.phi_report.verdict {
                out.dot = Some(mixed_bipartite_graph(&sys)?.to_dot_bipartite(sys.n_sigma()));
            }
            Ok(out)
        }
        "witness" => {
            let a = as_pattern(need(matrices, 0)?);
            let w = instability_witness(&a)?;
            let mut out = Outcome::new(EXIT_HOLDS, "holds");
            out.witnesses = json!({"counterexample": real_json(&w)});
            out.dot = Some(Digraph::of_matrix(&a)?.to_dot());
            out.body = Some(format!("{w}\n"));
            Ok(out)
        }
        "sample" => {
            let a = as_pattern(need(matrices, 0)?);
            let m = a.sample(opts.seed, opts.scale)?;
            let mut out = Outcome::new(EXIT_HOLDS, "holds");
            out.certificates = json!({"sample": real_json(&m)});
            let named = vec![("sample".to_string(), MixedMatrix::from_real(&m))];
            out.body = Some(format_matrix_file(&named));
            Ok(out)
        }
        "app" => run_app(opts, matrices),
        other => Err(Error::Invalid {
            message: format!("unknown command '{other}'"),
        }),
    }
}

fn run_block(opts: &Options, matrices: &[(String, MixedMatrix)]) -> Result<Outcome> {
    // diagonal blocks A1..AN plus couplings Bi_j / Ci_j, 1-indexed
    let mut diag: Vec<(usize, &MixedMatrix)> = Vec::new();
    let mut bs: BTreeMap<(usize, usize), &MixedMatrix> = BTreeMap::new();
    let mut cs: BTreeMap<(usize, usize), &MixedMatrix> = BTreeMap::new();
    for (name, m) in matrices {
        if let Some(idx) = name.strip_prefix('A').and_then(|s| s.parse::<usize>().ok()) {
            if idx == 0 {
                return Err(Error::Invalid {
                    message: "block indices are 1-based".into(),
                });
            }
            diag.push((idx - 1, m));
        } else if let Some((i, j)) = parse_coupling_name(name, 'B') {
            bs.insert((i, j), m);
        } else if let Some((i, j)) = parse_coupling_name(name, 'C') {
            cs.insert((i, j), m);
        } else {
            return Err(Error::Invalid {
                message: format!("unrecognized block name '{name}' (want A1.., Bi_j, Ci_j)"),
            });
        }
    }
    diag.sort_by_key(|&(i, _)| i);
    if diag.is_empty() {
        return Err(Error::Invalid {
            message: "no diagonal blocks named A1..AN found".into(),
        });
    }
    for (k, &(i, _)) in diag.iter().enumerate() {
        if i != k {
            return Err(Error::Invalid {
                message: format!("diagonal blocks must be numbered 1..N, missing A{}", k + 1),
            });
        }
    }
    if bs.keys().collect::<Vec<_>>() != cs.keys().collect::<Vec<_>>() {
        return Err(Error::Invalid {
            message: "couplings need matching Bi_j and Ci_j pairs".into(),
        });
    }

    let all_sign = diag.iter().map(|&(_, m)| m).chain(bs.values().copied()).chain(cs.values().copied()).all(|m| m.is_pure_sign());
    let all_real = diag.iter().map(|&(_, m)| m).chain(bs.values().copied()).chain(cs.values().copied()).all(|m| m.is_pure_real());

    if all_sign {
        let diag_q: Vec<QualMatrix> = diag.iter().map(|&(_, m)| m.to_qual()).collect();
        let mut couplings = BTreeMap::new();
        for (&key, b) in &bs {
            couplings.insert(
                key,
                Coupling {
                    b: b.to_qual(),
                    c: cs[&key].to_qual(),
                },
            );
        }
        let sys = BlockSystem::<QualMatrix>::new(diag_q, couplings)?;
        let report = block_sign_stable(&sys, opts.form)?;
        let mut out = Outcome::new(verdict_exit(report.verdict), report.verdict.label());
        let qc: BTreeMap<String, &'static str> = report
            .qc_status
            .iter()
            .map(|(&(i, j), v)| (format!("{}->{}", i + 1, j + 1), v.label()))
            .collect();
        out.statements = json!({
            "lp_feasible": report.lp.is_feasible(),
            "hypotheses_hold": report.hypotheses_hold,
            "class_product_equality": qc,
            "unit_product_equality": report.sgn_status.as_ref().map(|m| {
                m.iter()
                    .map(|(&(i, j), &ok)| (format!("{}->{}", i + 1, j + 1), ok))
                    .collect::<BTreeMap<String, bool>>()
            }),
        });
        if let Some(cert) = report.lp.certificate() {
            out.certificates = json!({"multipliers": multiplier_json(cert)});
        }
        if let Some(assembled) = &report.assembled {
            if let Some(c) = &assembled.cycle {
                out.witnesses = json!({"cycle": c.nodes});
            }
        }
        Ok(out)
    } else if all_real {
        let diag_r: Vec<RealMatrix> = diag
            .iter()
            .map(|&(_, m)| m.to_real())
            .collect::<Result<_>>()?;
        let mut couplings = BTreeMap::new();
        for (&key, b) in &bs {
            couplings.insert(
                key,
                Coupling {
                    b: b.to_real()?,
                    c: cs[&key].to_real()?,
                },
            );
        }
        let sys = BlockSystem::<RealMatrix>::new(diag_r, couplings)?;
        let lp = block_hurwitz(&sys)?;
        let feasible = lp.is_feasible();
        let mut out = Outcome::new(
            if feasible { EXIT_HOLDS } else { EXIT_FAILS },
            if feasible { "holds" } else { "fails" },
        );
        out.statements = json!({"lp_feasible": feasible});
        if let Some(cert) = lp.certificate() {
            out.certificates = json!({"multipliers": multiplier_json(cert)});
        }
        Ok(out)
    } else {
        Err(Error::Invalid {
            message: "block systems must be all-sign or all-real".into(),
        })
    }
}

fn parse_coupling_name(name: &str, prefix: char) -> Option<(usize, usize)> {
    let rest = name.strip_prefix(prefix)?;
    let (i, j) = rest.split_once('_')?;
    let i: usize = i.parse().ok()?;
    let j: usize = j.parse().ok()?;
    if i == 0 || j == 0 {
        return None;
    }
    Some((i - 1, j - 1))
}

fn run_app(opts: &Options, matrices: &[(String, MixedMatrix)]) -> Result<Outcome> {
    let sub = opts.sub.as_deref().unwrap_or("");
    match sub {
        "delay-ct" => {
            let flow = as_pattern(need(matrices, 0)?);
            let delays: Vec<QualMatrix> =
                matrices[1..].iter().map(|(_, m)| m.to_qual()).collect();
            let report = delay_ct_structural(&flow, &delays)?;
            let mut out = Outcome::new(verdict_exit(report.verdict), report.verdict.label());
            out.statements = json!({
                "sum_sign_stable": report.sum_verdict.as_ref().map(|v| v.verdict),
                "summable": report.conflict_position.is_none(),
            });
            if let Some(sv) = &report.sum_verdict {
                out.certificates = stability_certificates(sv);
                out.witnesses = stability_witnesses(sv);
            }
            if let Some(p) = report.conflict_position {
                out.witnesses = json!({"conflict_position": p});
            }
            Ok(out)
        }
        "delay-dt" => {
            let terms: Vec<QualMatrix> = matrices.iter().map(|(_, m)| m.to_qual()).collect();
            let v = delay_dt_structural(&terms)?;
            let mut out = Outcome::new(
                if v.verdict { EXIT_HOLDS } else { EXIT_FAILS },
                if v.verdict { "holds" } else { "fails" },
            );
            out.statements = stability_statements(&v);
            out.certificates = stability_certificates(&v);
            out.witnesses = stability_witnesses(&v);
            Ok(out)
        }
        "switched" => {
            let modes: Vec<QualMatrix> = matrices.iter().map(|(_, m)| m.to_qual()).collect();
            let seed = if opts.samples > 0 { Some(opts.seed) } else { None };
            let report = switched_structural(&modes, seed)?;
            let mut out = Outcome::new(verdict_exit(report.verdict), report.verdict.label());
            out.statements = json!({
                "hull_sign_stable": report.verdict.holds(),
            });
            let mut certs = serde_json::Map::new();
            if let Some(v) = &report.sampled_linear {
                certs.insert("common_vector".into(), json!(v));
            }
            if let Some(q) = &report.sampled_quadratic {
                certs.insert("common_diagonal_q".into(), json!(q));
            }
            if let Some(sv) = &report.hull.sum_verdict {
                if let Some(c) = &sv.lyapunov {
                    certs.insert("sum_lyapunov".into(), cert_json(c));
                }
                if let Some(cyc) = &sv.cycle {
                    out.witnesses = json!({"cycle": cyc.nodes});
                }
            }
            out.certificates = Value::Object(certs);
            Ok(out)
        }
        "impulsive" => {
            let flow = as_pattern(need(matrices, 0)?);
            let jump = as_pattern(need(matrices, 1)?);
            let report = impulsive_structural(&flow, &jump)?;
            let mut out = Outcome::new(verdict_exit(report.verdict), report.verdict.label());
            out.statements = json!({
                "flow_diagonal_negative": report.flow_diagonal.is_none(),
                "jump_diagonal_zero": report.jump_diagonal.is_none(),
                "sum_sign_stable": report.sum_verdict.as_ref().map(|v| v.verdict),
            });
            if report.verdict.holds() && opts.samples > 0 {
                let mut vectors = Vec::new();
                for i in 0..opts.samples {
                    vectors.push(impulsive_common_vector(&flow, &jump, opts.seed ^ i as u64)?);
                }
                out.certificates = json!({"sampled_vectors": vectors.len()});
            }
            if let Some(sv) = &report.sum_verdict {
                if out.certificates == json!({}) {
                    out.certificates = stability_certificates(sv);
                }
                out.witnesses = stability_witnesses(sv);
            }
            Ok(out)
        }
        "nonlinear" => {
            let m = as_pattern(need(matrices, 0)?);
            let b = need(matrices, 1)?.to_int()?;
            let kerb_opts = KerBOptions {
                cap_sq: opts.cap_sq,
                cap_lplus: opts.cap_lplus,
                samples: opts.samples,
                seed: opts.seed,
                scale: opts.scale,
            };
            let verdict = nonlinear_invariance_structural(&m, &b, &kerb_opts)?;
            let yes = verdict.status == KerBStatus::SufficientYes;
            let mut out = Outcome::new(
                if yes { EXIT_HOLDS } else { EXIT_UNKNOWN },
                if yes { "holds" } else { "unknown" },
            );
            out.statements = json!({
                "members_lplus": yes,
                "checked_members": verdict.checked_count,
            });
            if let Some((idx, d)) = &verdict.failing_member {
                out.witnesses = json!({"member": idx, "scaling": d});
            }
            Ok(out)
        }
        "ergodic" => {
            let z = as_pattern(need(matrices, 0)?);
            let s_b = need(matrices, 1)?.to_int()?;
            let net = ReactionNetworkSigns {
                interaction_pattern: z,
                bimolecular_stoichiometry: s_b,
                irreducible_state_space: opts.irreducible,
            };
            let kerb_opts = KerBOptions {
                cap_sq: opts.cap_sq,
                cap_lplus: opts.cap_lplus,
                samples: opts.samples,
                seed: opts.seed,
                scale: opts.scale,
            };
            let report = ergodicity_structural(&net, &kerb_opts)?;
            let yes = report.status == KerBStatus::SufficientYes;
            let mut out = Outcome::new(
                if yes { EXIT_HOLDS } else { EXIT_UNKNOWN },
                if yes { "holds" } else { "unknown" },
            );
            out.statements = json!({
                "sufficient": yes,
                "irreducible_declared": report.irreducible_declared,
            });
            if !report.indefinite_positions.is_empty() {
                out.witnesses = json!({
                    "indefinite_positions": report
                        .indefinite_positions
                        .iter()
                        .map(|&(r, c)| json!([r, c]))
                        .collect::<Vec<Value>>()
                });
            }
            Ok(out)
        }
        other => Err(Error::Invalid {
            message: format!("unknown app subcommand '{other}'"),
        }),
    }
}

fn render(
    opts: &Options,
    matrices: &[(String, MixedMatrix)],
    outcome: &Outcome,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    if opts.json {
        let mut diagnostics = serde_json::Map::new();
        diagnostics.insert("seed".into(), json!(opts.seed));
        diagnostics.insert("samples".into(), json!(opts.samples));
        diagnostics.insert("scale".into(), json!(opts.scale));
        diagnostics.insert(
            "caps".into(),
            json!({"sq": opts.cap_sq, "lplus": opts.cap_lplus}),
        );
        diagnostics.insert("full_check".into(), json!(opts.full_check));
        let tol = Tolerances::default();
        diagnostics.insert(
            "tolerances".into(),
            json!({
                "pivot_rel": tol.pivot_rel,
                "inverse_nonpos_rel": tol.inverse_nonpos_rel,
                "agreement": tol.agreement,
            }),
        );
        for (k, v) in &outcome.extra_diagnostics {
            diagnostics.insert(k.clone(), v.clone());
        }
        let command = match &opts.sub {
            Some(sub) => format!("{} {}", opts.command, sub),
            None => opts.command.clone(),
        };
        let report = json!({
            "command": command,
            "inputs": inputs_json(matrices),
            "verdict": outcome.verdict,
            "statements": outcome.statements,
            "certificates": outcome.certificates,
            "witnesses": outcome.witnesses,
            "diagnostics": Value::Object(diagnostics),
            "version": env!("CARGO_PKG_VERSION"),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        let command = match &opts.sub {
            Some(sub) => format!("{} {}", opts.command, sub),
            None => opts.command.clone(),
        };
        writeln!(out, "command: {command}")?;
        for (name, m) in matrices {
            writeln!(out, "input: {} ({}x{} {})", name, m.rows(), m.cols(), kind_of(m))?;
        }
        writeln!(out, "verdict: {}", outcome.verdict)?;
        if let Some(body) = &outcome.body {
            write!(out, "{body}")?;
        } else {
            // compact single-line views of the structured sections
            writeln!(out, "statements: {}", outcome.statements)?;
            writeln!(out, "certificates: {}", outcome.certificates)?;
            writeln!(out, "witnesses: {}", outcome.witnesses)?;
        }
    }
    Ok(())
}

/// Run the command line. Reports go to `out`; the return value is the
/// process exit code.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let opts = match parse_args(args) {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(out, "error: {msg}");
            let _ = writeln!(out, "{USAGE}");
            return EXIT_USAGE;
        }
    };

    let matrices = match &opts.input {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match parse_matrix_file(&text) {
                Ok(m) => m,
                Err(e) => {
                    let _ = report_error(&opts, &e, out);
                    return exit_code_for(&e);
                }
            },
            Err(e) => {
                let _ = writeln!(out, "error: cannot read '{path}': {e}");
                return EXIT_IO;
            }
        },
        None => {
            let _ = writeln!(out, "error: --input FILE is required");
            let _ = writeln!(out, "{USAGE}");
            return EXIT_USAGE;
        }
    };

    match run_command(&opts, &matrices) {
        Ok(outcome) => {
            if let Some(path) = &opts.dot {
                match &outcome.dot {
                    Some(dot) => {
                        if let Err(e) = std::fs::write(path, dot) {
                            let _ = writeln!(out, "error: cannot write '{path}': {e}");
                            return EXIT_IO;
                        }
                    }
                    None => {
                        let _ = writeln!(out, "error: no graph export for this command");
                        return EXIT_USAGE;
                    }
                }
            }
            if render(&opts, &matrices, &outcome, out).is_err() {
                return EXIT_IO;
            }
            outcome.exit
        }
        Err(e) => {
            let _ = report_error(&opts, &e, out);
            exit_code_for(&e)
        }
    }
}

fn report_error(opts: &Options, err: &Error, out: &mut dyn Write) -> std::io::Result<()> {
    if opts.json {
        let report = json!({
            "command": opts.command,
            "error": err.to_string(),
            "version": env!("CARGO_PKG_VERSION"),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)
    } else {
        writeln!(out, "error: {err}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signs::SignValue;

    #[test]
    fn parse_simple_sign_matrix() {
        let text = "@A\n- +\n0 -\n";
        let ms = parse_matrix_file(text).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].0, "A");
        assert_eq!(ms[0].1.to_qual(), "- + ; 0 -".parse().unwrap());
    }

    #[test]
    fn parse_real_matrix() {
        let text = "@B\n-1 2\n1 -5\n";
        let ms = parse_matrix_file(text).unwrap();
        assert_eq!(
            ms[0].1.to_real().unwrap(),
            RealMatrix::from_rows(vec![vec![-1.0, 2.0], vec![1.0, -5.0]]).unwrap()
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let ragged = "@C\n- + 0\n0 -\n";
        match parse_matrix_file(ragged) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected ragged-row error, got {other:?}"),
        }
        let unknown = "@D\n- x\n";
        match parse_matrix_file(unknown) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("'x'"));
            }
            other => panic!("expected token error, got {other:?}"),
        }
        let dup = "@E\n-\n\n@E\n-\n";
        assert!(matches!(
            parse_matrix_file(dup),
            Err(Error::Parse { line: 4, .. })
        ));
        let stray = "-\n";
        assert!(matches!(
            parse_matrix_file(stray),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# leading comment\n@A\n- +\n0 -\n\n# between\n@B\n1.5\n";
        let ms = parse_matrix_file(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[1].0, "B");
    }

    #[test]
    fn format_round_trip() {
        let text = "@A\n- + ? 0\n0 - 2.5 -0\n\n@B\n1 -1\n-0 3e-2\n";
        let parsed = parse_matrix_file(text).unwrap();
        let formatted = format_matrix_file(&parsed);
        let reparsed = parse_matrix_file(&formatted).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn unicode_aliases_accepted() {
        let text = "@A\n\u{2296} \u{2295}\n0 \u{2299}\n";
        let ms = parse_matrix_file(text).unwrap();
        let q = ms[0].1.to_qual();
        assert_eq!(q.get(0, 0), SignValue::Neg);
        assert_eq!(q.get(0, 1), SignValue::Pos);
        assert_eq!(q.get(1, 1), SignValue::Indef);
    }

    fn run_to_string(args: &[&str]) -> (i32, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut buf = Vec::new();
        let code = run(&args, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn usage_errors() {
        let (code, text) = run_to_string(&[]);
        assert_eq!(code, EXIT_USAGE);
        assert!(text.contains("usage"));
        let (code, _) = run_to_string(&["check"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _) = run_to_string(&["check", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn check_command_end_to_end() {
        let dir = std::env::temp_dir().join("metzler_sign_cli_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m1.txt");
        std::fs::write(&path, "@M1\n- +\n+ -\n").unwrap();
        let (code, text) = run_to_string(&["check", "--input", path.to_str().unwrap(), "--json"]);
        assert_eq!(code, EXIT_FAILS);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["verdict"], "fails");
        assert_eq!(v["witnesses"]["cycle"], json!([0, 1, 0]));

        std::fs::write(&path, "@M2\n- -\n+ -\n").unwrap();
        let (code, text) = run_to_string(&["check", "--input", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(text.contains("not Metzler"));
    }
}
