use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hypertoric::data::{alphabeta_holds, dual_basis_identities, dual_point, HypertoricData};
use hypertoric::elliptic::{check_interface, generator_lattice};
use hypertoric::kirwan::Space;
use hypertoric::lattice::LaurentPoly;
use hypertoric::localization::{
    intertwiner_check, pneqq_limit, random_intertwiner_slopes, scale_for, Specialization,
};
use hypertoric::loops::{main_theorem_check, xi_positive_loops};
use hypertoric::report::{Check, Envelope};
use hypertoric::stab::{
    check_axioms, duality_pairing, is_identity, random_generic_slope, seeded_rng, stab_and_opposite, Slope,
    StabMatrix,
};
use hypertoric::xi::{check_degree_bound, check_vanishing, xi_matrix, DualPair};

#[derive(Parser)]
#[command(name = "hypertoric", version, about = "Fixed-point computations on hypertoric varieties and their Gale duals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input document (JSON with keys E, partial, beta, eta, zeta)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Truncation order for q-series
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(i64).range(1..))]
    q_order: i64,
    /// Slope for X, e.g. 1/7,-2/7,0
    #[arg(long, global = true, allow_hyphen_values = true)]
    slope: Option<Slope>,
    /// Slope for the Gale dual
    #[arg(long, global = true, allow_hyphen_values = true)]
    slope_dual: Option<Slope>,
    /// Override the chamber zeta, e.g. 1,2
    #[arg(long, global = true, allow_hyphen_values = true, value_delimiter = ',')]
    zeta: Option<Vec<i64>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for random slopes
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the input invariants
    Validate,
    /// List bases with their alpha/beta data and restrictions
    FixedPoints,
    /// Gale dual data
    Dual,
    /// Restrictions of the intertwining class, vanishing pattern and degree bounds
    XiMatrix,
    /// Stable envelopes, axioms and duality pairing
    Stab,
    /// Limits of the intertwiner and of the factor products
    IntertwinerCheck,
    /// Loop class against the twisted duality interface
    InterfaceCheck,
    /// Dump the positive-loop class as a q-series
    LoopXi,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::FixedPoints => "fixed-points",
            Command::Dual => "dual",
            Command::XiMatrix => "xi-matrix",
            Command::Stab => "stab",
            Command::IntertwinerCheck => "intertwiner-check",
            Command::InterfaceCheck => "interface-check",
            Command::LoopXi => "loop-xi",
        }
    }
}

/// Input problems, reported with exit status 2.
struct InvalidInput(String);

fn load(cli: &Cli) -> Result<(HypertoricData, String), InvalidInput> {
    let path = cli.input.as_ref().ok_or_else(|| InvalidInput("--input is required".into()))?;
    let bytes = fs::read(path).map_err(|e| InvalidInput(format!("{}: {e}", path.display())))?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| InvalidInput("input is not UTF-8".into()))?;
    let mut data = HypertoricData::from_json(&text).map_err(|e| InvalidInput(e.to_string()))?;
    if let Some(z) = &cli.zeta {
        if z.len() != data.r() {
            return Err(InvalidInput(format!("--zeta has {} entries, expected {}", z.len(), data.r())));
        }
        data = data.with_zeta(z.clone());
    }
    Ok((data, hash))
}

fn require_valid(data: &HypertoricData) -> Result<(), InvalidInput> {
    let rep = data.validate().map_err(|e| InvalidInput(e.to_string()))?;
    match rep.checks.iter().find(|c| !c.pass) {
        None => Ok(()),
        Some(c) => Err(InvalidInput(format!("{} failed: {}", c.name, c.detail))),
    }
}

fn check_slope(s: &Slope, n: usize, flag: &str) -> Result<(), InvalidInput> {
    if s.0.len() == n {
        Ok(())
    } else {
        Err(InvalidInput(format!("{flag} has {} entries, expected {n}", s.0.len())))
    }
}

fn mono_text(space: &Space, p: usize, e: usize) -> String {
    space.u_poly(p, e).to_text()
}

fn points_json(space: &Space) -> Value {
    let labels = &space.data.labels;
    let zeta = &space.data.zeta;
    let pts: Vec<Value> = space
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let alpha: serde_json::Map<String, Value> =
                p.base.iter().map(|&e| (labels[e].clone(), json!(p.alpha(e).unwrap()))).collect();
            let beta: serde_json::Map<String, Value> =
                p.complement.iter().map(|&e| (labels[e].clone(), json!(p.beta_p(e).unwrap()))).collect();
            let u: serde_json::Map<String, Value> =
                (0..space.n()).map(|e| (labels[e].clone(), json!(mono_text(space, i, e)))).collect();
            json!({
                "point": space.label(i),
                "alpha": alpha,
                "beta": beta,
                "u": u,
                "tangent": space.tangent_class(i).to_text(),
                "rank_ind": space.rank_ind(i, zeta),
            })
        })
        .collect();
    Value::Array(pts)
}

fn stab_json(space: &Space, s: &StabMatrix) -> Value {
    let mut rows = Vec::new();
    for p in 0..space.points.len() {
        for q in 0..space.points.len() {
            rows.push(json!({"p": space.label(p), "q": space.label(q), "value": s.values[p][q].to_text()}));
        }
    }
    json!({
        "chamber": s.chamber,
        "polarization": format!("{:?}", s.polarization).to_lowercase(),
        "slope": s.slope.to_string(),
        "entries": rows,
    })
}

fn run(cli: &Cli) -> Result<Envelope, InvalidInput> {
    let (data, hash) = load(cli)?;
    let mut env = Envelope::new(cli.command.name(), hash);
    match cli.command {
        Command::Validate => {
            let rep = data.validate().map_err(|e| InvalidInput(e.to_string()))?;
            for c in rep.checks {
                env.push(Check::new(c.name, c.pass, c.detail));
            }
        }
        Command::FixedPoints => {
            require_valid(&data)?;
            let space = Space::new(data.clone(), "t");
            let dual = data.gale_dual();
            let ok = space.points.iter().all(|p| {
                dual_point(&dual, p).map(|pd| alphabeta_holds(p, &pd)).unwrap_or(false)
                    && dual_basis_identities(&data, p)
            });
            env.push(Check::info("fixed_points", points_json(&space)));
            env.push(Check::new("alpha_beta_identities", ok, json!({"points": space.points.len()})));
            env.push(Check::new("restrictions_consistent", space.self_test().is_ok(), space.self_test().err()));
        }
        Command::Dual => {
            require_valid(&data)?;
            let dual = data.gale_dual();
            let dual_valid = dual.validate().map(|r| r.pass()).unwrap_or(false);
            env.push(Check::info("dual", serde_json::to_value(&dual).unwrap()));
            env.push(Check::new("dual_valid", dual_valid, Value::Null));
            env.push(Check::new("double_dual_is_original", dual.gale_dual() == data, Value::Null));
            let bijective = data.enumerate_bases().len() == dual.enumerate_bases().len()
                && data.enumerate_bases().iter().all(|p| dual_point(&dual, p).is_some());
            env.push(Check::new("complement_bijection", bijective, Value::Null));
        }
        Command::XiMatrix => {
            require_valid(&data)?;
            let pair = DualPair::new(&data);
            let m = xi_matrix(&pair);
            let v = check_vanishing(&pair, &m);
            let d = check_degree_bound(&pair, &m);
            env.push(Check::info("entries", &v.table));
            env.push(Check::new("vanishing", v.pass(), json!({"violations": v.violations})));
            env.push(Check::new("vanishing_exact", v.exact(), json!({"converse_violations": v.converse_violations})));
            env.push(Check::new("degree_bound", d.pass(), &d));
        }
        Command::Stab => {
            require_valid(&data)?;
            let space = Space::new(data.clone(), "t");
            let chamber = data.zeta.clone();
            let (slope, s, s_op) = match &cli.slope {
                Some(sl) => {
                    check_slope(sl, data.n(), "--slope")?;
                    let (a, b) = stab_and_opposite(&space, &chamber, sl).map_err(|e| InvalidInput(e.to_string()))?;
                    (sl.clone(), a, b)
                }
                None => random_generic_slope(&space, &chamber, &mut seeded_rng(cli.seed)),
            };
            env.push(Check::info("slope", json!({"slope": slope.to_string(), "seed": cli.seed, "random": cli.slope.is_none()})));
            env.push(Check::info("stab", stab_json(&space, &s)));
            env.push(Check::info("stab_opposite", stab_json(&space, &s_op)));
            let a = check_axioms(&space, &s);
            let b = check_axioms(&space, &s_op);
            env.push(Check::new("axioms", a.pass(), &a));
            env.push(Check::new("axioms_opposite", b.pass(), &b));
            let pairing = duality_pairing(&space, &s, &s_op);
            let text: Vec<String> = pairing
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| if v.is_one() { "1".to_string() } else { v.to_text() })
                        .collect::<Vec<_>>()
                        .join(" | ")
                })
                .collect();
            env.push(Check::new("duality_pairing", is_identity(&pairing), text));
        }
        Command::IntertwinerCheck => {
            require_valid(&data)?;
            let probe = DualPair::new(&data);
            let (s, sd) = match (&cli.slope, &cli.slope_dual) {
                (Some(a), Some(b)) => {
                    check_slope(a, data.n(), "--slope")?;
                    check_slope(b, data.n(), "--slope-dual")?;
                    (a.clone(), b.clone())
                }
                (None, None) => random_intertwiner_slopes(&probe, &mut seeded_rng(cli.seed)),
                _ => return Err(InvalidInput("give both --slope and --slope-dual, or neither".into())),
            };
            let pair = DualPair::with_scale(&data, scale_for(&[&s, &sd]));
            let spec = Specialization::standard(&pair);
            let rep = intertwiner_check(&pair, &s, &sd, &spec).map_err(|e| InvalidInput(e.to_string()))?;
            let n = pair.len();
            let (diag, off): (Vec<_>, Vec<_>) = rep.records.iter().enumerate().partition(|(i, _)| i / n == i % n);
            let diag: Vec<_> = diag.into_iter().map(|(_, r)| r).collect();
            let off: Vec<_> = off.into_iter().map(|(_, r)| r).collect();
            env.push(Check::info(
                "setup",
                json!({"slope": rep.slope, "slope_dual": rep.slope_dual, "seed": cli.seed,
                       "random": cli.slope.is_none(), "specialization": rep.specialization}),
            ));
            env.push(Check::new("offdiagonal_limits", rep.offdiagonal_zero, &off));
            env.push(Check::new("diagonal_closed_form", rep.diagonal_closed_form, &diag));
            env.push(Check::new("identity_plus_r", rep.identity_plus_r, &rep.diagonal_limits));
            env.push(Check::info(
                "summands",
                json!({"unbounded": rep.unbounded_summands,
                       "not_strictly_bounded_off_point": rep.not_strictly_bounded_offpoint_summands,
                       "nonvanishing_off_point": rep.nonvanishing_offpoint_summands}),
            ));
            let spec2 = Specialization::standard(&probe);
            let mut records = Vec::new();
            for p in 0..n {
                for q in 0..n {
                    records.push(pneqq_limit(&probe, p, q, &spec2).map_err(|e| InvalidInput(e.to_string()))?);
                }
            }
            let off_ok = records.iter().enumerate().filter(|(i, _)| i / n != i % n).all(|(_, r)| r.pass);
            let diag_ok = records.iter().enumerate().filter(|(i, _)| i / n == i % n).all(|(_, r)| r.pass);
            let routes = records.iter().all(|r| r.routes_agree);
            let compact: Vec<Value> = records
                .iter()
                .map(|r| json!({"p": r.p, "q": r.q, "limit": r.limit, "expected": r.expected, "pass": r.pass}))
                .collect();
            env.push(Check::new("factor_limits_offdiagonal", off_ok, Value::Null));
            env.push(Check::new("factor_limits_closed_form", diag_ok, compact));
            env.push(Check::new("factor_limit_routes_agree", routes, &records));
        }
        Command::InterfaceCheck => {
            require_valid(&data)?;
            let pair = DualPair::new(&data);
            let rep = main_theorem_check(&pair, cli.q_order).map_err(|e| InvalidInput(e.to_string()))?;
            let unit_ok = rep.restrictions.iter().all(|r| r.unit_agrees);
            env.push(Check::new(
                "loop_class_equals_twisted_interface",
                rep.first_difference.is_none(),
                json!({"order": rep.order, "unit": rep.unit, "first_difference": rep.first_difference}),
            ));
            env.push(Check::new("unit_global", unit_ok, &rep.restrictions));
            let ell = check_interface(&pair, cli.q_order).map_err(|e| InvalidInput(e.to_string()))?;
            env.push(Check::new("interface_restrictions", ell.pass(), &ell));
        }
        Command::LoopXi => {
            require_valid(&data)?;
            let n = data.n();
            let level = cli.q_order;
            let s = xi_positive_loops(n, level, cli.q_order).map_err(|e| InvalidInput(e.to_string()))?;
            let longer = xi_positive_loops(n, level + 1, cli.q_order).map_err(|e| InvalidInput(e.to_string()))?;
            let lat = generator_lattice(n);
            let one = LaurentPoly::one(&lat);
            let xi = (0..n).fold(one.clone(), |acc, e| {
                &acc * &(&one - &hypertoric::elliptic::generator_product(&lat, n, e))
            });
            env.push(Check::info("series", json!({"level": level, "order": cli.q_order, "series": s.to_text()})));
            env.push(Check::new("constant_term_is_xi", s.coeff(0) == xi, json!({"xi": xi.to_text()})));
            env.push(Check::new("stable_in_level", s.agrees_with(&longer), json!({"levels": [level, level + 1]})));
        }
    }
    Ok(env)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(env) => {
            match cli.format {
                Format::Json => println!("{}", env.to_json()),
                Format::Human => print!("{}", env.to_human()),
            }
            if env.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InvalidInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
