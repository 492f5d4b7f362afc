use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use res_kernel::contact::coefficient_ideal;
use res_kernel::driver::DEFAULT_BUDGET;
use res_kernel::ideal::{spair_cap_from_env, Ideal};
use res_kernel::order::{max_order, t_ideal, MarkedIdeal, Order};
use res_kernel::poly::{parse_many, vars, Polynomial};
use res_kernel::toric::{resolve_fan_2d, Fan};
use res_kernel::trace::{check_trace, run_input, OutcomeStatus, TraceDocument, TraceInput, TraceMode};
use res_kernel::Error;

const EXIT_PARSE: u8 = 1;
const EXIT_FAILURE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "res-kernel", version, about = "Principalization, embedded resolution and toric resolution over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct IdealArgs {
    /// Comma-separated variable names, in order.
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<String>,
    /// A generator; repeat for several.
    #[arg(long = "ideal")]
    ideal: Vec<String>,
    /// File with one generator per line.
    #[arg(long)]
    ideal_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

impl IdealArgs {
    fn generators(&self) -> Result<Vec<String>, Error> {
        let mut gens = self.ideal.clone();
        if let Some(path) = &self.ideal_file {
            let text = fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            gens.extend(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from));
        }
        if gens.is_empty() {
            return Err(Error::InvalidArgument("give at least one --ideal".into()));
        }
        Ok(gens)
    }
}

#[derive(Args)]
struct DriverArgs {
    #[command(flatten)]
    ideal: IdealArgs,
    /// Initial exceptional coordinates.
    #[arg(long, value_delimiter = ',')]
    exceptional: Vec<String>,
    /// Variable to try first for maximal contact.
    #[arg(long)]
    contact: Option<String>,
    /// Maximum number of blow-ups.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Order-reduce the marked ideal (I, MARK) instead of principalizing.
    #[arg(long)]
    mark: Option<u32>,
    /// Write the JSON trace document here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal order, T(I, a) and the coefficient ideal.
    Order {
        #[command(flatten)]
        ideal: IdealArgs,
        /// Mark for T(I, a) and the coefficient ideal; defaults to the maximal order.
        #[arg(long)]
        mark: Option<u32>,
    },
    /// Principalize an ideal and emit the blow-up trace.
    Principalize(DriverArgs),
    /// Principalize and report the stage at which the curve is embedded-resolved.
    ResolveCurve(DriverArgs),
    /// Resolve a 2-dimensional fan read from FILE (`-` for stdin).
    ToricResolve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a trace document.
    CheckTrace {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn show(ps: &[Polynomial]) -> String {
    let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
    format!("({})", s.join(", "))
}

fn order_cmd(args: &IdealArgs, mark: Option<u32>, out: &mut String) -> Result<u8, Error> {
    let v = vars(&args.vars);
    let ideal = Ideal::new(&v, parse_many(&args.generators()?, &v)?);
    let maxord = max_order(&ideal)?;
    let a = match (mark, maxord) {
        (Some(a), _) => Some(a),
        (None, Order::Finite(a)) if a > 0 => Some(a),
        _ => None,
    };
    let (t, coeff) = match a {
        Some(a) => {
            let t = t_ideal(&ideal, a)?.basis()?.polynomials();
            // the coefficient ideal is only defined for small marks
            let c = coefficient_ideal(&MarkedIdeal::new(ideal.clone(), a)?)
                .ok()
                .map(|c| c.ideal.basis().map(|b| (b.polynomials(), c.mark)))
                .transpose()?;
            (Some(t), c)
        }
        None => (None, None),
    };
    match args.format {
        Format::Text => {
            out.push_str(&format!("maxord: {maxord}\n"));
            if let (Some(a), Some(t)) = (a, &t) {
                out.push_str(&format!("mark: {a}\nt_ideal: {}\n", show(t)));
            }
            if let Some((c, m)) = &coeff {
                out.push_str(&format!("coefficient_ideal: {} mark {m}\n", show(c)));
            }
        }
        Format::Json => {
            let strs = |ps: &[Polynomial]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>();
            let doc = json!({
                "maxord": maxord,
                "mark": a,
                "t_ideal": t.as_deref().map(strs),
                "coefficient_ideal": coeff.as_ref().map(|(c, m)| json!({"generators": strs(c), "mark": m})),
            });
            out.push_str(&serde_json::to_string_pretty(&doc).expect("json value"));
            out.push('\n');
        }
    }
    Ok(0)
}

fn driver_cmd(args: &DriverArgs, detect: bool, out: &mut String) -> Result<u8, Error> {
    let input = TraceInput {
        mode: if args.mark.is_some() { TraceMode::OrderReduce } else { TraceMode::Principalize },
        vars: args.ideal.vars.clone(),
        ideal: args.ideal.generators()?,
        exceptional: args.exceptional.clone(),
        mark: args.mark,
        budget: args.budget,
        contact: args.contact.clone(),
    };
    if detect && args.mark.is_some() {
        return Err(Error::InvalidArgument("resolve-curve does not take --mark".into()));
    }
    let doc = run_input(input, detect)?;
    if let Some(path) = &args.out {
        write_file(path, &doc.to_json())?;
    }
    match args.ideal.format {
        Format::Text => {
            out.push_str(&doc.render_text());
            if detect && doc.outcome.embedded_stage.is_none() {
                out.push_str("embedded resolution not detected\n");
            }
        }
        Format::Json => out.push_str(&doc.to_json()),
    }
    Ok(match doc.outcome.status {
        OutcomeStatus::Principalized | OutcomeStatus::OrderReduced => 0,
        OutcomeStatus::Failed => EXIT_FAILURE,
        OutcomeStatus::BudgetExhausted => EXIT_BUDGET,
    })
}

fn toric_cmd(file: &PathBuf, format: Format, path: Option<&PathBuf>, out: &mut String) -> Result<u8, Error> {
    let fan: Fan = read_input(file)?.parse()?;
    let resolved = resolve_fan_2d(&fan)?;
    let text = match format {
        Format::Text => resolved.to_string(),
        Format::Json => {
            let old = fan.rays();
            let ray = |r: &Vec<num_bigint::BigInt>| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let cones: Vec<Vec<String>> = resolved.cones().iter().map(|c| c.rays().iter().map(ray).collect()).collect();
            let inserted: Vec<String> = resolved.rays().iter().filter(|r| !old.contains(r)).map(ray).collect();
            let doc = json!({ "dim": resolved.dim(), "cones": cones, "inserted_rays": inserted });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json value"))
        }
    };
    if let Some(p) = path {
        write_file(p, &text)?;
    }
    out.push_str(&text);
    Ok(0)
}

fn check_cmd(file: &PathBuf, format: Format, out: &mut String) -> Result<u8, Error> {
    let doc = TraceDocument::from_json(&read_input(file)?)?;
    let report = check_trace(&doc);
    let code = match &report {
        Ok(_) => 0,
        Err(e) if e.is_parse() => EXIT_PARSE,
        Err(_) => EXIT_FAILURE,
    };
    match (format, &report) {
        (Format::Text, Ok(r)) => out.push_str(&format!("ok: {} charts, {} edges, {} blow-ups\n", r.nodes, r.edges, r.blowups)),
        (Format::Text, Err(e)) => out.push_str(&format!("rejected: {e}\n")),
        (Format::Json, Ok(r)) => out.push_str(&format!(
            "{}\n",
            json!({"accepted": true, "charts": r.nodes, "edges": r.edges, "blowups": r.blowups})
        )),
        (Format::Json, Err(e)) => out.push_str(&format!("{}\n", json!({"accepted": false, "reason": e.to_string()}))),
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    spair_cap_from_env();
    let mut out = String::new();
    let res = match &cli.command {
        Command::Order { ideal, mark } => order_cmd(ideal, *mark, &mut out),
        Command::Principalize(a) => driver_cmd(a, false, &mut out),
        Command::ResolveCurve(a) => driver_cmd(a, true, &mut out),
        Command::ToricResolve { file, format, out: path } => toric_cmd(file, *format, path.as_ref(), &mut out),
        Command::CheckTrace { file, format } => check_cmd(file, *format, &mut out),
    };
    let _ = io::stdout().write_all(out.as_bytes());
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                e if e.is_parse() => EXIT_PARSE,
                Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => EXIT_PARSE,
                Error::BudgetExhausted(_) => EXIT_BUDGET,
                _ => EXIT_FAILURE,
            })
        }
    }
}
