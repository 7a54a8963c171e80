//! `tdga`: build, check, specialize and count augmentations of the filtered
//! DGA of a braid closure.
//!
//! Exit status is 0 on success, 1 for bad input or unsupported requests and
//! 2 when a structural identity fails (a bug).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tdga_core::augment::{
    count_augmentations, count_augmentations_all_units, count_augmentations_braid, is_prime, AugmentationProblem, UnitRow,
};
use tdga_core::braid::{parse_braid, BraidWord};
use tdga_core::dga::{build_filtered_dga, infinity_dga, verify_dga, FilteredDga, Specialization};
use tdga_core::json::dga_to_json;
use tdga_core::Error;

#[derive(Parser, Debug)]
#[command(name = "tdga", version, about = "Filtered knot contact homology DGAs of transverse braid closures")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the filtered DGA, or one of its specializations with --spec.
    Dga {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "minus")]
        spec: Spec,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify ∂² = 0, the degree drop and the U,V filtration.
    Check {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "minus")]
        spec: Spec,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a specialization of the DGA.
    Specialize {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum)]
        spec: Spec,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the infinity version (knots only).
    Infinity {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Count augmentations to ℤ/p.
    Aug(AugArgs),
    /// Print the self-linking number of a braid closure knot.
    Sl {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct BraidArg {
    /// Braid word: signed generator indices separated by spaces or commas.
    #[arg(allow_hyphen_values = true)]
    word: String,
    #[arg(long)]
    strands: Option<usize>,
}

impl BraidArg {
    fn parse(&self) -> Result<BraidWord, Error> {
        parse_braid(&self.word, self.strands)
    }
}

#[derive(Args, Debug)]
struct AugArgs {
    #[command(flatten)]
    braid: BraidArg,
    #[arg(long, value_enum, default_value = "hat")]
    spec: AugSpec,
    #[arg(long)]
    p: u64,
    /// Image of λ_j; repeat once per component.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Vec<i64>,
    /// Image of μ_j; repeat once per component.
    #[arg(long, allow_negative_numbers = true)]
    mu: Vec<i64>,
    #[arg(long = "U", allow_negative_numbers = true)]
    u: Option<i64>,
    #[arg(long = "V", allow_negative_numbers = true)]
    v: Option<i64>,
    /// Tabulate every assignment of units instead of the given one.
    #[arg(long)]
    all_units: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Spec {
    Minus,
    Hat,
    Doublehat,
    Unfiltered,
}

impl Spec {
    fn core(self) -> Specialization {
        match self {
            Spec::Minus => Specialization::Minus,
            Spec::Hat => Specialization::Hat,
            Spec::Doublehat => Specialization::DoubleHat,
            Spec::Unfiltered => Specialization::Unfiltered,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AugSpec {
    Hat,
    Doublehat,
    Unfiltered,
    Infinity,
}

impl AugSpec {
    fn name(self) -> &'static str {
        match self {
            AugSpec::Hat => "hat",
            AugSpec::Doublehat => "doublehat",
            AugSpec::Unfiltered => "unfiltered",
            AugSpec::Infinity => "infinity",
        }
    }

    fn core(self) -> Option<Specialization> {
        match self {
            AugSpec::Hat => Some(Specialization::Hat),
            AugSpec::Doublehat => Some(Specialization::DoubleHat),
            AugSpec::Unfiltered => Some(Specialization::Unfiltered),
            AugSpec::Infinity => None,
        }
    }
}

enum Failure {
    Domain(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

fn emit_dga(d: &FilteredDga, format: Format) -> String {
    match format {
        Format::Text => d.render_text().trim_end().to_string(),
        Format::Json => dga_to_json(d),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.cmd {
        Command::Dga { braid, spec, format } | Command::Specialize { braid, spec, format } => {
            let d = spec.core().apply(&build_filtered_dga(&braid.parse()?)?)?;
            Ok(emit_dga(&d, format))
        }
        Command::Infinity { braid, format } => Ok(emit_dga(&infinity_dga(&braid.parse()?)?, format)),
        Command::Check { braid, spec, format } => check(&braid.parse()?, spec, format),
        Command::Sl { braid, format } => {
            let b = braid.parse()?;
            let sl = b.self_linking()?;
            Ok(match format {
                Format::Text => sl.to_string(),
                Format::Json => json!({ "braid": b.to_text(), "self_linking": sl }).to_string(),
            })
        }
        Command::Aug(args) => aug(&args),
    }
}

fn check(b: &BraidWord, spec: Spec, format: Format) -> Result<String, Failure> {
    let d = spec.core().apply(&build_filtered_dga(b)?)?;
    let report = verify_dga(&d);
    let out = match format {
        Format::Text => format!("{}{}", report, if report.all_pass() { "all checks pass" } else { "FAILED" }),
        Format::Json => {
            json!({
                "braid": b.to_text(),
                "strands": b.strands(),
                "provenance": d.provenance().name(),
                "pass": report.all_pass(),
                "failures": report.failures().map(|c| json!({
                    "generator": c.generator.name(),
                    "d_squared_zero": c.d_squared_zero,
                    "degree_ok": c.degree_ok,
                    "filtration_ok": c.filtration_ok,
                })).collect::<Vec<_>>(),
            })
            .to_string()
        }
    };
    if report.all_pass() {
        Ok(out)
    } else {
        Err(Failure::Internal(out))
    }
}

fn aug(args: &AugArgs) -> Result<String, Failure> {
    let b = args.braid.parse()?;
    if !is_prime(args.p) {
        return Err(Error::NotPrime(args.p).into());
    }
    let uv = match (args.spec, args.u, args.v) {
        (AugSpec::Infinity, Some(u), Some(v)) => Some((u, v)),
        (AugSpec::Infinity, _, _) if !args.all_units => return Err(Error::Unassigned("--U and --V for an infinity count".into()).into()),
        (AugSpec::Infinity, _, _) => None,
        (_, None, None) => None,
        (s, _, _) => return Err(Failure::Domain(format!("--U and --V apply only to --spec infinity, not {}", s.name()))),
    };
    if args.all_units && (!args.lambda.is_empty() || !args.mu.is_empty() || uv.is_some()) {
        return Err(Failure::Domain("--all-units takes no --lambda, --mu, --U or --V".into()));
    }
    let r = b.components().r;
    if !args.all_units && (args.lambda.len() != r || args.mu.len() != r) {
        return Err(Failure::Domain(format!(
            "aug on a {r}-component link needs {r} --lambda and {r} --mu value(s), got {} and {}",
            args.lambda.len(),
            args.mu.len()
        )));
    }

    // The DGA itself, or None when it is too large to write out and the
    // count has to come from the braid evaluator.
    let dga = match args.spec.core() {
        None => Some(infinity_dga(&b)?),
        Some(s) => match build_filtered_dga(&b) {
            Ok(d) => Some(s.apply(&d)?),
            Err(Error::TooLarge(_)) => None,
            Err(e) => return Err(e.into()),
        },
    };
    let fixed_uv = args.spec.core().map(|s| s.uv()).map(|(u, v)| (u.unwrap(), v.unwrap()));

    if args.all_units {
        let rows = match &dga {
            Some(d) => count_augmentations_all_units(d, args.p)?,
            None => all_units_by_braid(&b, args.p, fixed_uv.expect("finite specialization"))?,
        };
        return Ok(render_rows(args, &rows));
    }

    let count = match &dga {
        Some(d) => count_augmentations(&AugmentationProblem::new(d, args.p, &args.lambda, &args.mu, uv)?)?,
        None => count_augmentations_braid(&b, args.p, &args.lambda, &args.mu, fixed_uv.expect("finite specialization"))?,
    };
    Ok(match args.format {
        Format::Text => count.to_string(),
        Format::Json => {
            let mut assignments = Map::new();
            for (j, x) in args.lambda.iter().enumerate() {
                assignments.insert(format!("l{}", j + 1), json!(x));
            }
            for (j, x) in args.mu.iter().enumerate() {
                assignments.insert(format!("m{}", j + 1), json!(x));
            }
            if let Some((u, v)) = uv {
                assignments.insert("U".into(), json!(u));
                assignments.insert("V".into(), json!(v));
            }
            json!({
                "braid": b.to_text(),
                "specialization": args.spec.name(),
                "p": args.p,
                "assignments": assignments,
                "count": count,
            })
            .to_string()
        }
    })
}

fn all_units_by_braid(b: &BraidWord, p: u64, uv: (i64, i64)) -> Result<Vec<UnitRow>, Failure> {
    let r = b.components().r;
    let mut tuple = vec![1u64; 2 * r];
    let mut rows = Vec::new();
    loop {
        let signed: Vec<i64> = tuple.iter().map(|&x| x as i64).collect();
        let count = count_augmentations_braid(b, p, &signed[..r], &signed[r..], uv)?;
        rows.push(UnitRow { lambda: tuple[..r].to_vec(), mu: tuple[r..].to_vec(), uv: None, count });
        let mut k = 2 * r;
        loop {
            if k == 0 {
                return Ok(rows);
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < p {
                break;
            }
            tuple[k] = 1;
        }
    }
}

fn render_rows(args: &AugArgs, rows: &[UnitRow]) -> String {
    match args.format {
        Format::Text => rows
            .iter()
            .map(|r| {
                let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                let uv = r.uv.map_or(String::new(), |(u, v)| format!(" U={u} V={v}"));
                format!("λ={} μ={}{uv}: {}", list(&r.lambda), list(&r.mu), r.count)
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut o = Map::new();
                    o.insert("lambda".into(), json!(r.lambda));
                    o.insert("mu".into(), json!(r.mu));
                    if let Some((u, v)) = r.uv {
                        o.insert("U".into(), json!(u));
                        o.insert("V".into(), json!(v));
                    }
                    o.insert("count".into(), json!(r.count));
                    Value::Object(o)
                })
                .collect();
            Value::Array(rows).to_string()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
