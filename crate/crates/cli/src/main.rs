use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;
use utstar::catalog::{catalog, run_claims};
use utstar::expr::{parse, ParseError};
use utstar::freealg::FreeAlgError;
use utstar::matrep::{
    evaluate, evaluate_generic, qgeneric_for, sgeneric_for, InvolutionKind, MatRepError, UTMatrix,
};
use utstar::report::{ClaimReport, Status};
use utstar::spaces::{classify, standard_generators, CaseTag, SpacesError};
use utstar::tideal::{central_check, Centrality, Engine, Membership, TIdealError};
use utstar::{FieldSpec, FreePoly, FreeVar, MultiDegree, ScalarError};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    MatRep(#[from] MatRepError),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
    #[error(transparent)]
    TIdeal(#[from] TIdealError),
    #[error("reading stdin: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Inv {
    Star,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Matrices {
    Generic,
    Qgeneric,
    Sgeneric,
}

/// Exact checks of *-identities and *-central polynomials of upper triangular
/// matrices with involution.
#[derive(Debug, Parser)]
#[command(name = "utstar", version)]
struct Cli {
    /// Matrix size.
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Field characteristic: 0 or an odd prime.
    #[arg(long = "char", global = true, default_value_t = 0)]
    characteristic: u64,
    /// Involution on UT_n; `s` needs even n.
    #[arg(long, global = true, value_enum, default_value_t = Inv::Star)]
    inv: Inv,
    #[arg(long, global = true, default_value_t = 5)]
    max_total_degree: u32,
    /// Largest component (in words) that is expanded.
    #[arg(long, global = true, default_value_t = 5040)]
    cap_words: usize,
    /// Worker threads for replay; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Treat SKIPPED as a failure.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Record wall-clock time per claim.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Is the polynomial a *-identity of UT_n?
    CheckIdentity {
        /// Polynomial, or `-` for stdin.
        poly: String,
    },
    /// Is the polynomial *-central on UT_n?
    CheckCentral { poly: String },
    /// Membership in the T(*)-ideal generated by the defining identities.
    MemberI { poly: String },
    /// Print the standard family of a component.
    Basis {
        /// Multidegree `m1,..,mk;n1,..,ns`.
        #[arg(long)]
        md: String,
        /// Family name; defaults to the one the component falls under.
        #[arg(long)]
        case: Option<String>,
    },
    /// Evaluate on generic, qgeneric or sgeneric matrices.
    Eval {
        poly: String,
        #[arg(long, value_enum, default_value_t = Matrices::Generic)]
        matrices: Matrices,
    },
    /// Run the claim catalog.
    Replay {
        /// Only claims whose id starts with this prefix.
        #[arg(long)]
        only: Option<String>,
    },
    /// Dimensions of a component and its slices.
    Dims {
        #[arg(long)]
        md: String,
    },
}

impl Cli {
    fn kind(&self) -> InvolutionKind {
        match self.inv {
            Inv::Star => InvolutionKind::Star,
            Inv::S => InvolutionKind::S,
        }
    }

    fn validate(&self) -> Result<FieldSpec, CliError> {
        let field = FieldSpec::new(self.characteristic)
            .map_err(|_| CliError::Usage(format!("--char {} is neither 0 nor an odd prime", self.characteristic)))?;
        if self.n < 2 {
            return Err(CliError::Usage(format!("--n {} is below 2", self.n)));
        }
        if self.inv == Inv::S && self.n % 2 == 1 {
            return Err(CliError::Usage(format!("--inv s needs even --n, got {}", self.n)));
        }
        Ok(field)
    }
}

fn read_poly(src: &str, field: FieldSpec) -> Result<FreePoly, CliError> {
    if src == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        Ok(parse(buf.trim(), field)?)
    } else {
        Ok(parse(src, field)?)
    }
}

fn parse_md(s: &str) -> Result<MultiDegree, CliError> {
    let md: MultiDegree = s.parse()?;
    if md.is_zero() {
        return Err(CliError::Usage("zero multidegree".into()));
    }
    Ok(md)
}

fn first_entry(m: &UTMatrix) -> String {
    m.nonzero_entries()
        .next()
        .map(|(i, j, p)| format!("entry ({i},{j}) = {p}"))
        .unwrap_or_default()
}

fn dims<const N: usize>(pairs: [(&str, usize); N]) -> BTreeMap<String, usize> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

struct Out {
    format: Format,
    stdout: io::StdoutLock<'static>,
}

impl Out {
    fn report(&mut self, r: &ClaimReport) -> io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.stdout, "{}", r.to_text()),
            Format::Json => writeln!(self.stdout, "{}", r.to_json()),
        }
    }

    fn line(&mut self, text: impl std::fmt::Display, value: serde_json::Value) -> io::Result<()> {
        match self.format {
            Format::Text => writeln!(self.stdout, "{text}"),
            Format::Json => writeln!(self.stdout, "{value}"),
        }
    }
}

fn exit_for(reports: &[ClaimReport], strict: bool) -> ExitCode {
    let bad = reports
        .iter()
        .any(|r| r.is_fail() || (strict && matches!(r.status, Status::Skipped(_))));
    if bad {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let field = cli.validate()?;
    let kind = cli.kind();
    let n = cli.n;
    let mut out = Out { format: cli.format, stdout: io::stdout().lock() };
    let tag = format!("n{n}-{}-char{}", kind.name(), field.characteristic());
    let reports = match &cli.command {
        Command::CheckIdentity { poly } => {
            let f = read_poly(poly, field)?;
            let value = evaluate_generic(&f, n, kind)?;
            let r = ClaimReport::check(format!("check-identity-{tag}"), value.is_zero(), dims([("n", n)]), || {
                first_entry(&value)
            });
            out.report(&r)?;
            vec![r]
        }
        Command::CheckCentral { poly } => {
            let f = read_poly(poly, field)?;
            let verdict = central_check(&f, n, kind)?;
            let id = format!("check-central-{tag}");
            let r = match &verdict {
                Centrality::NotCentral => {
                    let value = evaluate_generic(&f.without_constant(), n, kind)?;
                    ClaimReport::fail(id, dims([("n", n)]), format!("value {value} is not scalar"))
                }
                _ => ClaimReport::pass(id, dims([("n", n)])),
            };
            let word = match &verdict {
                Centrality::Identity => "IDENTITY".to_string(),
                Centrality::CentralNontrivial(c) => format!("CENTRAL {c}"),
                Centrality::NotCentral => "NOT_CENTRAL".to_string(),
            };
            match cli.format {
                Format::Text => {
                    writeln!(out.stdout, "{word}")?;
                    if let Some(w) = &r.witness {
                        eprintln!("{w}");
                    }
                }
                Format::Json => out.report(&r)?,
            }
            vec![r]
        }
        Command::MemberI { poly } => {
            let f = read_poly(poly, field)?;
            let engine = Engine::with_cap(field, cli.cap_words);
            let id = format!("member-i-char{}", field.characteristic());
            let r = match engine.member_of_i(&f) {
                Ok(Membership::Member(cert)) => {
                    let ok = cert.reconstruct(field) == f;
                    ClaimReport::check(
                        id,
                        ok,
                        dims([("components", cert.parts.len())]),
                        || "certificate does not reconstruct the input".to_string(),
                    )
                }
                Ok(Membership::NotMember { component, residue }) => ClaimReport::fail(
                    id,
                    BTreeMap::new(),
                    format!("component {component} has residue {residue} outside I"),
                ),
                Err(e @ (TIdealError::Spaces(SpacesError::ComponentTooLarge { .. })
                | TIdealError::EnumerationTooLarge { .. })) => ClaimReport::skipped(id, e.to_string()),
                Err(e) => return Err(e.into()),
            };
            out.report(&r)?;
            vec![r]
        }
        Command::Basis { md, case } => {
            let md = parse_md(md)?;
            let (norm, _) = md.normalized();
            let case = match case {
                Some(name) => CaseTag::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown case {name}")))?,
                None => classify(&norm, field)
                    .ok_or_else(|| CliError::Usage(format!("no standard family is defined for {norm}")))?,
            };
            let fam = standard_generators(case, &norm, field)?;
            for m in &fam.members {
                out.line(
                    format_args!("{}\t{}", m.label, m.poly),
                    json!({
                        "case": case.name(),
                        "multidegree": norm.to_string(),
                        "label": m.label,
                        "poly": m.poly.to_string(),
                    }),
                )?;
            }
            eprintln!("{} members of {} for {}", fam.len(), case, norm);
            Vec::new()
        }
        Command::Eval { poly, matrices } => {
            let f = read_poly(poly, field)?;
            let vars: Vec<FreeVar> = f.variables().into_iter().collect();
            let value = match matrices {
                Matrices::Generic => evaluate_generic(&f, n, kind)?,
                // the specialized matrices are 3 x 3 under the reflection
                _ if vars.is_empty() => evaluate_generic(&f, 3, InvolutionKind::Star)?,
                Matrices::Qgeneric => {
                    let assign = vars.iter().map(|&v| (v, qgeneric_for(v, field))).collect();
                    evaluate(&f, &assign, InvolutionKind::Star)?
                }
                Matrices::Sgeneric => {
                    let assign = vars.iter().map(|&v| (v, sgeneric_for(v, field))).collect();
                    evaluate(&f, &assign, InvolutionKind::Star)?
                }
            };
            let entries: Vec<_> = value
                .nonzero_entries()
                .map(|(i, j, p)| json!({"i": i, "j": j, "value": p.to_string()}))
                .collect();
            match cli.format {
                Format::Text => {
                    for (i, j, p) in value.nonzero_entries() {
                        writeln!(out.stdout, "e{i}{j}: {p}")?;
                    }
                    if value.is_zero() {
                        writeln!(out.stdout, "0")?;
                    }
                }
                Format::Json => writeln!(out.stdout, "{}", json!({"size": value.size(), "entries": entries}))?,
            }
            Vec::new()
        }
        Command::Replay { only } => {
            let mut claims = catalog(field, cli.max_total_degree, cli.cap_words);
            if let Some(prefix) = only {
                claims.retain(|c| c.id.starts_with(prefix.as_str()));
            }
            let engine = Engine::with_cap(field, cli.cap_words);
            let reports = run_claims(&claims, &engine, cli.jobs, cli.timings);
            for r in &reports {
                out.report(r)?;
            }
            reports
        }
        Command::Dims { md } => {
            let md = parse_md(md)?;
            let (norm, _) = md.normalized();
            let engine = Engine::with_cap(field, cli.cap_words);
            let basis = engine.basis(&norm)?;
            let b = basis.subspace("B").expect("B is computed with the basis");
            let id = engine.id_slice(&norm, n, kind)?;
            let i = engine.consequence_slice(&norm)?;
            let mut d = dims([
                ("words", basis.dim()),
                ("B", b.rank()),
                ("I", i.rank()),
                ("Id", id.rank()),
                ("I_B", i.intersection(b).rank()),
                ("Id_B", id.intersection(b).rank()),
            ]);
            if let Some(case) = classify(&norm, field) {
                d.insert("family".into(), standard_generators(case, &norm, field)?.len());
            }
            let r = ClaimReport::pass(format!("dims-{}-{tag}", norm.label()), d);
            out.report(&r)?;
            vec![r]
        }
    };
    out.stdout.flush()?;
    Ok(exit_for(&reports, cli.strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
