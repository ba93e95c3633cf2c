//! Command-line front end for the tropical moduli engine.

use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tropmoduli::complex::{enumerate_stable, enumerate_weighted, ConeComplex};
use tropmoduli::dualgraph::{canonical_form, encoding};
use tropmoduli::expr::parse_pp;
use tropmoduli::plmap::{ModuliPair, PLMap};
use tropmoduli::rational::{parse_rational, to_display_string, Rational};
use tropmoduli::strata::{alpha_star, integrate, integrate_ps};
use tropmoduli::verify::verification_report;
use tropmoduli::DualGraph;

#[derive(Parser)]
#[command(name = "tropmoduli", version, about = "Tropical moduli of stable and pseudostable curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Moduli {
    /// Genus
    #[arg(short = 'g', long)]
    genus: u32,
    /// Number of markings
    #[arg(short = 'n', long = "legs")]
    n: usize,
}

#[derive(Args, Clone)]
struct Which {
    /// Use the pseudostable subcomplex
    #[arg(long, conflicts_with = "weighted")]
    pseudostable: bool,
    /// Use the weighted complex with every marking weight equal to this rational
    #[arg(long, value_name = "EPS")]
    weighted: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the cones of a complex
    Enumerate {
        #[command(flatten)]
        moduli: Moduli,
        #[command(flatten)]
        which: Which,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a complex with its face maps and rays
    Complex {
        #[command(flatten)]
        moduli: Moduli,
        #[command(flatten)]
        which: Which,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Piecewise polynomials
    Pp {
        #[command(subcommand)]
        action: PpAction,
    },
    /// Apply a piecewise-linear map
    Map {
        #[arg(value_enum)]
        kind: MapKind,
        #[command(flatten)]
        moduli: Moduli,
        /// Point as "cone=NAME;coords=a,b,..."; without it the whole map is printed
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Degree of the strata class of a top-degree piecewise polynomial
    Integrate {
        #[command(flatten)]
        moduli: Moduli,
        #[arg(long)]
        expr: String,
        /// Scalar multiplying the expression
        #[arg(long, default_value = "1")]
        times: String,
        /// Interpret the expression on the pseudostable complex
        #[arg(long)]
        pseudostable: bool,
    },
    /// Check every identity between the stable and pseudostable sides
    Verify {
        #[command(flatten)]
        moduli: Moduli,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Export a complex, or a single cone's graph
    Export {
        #[command(flatten)]
        moduli: Moduli,
        #[command(flatten)]
        which: Which,
        /// Export only the graph of this cone
        #[arg(long)]
        cone: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Read a graph in JSON form and print its canonical form and encoding
    Canon {
        /// File with the graph, or "-" for standard input
        #[arg(long, default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand)]
enum PpAction {
    /// Evaluate an expression cone by cone, or at one point
    Eval {
        #[command(flatten)]
        moduli: Moduli,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        pseudostable: bool,
        /// Point as "cone=NAME;coords=a,b,..."
        #[arg(long)]
        point: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    TropT,
    Hassett,
}

/// Validation failures exit with 2, failed identities with 1.
enum Failure {
    Usage(anyhow::Error),
    Identity(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<tropmoduli::Error> for Failure {
    fn from(e: tropmoduli::Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Identity(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn build_complex(m: Moduli, which: &Which) -> anyhow::Result<ConeComplex> {
    let stable = enumerate_stable(m.genus, m.n)?;
    if which.pseudostable {
        return Ok(stable.pseudostable_subcomplex()?);
    }
    if let Some(eps) = &which.weighted {
        let w = parse_rational(eps).ok_or_else(|| anyhow!("invalid weight {eps}"))?;
        return Ok(enumerate_weighted(m.genus, m.n, &vec![w; m.n])?);
    }
    Ok(stable)
}

fn dims_line(c: &ConeComplex) -> String {
    let dims: Vec<String> = c.dims().iter().map(|d| d.to_string()).collect();
    format!("dims: [{}], total {}\n", dims.join(","), c.len())
}

fn graph_summary(g: &DualGraph) -> String {
    let edges: Vec<String> = g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
    format!("genera {:?} edges [{}] legs {:?}", g.genera(), edges.join(","), g.legs())
}

fn complex_text(c: &ConeComplex) -> String {
    let mut out = dims_line(c);
    for (id, cone) in c.cones().iter().enumerate() {
        out.push_str(&format!(
            "{id}: {} dim {} aut {}{} | {}\n",
            c.cone_name(id),
            cone.dim(),
            cone.aut().order(),
            if cone.folded() { " folded" } else { "" },
            graph_summary(cone.graph())
        ));
    }
    out
}

fn json(v: &serde_json::Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json value serializes"))
}

/// Parses "cone=NAME;coords=a,b".
fn parse_point(c: &ConeComplex, text: &str) -> anyhow::Result<(usize, Vec<Rational>)> {
    let mut cone = None;
    let mut coords = None;
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| anyhow!("expected key=value in {part:?}"))?;
        match key.trim() {
            "cone" => cone = Some(c.cone_by_name(value)?),
            "coords" => {
                let parsed: Option<Vec<Rational>> = value
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(parse_rational)
                    .collect();
                coords = Some(parsed.ok_or_else(|| anyhow!("invalid coordinates {value:?}"))?);
            }
            other => bail!("unknown point key {other:?}"),
        }
    }
    let cone = cone.ok_or_else(|| anyhow!("point needs cone=NAME"))?;
    let coords = coords.unwrap_or_default();
    let dim = c.cone(cone).dim();
    if coords.len() != dim {
        bail!("cone {} has dimension {dim}, got {} coordinates", c.cone_name(cone), coords.len());
    }
    Ok((cone, coords))
}

fn describe_point(c: &ConeComplex, cone: usize, coords: &[Rational]) -> String {
    let name = format!("{}{}", c.cone_name(cone), c.kind().suffix());
    let list: Vec<String> = coords.iter().map(to_display_string).collect();
    match coords.len() {
        0 => name,
        1 => format!("ray {name}, coord {}", list[0]),
        _ => format!("cone {name}, coords {}", list.join(",")),
    }
}

fn map_text(m: &PLMap) -> String {
    let (src, tgt) = (m.source(), m.target());
    let mut out = String::new();
    for s in 0..src.len() {
        let img = m.image(s);
        let rows: Vec<String> =
            img.matrix.iter().map(|r| format!("[{}]", r.iter().map(u32::to_string).collect::<Vec<_>>().join(","))).collect();
        out.push_str(&format!(
            "{} -> {}{} [{}]\n",
            src.cone_name(s),
            tgt.cone_name(img.target),
            tgt.kind().suffix(),
            rows.join(",")
        ));
    }
    out
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Enumerate { moduli, which, format } => {
            let c = build_complex(moduli, &which)?;
            Ok(match format {
                Format::Json => json(&c.to_json_value()),
                _ => complex_text(&c),
            })
        }
        Command::Complex { moduli, which, format } => {
            let c = build_complex(moduli, &which)?;
            Ok(match format {
                Format::Text => complex_text(&c),
                _ => json(&c.to_json_value()),
            })
        }
        Command::Pp { action: PpAction::Eval { moduli, expr, pseudostable, point, format } } => {
            let which = Which { pseudostable, weighted: None };
            let c = Arc::new(build_complex(moduli, &which)?);
            let f = parse_pp(&expr, c.clone())?;
            if let Some(p) = point {
                let (cone, coords) = parse_point(&c, &p)?;
                return Ok(format!("{}\n", to_display_string(&f.evaluate(cone, &coords)?)));
            }
            if format == Format::Json {
                return Ok(json(&f.to_json_value()));
            }
            if f.is_zero() {
                return Ok("0\n".into());
            }
            Ok(f.support().into_iter().map(|s| format!("{}: {}\n", c.cone_name(s), f.on(s))).collect())
        }
        Command::Map { kind, moduli, point, format } => {
            let pair = ModuliPair::new(moduli.genus, moduli.n)?;
            let m = match kind {
                MapKind::TropT => pair.trop_t.clone(),
                MapKind::Hassett => pair.hassett()?,
            };
            if let Some(p) = point {
                let (cone, coords) = parse_point(m.source(), &p)?;
                let (t, image) = m.apply(cone, &coords)?;
                return Ok(format!("{}\n", describe_point(m.target(), t, &image)));
            }
            Ok(match format {
                Format::Json => json(&m.to_json_value()),
                _ => map_text(&m),
            })
        }
        Command::Integrate { moduli, expr, times, pseudostable } => {
            let k = parse_rational(&times).ok_or_else(|| anyhow!("invalid scalar {times}"))?;
            let value = if pseudostable {
                let pair = ModuliPair::new(moduli.genus, moduli.n)?;
                let f = parse_pp(&expr, pair.ps.clone())?.scale(&k);
                integrate_ps(&pair, &f)?
            } else {
                let c = Arc::new(enumerate_stable(moduli.genus, moduli.n)?);
                let f = parse_pp(&expr, c)?.scale(&k);
                integrate(&alpha_star(&f)?)?
            };
            Ok(format!("{}\n", to_display_string(&value)))
        }
        Command::Verify { moduli, format } => {
            let report = verification_report(moduli.genus, moduli.n)?;
            let out = match format {
                Format::Json => json(&serde_json::to_value(&report).context("serializing report")?),
                _ => report.to_text(),
            };
            if report.all_passed() {
                Ok(out)
            } else {
                Err(Failure::Identity(out))
            }
        }
        Command::Export { moduli, which, cone, format } => {
            let c = build_complex(moduli, &which)?;
            match cone {
                Some(name) => {
                    let g = c.cone(c.cone_by_name(&name)?).graph();
                    Ok(match format {
                        Format::Dot => g.to_dot(),
                        Format::Text => format!("{}\n", graph_summary(g)),
                        Format::Json => format!("{}\n", g.to_json()),
                    })
                }
                None => Ok(match format {
                    Format::Text => complex_text(&c),
                    Format::Json => json(&c.to_json_value()),
                    Format::Dot => c.cones().iter().map(|k| k.graph().to_dot()).collect(),
                }),
            }
        }
        Command::Canon { input } => {
            let text = if input == "-" {
                std::io::read_to_string(std::io::stdin()).context("reading standard input")?
            } else {
                std::fs::read_to_string(&input).with_context(|| format!("reading {input}"))?
            };
            let g = DualGraph::from_json(&text)?;
            let code: Vec<String> = encoding(&g).0.iter().map(u32::to_string).collect();
            Ok(format!("{}\nencoding: [{}]\n", canonical_form(&g).to_json(), code.join(",")))
        }
    }
}
