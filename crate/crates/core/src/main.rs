use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use tautforms::coeffs::Poly;
use tautforms::dsl::{self, EvalOptions};
use tautforms::enumerate::{count_table, enumerate_contracted};
use tautforms::expr::graph_name;
use tautforms::graph_ops::{contract_fully, Contracted};
use tautforms::relations::{rw_relation, verify_identities, Genus, RWQuery};
use tautforms::{props, MarkedGraph, TautExpr};

#[derive(Parser)]
#[command(
    name = "tautforms",
    version,
    about = "Tautological forms as marked graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExprFormat {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ListFormat {
    Table,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Paper,
    Properties,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GraphAction {
    Canonical,
    Contract,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate and normalize an expression such as `@r=2 int[2](h(1,2)^2)`.
    Eval {
        /// Expression text; read from stdin when omitted.
        expr: Option<String>,
        /// Genus: an integer >= 2 or `sym`.
        #[arg(long, default_value = "sym", value_parser = parse_genus)]
        g: Genus,
        #[arg(long, value_enum, default_value_t = ExprFormat::Text)]
        format: ExprFormat,
        /// Skip normalization.
        #[arg(long)]
        raw: bool,
    },
    /// List contracted r-marked graphs of form degree 2d.
    Enumerate {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = ListFormat::Table)]
        format: ListFormat,
    },
    /// Number of contracted graphs for each r (rows) and d (columns).
    Counts {
        #[arg(long, default_value_t = 4)]
        max_r: usize,
        #[arg(long, default_value_t = 2)]
        max_d: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Check the classical identities or the randomized structural laws.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Paper)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Integrate the vanishing power of a pulled-back Betti form.
    Relations {
        /// Genus (an integer >= 2).
        #[arg(long, value_parser = parse_genus)]
        g: Genus,
        /// Comma-separated m_i: integers or indeterminate names.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_coeff)]
        m: Vec<Poly>,
        /// An integer or an indeterminate name.
        #[arg(long, allow_hyphen_values = true, default_value = "0", value_parser = parse_coeff)]
        n: Poly,
        /// Number of marks kept; the last ones are integrated out.
        #[arg(long, default_value_t = 0)]
        target_r: usize,
        /// Print one relation per monomial in the indeterminates of m and n.
        #[arg(long)]
        split: bool,
        #[arg(long, value_enum, default_value_t = ExprFormat::Text)]
        format: ExprFormat,
    },
    /// Read a graph as JSON `{"r":..,"u":..,"edges":[[a,b],..]}`.
    Graph {
        /// File to read; stdin when omitted.
        input: Option<String>,
        #[arg(long, value_enum, default_value_t = GraphAction::Canonical)]
        action: GraphAction,
    },
}

fn parse_genus(s: &str) -> Result<Genus, String> {
    if s == "sym" {
        return Ok(Genus::Symbolic);
    }
    match s.parse::<u32>() {
        Ok(g) if g >= 2 => Ok(Genus::Numeric(g)),
        _ => Err(format!("expected an integer >= 2 or `sym`, got `{s}`")),
    }
}

fn parse_coeff(s: &str) -> Result<Poly, String> {
    let s = s.trim();
    if let Ok(k) = s.parse::<i64>() {
        return Ok(Poly::int(k));
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c)
            if c.is_ascii_alphabetic() && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') =>
        {
            Ok(Poly::var(s))
        }
        _ => Err(format!("expected an integer or a name, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_input(arg: Option<String>, from_file: bool) -> Result<String, Failure> {
    match arg {
        Some(a) if from_file => Ok(fs::read_to_string(a)?),
        Some(a) => Ok(a),
        None => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn print_expr(x: &TautExpr, format: ExprFormat) {
    match format {
        ExprFormat::Text => println!("{}", x.to_dsl()),
        ExprFormat::Json => println!("{}", x.to_json()),
        ExprFormat::Dot => print!("{}", x.to_dot()),
    }
}

fn graph_label(g: &MarkedGraph) -> String {
    graph_name(g).unwrap_or_else(|| "1".to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eval {
            expr,
            g,
            format,
            raw,
        } => {
            let text = read_input(expr, false)?;
            let ast = dsl::parse(&text)?;
            let opts = EvalOptions {
                genus: match g {
                    Genus::Numeric(g) => Some(g),
                    Genus::Symbolic => None,
                },
                ..Default::default()
            };
            let x = dsl::eval(&ast, &opts)?;
            print_expr(&if raw { x } else { x.normalize() }, format);
        }
        Command::Enumerate { r, d, format } => {
            let list = enumerate_contracted(r, d);
            match format {
                ListFormat::Table => {
                    println!("# r={r} d={d} count={}", list.len());
                    for (i, g) in list.iter().enumerate() {
                        println!(
                            "{:>4}  u={} e={}  {:<24}  {}",
                            i + 1,
                            g.u(),
                            g.edge_count(),
                            graph_label(g),
                            g
                        );
                    }
                }
                ListFormat::Json => {
                    let graphs: Vec<_> = list.iter().map(MarkedGraph::to_json_value).collect();
                    println!("{}", serde_json::to_string_pretty(&graphs)?);
                }
                ListFormat::Dot => {
                    for (i, g) in list.iter().enumerate() {
                        print!("{}", g.to_dot(&format!("G{}", i + 1)));
                    }
                }
            }
        }
        Command::Counts {
            max_r,
            max_d,
            format,
        } => {
            let table = count_table(max_r, max_d);
            match format {
                ReportFormat::Text => {
                    print!("r\\d");
                    for d in 0..=max_d {
                        print!("\t{d}");
                    }
                    println!();
                    for (r, row) in table.iter().enumerate() {
                        print!("{r}");
                        for c in row {
                            print!("\t{c}");
                        }
                        println!();
                    }
                }
                ReportFormat::Json => println!("{}", json!({ "counts": table })),
            }
        }
        Command::Verify {
            suite,
            seed,
            cases,
            format,
        } => {
            let paper = matches!(suite, Suite::Paper | Suite::All)
                .then(verify_identities)
                .transpose()?;
            let properties = matches!(suite, Suite::Properties | Suite::All)
                .then(|| props::run_all(seed, cases));
            match format {
                ReportFormat::Text => {
                    if let Some(p) = &paper {
                        print!("{p}");
                    }
                    if let Some(p) = &properties {
                        print!("{p}");
                    }
                }
                ReportFormat::Json => {
                    let out = json!({ "identities": paper, "properties": properties });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
            }
            let ok = paper.as_ref().is_none_or(|p| p.all_pass())
                && properties.as_ref().is_none_or(|p| p.all_pass());
            if !ok {
                return Err(Failure::Verification);
            }
        }
        Command::Relations {
            g,
            m,
            n,
            target_r,
            split,
            format,
        } => {
            let q = RWQuery {
                genus: g,
                m,
                n,
                forget_to: target_r,
            };
            let rel = rw_relation(&q)?;
            if split {
                let mut names: Vec<String> =
                    q.m.iter()
                        .chain(std::iter::once(&q.n))
                        .flat_map(|p| p.variables())
                        .filter(|v| v != "g")
                        .collect();
                names.sort();
                names.dedup();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                for (mono, part) in rel.split_by_monomials(&refs) {
                    if format == ExprFormat::Text {
                        println!("[{mono}]  {}", part.to_dsl());
                    } else {
                        print_expr(&part, format);
                    }
                }
            } else {
                print_expr(&rel, format);
            }
        }
        Command::Graph { input, action } => {
            let text = read_input(input, true)?;
            let g = MarkedGraph::from_json(&text)?;
            match action {
                GraphAction::Canonical => {
                    let (canon, key) = g.canonical_form();
                    let out = json!({
                        "graph": canon.to_json_value(),
                        "key": key.as_slice(),
                        "chi": canon.euler_char(),
                        "degree": canon.form_degree(),
                        "contracted": canon.is_contracted(),
                    });
                    println!("{out}");
                }
                GraphAction::Contract => {
                    let out = match contract_fully(&g) {
                        Contracted::Zero => json!({ "zero": true }),
                        Contracted::Graph { graph, k } => {
                            let (canon, _) = graph.canonical_form();
                            let factor = Poly::two_minus_2g().pow(k);
                            json!({ "zero": false, "graph": canon.to_json_value(), "coeff": factor.to_string() })
                        }
                    };
                    println!("{out}");
                }
                GraphAction::Dot => print!("{}", g.to_dot("G")),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
