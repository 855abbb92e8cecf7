use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use digred::dbuild::{build_d, DMeta};
use digred::dot::export_dot;
use digred::forward::forward_instance;
use digred::lift::{lift_all, zz_by_name};
use digred::reverse::{objects_report, reverse_instance, Shortcut};
use digred::singleton::{merge_instance, merge_template, unmerge_instance, BlockInfo};
use digred::solver::{
    core_of, endomorphisms, find_hom_with, find_operations, parse_identities, parse_op_table,
    serialize_op_table, OpTable, Restriction, SolverOptions,
};
use digred::text::{parse_document, serialize_digraph, serialize_structure, Document};
use digred::verify::run_suite;
use digred::{Digraph, Error, Role, Structure};

#[derive(Parser)]
#[command(
    name = "digred",
    version,
    about = "Reduce relational-structure CSPs to balanced digraph CSPs and back"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build D(A) for a template; prints "V E H ok|mismatch".
    Build {
        template: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Merge all relations into one (template or instance).
    Merge {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split a merged instance back into its blocks.
    Unmerge {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Instance of CSP(A) to instance of CSP(D(A)).
    Forward {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Instance of CSP(D(A)) to instance of CSP(A).
    Reverse {
        digraph: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the intermediate objects and classes here.
        #[arg(long)]
        emit_objects: Option<PathBuf>,
    },
    /// Decide whether the instance maps to the template; exit 1 on NO.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        template: PathBuf,
        /// Lines `allow <source> <target>...` restricting images.
        #[arg(long)]
        allow: Option<PathBuf>,
        /// Plain backtracking without propagation.
        #[arg(long)]
        no_propagate: bool,
    },
    /// Compute the core; prints whether the input already is one.
    Core {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List endomorphisms.
    Endos {
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Find polymorphisms satisfying an identity file; exit 1 if none.
    Findops {
        template: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lift template polymorphisms to D(A) and verify them exhaustively.
    Lift {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// `symbol=table.op`; missing symbols are searched for.
        #[arg(long)]
        witness: Vec<String>,
        /// `symbol=meet|join|median|allmin|p1|p2|table.op` for the zigzag.
        #[arg(long)]
        zigzag: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print "V E H ok|mismatch" for D(A).
    Stats { template: PathBuf },
    /// DOT export of a digraph, or of D(A) for a template.
    ExportDot {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a property suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

enum Failure {
    Usage(String),
    Precondition(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::UnknownElement { .. }
            | Error::UnknownVertex { .. }
            | Error::DuplicateName(_)
            | Error::IndexOutOfRange { .. } => Failure::Usage(e.to_string()),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_doc(path: &Path) -> Result<Document, Failure> {
    Ok(parse_document(&read(path)?)?)
}

fn read_structure(path: &Path) -> Result<Structure, Failure> {
    match read_doc(path)? {
        Document::Structure(s) => Ok(s),
        Document::Digraph(g) => Ok(g.to_structure()),
    }
}

fn read_digraph(path: &Path) -> Result<Digraph, Failure> {
    match read_doc(path)? {
        Document::Digraph(g) => Ok(g),
        Document::Structure(s) => Ok(Digraph::from_structure(&s)?),
    }
}

/// The artifact goes to `output` or stdout; the summary line goes to stdout
/// when the artifact does not, stderr otherwise.
fn emit(output: &Option<PathBuf>, artifact: &str, summary: &str) -> Result<(), Failure> {
    match output {
        Some(p) => {
            write_file(p, artifact)?;
            println!("{summary}");
        }
        None => {
            print!("{artifact}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn template_meta(path: &Path) -> Result<(Structure, BlockInfo, DMeta), Failure> {
    let a = read_structure(path)?.with_role(Role::Template)?;
    let (merged, blocks) = merge_template(&a)?;
    let meta = build_d(&merged)?;
    Ok((a, blocks, meta))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Build {
            template,
            output,
            dot,
        } => {
            let (_, _, meta) = template_meta(&template)?;
            if let Some(p) = dot {
                write_file(&p, &export_dot(meta.digraph()))?;
            }
            emit(
                &output,
                &serialize_digraph(meta.digraph()),
                &meta.stats().to_string(),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { template } => {
            let (_, _, meta) = template_meta(&template)?;
            println!("{}", meta.stats());
            Ok(ExitCode::SUCCESS)
        }
        Command::Merge { input, output } => {
            let s = read_structure(&input)?;
            let merged = match s.role() {
                Role::Template => merge_template(&s)?.0,
                Role::Instance => merge_instance(&s, &BlockInfo::new(s.arities())?)?,
            };
            let summary = format!("blocks {:?}", s.arities());
            emit(&output, &serialize_structure(&merged), &summary)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Unmerge { input, output } => {
            let s = read_structure(&input)?;
            let blocks = s
                .blocks()
                .ok_or_else(|| Failure::Precondition("input carries no `blocks` line".into()))?;
            let out = unmerge_instance(&s, &BlockInfo::new(blocks.to_vec())?)?;
            emit(
                &output,
                &serialize_structure(&out),
                &format!("relations {}", out.relations().len()),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Forward {
            instance,
            output,
            dot,
        } => {
            let x = read_structure(&instance)?.with_role(Role::Instance)?;
            let mx = merge_instance(&x, &BlockInfo::new(x.arities())?)?;
            let k = mx.single_relation()?.arity;
            let g = forward_instance(&mx, k)?;
            if let Some(p) = dot {
                write_file(&p, &export_dot(&g))?;
            }
            let summary = format!(
                "{} {} {}",
                g.len(),
                g.edges().len(),
                g.height().unwrap_or(0)
            );
            emit(&output, &serialize_digraph(&g), &summary)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reverse {
            digraph,
            template,
            output,
            emit_objects,
        } => {
            let g = read_digraph(&digraph)?;
            let (a, blocks, meta) = template_meta(&template)?;
            let out = reverse_instance(&g, &meta)?;
            if let Some(p) = emit_objects {
                let mut text = String::new();
                for (i, (obj, part)) in out.objects.iter().enumerate() {
                    text.push_str(&format!("component {i}\n"));
                    text.push_str(&objects_report(obj, part, g.vertices()));
                }
                write_file(&p, &text)?;
            }
            let b = if a.relations().len() > 1 {
                unmerge_instance(
                    &out.instance
                        .clone()
                        .with_blocks(Some(blocks.arities().to_vec()))?,
                    &blocks,
                )?
            } else {
                out.instance.clone()
            };
            let shortcut = match out.shortcut {
                Shortcut::FixedNo => "fixed-no",
                Shortcut::FixedYes => "fixed-yes",
                Shortcut::Assembled => "assembled",
            };
            emit(
                &output,
                &serialize_structure(&b),
                &format!("shortcut {shortcut}"),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            instance,
            template,
            allow,
            no_propagate,
        } => {
            let x = read_structure(&instance)?;
            let a = read_structure(&template)?;
            let r = match allow {
                Some(p) => Some(Restriction::parse(&read(&p)?, &x, &a)?),
                None => None,
            };
            let options = SolverOptions {
                propagate: !no_propagate,
            };
            match find_hom_with(&x, &a, r.as_ref(), options)? {
                Some(h) => {
                    println!("YES");
                    for (s, t) in h.iter().enumerate() {
                        println!("map {} {}", x.domain()[s], a.domain()[*t]);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("NO");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Core { input, output } => {
            let s = read_structure(&input)?;
            let c = core_of(&s)?;
            let summary = format!(
                "core {} size {}/{}",
                if c.core.size() == s.size() {
                    "yes"
                } else {
                    "no"
                },
                c.core.size(),
                s.size()
            );
            emit(&output, &serialize_structure(&c.core), &summary)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Endos { input, limit } => {
            let s = read_structure(&input)?;
            let all = endomorphisms(&s)?;
            println!("endomorphisms {}", all.len());
            for h in all.iter().take(limit) {
                let names: Vec<&str> = h.iter().map(|&t| s.domain()[t].as_str()).collect();
                println!("{}", names.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Findops {
            template,
            sigma,
            output,
        } => {
            let a = read_structure(&template)?;
            let sigma = parse_identities(&read(&sigma)?)?;
            match find_operations(&a, &sigma)? {
                Some(tables) => {
                    let text: String = tables.iter().map(serialize_op_table).collect();
                    emit(&output, &text, &format!("found {}", tables.len()))?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("none");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Lift {
            template,
            sigma,
            witness,
            zigzag,
            output,
        } => {
            let (a, _, meta) = template_meta(&template)?;
            if a.relations().len() > 1 {
                return Err(Failure::Precondition(
                    "lift expects a single-relation template".into(),
                ));
            }
            let sigma = parse_identities(&read(&sigma)?)?;
            let mut on_a = load_tables(&witness, None)?;
            let missing: Vec<String> = sigma
                .symbols
                .iter()
                .filter(|(s, _)| !on_a.iter().any(|t| &t.name == s))
                .map(|(s, _)| s.clone())
                .collect();
            if !missing.is_empty() {
                let found = find_operations(meta.template(), &sigma)?.ok_or_else(|| {
                    Failure::Precondition(
                        "the template has no operations satisfying the identities".into(),
                    )
                })?;
                on_a.extend(found.into_iter().filter(|t| missing.contains(&t.name)));
            }
            let on_z = if zigzag.is_empty() {
                None
            } else {
                Some(load_tables(&zigzag, Some(&sigma))?)
            };
            let (_, report) = lift_all(&meta, &sigma, &on_a, on_z.as_deref())?;
            let text = format!("{report}\n");
            match &output {
                Some(p) => write_file(p, &text)?,
                None => print!("{text}"),
            }
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::ExportDot { input, output } => {
            let g = match read_doc(&input)? {
                Document::Digraph(g) => g,
                Document::Structure(s) => {
                    build_d(&merge_template(&s.with_role(Role::Template)?)?.0)?
                        .digraph()
                        .clone()
                }
            };
            let text = export_dot(&g);
            match &output {
                Some(p) => write_file(p, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            seed,
            trials,
        } => {
            let report = run_suite(&suite, seed, trials)?;
            println!("{report}");
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

/// `symbol=path` (or, for the zigzag, `symbol=<builtin name>`).
fn load_tables(
    specs: &[String],
    zigzag_of: Option<&digred::solver::IdentitySet>,
) -> Result<Vec<OpTable>, Failure> {
    let mut out = Vec::new();
    for spec in specs {
        let (sym, src) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected symbol=source, got `{spec}`")))?;
        let builtin = zigzag_of
            .and_then(|s| s.arity(sym))
            .and_then(|m| zz_by_name(src, m));
        let mut t = match builtin {
            Some(t) => t,
            None => {
                let tables = parse_op_table(&read(Path::new(src))?)?;
                tables
                    .iter()
                    .find(|t| t.name == sym)
                    .or_else(|| tables.first())
                    .cloned()
                    .ok_or_else(|| Failure::Usage(format!("{src}: no operation tables")))?
            }
        };
        t.name = sym.to_string();
        out.push(t);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
