use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gnnlogic::bisim::{bisimilar, c2_equivalent, c2_types, graded_types, GlobalMode};
use gnnlogic::companion::{self, PropertyOutcome};
use gnnlogic::gml::{self, Formula};
use gnnlogic::gnn::{self, AcrGnn};
use gnnlogic::graph::{self, FeaturedGraph, Mode};
use gnnlogic::verify::{run_suite, ReportFormat, VerifyParams};
use gnnlogic::{compiler, gadget, homcount, order, Error, Result};

#[derive(Parser)]
#[command(name = "gnnlogic", version, about = "Exact ACR-GNNs, graded modal logic and bisimulation tools")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Directed,
    Undirected,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random graph or a strict linear order.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Directed)]
        mode: ModeArg,
        #[arg(long)]
        max_outdeg: Option<usize>,
        /// Emit order(n) instead of a random graph.
        #[arg(long)]
        order: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gadgetise a directed graph.
    Gadgetise { input: PathBuf, output: PathBuf },
    /// Count homomorphisms.
    Hom {
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long)]
        target: Option<PathBuf>,
        /// Count P2 homomorphisms into this graph.
        #[arg(long)]
        p2: Option<PathBuf>,
    },
    /// Strict linear order predicate, characterisation and counts.
    OrderCheck { graph: PathBuf },
    #[command(subcommand)]
    Gnn(GnnCmd),
    #[command(subcommand)]
    Gml(GmlCmd),
    /// Graded bisimilarity with refinement table.
    Bisim(BisimArgs),
    /// Two-pebble counting equivalence with refinement table.
    C2Game(PairArgs),
    /// Build the counting counterexample family.
    Family {
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        outdir: PathBuf,
    },
    #[command(subcommand)]
    Companion(CompanionCmd),
    /// Run a verification suite.
    Verify {
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GnnCmd {
    /// Run a network on a graph.
    Run {
        /// linear-order, gadget-order, compiled:<formula-file> or net:<network-file>.
        #[arg(long)]
        net: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: Option<usize>,
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Subcommand)]
enum GmlCmd {
    /// Evaluate a formula.
    Eval {
        /// Formula text or a file containing it.
        #[arg(long)]
        formula: String,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Compile a formula to a network file.
    Compile {
        #[arg(long)]
        formula: String,
        /// Feature dimension (defaults to the largest proposition index).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    v1: usize,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long)]
    v2: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long)]
    c: usize,
}

#[derive(Args)]
struct BisimArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// exact or capped:<q>.
    #[arg(long)]
    global: Option<String>,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    vertex: usize,
    #[arg(long = "L")]
    l: usize,
    #[arg(long)]
    c: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CompanionCmd {
    Saturate(PointArgs),
    Good(PointArgs),
    Homogenise {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Chi(PointArgs),
    Gamma {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        q: usize,
    },
    /// Separating formula for labelled examples `<file>:<vertex>:<0|1>`.
    Property {
        #[arg(long, required = true, num_args = 1..)]
        example: Vec<String>,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        q: usize,
    },
}

fn load_graph(p: &Path) -> Result<FeaturedGraph> {
    graph::read_graph(&fs::read_to_string(p)?)
}

fn load_formula(s: &str) -> Result<Formula> {
    let p = Path::new(s);
    if p.is_file() {
        gml::parse(&fs::read_to_string(p)?)
    } else {
        gml::parse(s)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_global(s: Option<&str>) -> Result<GlobalMode> {
    match s {
        None | Some("none") => Ok(GlobalMode::None),
        Some("exact") => Ok(GlobalMode::Exact),
        Some(x) => x
            .strip_prefix("capped:")
            .and_then(|q| q.parse().ok())
            .map(GlobalMode::Capped)
            .ok_or_else(|| Error::InvalidParameter(format!("--global expects exact or capped:<q>, got `{x}`"))),
    }
}

fn load_net(name: &str) -> Result<AcrGnn> {
    match name {
        "linear-order" => Ok(gnn::build_linear_order_gnn()),
        "gadget-order" => Ok(gnn::build_gadget_order_gnn()),
        s => {
            if let Some(f) = s.strip_prefix("compiled:") {
                let f = load_formula(f)?;
                compiler::compile(&f, f.max_prop())
            } else if let Some(f) = s.strip_prefix("net:") {
                gnn::read_network(&fs::read_to_string(f)?)
            } else {
                Err(Error::InvalidParameter(format!("unknown network `{s}`")))
            }
        }
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn pair_graphs(p: &PairArgs) -> Result<(FeaturedGraph, FeaturedGraph)> {
    let g1 = load_graph(&p.g1)?;
    let g2 = load_graph(&p.g2)?;
    g1.check_vertex(p.v1)?;
    g2.check_vertex(p.v2)?;
    Ok((g1, g2))
}

/// Returns `Ok(false)` when a verdict-style command reports a failure.
fn execute(cli: Cli) -> Result<bool> {
    let format = match cli.format {
        Format::Text => ReportFormat::Text,
        Format::Tsv => ReportFormat::Tsv,
    };
    match cli.cmd {
        Cmd::Gen { n, d, p, mode, max_outdeg, order, out } => {
            let mode = match mode {
                ModeArg::Directed => Mode::Directed,
                ModeArg::Undirected => Mode::Undirected,
            };
            let g = if order {
                graph::make_strict_linear_order(n)?
            } else {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!("edge probability {p} outside [0,1]")));
                }
                graph::random_graph(n, d, p, mode, cli.seed, max_outdeg)
            };
            emit(out.as_deref(), &graph::write_graph(&g))?;
        }
        Cmd::Gadgetise { input, output } => {
            let g = gadget::gadgetise(&load_graph(&input)?)?;
            fs::write(output, graph::write_graph(&g))?;
        }
        Cmd::Hom { pattern, target, p2 } => match (pattern, target, p2) {
            (Some(p), Some(t), None) => println!("{}", homcount::count_homomorphisms(&load_graph(&p)?, &load_graph(&t)?)?),
            (None, None, Some(g)) => println!("{}", homcount::count_p2(&load_graph(&g)?)?),
            _ => return Err(Error::InvalidParameter("use either --pattern/--target or --p2".into())),
        },
        Cmd::OrderCheck { graph } => {
            let g = load_graph(&graph)?;
            let n = g.n() as u64;
            println!("strict-linear-order {}", order::is_strict_linear_order(&g)?);
            println!("characterization {}", order::characterization_holds(&g)?);
            println!("edges {}", g.edge_count());
            println!("binom(n,2) {}", order::binom2(n));
            println!("hom(P2) {}", homcount::count_p2(&g)?);
            println!("binom(n,3) {}", order::binom3(n));
        }
        Cmd::Gnn(GnnCmd::Run { net, graph, vertex, trace }) => {
            let net = load_net(&net)?;
            let g = load_graph(&graph)?;
            let t = gnn::run_trace(&net, &g)?;
            if trace {
                print!("{}", t.render());
            }
            let accepted: Vec<bool> = t.final_layer().iter().map(|x| net.classifier().accepts(x)).collect();
            match vertex {
                Some(v) => {
                    g.check_vertex(v)?;
                    println!("vertex {v}: {}", u8::from(accepted[v]));
                }
                None => println!("accepted {}", bits(&accepted)),
            }
        }
        Cmd::Gml(GmlCmd::Eval { formula, graph, vertex }) => {
            let f = load_formula(&formula)?;
            let g = load_graph(&graph)?;
            match vertex {
                Some(v) => println!("{}", gml::evaluate(&f, &g, v)?),
                None => println!("{}", bits(&gml::evaluate_all(&f, &g)?)),
            }
        }
        Cmd::Gml(GmlCmd::Compile { formula, d, out }) => {
            let f = load_formula(&formula)?;
            let net = compiler::compile(&f, d.unwrap_or(f.max_prop()))?;
            fs::write(out, gnn::write_network(&net))?;
        }
        Cmd::Bisim(BisimArgs { pair, global }) => {
            let (g1, g2) = pair_graphs(&pair)?;
            let mode = parse_global(global.as_deref())?;
            let verdict = bisimilar(&g1, pair.v1, &g2, pair.v2, pair.l, pair.c, mode)?;
            println!("bisimilar {verdict}");
            print!("{}", graded_types(&[&g1, &g2], pair.l, pair.c)?.render());
        }
        Cmd::C2Game(pair) => {
            let (g1, g2) = pair_graphs(&pair)?;
            let verdict = c2_equivalent(&g1, pair.v1, &g2, pair.v2, pair.l, pair.c)?;
            println!("c2-equivalent {verdict}");
            print!("{}", c2_types(&[&g1, &g2], pair.l, pair.c)?.render());
        }
        Cmd::Family { l, c, outdir } => {
            let r = gadget::c2_counterexample_family(l, c)?;
            fs::create_dir_all(&outdir)?;
            fs::write(outdir.join("G.fgr"), graph::write_graph(&r.g))?;
            fs::write(outdir.join("H.fgr"), graph::write_graph(&r.h))?;
            fs::write(outdir.join("report.txt"), r.render())?;
            print!("{}", r.render());
            return Ok(r.all_green());
        }
        Cmd::Companion(cmd) => return companion_cmd(cmd),
        Cmd::Verify { suite, n, cases, l, c } => {
            let params = VerifyParams { seed: cli.seed, n, cases, l, c };
            let reports = run_suite(&suite, &params)?;
            let mut ok = true;
            for r in &reports {
                print!("{}", r.render(format));
                eprintln!("{}: {:.3}s", r.suite, r.elapsed.as_secs_f64());
                ok &= r.passed();
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn companion_cmd(cmd: CompanionCmd) -> Result<bool> {
    let surgery = |s: companion::Surgery, out: Option<&Path>| -> Result<bool> {
        print!("{}", s.report.render());
        if let Some(p) = out {
            fs::write(p, graph::write_graph(&s.graph))?;
        } else {
            print!("{}", graph::write_graph(&s.graph));
        }
        Ok(s.report.valid())
    };
    match cmd {
        CompanionCmd::Saturate(a) => surgery(companion::saturate(&load_graph(&a.graph)?, a.vertex, a.l, a.c)?, a.out.as_deref()),
        CompanionCmd::Good(a) => surgery(companion::initial_good_graph(&load_graph(&a.graph)?, a.vertex, a.l, a.c)?, a.out.as_deref()),
        CompanionCmd::Homogenise { pair, q, out } => {
            let (g1, g2) = pair_graphs(&pair)?;
            let gh1 = companion::saturate(&g1, pair.v1, pair.l, pair.c)?.graph;
            surgery(companion::homogenise(&g1, pair.v1, &gh1, &g2, pair.v2, pair.l, pair.c, q)?, out.as_deref())
        }
        CompanionCmd::Chi(a) => {
            let f = companion::chi_formula(&load_graph(&a.graph)?, a.vertex, a.l, a.c)?;
            emit(a.out.as_deref(), &format!("{f}\n"))?;
            Ok(true)
        }
        CompanionCmd::Gamma { point: a, q } => {
            let f = companion::gamma_formula(&load_graph(&a.graph)?, a.vertex, a.l, a.c, q)?;
            emit(a.out.as_deref(), &format!("{f}\n"))?;
            Ok(true)
        }
        CompanionCmd::Property { example, l, c, q } => {
            let mut loaded = Vec::new();
            for e in &example {
                let parts: Vec<&str> = e.rsplitn(3, ':').collect();
                let [label, v, file] = parts[..] else {
                    return Err(Error::InvalidParameter(format!("example `{e}` is not <file>:<vertex>:<0|1>")));
                };
                let v: usize = v.parse().map_err(|_| Error::InvalidParameter(format!("bad vertex in `{e}`")))?;
                let label = match label {
                    "1" => true,
                    "0" => false,
                    _ => return Err(Error::InvalidParameter(format!("bad label in `{e}`"))),
                };
                loaded.push((load_graph(Path::new(file))?, v, label));
            }
            let refs: Vec<(&FeaturedGraph, usize, bool)> = loaded.iter().map(|(g, v, b)| (g, *v, *b)).collect();
            match companion::property_formula(&refs, l, c, q)? {
                PropertyOutcome::Formula { formula, disjuncts } => {
                    println!("disjuncts {disjuncts}");
                    println!("{formula}");
                    Ok(true)
                }
                PropertyOutcome::Inconsistent { positive, negative } => {
                    println!("inconsistent: example {positive} (positive) and {negative} (negative) are indistinguishable");
                    Ok(false)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
