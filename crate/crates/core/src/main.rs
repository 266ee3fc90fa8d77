use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use opalg::exact::{fmt_q, parse_q, Q};
use opalg::freeprob::{self, DiscreteMeasure, Kind, Law, LimitTheorem};
use opalg::graphinv::{self, AdeFamily, RootedBipartiteGraph};
use opalg::hadamard::{self, Arithmetic, HadamardMatrix};
use opalg::partitions::{self, ColoredWord, Partition, PartitionClass};
use opalg::randmat::{self, Ensemble, EnsembleSpec, HaarGroup, Letter};
use opalg::reproduce::{self, McConfig, Suite};
use opalg::series::Series;
use opalg::spinplanar::{self, NamedTangle, SpinTensor};
use opalg::tl;
use opalg::weingarten::{self, EasyCategory};
use opalg::{Error, Result};

#[derive(Parser)]
#[command(name = "opalg", version, about = "Invariants of operator algebras and subfactors")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Seed for Monte-Carlo subcommands.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Partitions, classes and the partition lattice.
    #[command(subcommand)]
    Partitions(PartitionsCmd),
    /// Temperley-Lieb relations and dimensions.
    #[command(subcommand)]
    Tl(TlCmd),
    /// Spin planar algebra tangle actions.
    #[command(subcommand)]
    Planar(PlanarCmd),
    /// Moments, cumulants and limit theorems.
    #[command(subcommand)]
    Freeprob(FreeprobCmd),
    /// Gram and Weingarten matrices, Haar integrals, characters.
    #[command(subcommand)]
    Wg(WgCmd),
    /// Random matrix sampling.
    #[command(subcommand)]
    Rm(RmCmd),
    /// Principal graph series and measures.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Complex Hadamard matrices.
    #[command(subcommand)]
    Hadamard(HadamardCmd),
    /// Run a golden-table suite.
    Reproduce {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long)]
    kind: String,
    /// Number of points, or number of pairs for the pairing classes.
    #[arg(long)]
    k: usize,
    /// Colored word such as "oxxo" for matched classes.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum PartitionsCmd {
    Count(ClassArgs),
    List(ClassArgs),
    Join {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    Mobius {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
}

#[derive(Subcommand)]
enum TlCmd {
    /// Relation suite on TL(k).
    Check {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 50)]
        words: usize,
    },
    /// Dimensions of TL(k) and its Fuss-Catalan version.
    Dim {
        #[arg(long)]
        k: usize,
    },
    /// Markov trace of a product of Jones projections, e.g. --word 1,2,1.
    Trace {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value = "")]
        word: String,
    },
}

#[derive(Subcommand)]
enum PlanarCmd {
    /// Applies a named tangle to spin tensors read from a JSON file.
    Act {
        #[arg(long)]
        tangle: String,
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        /// A tensor object, or an array with one tensor per input box.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Lists the named tangles.
    Tangles,
}

#[derive(Args)]
struct LawArgs {
    #[arg(long)]
    law: String,
    #[arg(long, default_value = "1")]
    t: String,
    /// Order s of the Bessel laws; omit for s = ∞.
    #[arg(long)]
    s: Option<u64>,
    #[arg(long = "K")]
    k: usize,
}

#[derive(Subcommand)]
enum FreeprobCmd {
    Moments(LawArgs),
    Cumulants {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, default_value = "free")]
        kind: String,
    },
    RTransform(LawArgs),
    /// Moments of a rescaled n-fold convolution against the limit law.
    Limit {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        n: u64,
        #[arg(long = "K")]
        k: usize,
    },
}

#[derive(Args)]
struct CatArgs {
    #[arg(long)]
    cat: String,
    #[arg(long = "N")]
    n: u64,
    #[arg(long)]
    word: Option<String>,
}

#[derive(Subcommand)]
enum WgCmd {
    Integrate {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long)]
        rows: String,
        #[arg(long)]
        cols: String,
    },
    Character {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value = "1")]
        t: String,
    },
    Gram {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long)]
        k: usize,
    },
    Weingarten {
        #[command(flatten)]
        cat: CatArgs,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long)]
    kind: String,
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    samples: usize,
}

#[derive(Subcommand)]
enum RmCmd {
    Moments {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long)]
        k: usize,
    },
    /// Pooled eigenvalue histogram of a Hermitian ensemble.
    Spectrum {
        #[command(flatten)]
        ens: EnsembleArgs,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        #[arg(long, default_value_t = -2.5)]
        lo: f64,
        #[arg(long, default_value_t = 2.5)]
        hi: f64,
    },
    /// Monte-Carlo Haar integral of a coordinate word such as "1,1;2,2*".
    Haar {
        #[arg(long)]
        group: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
    },
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    ade: Option<String>,
    /// Series parameter: A_{n-1}, D_{n+1}, Atilde_{2n}, Dtilde_{n+2}.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Graph JSON {layerA, layerB, edges, root}.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GraphCmd {
    Poincare {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    Theta {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    TSeries {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 12)]
        order: usize,
    },
    /// The cyclotomic closed form of the T-series.
    Formula {
        #[arg(long)]
        ade: String,
        /// Series parameter: A_{n-1}, D_{n+1}, Atilde_{2n}, Dtilde_{n+2}.
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
    Spectral(GraphArgs),
    Circular(GraphArgs),
    Norm(GraphArgs),
    /// Markov check of an inclusion file {"a": [...], "m": [[...]]}.
    Markov {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        tower: usize,
    },
}

#[derive(Args)]
struct MatrixArgs {
    /// Fourier orders, e.g. 3 or 2,2.
    #[arg(long)]
    fourier: Option<String>,
    /// Exact JSON {order, exponents} or CSV of re,im pairs.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum HadamardCmd {
    Matrix(MatrixArgs),
    Magic(MatrixArgs),
    SquareCheck(MatrixArgs),
    /// Planar algebra dimension dim P_k.
    Pk {
        #[command(flatten)]
        h: MatrixArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        float: bool,
    },
    Intertwiner {
        #[command(flatten)]
        h: MatrixArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        float: bool,
    },
    Cesaro {
        #[command(flatten)]
        h: MatrixArgs,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
    },
    Kesten {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: usize,
    },
    GramMc {
        #[arg(long = "M")]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
    },
    Blowup {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: usize,
    },
    Asymptotic {
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long)]
        p: usize,
        #[arg(long = "Ks", value_delimiter = ',', default_value = "1,2,3")]
        ks: Vec<usize>,
    },
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A rendered result: JSON value, CSV table and pretty text.
struct Output {
    json: Value,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    pretty: String,
    failed: bool,
}

impl Output {
    fn scalar(name: &str, value: String) -> Self {
        Output {
            json: json!({ name: value }),
            headers: vec![name.into()],
            rows: vec![vec![value.clone()]],
            pretty: value,
            failed: false,
        }
    }

    fn table(headers: &[&str], rows: Vec<Vec<String>>) -> Self {
        let json = Value::Array(
            rows.iter()
                .map(|r| Value::Object(headers.iter().zip(r).map(|(h, v)| (h.to_string(), Value::from(v.clone()))).collect()))
                .collect(),
        );
        let widths: Vec<usize> =
            (0..headers.len()).map(|i| rows.iter().map(|r| r[i].chars().count()).chain([headers[i].chars().count()]).max().unwrap_or(0)).collect();
        let line = |cells: Vec<&str>| {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut pretty = vec![line(headers.to_vec())];
        pretty.extend(rows.iter().map(|r| line(r.iter().map(String::as_str).collect())));
        Output { json, headers: headers.iter().map(|s| s.to_string()).collect(), rows, pretty: pretty.join("\n"), failed: false }
    }

    fn with_json(mut self, json: Value) -> Self {
        self.json = json;
        self
    }

    fn with_pretty(mut self, pretty: String) -> Self {
        self.pretty = pretty;
        self
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("serializable"),
            Format::Csv => {
                let esc = |s: &str| if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() };
                let mut lines = vec![self.headers.iter().map(|h| esc(h)).collect::<Vec<_>>().join(",")];
                lines.extend(self.rows.iter().map(|r| r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(",")));
                lines.join("\n")
            }
            Format::Pretty => self.pretty.clone(),
        }
    }
}

/// 17 significant digits.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn c17(z: Complex64) -> String {
    if z.im == 0.0 {
        f17(z.re)
    } else {
        format!("{}{}{}i", f17(z.re), if z.im < 0.0 { "-" } else { "+" }, f17(z.im.abs()))
    }
}

fn rational(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| Error::Parse(format!("not a rational number: {s:?}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index {x:?}"))))
        .collect()
}

fn word(w: &Option<String>) -> Result<Option<ColoredWord>> {
    w.as_deref().map(str::parse).transpose()
}

fn series_output(name: &str, s: &Series) -> Output {
    let rows: Vec<Vec<String>> = s.to_strings().into_iter().enumerate().map(|(i, c)| vec![i.to_string(), c]).collect();
    Output::table(&["power", name], rows).with_json(json!({ name: s.to_strings() })).with_pretty(s.to_string())
}

/// Class, point count and word; pairing classes take `--k` pairs on `2k` points.
fn class_args(a: &ClassArgs) -> Result<(PartitionClass, usize, Option<ColoredWord>)> {
    use PartitionClass::*;
    let class: PartitionClass = a.kind.parse()?;
    let points = if matches!(class, P2 | NC2 | MatchedP2 | MatchedNC2) { 2 * a.k } else { a.k };
    Ok((class, points, word(&a.word)?))
}

fn partitions_cmd(cmd: &PartitionsCmd) -> Result<Output> {
    Ok(match cmd {
        PartitionsCmd::Count(a) => {
            let (class, k, w) = class_args(a)?;
            Output::scalar("count", partitions::count(class, k, w.as_ref())?.to_string())
        }
        PartitionsCmd::List(a) => {
            let (class, k, w) = class_args(a)?;
            let ps = partitions::enumerate(class, k, w.as_ref())?;
            let rows = ps.iter().map(|p| vec![p.to_string(), p.block_count().to_string()]).collect();
            let blocks: Vec<Vec<Vec<usize>>> =
                ps.iter().map(|p| p.blocks().into_iter().map(|b| b.into_iter().map(|x| x + 1).collect()).collect()).collect();
            Output::table(&["partition", "blocks"], rows)
                .with_json(json!(blocks))
                .with_pretty(ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n"))
        }
        PartitionsCmd::Join { p, q } => {
            let (p, q): (Partition, Partition) = (p.parse()?, q.parse()?);
            Output::scalar("join", p.join(&q)?.to_string())
        }
        PartitionsCmd::Mobius { p, q } => {
            let (p, q): (Partition, Partition) = (p.parse()?, q.parse()?);
            Output::scalar("mobius", partitions::mobius(&p, &q)?.to_string())
        }
    })
}

fn tl_cmd(cmd: &TlCmd, seed: u64) -> Result<Output> {
    use rand_chacha::ChaCha20Rng;
    use rand_core::{RngCore, SeedableRng};
    Ok(match cmd {
        TlCmd::Check { k, delta, words } => {
            let delta = rational(delta)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let ws: Vec<Vec<usize>> = if *k < 3 {
                vec![]
            } else {
                (0..*words)
                    .map(|_| (0..1 + rng.next_u32() % 6).map(|_| 1 + rng.next_u32() as usize % (k - 2)).collect())
                    .collect()
            };
            let r = tl::check_relations(*k, &delta, &ws)?;
            let rows = [
                ("e_i^2 = e_i", r.idempotent),
                ("e_i* = e_i", r.self_adjoint),
                ("far commutation", r.far_commute),
                ("e_i e_{i±1} e_i = δ^-2 e_i", r.braid_like),
                ("Markov trace", r.markov),
            ]
            .iter()
            .map(|(n, b)| vec![n.to_string(), if *b { "pass" } else { "fail" }.to_string()])
            .collect();
            let mut out = Output::table(&["relation", "result"], rows);
            out.failed = !r.all();
            out
        }
        TlCmd::Dim { k } => Output::table(&["k", "tl", "fuss_catalan"], vec![vec![k.to_string(), tl::dimension(*k).to_string(), tl::fc_dimension(*k).to_string()]]),
        TlCmd::Trace { k, delta, word } => {
            let delta = rational(delta)?;
            let mut x = tl::DiagramElement::tl_identity(*k, delta.clone());
            for i in indices(word)? {
                x = x.compose(&tl::jones_projection(i, *k, &delta)?)?;
            }
            Output::scalar("trace", fmt_q(&x.markov_trace())).with_json(json!({ "element": x.to_json(), "trace": fmt_q(&x.markov_trace()) }))
        }
    })
}

fn planar_cmd(cmd: &PlanarCmd) -> Result<Output> {
    Ok(match cmd {
        PlanarCmd::Tangles => {
            let rows = NamedTangle::ALL.iter().map(|t| vec![t.name().to_string()]).collect();
            Output::table(&["tangle"], rows)
        }
        PlanarCmd::Act { tangle, k, n, input } => {
            let t = spinplanar::named_tangle(tangle.parse()?, *k)?;
            let raw = match input {
                Some(p) => read_json(p)?,
                None => Value::Array(vec![]),
            };
            let items = match raw {
                Value::Array(v) => v,
                v => vec![v],
            };
            if items.len() != t.inputs().len() {
                return Err(Error::InvalidArgument(format!("tangle has {} input boxes, file gives {}", t.inputs().len(), items.len())));
            }
            let xs = items.iter().zip(t.inputs()).map(|(v, &d)| SpinTensor::from_json(*n, d, v)).collect::<Result<Vec<_>>>()?;
            let y = spinplanar::act_spin_n(&t, *n, &xs)?;
            let rows = y
                .coeffs
                .iter()
                .map(|(idx, c)| vec![idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "), f17(c.re), f17(c.im)])
                .collect();
            let json = y.to_json();
            Output::table(&["indices", "re", "im"], rows).with_pretty(serde_json::to_string(&json).expect("json")).with_json(json)
        }
    })
}

fn law(a: &LawArgs) -> Result<Law> {
    Law::from_name(&a.law, rational(&a.t)?, a.s)
}

fn freeprob_cmd(cmd: &FreeprobCmd) -> Result<Output> {
    Ok(match cmd {
        FreeprobCmd::Moments(a) => {
            let m = freeprob::law_moments(&law(a)?, a.k)?;
            let values: Vec<String> = (1..=a.k).map(|j| fmt_q(&m.get(j))).collect();
            let rows = values.iter().enumerate().map(|(j, v)| vec![(j + 1).to_string(), v.clone()]).collect();
            let mut json = json!({ "law": law(a)?.to_string(), "moments": values });
            if !m.colored.is_empty() {
                json["colored"] = m.colored.iter().map(|(w, v)| (w.to_string(), Value::from(fmt_q(v)))).collect::<serde_json::Map<_, _>>().into();
            }
            Output::table(&["k", "moment"], rows).with_json(json).with_pretty(values.join(","))
        }
        FreeprobCmd::Cumulants { law: a, kind } => {
            let kind: Kind = kind.parse()?;
            let c = freeprob::cumulants(&freeprob::law_moments(&law(a)?, a.k)?, kind);
            series_output("cumulant", &c)
        }
        FreeprobCmd::RTransform(a) => series_output("r", &freeprob::r_transform(&freeprob::law_moments(&law(a)?, a.k)?)?),
        FreeprobCmd::Limit { theorem, n, k } => {
            let th: LimitTheorem = theorem.parse()?;
            let base = match th {
                LimitTheorem::Clt | LimitTheorem::FreeClt => DiscreteMeasure::real(&[(Q::from_integer((-1).into()), rational("1/2")?), (Q::from_integer(1.into()), rational("1/2")?)])?,
                LimitTheorem::Plt | LimitTheorem::FreePlt => {
                    let p = Q::new(1.into(), (*n).into());
                    DiscreteMeasure::real(&[(Q::from_integer(0.into()), Q::from_integer(1.into()) - &p), (Q::from_integer(1.into()), p)])?
                }
                LimitTheorem::Cclt => DiscreteMeasure::roots_of_unity(4)?,
            };
            let rows = freeprob::limit_theorem_check(&base, th, *n, *k)?;
            Output::table(&["k", "value", "limit", "gap"], rows.iter().map(|r| vec![r.k.to_string(), f17(r.value), f17(r.limit), f17(r.gap)]).collect())
        }
    })
}

fn category(a: &CatArgs) -> Result<(EasyCategory, Option<ColoredWord>)> {
    Ok((a.cat.parse()?, word(&a.word)?))
}

fn matrix_rows(entries: &[Vec<String>]) -> Vec<Vec<String>> {
    entries.iter().enumerate().map(|(i, r)| [vec![(i + 1).to_string()], r.clone()].concat()).collect()
}

fn wg_cmd(cmd: &WgCmd) -> Result<Output> {
    Ok(match cmd {
        WgCmd::Integrate { cat, rows, cols } => {
            let (c, w) = category(cat)?;
            Output::scalar("integral", fmt_q(&weingarten::integrate(&c, cat.n, &indices(rows)?, &indices(cols)?, w.as_ref())?))
        }
        WgCmd::Character { cat, p, t } => {
            let (c, w) = category(cat)?;
            let t = rational(t)?;
            let m = weingarten::character_moments(&c, cat.n, *p, &t, w.as_ref())?;
            let lim = weingarten::character_limit(&c, *p, &t, w.as_ref())?;
            Output::table(&["moment", "limit"], vec![vec![fmt_q(&m), fmt_q(&lim)]]).with_pretty(fmt_q(&m))
        }
        WgCmd::Gram { cat, k } => {
            let (c, w) = category(cat)?;
            let g = weingarten::gram_colored(&c, *k, cat.n, w.as_ref())?;
            let entries: Vec<Vec<String>> = g.entries.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
            basis_matrix(&g.basis, entries)
        }
        WgCmd::Weingarten { cat, k } => {
            let (c, w) = category(cat)?;
            let m = weingarten::weingarten_colored(&c, *k, cat.n, w.as_ref())?;
            let entries: Vec<Vec<String>> = m.entries.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
            basis_matrix(&m.basis, entries)
        }
    })
}

fn basis_matrix(basis: &[Partition], entries: Vec<Vec<String>>) -> Output {
    let names: Vec<String> = basis.iter().map(|p| p.to_string()).collect();
    let mut headers = vec!["row".to_string()];
    headers.extend(names.iter().cloned());
    let rows: Vec<Vec<String>> = names.iter().zip(&entries).map(|(n, r)| [vec![n.clone()], r.clone()].concat()).collect();
    let h: Vec<&str> = headers.iter().map(String::as_str).collect();
    Output::table(&h, rows).with_json(json!({ "basis": names, "matrix": entries }))
}

fn spec(a: &EnsembleArgs, seed: u64) -> Result<EnsembleSpec> {
    let kind: Ensemble = a.kind.parse()?;
    let s = EnsembleSpec::new(kind, a.n).m(a.m.unwrap_or(a.n)).t(a.t).seed(seed).samples(a.samples);
    s.validate()?;
    Ok(s)
}

fn rm_cmd(cmd: &RmCmd, seed: u64) -> Result<Output> {
    Ok(match cmd {
        RmCmd::Moments { ens, k } => {
            let m = randmat::empirical_moments(&spec(ens, seed)?, *k)?;
            Output::table(&["k", "moment"], m.iter().enumerate().map(|(j, x)| vec![(j + 1).to_string(), f17(*x)]).collect())
        }
        RmCmd::Spectrum { ens, bins, lo, hi } => {
            let mu = randmat::pooled_spectrum(&spec(ens, seed)?)?;
            let rows = mu.histogram(*bins, *lo, *hi).iter().map(|(a, b, c)| vec![f17(*a), f17(*b), c.to_string()]).collect();
            Output::table(&["lo", "hi", "count"], rows)
        }
        RmCmd::Haar { group, n, word, samples } => {
            let g: HaarGroup = group.parse()?;
            let letters = word
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    let s = s.trim();
                    let conj = s.ends_with('*');
                    let ij = indices(s.trim_end_matches('*'))?;
                    match ij.as_slice() {
                        [i, j] => Ok(Letter { i: *i, j: *j, conj }),
                        _ => Err(Error::Parse(format!("letter {s:?} must be i,j or i,j*"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let e = randmat::haar_word_integral_mc(g, *n, &letters, *samples, seed)?;
            Output::table(&["mean", "stderr", "samples"], vec![vec![c17(e.mean), f17(e.stderr), e.samples.to_string()]])
        }
    })
}

/// Maps the series parameter to the library's graph index.
fn catalog(family: &str, n: usize) -> Result<(AdeFamily, usize)> {
    let f: AdeFamily = family.parse()?;
    let m = match f {
        AdeFamily::A => n.checked_sub(1).ok_or_else(|| Error::InvalidArgument("A_{n-1} needs n at least 3".into()))?,
        AdeFamily::D => n + 1,
        AdeFamily::Dtilde => n + 2,
        _ => n,
    };
    Ok((f, m))
}

fn graph(a: &GraphArgs) -> Result<RootedBipartiteGraph> {
    match (&a.ade, &a.file) {
        (Some(f), None) => {
            let (f, m) = catalog(f, a.n)?;
            graphinv::ade(f, m)
        }
        (None, Some(p)) => RootedBipartiteGraph::from_json(&read_json(p)?),
        _ => Err(Error::InvalidArgument("give exactly one of --ade and --file".into())),
    }
}

fn graph_cmd(cmd: &GraphCmd) -> Result<Output> {
    Ok(match cmd {
        GraphCmd::Poincare { g, order } => series_output("coefficient", &graphinv::poincare(&graph(g)?, *order)),
        GraphCmd::Theta { g, order } => series_output("coefficient", &graphinv::theta(&graphinv::poincare(&graph(g)?, *order))?),
        GraphCmd::TSeries { g, order } => series_output("coefficient", &graphinv::t_series(&graphinv::poincare(&graph(g)?, *order))?),
        GraphCmd::Formula { ade, n } => {
            let (f, m) = catalog(ade, *n)?;
            Output::scalar("formula", graphinv::ade_t_formula(f, m)?.to_string())
        }
        GraphCmd::Spectral(g) => {
            let mu = graphinv::spectral_measure(&graph(g)?);
            Output::table(&["point", "weight"], mu.atoms.iter().map(|(x, w)| vec![f17(*x), f17(*w)]).collect())
        }
        GraphCmd::Circular(g) => {
            let eps = graphinv::circular_measure(&graph(g)?);
            let rows = eps.atoms.iter().map(|(p, w)| vec![p.to_string(), f17(*w)]).collect();
            let out = Output::table(&["point", "weight"], rows);
            let json = json!({ "atoms": eps.atoms.iter().map(|(p, w)| json!([p.to_string(), w])).collect::<Vec<_>>(), "experimental": eps.experimental });
            out.with_json(json)
        }
        GraphCmd::Norm(g) => {
            let x = graphinv::graph_norm(&graph(g)?);
            Output::table(&["norm", "index", "admissible"], vec![vec![f17(x), f17(x * x), graphinv::admissible_index(x * x, 1e-9).to_string()]])
        }
        GraphCmd::Markov { file, tower } => {
            let v = read_json(file)?;
            let a: Vec<u64> = serde_json::from_value(v["a"].clone()).map_err(|e| Error::Parse(format!("a: {e}")))?;
            let m: Vec<Vec<u64>> = serde_json::from_value(v["m"].clone()).map_err(|e| Error::Parse(format!("m: {e}")))?;
            if *tower == 0 {
                let r = graphinv::markov_check(&a, &m)?;
                let mut out = Output::table(
                    &["a", "b", "r", "markov", "r_integer", "norm"],
                    vec![vec![format!("{:?}", r.a), format!("{:?}", r.b), r.r.clone(), r.markov.to_string(), r.r_integer.to_string(), f17(r.norm)]],
                );
                out.failed = !r.markov;
                out
            } else {
                let steps = graphinv::jones_tower(&a, &m, *tower)?;
                let rows = steps
                    .iter()
                    .map(|s| vec![s.level.to_string(), s.report.r.clone(), s.report.markov.to_string(), f17(s.product_norm), f17(s.expected)])
                    .collect();
                Output::table(&["level", "r", "markov", "product_norm", "expected"], rows)
            }
        }
    })
}

fn matrix(a: &MatrixArgs) -> Result<HadamardMatrix> {
    match (&a.fourier, &a.file) {
        (Some(f), None) => {
            let orders = f.split(',').map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad order {x:?}")))).collect::<Result<Vec<_>>>()?;
            hadamard::fourier(&orders)
        }
        (None, Some(p)) => {
            let text = read(p)?;
            if p.extension().is_some_and(|e| e == "csv") {
                HadamardMatrix::from_csv(&text)
            } else {
                HadamardMatrix::from_json(&serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?)
            }
        }
        _ => Err(Error::InvalidArgument("give exactly one of --fourier and --file".into())),
    }
}

fn arith(float: bool) -> Arithmetic {
    if float {
        Arithmetic::Float
    } else {
        Arithmetic::Exact
    }
}

fn hadamard_cmd(cmd: &HadamardCmd, seed: u64) -> Result<Output> {
    let dim = |h: &HadamardMatrix, k, l, float: bool| {
        if h.is_exact() && !float {
            hadamard::intertwiner_dim(h, k, l)
        } else {
            hadamard::intertwiner_dim_with(h, k, l, arith(true))
        }
    };
    Ok(match cmd {
        HadamardCmd::Matrix(a) => {
            let h = matrix(a)?;
            let rows: Vec<Vec<String>> = (0..h.n).map(|i| (0..h.n).map(|j| c17(h.entry(i, j))).collect()).collect();
            let headers: Vec<String> = std::iter::once("row".to_string()).chain((1..=h.n).map(|j| j.to_string())).collect();
            let hr: Vec<&str> = headers.iter().map(String::as_str).collect();
            Output::table(&hr, matrix_rows(&rows)).with_json(h.to_json())
        }
        HadamardCmd::Magic(a) => {
            let mu = hadamard::magic_unitary(&matrix(a)?)?;
            let mut rows = Vec::new();
            for i in 0..mu.n {
                for j in 0..mu.n {
                    let p = mu.get(i, j);
                    let flat: Vec<String> = (0..mu.n).flat_map(|r| (0..mu.n).map(move |c| (r, c))).map(|(r, c)| c17(p[(r, c)])).collect();
                    rows.push(vec![(i + 1).to_string(), (j + 1).to_string(), flat.join(" ")]);
                }
            }
            Output::table(&["i", "j", "projection (row-major)"], rows).with_pretty(format!("magic unitary of size {}, defect {}", mu.n, f17(mu.defect())))
        }
        HadamardCmd::SquareCheck(a) => {
            let r = hadamard::commuting_square_check(&matrix(a)?)?;
            let mut out = Output::table(
                &["N", "defect_diag_first", "defect_rotated_first", "passes"],
                vec![vec![r.n.to_string(), f17(r.defect_diag_first), f17(r.defect_rotated_first), r.passes.to_string()]],
            );
            out.failed = !r.passes;
            out
        }
        HadamardCmd::Pk { h, k, float } => Output::scalar("dim", dim(&matrix(h)?, 0, *k, *float)?.to_string()),
        HadamardCmd::Intertwiner { h, k, l, float } => Output::scalar("dim", dim(&matrix(h)?, *k, *l, *float)?.to_string()),
        HadamardCmd::Cesaro { h, p, iterations } => {
            let c = hadamard::cesaro_haar(&matrix(h)?, *p, *iterations)?;
            Output::table(
                &["p", "iterations", "rank", "idempotence_defect", "last_step"],
                vec![vec![c.p.to_string(), c.iterations.to_string(), c.rank.to_string(), f17(c.idempotence_defect), f17(c.last_step)]],
            )
        }
        HadamardCmd::Kesten { m, n, p } => {
            let v = fmt_q(&hadamard::kesten_moment(*m, *n, *p)?);
            Output::scalar("moment", v.clone()).with_json(json!({ "moment": v, "law": "generic-Q law" }))
        }
        HadamardCmd::GramMc { m, n, p, samples } => {
            let e = hadamard::gram_law_mc(*m, *n, *p, *samples, seed)?;
            Output::table(&["mean", "stderr", "samples"], vec![vec![f17(e.mean.re), f17(e.stderr), e.samples.to_string()]])
        }
        HadamardCmd::Blowup { n, p } => Output::scalar("moment", fmt_q(&hadamard::blowup_m2(*n, *p)?)),
        HadamardCmd::Asymptotic { alpha, beta, p, ks } => {
            let rep = hadamard::convergence_check(&rational(alpha)?, &rational(beta)?, *p, ks)?;
            for s in &rep.skipped {
                eprintln!("skipped: {s}");
            }
            let rows = rep.rows.iter().map(|r| vec![r.k.to_string(), r.m.to_string(), r.n.to_string(), fmt_q(&r.kesten), fmt_q(&r.scaled), fmt_q(&rep.limit), f17(r.gap)]).collect();
            Output::table(&["K", "M", "N", "kesten", "scaled", "limit", "gap"], rows)
                .with_json(serde_json::to_value(&rep).expect("serializable"))
        }
    })
}

fn reproduce_cmd(suite: Suite, samples: usize, seed: u64) -> Result<Output> {
    let checks = reproduce::run(suite, McConfig { samples, seed })?;
    let rows = checks
        .iter()
        .map(|c| vec![c.criterion.to_string(), if c.passed { "pass" } else { "FAIL" }.to_string(), c.name.clone(), c.measured.clone()])
        .collect();
    let mut out = Output::table(&["criterion", "result", "check", "measured"], rows).with_json(json!({ "suite": suite.name(), "checks": checks }));
    out.failed = checks.iter().any(|c| !c.passed);
    let passed = checks.iter().filter(|c| c.passed).count();
    out.pretty.push_str(&format!("\n{suite}: {passed}/{} passed", checks.len()));
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Partitions(c) => partitions_cmd(c),
        Command::Tl(c) => tl_cmd(c, cli.seed),
        Command::Planar(c) => planar_cmd(c),
        Command::Freeprob(c) => freeprob_cmd(c),
        Command::Wg(c) => wg_cmd(c),
        Command::Rm(c) => rm_cmd(c, cli.seed),
        Command::Graph(c) => graph_cmd(c),
        Command::Hadamard(c) => hadamard_cmd(c, cli.seed),
        Command::Reproduce { suite, samples } => reproduce_cmd(*suite, *samples, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = std::env::var("OPALG_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(out) => {
            let mut text = out.render(cli.format);
            text.push('\n');
            match &cli.out {
                Some(p) => {
                    if let Err(e) = fs::write(p, text) {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
