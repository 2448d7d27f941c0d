//! `torcomb`: describe complexes, compute Buchstaber numbers, bigraded
//! Betti tables and cohomology rings, flip polygon presentations, and
//! convert between the input encodings.
//!
//! Vertex labels are 1-based everywhere, matching the facet numbering
//! `F_1, …, F_m` of the dual simple polytope.
//!
//! Exit codes: 0 success, 2 input error, 3 desk-scale refusal, 4 internal
//! cross-check failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Read;
use torcomb::betti::{koszul_betti_capped, polygon_betti_closed_form, BettiTable};
use torcomb::buchstaber::{s_int, s_real};
use torcomb::cohomology::product_table;
use torcomb::families::{
    h_closed_form, polygon_flip, polygon_from_table, table_from_polygon, table_vertices,
    FamilySpec, PolygonPresentation, TableDiagram,
};
use torcomb::{Error, SimplicialComplex};

#[derive(Parser)]
#[command(name = "torcomb", version, about = "Exact invariants of simple polytopes and their moment-angle complexes", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report m, n, f/h-vectors, chromatic number, flag defect and minimal non-faces
    Describe {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Exact real Buchstaber number and the certified range for the integral one
    Buchstaber {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Bigraded Betti numbers of the moment-angle complex
    Betti {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Cohomology ring generators and verified product table (polygon inputs)
    Cohomology {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Flip a polygon presentation at a position
    Flip {
        #[command(flatten)]
        input: InputArgs,
        /// polygon position (1-based)
        #[arg(long)]
        pos: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Convert between polygon, table and explicit-complex encodings
    Convert {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        to: ConvertTarget,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Execute a JSON job spec (path or `-` for stdin)
    Run { spec: String },
}

#[derive(Args)]
struct InputArgs {
    /// Odd-gon weights, e.g. 2,1,2,1,1,2,1
    #[arg(long, value_delimiter = ',')]
    polygon: Option<Vec<usize>>,
    /// Simplex skeleton as "m,n"
    #[arg(long)]
    skeleton: Option<String>,
    /// Cyclic-polytope dual as "n,m"
    #[arg(long = "cyclic-dual")]
    cyclic_dual: Option<String>,
    /// Cut table as "a0,a1,..;b0,b1,.." with exact rationals like 1/4
    #[arg(long)]
    table: Option<String>,
    /// Explicit complex JSON (path or `-` for stdin)
    #[arg(long)]
    complex: Option<String>,
    /// Family spec JSON (path or `-` for stdin)
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args, Clone)]
struct CommonOpts {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Desk-scale cap on m for Betti computations
    #[arg(long, default_value_t = 16)]
    betti_cap: usize,
    /// Desk-scale cap on m for the s_R search
    #[arg(long, default_value_t = 12)]
    sreal_cap: usize,
    /// Raise the desk-scale caps, acknowledging the runtime cost
    #[arg(long)]
    override_caps: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ConvertTarget {
    Polygon,
    Table,
    Complex,
}

/// JSON job spec accepted by `torcomb run`.
#[derive(Deserialize)]
struct JobSpec {
    input: FamilySpec,
    command: JobCommand,
    #[serde(default)]
    options: JobOptions,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum JobCommand {
    Describe,
    Buchstaber,
    Betti,
    Cohomology,
    Flip,
    Convert,
}

#[derive(Deserialize, Default)]
struct JobOptions {
    format: Option<String>,
    betti_cap: Option<usize>,
    sreal_cap: Option<usize>,
    threads: Option<usize>,
    pos: Option<usize>,
    to: Option<ConvertTarget>,
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(report) => {
            print!("{report}");
            std::process::exit(0);
        }
        Err(e) => {
            eprintln!("torcomb: {e}");
            std::process::exit(match e {
                Error::Input(_) => 2,
                Error::DeskScale(_) => 3,
                Error::Internal(_) => 4,
            });
        }
    }
}

fn threads_from_env() -> usize {
    std::env::var("TORCOMB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

fn dispatch(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Describe { input, opts } => {
            cmd_describe(&input.to_spec()?, &opts)
        }
        Command::Buchstaber { input, opts } => cmd_buchstaber(&input.to_spec()?, &opts),
        Command::Betti { input, opts } => {
            cmd_betti(&input.to_spec()?, &opts, threads_from_env())
        }
        Command::Cohomology { input, opts } => cmd_cohomology(&input.to_spec()?, &opts),
        Command::Flip { input, pos, opts } => cmd_flip(&input.to_spec()?, pos, &opts),
        Command::Convert { input, to, opts } => cmd_convert(&input.to_spec()?, to, &opts),
        Command::Run { spec } => {
            let text = read_path_or_stdin(&spec)?;
            let job: JobSpec = serde_json::from_str(&text)
                .map_err(|e| Error::Input(format!("malformed job spec: {e}")))?;
            let opts = CommonOpts {
                format: match job.options.format.as_deref() {
                    None | Some("text") => Format::Text,
                    Some("json") => Format::Json,
                    Some("csv") => Format::Csv,
                    Some(other) => {
                        return Err(Error::Input(format!("unknown format {other:?}")))
                    }
                },
                betti_cap: job.options.betti_cap.unwrap_or(16),
                sreal_cap: job.options.sreal_cap.unwrap_or(12),
                override_caps: false,
            };
            let threads = job.options.threads.unwrap_or_else(threads_from_env);
            match job.command {
                JobCommand::Describe => cmd_describe(&job.input, &opts),
                JobCommand::Buchstaber => cmd_buchstaber(&job.input, &opts),
                JobCommand::Betti => cmd_betti(&job.input, &opts, threads),
                JobCommand::Cohomology => cmd_cohomology(&job.input, &opts),
                JobCommand::Flip => {
                    let pos = job.options.pos.ok_or_else(|| {
                        Error::Input("flip needs options.pos".into())
                    })?;
                    cmd_flip(&job.input, pos, &opts)
                }
                JobCommand::Convert => {
                    let to = job.options.to.ok_or_else(|| {
                        Error::Input("convert needs options.to".into())
                    })?;
                    cmd_convert(&job.input, to, &opts)
                }
            }
        }
    }
}

fn read_path_or_stdin(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Input(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {path}: {e}")))
    }
}

impl InputArgs {
    fn to_spec(&self) -> Result<FamilySpec, Error> {
        let mut specs: Vec<FamilySpec> = Vec::new();
        if let Some(w) = &self.polygon {
            specs.push(FamilySpec::Polygon(w.clone()));
        }
        if let Some(s) = &self.skeleton {
            let (m, n) = parse_pair(s)?;
            specs.push(FamilySpec::Skeleton { m, n });
        }
        if let Some(s) = &self.cyclic_dual {
            let (n, m) = parse_pair(s)?;
            specs.push(FamilySpec::CyclicDual { n, m });
        }
        if let Some(s) = &self.table {
            let (a, b) = s.split_once(';').ok_or_else(|| {
                Error::Input("table wants \"a0,a1,..;b0,b1,..\"".into())
            })?;
            specs.push(FamilySpec::Table {
                a: a.split(',').map(|x| x.trim().to_string()).collect(),
                b: b.split(',').map(|x| x.trim().to_string()).collect(),
            });
        }
        if let Some(path) = &self.complex {
            let text = read_path_or_stdin(path)?;
            let complex: SimplicialComplex = serde_json::from_str(&text)
                .map_err(|e| Error::Input(format!("malformed complex JSON: {e}")))?;
            specs.push(FamilySpec::Complex(complex));
        }
        if let Some(path) = &self.input {
            let text = read_path_or_stdin(path)?;
            let spec: FamilySpec = serde_json::from_str(&text)
                .map_err(|e| Error::Input(format!("malformed family spec: {e}")))?;
            specs.push(spec);
        }
        match specs.len() {
            0 => Err(Error::Input(
                "no input given; use --polygon/--skeleton/--cyclic-dual/--table/--complex/--input"
                    .into(),
            )),
            1 => Ok(specs.pop().unwrap()),
            _ => Err(Error::Input("give exactly one input".into())),
        }
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::Input(format!("expected two comma-separated integers, got {s:?}")));
    }
    let a = parts[0].parse().map_err(|_| Error::Input(format!("bad integer {:?}", parts[0])))?;
    let b = parts[1].parse().map_err(|_| Error::Input(format!("bad integer {:?}", parts[1])))?;
    Ok((a, b))
}

fn render(format: Format, json: Value, text: String, csv: String) -> String {
    match format {
        Format::Text => text,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json).expect("serializable")),
        Format::Csv => csv,
    }
}

fn cmd_describe(spec: &FamilySpec, opts: &CommonOpts) -> Result<String, Error> {
    let k = spec.build()?;
    let f = k.f_vector();
    let h = k.h_polynomial().ok();
    let gamma = k.one_skeleton_chromatic_number();
    let (is_flag, least_k) = k.flag_defect();
    let mnf = k.minimal_non_faces();
    let n = k.max_face_size();

    let json = json!({
        "m": k.m(),
        "n": n,
        "pure": k.is_pure(),
        "f": f.entries(),
        "h": h.as_ref().map(|h| h.coeffs()),
        "chromatic_number": gamma,
        "is_flag": is_flag,
        "least_k_flag": least_k,
        "minimal_non_faces": mnf,
        "maximal_faces": k.maximal_faces(),
    });
    let mut text = String::new();
    text += &format!("m: {}\nn: {}\n", k.m(), n);
    text += &format!("f: {f}\n");
    match &h {
        Some(h) => text += &format!("h: {h}\n"),
        None => text += "h: undefined (non-pure complex)\n",
    }
    text += &format!("chromatic number: {gamma}\n");
    text += &format!("flag: {is_flag} (least k-flag: {least_k})\n");
    text += &format!("minimal non-faces ({}):", mnf.len());
    for w in &mnf {
        text += &format!(" {w:?}");
    }
    text.push('\n');
    let mut csv = String::from("key,value\n");
    csv += &format!("m,{}\nn,{}\n", k.m(), n);
    csv += &format!("f,\"{f}\"\n");
    csv += &format!("h,\"{}\"\n", h.map(|h| h.to_string()).unwrap_or_default());
    csv += &format!("chromatic_number,{gamma}\nis_flag,{is_flag}\nleast_k_flag,{least_k}\n");
    csv += &format!("minimal_non_face_count,{}\n", mnf.len());
    Ok(render(opts.format, json, text, csv))
}

fn cmd_buchstaber(spec: &FamilySpec, opts: &CommonOpts) -> Result<String, Error> {
    let k = spec.build()?;
    if k.m() > opts.sreal_cap && !opts.override_caps {
        return Err(Error::DeskScale(format!(
            "m = {} exceeds the s_R search cap {} (pass --override-caps to proceed)",
            k.m(),
            opts.sreal_cap
        )));
    }
    let (sr, sr_cert) = s_real(&k)?;
    let range = s_int(&k)?;
    let json = json!({
        "s_real": sr,
        "s_real_certificate": sr_cert,
        "s": {
            "lower": range.lower,
            "upper": range.upper,
            "exact": range.exact,
            "certificate": range.certificate,
            "provenance": range.provenance,
        },
    });
    let mut text = format!("s_R = {sr}\n");
    if range.exact {
        text += &format!("s = {} (exact)\n", range.lower);
    } else {
        text += &format!("s in [{}, {}]\n", range.lower, range.upper);
    }
    for (name, v) in &range.provenance {
        text += &format!("  {name}: {v}\n");
    }
    match &range.certificate {
        Some(c) => {
            text += &format!("certificate ({:?}, r = {}):\n", c.ring, c.r);
            for (i, v) in c.vectors.iter().enumerate() {
                text += &format!("  F{} -> {v:?}\n", i + 1);
            }
        }
        None => text += "certificate: none (interval only)\n",
    }
    let mut csv = String::from("key,value\n");
    csv += &format!("s_real,{sr}\ns_lower,{}\ns_upper,{}\ns_exact,{}\n", range.lower, range.upper, range.exact);
    for (name, v) in &range.provenance {
        csv += &format!("bound_{name},{v}\n");
    }
    Ok(render(opts.format, json, text, csv))
}

fn betti_csv(t: &BettiTable) -> String {
    let mut csv = String::from("q,2p,rank,torsion\n");
    for (q, p2, e) in t.iter() {
        csv += &format!("{q},{p2},{},\"{:?}\"\n", e.rank, e.torsion);
    }
    csv
}

fn cmd_betti(spec: &FamilySpec, opts: &CommonOpts, threads: usize) -> Result<String, Error> {
    let k = spec.build()?;
    let cap = if opts.override_caps { 32 } else { opts.betti_cap };
    let table = koszul_betti_capped(&k, cap, threads)?;
    let closed = spec.polygon().map(|p| polygon_betti_closed_form(&p));
    let closed_match = closed.as_ref().map(|c| *c == table);
    if closed_match == Some(false) {
        return Err(Error::Internal(
            "Koszul Betti table disagrees with the odd-gon closed form".into(),
        ));
    }
    let json = json!({
        "betti": table,
        "closed_form_match": closed_match,
    });
    let mut text = table.grid();
    if let Some(ok) = closed_match {
        text += &format!("closed-form cross-check: {}\n", if ok { "match" } else { "MISMATCH" });
    }
    Ok(render(opts.format, json, text, betti_csv(&table)))
}

fn cmd_cohomology(spec: &FamilySpec, opts: &CommonOpts) -> Result<String, Error> {
    let p = spec.polygon().ok_or_else(|| {
        Error::Input("the cohomology ring is computed for polygon inputs only".into())
    })?;
    let ring = product_table(&p)?;
    let json = json!({
        "ring": ring,
        "products_verified": true,
    });
    let mut text = String::from("generators:\n");
    for g in &ring.generators {
        text += &format!("  {}  bideg ({}, {})\n", g.name, g.bidegree.0, g.bidegree.1);
    }
    text += "nonzero products:\n";
    for e in &ring.products {
        if !e.result.is_empty() {
            let rhs: Vec<String> = e
                .result
                .iter()
                .map(|(c, g)| match c {
                    1 => g.clone(),
                    -1 => format!("-{g}"),
                    _ => format!("{c}*{g}"),
                })
                .collect();
            text += &format!("  {}·{} = {}\n", e.left, e.right, rhs.join(" + "));
        }
    }
    text += "product table verified against the ring structure\n";
    let mut csv = String::from("left,right,result\n");
    for e in &ring.products {
        let rhs: Vec<String> =
            e.result.iter().map(|(c, g)| format!("{c}*{g}")).collect();
        csv += &format!("{},{},\"{}\"\n", e.left, e.right, rhs.join("+"));
    }
    Ok(render(opts.format, json, text, csv))
}

fn cmd_flip(spec: &FamilySpec, pos: usize, opts: &CommonOpts) -> Result<String, Error> {
    let p = spec
        .polygon()
        .ok_or_else(|| Error::Input("flips apply to polygon inputs only".into()))?;
    let rec = polygon_flip(&p, pos)?;
    let h_before = h_closed_form(&rec.before)?;
    let h_after = h_closed_form(&rec.after)?;
    let json = json!({
        "flip_type": rec.flip_type,
        "before": rec.before.weights(),
        "after": rec.after.weights(),
        "h_before": h_before.coeffs(),
        "h_after": h_after.coeffs(),
        "h_change": format!("{}", rec.h_change()),
        "verified": true,
    });
    let text = format!(
        "flip type {} at position {pos}\nbefore: {:?}  h = {h_before}\nafter:  {:?}  h = {h_after}\nh change: {}\nh-change identity verified against both complexes\n",
        rec.flip_type,
        rec.before.weights(),
        rec.after.weights(),
        rec.h_change(),
    );
    let csv = format!(
        "key,value\nflip_type,{}\nbefore,\"{:?}\"\nafter,\"{:?}\"\nh_change,\"{}\"\n",
        rec.flip_type,
        rec.before.weights(),
        rec.after.weights(),
        rec.h_change(),
    );
    Ok(render(opts.format, json, text, csv))
}

fn cmd_convert(
    spec: &FamilySpec,
    to: ConvertTarget,
    opts: &CommonOpts,
) -> Result<String, Error> {
    let polygon_of = |spec: &FamilySpec| -> Result<PolygonPresentation, Error> {
        match spec {
            FamilySpec::Polygon(w) => PolygonPresentation::new(w.clone()),
            FamilySpec::Table { .. } => polygon_from_table(&spec.table()?),
            _ => Err(Error::Input(
                "conversion to a polygon needs a polygon or table input".into(),
            )),
        }
    };
    let table_of = |spec: &FamilySpec| -> Result<TableDiagram, Error> {
        match spec {
            FamilySpec::Polygon(w) => table_from_polygon(&PolygonPresentation::new(w.clone())?),
            FamilySpec::Table { .. } => spec.table(),
            _ => Err(Error::Input(
                "conversion to a table needs a polygon or table input".into(),
            )),
        }
    };
    match to {
        ConvertTarget::Polygon => {
            let p = polygon_of(spec)?;
            let json = json!({ "polygon": p.weights() });
            let text = format!(
                "polygon: {:?} (k = {}, m = {}, n = {})\n",
                p.weights(),
                p.k(),
                p.m(),
                p.n()
            );
            let csv = format!("polygon,\"{:?}\"\n", p.weights());
            Ok(render(opts.format, json, text, csv))
        }
        ConvertTarget::Table => {
            let t = table_of(spec)?;
            let json = serde_json::to_value(&t).expect("serializable");
            let a: Vec<String> = t.a().iter().map(|r| r.to_string()).collect();
            let b: Vec<String> = t.b().iter().map(|r| r.to_string()).collect();
            let text = format!("vertical lines:   {a:?}\nhorizontal lines: {b:?}\ncut line: x + y = 1\n");
            let csv = format!("a,\"{}\"\nb,\"{}\"\n", a.join(" "), b.join(" "));
            Ok(render(opts.format, json!({ "table": json }), text, csv))
        }
        ConvertTarget::Complex => {
            let k = match spec {
                FamilySpec::Table { .. } => table_vertices(&spec.table()?)?,
                other => other.build()?,
            };
            let json = serde_json::to_value(&k).expect("serializable");
            let mut text = format!("m: {}\nmaximal faces ({}):", k.m(), k.maximal_faces().len());
            for f in k.maximal_faces() {
                text += &format!(" {f:?}");
            }
            text.push('\n');
            let mut csv = String::from("maximal_face\n");
            for f in k.maximal_faces() {
                csv += &format!("\"{f:?}\"\n");
            }
            Ok(render(opts.format, json, text, csv))
        }
    }
}
