//! `katetov`: command-line front end for the library.
//!
//! Exit status: 0 when the verdict is true or the command succeeded, 1 when
//! the verdict is false (the witness is printed), 2 on usage or resource
//! errors.

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use katetov::four_values::{amalgamate, bad_quadruples, check_four_values, similar};
use katetov::katetov::{extend_with, is_katetov, urysohn_approx, GrowthRule, UrysohnConfig, DEFAULT_POINT_LIMIT};
use katetov::partitions::milliken::{coding_search, MillikenSpace, MAX_DEPTH};
use katetov::partitions::{
    annulus_lemma_check, coding_embed, divisibility_coloring, greedy_monochromatic, hedgehog_build, hedgehog_verify,
    indivisibility_search, lambda_epsilon, CodingOutcome, CodingTable, Coloring, MillikenVariant, NetSystem,
    SearchMode, EXHAUSTIVE_COLORING_BUDGET,
};
use katetov::ramsey::{
    count_orderings, critical_distances, ramsey_degree_general, ramsey_degree_metric_ordered, verify_arrow,
    verify_ordering_property_witness, OrderedSpace, OrderingClass,
};
use katetov::spaces::format::{parse_graph, parse_space, space_to_json, space_to_text};
use katetov::spaces::{canonicalize, complete, copies, isometries, validate, CompletionMode, ValidationMode};
use katetov::ultrametric::{big_ramsey_degree, fichet_embedding, ramsey_degree_ultrametric, tree_of_space};
use katetov::{DistanceSet, Error, FiniteMetricSpace, LinearOrdering, PointMap, Rational};

#[derive(Parser)]
#[command(name = "katetov", version, about = "Exact combinatorics of finite metric spaces")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled modes and the Urysohn builder.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the 4-values condition for a distance set.
    Check4v { set: Vec<String> },
    /// List the bad quadruples of a distance set with their swap resolutions.
    Badquads { set: Vec<String> },
    /// Decide S ~ T (same triangle pattern): `similar S.. -- T..`.
    Similar {
        set: Vec<String>,
        #[arg(last = true)]
        other: Vec<String>,
    },
    /// Strong amalgamation of two S-valued spaces over common points.
    Amalgamate {
        y0: String,
        y1: String,
        /// Distance set S.
        #[arg(long, num_args = 1.., required = true)]
        set: Vec<String>,
        /// Images of the common points in y0, comma separated.
        #[arg(long)]
        e0: String,
        /// Images of the common points in y1, comma separated.
        #[arg(long)]
        e1: String,
    },
    /// Check an edge-labelled graph for the (ultra)metric or l-metric property.
    Validate {
        graph: String,
        #[arg(long)]
        ultra: bool,
        /// Check paths of at most this many vertices instead.
        #[arg(long, conflicts_with = "ultra")]
        l_metric: Option<usize>,
    },
    /// Complete a connected labelled graph to a metric.
    Complete {
        graph: String,
        /// Truncate path lengths at this value.
        #[arg(long)]
        cap: Option<String>,
        /// Max-path completion (ultrametric).
        #[arg(long, conflicts_with = "cap")]
        max: bool,
    },
    /// Isometry group and canonical form of a space.
    Iso { space: String },
    /// Subsets of Y isometric to X.
    Copies { y: String, x: String },
    /// Decide whether per-point values form a Katetov map.
    Katetov { space: String, values: Vec<String> },
    /// Add a point realizing a Katetov map.
    Extend { space: String, values: Vec<String> },
    /// Finite approximation of the Urysohn space over S.
    Urysohn {
        set: Vec<String>,
        /// Realize every map over fewer than this many points.
        #[arg(long)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_POINT_LIMIT)]
        limit: usize,
        /// Always take the least admissible distance.
        #[arg(long)]
        least: bool,
    },
    /// Ultrametric trees and degrees.
    Ultra {
        #[command(subcommand)]
        op: UltraOp,
    },
    /// Ramsey degree as admissible orderings over isometries.
    Degree {
        space: String,
        /// Count metric orderings for this distance set.
        #[arg(long, num_args = 1..)]
        metric_orderings: Option<Vec<String>>,
        /// Count convex orderings.
        #[arg(long, conflicts_with = "metric_orderings")]
        convex: bool,
    },
    /// Critical distances of a distance set.
    Criticals { set: Vec<String> },
    /// Decide Z -> (Y)^X_{k,l}.
    Arrow {
        z: String,
        y: String,
        x: String,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
    },
    /// Decide whether every admissible ordering of Y contains an ordered copy of X.
    Orderprop {
        y: String,
        x: String,
        /// Points of X listed in increasing order, comma separated.
        #[arg(long)]
        order: String,
        #[arg(long)]
        convex: bool,
        /// Metric orderings for this distance set.
        #[arg(long, num_args = 1.., conflicts_with = "convex")]
        metric: Option<Vec<String>>,
    },
    /// Colorings and indivisibility experiments.
    Color {
        #[command(subcommand)]
        op: ColorOp,
    },
    /// The hedgehog space over a prefix.
    Hedgehog {
        #[command(subcommand)]
        op: HedgehogOp,
    },
    /// Distance codings on pairs and triples of tree nodes.
    Milliken {
        #[command(subcommand)]
        op: MillikenOp,
    },
}

#[derive(Subcommand)]
enum UltraOp {
    /// The tree of an ultrametric space.
    Tree { space: String },
    /// Ramsey degree |cLO| / |iso|.
    Degree { space: String },
    /// Big Ramsey degree over a distance set.
    Bigdegree {
        space: String,
        #[arg(long, num_args = 1.., required = true)]
        set: Vec<String>,
    },
    /// Exact embedding into l_p.
    Fichet {
        space: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
}

#[derive(Args)]
struct ColoringArg {
    /// Explicit coloring, comma separated.
    #[arg(long, conflicts_with = "random")]
    coloring: Option<String>,
    /// Random coloring drawn from --seed.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 2)]
    k: usize,
}

#[derive(Subcommand)]
enum ColorOp {
    /// Monochromatic copies of TARGET in X under every (or sampled) coloring.
    Indiv {
        x: String,
        target: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Sample this many colorings instead of enumerating all.
        #[arg(long)]
        samples: Option<usize>,
        /// Print one record per coloring.
        #[arg(long)]
        records: bool,
    },
    /// Greedy monochromatic copy with orbit-set switching.
    Greedy {
        x: String,
        target: String,
        #[command(flatten)]
        coloring: ColoringArg,
    },
    /// Annulus two-coloring of a net system.
    Divide {
        x: String,
        #[arg(long)]
        centers: String,
        #[arg(long)]
        radii: String,
    },
    /// Locate a chain point in the annulus band.
    Annulus {
        x: String,
        #[arg(long)]
        center: usize,
        /// Chain points, comma separated, from x to x'.
        #[arg(long)]
        chain: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: String,
    },
    /// Reach of eps-chains through a point.
    Lambda {
        x: String,
        #[arg(long)]
        point: usize,
        #[arg(long)]
        eps: String,
    },
}

#[derive(Args)]
struct HedgehogArgs {
    prefix: String,
    #[arg(long)]
    m: u32,
    /// Largest tree node; defaults to the prefix size.
    #[arg(long)]
    max_tree_size: Option<usize>,
}

#[derive(Subcommand)]
enum HedgehogOp {
    /// Build Z and print its size and labelling.
    Build {
        #[command(flatten)]
        args: HedgehogArgs,
    },
    /// Build Z and run the label, cycle and branch checks.
    Verify {
        #[command(flatten)]
        args: HedgehogArgs,
        /// Overwrite labelled pair number I with value V before checking: I=V.
        #[arg(long)]
        tamper: Option<String>,
    },
}

#[derive(Subcommand)]
enum MillikenOp {
    /// Build a coding and scan all triangles.
    Build {
        variant: String,
        #[arg(long)]
        depth: usize,
        /// Use this case table instead of the bundled one.
        #[arg(long)]
        table: Option<String>,
    },
    /// Embed a space by the greedy construction.
    Embed {
        variant: String,
        target: String,
        #[arg(long)]
        depth: usize,
        /// Backtracking search over the embedding set instead.
        #[arg(long)]
        search: bool,
    },
}

/// What a command produced: text, the same data as JSON, and a verdict.
struct Report {
    text: String,
    json: Value,
    verdict: bool,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, verdict: true }
    }

    fn verdict(verdict: bool, text: String, json: Value) -> Report {
        Report { text, json, verdict }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn read_text(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
    }
}

fn read_space(path: &str) -> Result<FiniteMetricSpace, Error> {
    parse_space(&read_text(path)?)
}

fn rational(tok: &str) -> Result<Rational, Error> {
    tok.parse()
}

fn rationals(tokens: &[String]) -> Result<Vec<Rational>, Error> {
    tokens.iter().map(|t| rational(t)).collect()
}

fn set_of(tokens: &[String]) -> Result<DistanceSet, Error> {
    if tokens.is_empty() {
        return Err(usage("a distance set needs at least one value"));
    }
    DistanceSet::new(rationals(tokens)?)
}

fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn set_text(s: &DistanceSet) -> String {
    let v: Vec<String> = s.values().iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn space_json(x: &FiniteMetricSpace) -> Value {
    serde_json::to_value(space_to_json(x)).expect("matrix serializes")
}

fn run(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Check4v { set } => {
            let s = set_of(set)?;
            let v = check_four_values(&s)?;
            let text = match v.witness {
                None => format!("{} satisfies the 4-values condition\n", set_text(&s)),
                Some(w) => format!("bad quadruple {w}\n"),
            };
            Ok(Report::verdict(v.holds, text, json!({ "set": s.values(), "holds": v.holds, "witness": v.witness })))
        }
        Command::Badquads { set } => {
            let s = set_of(set)?;
            let table = bad_quadruples(&s)?;
            Ok(Report::ok(table.to_text(), serde_json::to_value(&table).expect("table serializes")))
        }
        Command::Similar { set, other } => {
            let (s, t) = (set_of(set)?, set_of(other)?);
            let v = similar(&s, &t)?;
            let text = format!("{} {} {}\n", set_text(&s), if v { "~" } else { "!~" }, set_text(&t));
            Ok(Report::verdict(v, text, json!({ "similar": v })))
        }
        Command::Amalgamate { y0, y1, set, e0, e1 } => {
            let s = set_of(set)?;
            let (a, b) = (read_space(y0)?, read_space(y1)?);
            let (m0, m1) = (PointMap::new(list(e0, "embedding")?)?, PointMap::new(list(e1, "embedding")?)?);
            let am = amalgamate(&s, &a, &b, &m0, &m1)?;
            let text = format!("{}# y1 -> {}\n", space_to_text(&am.space), join(am.y1_embedding.as_slice(), ","));
            Ok(Report::ok(text, json!({ "space": space_json(&am.space), "y1Embedding": am.y1_embedding.as_slice() })))
        }
        Command::Validate { graph, ultra, l_metric } => {
            let g = parse_graph(&read_text(graph)?)?;
            let mode = match (ultra, l_metric) {
                (true, _) => ValidationMode::Ultrametric,
                (false, Some(l)) => ValidationMode::LMetric(*l),
                (false, None) => ValidationMode::Metric,
            };
            let v = validate(&g, mode)?;
            let text = match &v.witness {
                None => "valid\n".to_string(),
                Some(w) => format!("violation {}\n", serde_json::to_string(w).expect("violation serializes")),
            };
            Ok(Report::verdict(v.ok, text, serde_json::to_value(&v).expect("validation serializes")))
        }
        Command::Complete { graph, cap, max } => {
            let g = parse_graph(&read_text(graph)?)?;
            let mode = if *max {
                CompletionMode::Max
            } else {
                CompletionMode::Sum { cap: cap.as_deref().map(rational).transpose()? }
            };
            let x = complete(&g, mode)?;
            Ok(Report::ok(space_to_text(&x), space_json(&x)))
        }
        Command::Iso { space } => {
            let x = read_space(space)?;
            let iso = isometries(&x)?;
            let canon = canonicalize(&x)?;
            let mut text = format!("isometries: {}\n", iso.order());
            for p in &iso.perms {
                text.push_str(&format!("  {}\n", join(p, " ")));
            }
            let canonical = x.relabel(&canon.relabel);
            text.push_str(&format!("canonical relabelling: {}\n", join(&canon.relabel, " ")));
            text.push_str(&space_to_text(&canonical));
            Ok(Report::ok(
                text,
                json!({ "order": iso.order(), "perms": iso.perms, "relabelling": canon.relabel, "canonical": space_json(&canonical) }),
            ))
        }
        Command::Copies { y, x } => {
            let (y, x) = (read_space(y)?, read_space(x)?);
            let found = copies(&y, &x)?;
            let mut text = format!("copies: {}\n", found.len());
            for c in &found {
                text.push_str(&format!("  {}\n", join(c, " ")));
            }
            Ok(Report::ok(text, json!({ "count": found.len(), "copies": found })))
        }
        Command::Katetov { space, values } => {
            let x = read_space(space)?;
            let v = is_katetov(&x, &rationals(values)?)?;
            let text = match v.witness {
                None => "katetov\n".to_string(),
                Some((i, j)) => format!("not katetov: pair ({i},{j})\n"),
            };
            Ok(Report::verdict(v.ok, text, serde_json::to_value(&v).expect("check serializes")))
        }
        Command::Extend { space, values } => {
            let x = read_space(space)?;
            let y = extend_with(&x, &rationals(values)?)?;
            Ok(Report::ok(space_to_text(&y), space_json(&y)))
        }
        Command::Urysohn { set, cap, limit, least } => {
            let s = set_of(set)?;
            let rule = if *least { GrowthRule::Least } else { GrowthRule::Seeded(cli.seed) };
            let u = urysohn_approx(&s, UrysohnConfig { size_cap: *cap, point_limit: *limit, rule })?;
            let mut text = space_to_text(&u.space);
            for line in u.provenance_text().lines() {
                text.push_str(&format!("# {line}\n"));
            }
            Ok(Report::ok(text, json!({ "space": space_json(&u.space), "provenance": u.provenance })))
        }
        Command::Ultra { op } => run_ultra(op),
        Command::Degree { space, metric_orderings, convex } => {
            let x = read_space(space)?;
            let (class, record) = match metric_orderings {
                Some(set) => ("mLO", ramsey_degree_metric_ordered(&x, &set_of(set)?)?),
                None if *convex => {
                    let iso = isometries(&x)?.order() as u128;
                    (
                        "cLO",
                        katetov::ultrametric::DegreeRecord::from_counts(
                            count_orderings(&x, &OrderingClass::Convex)?,
                            iso,
                        )?,
                    )
                }
                None => ("LO", ramsey_degree_general(&x)?),
            };
            let text = format!(
                "space | {class} | iso | degree\n{space} | {} | {} | {}\n",
                record.orderings, record.iso, record.degree
            );
            Ok(Report::ok(
                text,
                json!({ "space": space, "class": class, "orderings": record.orderings, "iso": record.iso, "degree": record.degree }),
            ))
        }
        Command::Criticals { set } => {
            let s = set_of(set)?;
            let c = critical_distances(&s)?;
            Ok(Report::ok(
                format!("critical distances of {}: {}\n", set_text(&s), join(&c, " ")),
                json!({ "criticals": c }),
            ))
        }
        Command::Arrow { z, y, x, colors, l } => {
            let (z, y, x) = (read_space(z)?, read_space(y)?, read_space(x)?);
            let v = verify_arrow(&z, &y, &x, *colors, *l)?;
            let text = match &v.counterexample {
                None => format!("arrow holds ({} colorings checked)\n", v.colorings_checked),
                Some(c) => format!("arrow fails: coloring {}\n", join(c, " ")),
            };
            Ok(Report::verdict(v.holds, text, serde_json::to_value(&v).expect("verdict serializes")))
        }
        Command::Orderprop { y, x, order, convex, metric } => {
            let (y, x) = (read_space(y)?, read_space(x)?);
            let class = match metric {
                Some(set) => OrderingClass::Metric(set_of(set)?),
                None if *convex => OrderingClass::Convex,
                None => OrderingClass::All,
            };
            let xo = OrderedSpace::new(x, LinearOrdering::from_sequence(&list::<usize>(order, "order")?)?)?;
            let v = verify_ordering_property_witness(&y, &xo, &class)?;
            let text = match &v.failing_ordering {
                None => format!("ordering property holds ({} orderings checked)\n", v.orderings_checked),
                Some(o) => format!("fails for ordering {}\n", join(&o.sequence(), " ")),
            };
            Ok(Report::verdict(v.holds, text, serde_json::to_value(&v).expect("verdict serializes")))
        }
        Command::Color { op } => run_color(op, cli.seed),
        Command::Hedgehog { op } => run_hedgehog(op),
        Command::Milliken { op } => run_milliken(op),
    }
}

fn run_ultra(op: &UltraOp) -> Result<Report, Error> {
    match op {
        UltraOp::Tree { space } => {
            let t = tree_of_space(&read_space(space)?)?;
            Ok(Report::ok(t.to_text(), json!({ "text": t.to_text(), "levels": t.levels(), "height": t.height() })))
        }
        UltraOp::Degree { space } => {
            let d = ramsey_degree_ultrametric(&read_space(space)?)?;
            let r = d.record;
            let text = format!("space | cLO | iso | degree\n{space} | {} | {} | {}\n", r.orderings, r.iso, r.degree);
            Ok(Report::ok(text, serde_json::to_value(d).expect("degree serializes")))
        }
        UltraOp::Bigdegree { space, set } => {
            let n = big_ramsey_degree(&read_space(space)?, &set_of(set)?)?;
            Ok(Report::ok(format!("big degree: {n}\n"), json!({ "bigDegree": n })))
        }
        UltraOp::Fichet { space, p } => {
            let (_, rep) = fichet_embedding(&read_space(space)?, *p)?;
            let text = format!(
                "p = {}, dimension {} (bound {}), {} pairs checked, {}\n",
                rep.p,
                rep.dimension,
                rep.dimension_bound,
                rep.pairs_checked,
                if rep.ok { "exact" } else { "MISMATCH" }
            );
            Ok(Report::verdict(rep.ok, text, serde_json::to_value(&rep).expect("report serializes")))
        }
    }
}

fn coloring_from(arg: &ColoringArg, n: usize, seed: u64) -> Result<Coloring, Error> {
    match (&arg.coloring, arg.random) {
        (Some(c), _) => {
            let colors: Vec<usize> = list(c, "color")?;
            if colors.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: colors.len() });
            }
            Coloring::new(colors, arg.k)
        }
        (None, true) => {
            use rand::SeedableRng;
            Coloring::random(n, arg.k, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
        }
        (None, false) => Err(usage("give --coloring c0,c1,.. or --random")),
    }
}

fn run_color(op: &ColorOp, seed: u64) -> Result<Report, Error> {
    match op {
        ColorOp::Indiv { x, target, k, samples, records } => {
            let (x, t) = (read_space(x)?, read_space(target)?);
            let mode = match samples {
                Some(n) => SearchMode::Sampled { samples: *n, seed },
                None => SearchMode::Exhaustive { budget: EXHAUSTIVE_COLORING_BUDGET },
            };
            let mut lines = String::new();
            let mut recs = Vec::new();
            let summary = indivisibility_search(&x, &t, *k, mode, &mut |o| {
                if *records {
                    let copy = o.copy_indices.as_ref().map_or("-".to_string(), |c| join(c, " "));
                    let color = o.color.map_or("-".to_string(), |c| c.to_string());
                    lines.push_str(&format!("{} found={} copy={copy} color={color}\n", join(&o.coloring, ""), o.found));
                    recs.push(serde_json::to_value(o).expect("record serializes"));
                }
            })?;
            let mut text = lines;
            text.push_str(&format!(
                "colorings {} monochromatic {}\n",
                summary.colorings_examined, summary.monochromatic
            ));
            if let Some(f) = &summary.first_failure {
                text.push_str(&format!("no monochromatic copy under {}\n", join(&f.coloring, " ")));
            }
            Ok(Report::verdict(summary.all_found(), text, json!({ "summary": summary, "records": recs })))
        }
        ColorOp::Greedy { x, target, coloring } => {
            let (x, t) = (read_space(x)?, read_space(target)?);
            let chi = coloring_from(coloring, x.len(), seed)?;
            let out = greedy_monochromatic(&x, &chi, &t)?;
            let mut text = format!(
                "{} copy of {} points in color {}: {}\n",
                if out.full { "full" } else { "partial" },
                out.copy.len(),
                out.color,
                join(&out.copy, " ")
            );
            for ob in &out.obstructions {
                text.push_str(&format!(
                    "obstruction: color {} absent from orbit set {{{}}} at step {}\n",
                    ob.color,
                    join(&ob.orbit, ","),
                    ob.step
                ));
            }
            Ok(Report::verdict(out.full, text, serde_json::to_value(&out).expect("outcome serializes")))
        }
        ColorOp::Divide { x, centers, radii } => {
            let x = read_space(x)?;
            let net = NetSystem::new(&x, list(centers, "center")?, list(radii, "radius")?)?;
            let chi = divisibility_coloring(&x, &net)?;
            Ok(Report::ok(format!("{}\n", join(chi.colors(), " ")), json!({ "coloring": chi.colors() })))
        }
        ColorOp::Annulus { x, center, chain, r, n, eps } => {
            let x = read_space(x)?;
            let chain: Vec<usize> = list(chain, "chain")?;
            let i = annulus_lemma_check(&x, *center, &chain, rational(r)?, *n, rational(eps)?)?;
            Ok(Report::ok(
                format!("band point: chain index {i} (point {})\n", chain[i]),
                json!({ "index": i, "point": chain[i] }),
            ))
        }
        ColorOp::Lambda { x, point, eps } => {
            let l = lambda_epsilon(&read_space(x)?, *point, rational(eps)?)?;
            Ok(Report::ok(format!("{l}\n"), json!({ "lambda": l })))
        }
    }
}

fn run_hedgehog(op: &HedgehogOp) -> Result<Report, Error> {
    let build = |a: &HedgehogArgs| -> Result<_, Error> {
        let p = read_space(&a.prefix)?;
        let size = a.max_tree_size.unwrap_or(p.len());
        hedgehog_build(a.m, &p, size)
    };
    match op {
        HedgehogOp::Build { args } => {
            let z = build(args)?;
            let mut text = format!(
                "points {} (prefix {}, tree {}), labelled pairs {}\n",
                z.len(),
                z.base_len(),
                z.tree.len(),
                z.delta.len()
            );
            for (i, t) in z.tree.iter().enumerate() {
                text.push_str(&format!("t{} = {{{}}}\n", z.base_len() + i, join(t, ",")));
            }
            let delta: Vec<Value> = z.delta.iter().map(|(a, b, l)| json!([a, b, l])).collect();
            Ok(Report::ok(text, json!({ "points": z.len(), "tree": z.tree, "delta": delta, "dz": space_json(&z.dz) })))
        }
        HedgehogOp::Verify { args, tamper } => {
            let mut z = build(args)?;
            if let Some(t) = tamper {
                let (i, v) = t.split_once('=').ok_or_else(|| usage("--tamper expects I=V"))?;
                let i: usize = i.parse().map_err(|_| usage("--tamper index"))?;
                let entry = z.delta.get_mut(i).ok_or_else(|| usage(format!("no labelled pair {i}")))?;
                entry.2 = rational(v)?;
            }
            let r = hedgehog_verify(&z)?;
            let mut text = format!(
                "cycles checked {}, branches verified {}, violations {}, unexpected shapes {}\n",
                r.cycles_checked,
                r.branches_verified,
                r.violations.len(),
                r.unexpected_shapes.len()
            );
            for v in &r.violations {
                text.push_str(&format!("violation {}\n", serde_json::to_string(v).expect("violation serializes")));
            }
            Ok(Report::verdict(r.ok(), text, serde_json::to_value(&r).expect("report serializes")))
        }
    }
}

fn run_milliken(op: &MillikenOp) -> Result<Report, Error> {
    match op {
        MillikenOp::Build { variant, depth, table } => {
            let table = match table {
                Some(path) => CodingTable::parse(&read_text(path)?)?,
                None => variant.parse::<MillikenVariant>()?.table(),
            };
            let space = MillikenSpace::build(table, *depth)?;
            let v = space.check_metric()?;
            let text = match v.witness {
                None => format!("{} depth {}: {} points, metric\n", v.variant, v.depth, v.points),
                Some((q, p, r)) => format!(
                    "{} depth {}: {} points, not metric: d({},{}) = {} > d({},{}) + d({},{}) = {} + {}\n",
                    v.variant,
                    v.depth,
                    v.points,
                    space.point_text(q),
                    space.point_text(r),
                    space.dist(q, r)?,
                    space.point_text(q),
                    space.point_text(p),
                    space.point_text(p),
                    space.point_text(r),
                    space.dist(q, p)?,
                    space.dist(p, r)?
                ),
            };
            Ok(Report::verdict(v.metric, text, serde_json::to_value(&v).expect("verdict serializes")))
        }
        MillikenOp::Embed { variant, target, depth, search } => {
            let v: MillikenVariant = variant.parse()?;
            let t = read_space(target)?;
            if *search {
                if *depth > MAX_DEPTH {
                    return Err(Error::Precondition(format!("depth {depth} exceeds {MAX_DEPTH}")));
                }
                let space = MillikenSpace::build(v.table(), *depth)?;
                let found = coding_search(&space, &t)?;
                let text = match &found {
                    Some(idx) => format!(
                        "embedded: {}\n",
                        idx.iter().map(|&p| space.point_text(p)).collect::<Vec<_>>().join(" ")
                    ),
                    None => format!("no embedding at depth {depth}\n"),
                };
                let strings: Option<Vec<String>> =
                    found.as_ref().map(|idx| idx.iter().map(|&p| space.point_text(p)).collect());
                return Ok(Report::verdict(found.is_some(), text, json!({ "indices": found, "points": strings })));
            }
            let out = coding_embed(v, *depth, &t)?;
            let (ok, text) = match &out {
                CodingOutcome::Embedded(e) => (
                    true,
                    format!(
                        "embedded (height {}): {}\n",
                        e.needed_depth,
                        e.strings.iter().map(|s| format!("{{{}}}", s.join(","))).collect::<Vec<_>>().join(" ")
                    ),
                ),
                CodingOutcome::DepthExhausted { depth, needed } => {
                    (false, format!("depth exhausted: greedy construction needs depth {needed}, have {depth}\n"))
                }
            };
            Ok(Report::verdict(ok, text, serde_json::to_value(&out).expect("outcome serializes")))
        }
    }
}

/// Library errors that are a negative answer rather than a failure to run.
fn is_verdict(e: &Error) -> bool {
    matches!(
        e,
        Error::NotMetric(_)
            | Error::NotKatetov(..)
            | Error::FourValuesFailure(_)
            | Error::NotUltrametric(_)
            | Error::RealizedByExistingPoint(_)
            | Error::CapBelowLabel { .. }
            | Error::Disconnected(..)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&r.json).expect("json renders"));
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(if r.verdict { 0 } else { 1 })
        }
        Err(e) if is_verdict(&e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                println!("{e}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
