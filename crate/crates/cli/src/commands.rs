use std::path::Path;

use ksets_core::datagen::{gen_sbm, gen_two_rings, sbm_rates, sbm_threshold, RingsConfig};
use ksets_core::io::{write_edge_list, write_labels, write_matrix, write_points};
use ksets_core::{
    cohesion_matrix, dual_distance, epsilon_graph, euclidean_distance, geodesic_distance,
    geodesic_distance_filled, modularity, nmi, normalized_modularity, resistance_distance,
    run_dual_ksets, run_hierarchical_forced, run_ksets, theorem1_statements, validate_cohesion,
    validate_metric, CohesionMatrix, DistanceMatrix, Graph, Init, MergePolicy, Partition, PointSet,
    Unreachable,
};
use serde_json::json;

use crate::files::{
    load_cohesion, load_distance, load_graph, load_labels, load_matrix, load_points, write_to,
};
use crate::report::Report;
use crate::*;

/// Largest `n` for which `verify theorem1` enumerates every subset.
const MAX_ENUMERATED: usize = 16;

// ------------------------------------------------------------------ gen

pub fn gen(cmd: GenCommand) -> CliResult {
    match cmd {
        GenCommand::Rings(a) => {
            let cfg = RingsConfig {
                n_outer: a.n_outer,
                n_inner: a.n_inner,
                r_outer: a.r_outer,
                r_inner: a.r_inner,
            };
            let ds = gen_two_rings(&cfg, a.seed)?;
            write_to(&a.output, |w| write_points(w, &ds.data, &ds.labels))
        }
        GenCommand::Sbm(a) => {
            let (c_in, c_out) = match (a.c_in, a.c_out) {
                (Some(i), Some(o)) => (i, o),
                _ => sbm_rates(a.q, a.mean_degree, a.gap)?,
            };
            let ds = gen_sbm(a.n, a.q, c_in, c_out, a.seed)?;
            eprintln!(
                "sbm: c_in = {c_in}, c_out = {c_out} (threshold {:.3}), {} of {} nodes kept, {} edges",
                sbm_threshold(a.q, a.mean_degree),
                ds.data.n(),
                a.n,
                ds.data.edge_count()
            );
            write_to(&a.output, |w| write_edge_list(w, &ds.data))?;
            if let Some(path) = &a.labels {
                write_to(path, |w| write_labels(w, &ds.labels))?;
            }
            Ok(())
        }
    }
}

// ------------------------------------------------------------------ dist

fn build_graph(a: &GraphDistArgs) -> CliResult<Graph> {
    let g = match &a.edges {
        Some(path) => load_graph(path)?,
        None => {
            let eps = a
                .eps
                .ok_or_else(|| Failure::Usage("--eps is required when reading points".into()))?;
            let (points, _) = load_points(&a.input)?;
            epsilon_graph(&points, eps)?
        }
    };
    let (g, keep) = if a.largest_component {
        g.largest_component()
    } else {
        let n = g.n();
        (g, (0..n).collect())
    };
    if let Some(path) = &a.kept {
        write_to(path, |w| write_labels(w, &keep))?;
    }
    Ok(g)
}

pub fn dist(cmd: DistCommand) -> CliResult {
    let (d, output) = match cmd {
        DistCommand::Geodesic(a) => {
            let g = build_graph(&a)?;
            let d = match a.unreachable {
                UnreachableArg::Error => geodesic_distance(&g)?,
                UnreachableArg::Value(v) => geodesic_distance_filled(&g, Unreachable::Value(v))?,
                UnreachableArg::Auto if g.is_connected() => geodesic_distance(&g)?,
                UnreachableArg::Auto => {
                    let d = geodesic_distance_filled(&g, Unreachable::Auto)?;
                    let parts = g.components().into_iter().max().map_or(0, |c| c + 1);
                    eprintln!(
                        "note: graph has {parts} components; unreachable pairs set to {}",
                        d.max_entry()
                    );
                    d
                }
            };
            (d, a.output)
        }
        DistCommand::Resistance(a) => {
            let g = build_graph(&a)?;
            let d = resistance_distance(&g).map_err(|e| match e {
                ksets_core::Error::Disconnected { .. } => {
                    Failure::Data(format!("{e} (try --largest-component)"))
                }
                e => e.into(),
            })?;
            (d, a.output)
        }
        DistCommand::Euclidean(a) => {
            let (points, _) = load_points(&a.input)?;
            (euclidean_distance(&points)?, a.output)
        }
    };
    write_to(&output, |w| write_matrix(w, d.matrix()))
}

// ------------------------------------------------------------------ cluster

fn truth_nmi(truth: Option<&Path>, labels: &[usize]) -> CliResult<Option<f64>> {
    let Some(path) = truth else { return Ok(None) };
    let t = load_labels(path)?;
    if t.len() != labels.len() {
        return Err(Failure::Data(format!(
            "{}: {} labels for {} points",
            path.display(),
            t.len(),
            labels.len()
        )));
    }
    Ok(Some(nmi(labels, &t)?))
}

fn set_sizes(p: &Partition) -> Vec<usize> {
    p.sets().iter().map(PointSet::len).collect()
}

fn fmt_nmi(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!(", NMI = {v}"))
}

pub fn cluster(cmd: ClusterCommand) -> CliResult {
    match cmd {
        ClusterCommand::Hier(a) => hier(a),
        ClusterCommand::Ksets(a) => ksets(a, false),
        ClusterCommand::DualKsets(a) => ksets(a, true),
    }
}

fn hier(a: HierArgs) -> CliResult {
    let mut report = Report::new("cluster hier", &a);
    let kind = a.io.kind.unwrap_or(MatrixKind::Distance);
    let g = load_cohesion(&a.io.input, kind)?;
    let policy = match a.policy {
        PolicyArg::Greedy => MergePolicy::GreedyMax,
        PolicyArg::FirstFound => MergePolicy::FirstFound,
    };
    let tree = run_hierarchical_forced(&g, policy, a.forced_merges);
    let p = tree.partition();
    let labels = p.assignment().to_vec();
    let q = modularity(&g, &p)?;
    let score = truth_nmi(a.io.truth.as_deref(), &labels)?;

    let events: Vec<_> = tree
        .events
        .iter()
        .map(|e| json!({"left": e.left, "right": e.right, "merged": e.merged, "cohesion": e.cohesion, "forced": e.forced}))
        .collect();
    report.set("n", g.n());
    report.set("merges", tree.natural_events().count());
    report.set("events", events);
    report.set("sets", p.k());
    report.set("set_sizes", set_sizes(&p));
    report.set("labels", &labels);
    report.set("Q", q);
    report.set("R", normalized_modularity(&g, &p)?);
    report.set("NMI", score);
    if a.forced_merges > 0 {
        let fp = tree.forced_partition();
        report.set("forced_labels", fp.assignment());
        report.set("forced_Q", modularity(&g, &fp)?);
        report.set(
            "forced_NMI",
            truth_nmi(a.io.truth.as_deref(), fp.assignment())?,
        );
    }
    eprintln!(
        "hier: {} merges, {} sets, Q = {q}{}",
        tree.natural_events().count(),
        p.k(),
        fmt_nmi(score)
    );
    if let Some(path) = &a.tree {
        let text = tree.to_text();
        write_to(path, |w| Ok(w.write_all(text.as_bytes())?))?;
    }
    write_to(&a.io.output, |w| write_labels(w, &labels))?;
    report.write(a.io.report.as_deref())
}

fn ksets(a: KsetsArgs, dual: bool) -> CliResult {
    let name = if dual {
        "cluster dual-ksets"
    } else {
        "cluster ksets"
    };
    let mut report = Report::new(name, &a);
    let default_kind = if dual {
        MatrixKind::Cohesion
    } else {
        MatrixKind::Distance
    };
    let kind = a.io.kind.unwrap_or(default_kind);
    let (d, g): (Option<DistanceMatrix>, CohesionMatrix) = match (dual, kind) {
        (false, MatrixKind::Distance) => {
            let d = load_distance(&a.io.input)?;
            let g = cohesion_matrix(&d);
            (Some(d), g)
        }
        (false, MatrixKind::Cohesion) => {
            let g = load_cohesion(&a.io.input, kind)?;
            (Some(dual_distance(&g)?), g)
        }
        (true, _) => (None, load_cohesion(&a.io.input, kind)?),
    };
    let n = g.n();
    if a.k < 2 || a.k > n {
        return Err(Failure::Usage(format!(
            "--k {} must satisfy 2 <= K <= n = {n}",
            a.k
        )));
    }
    let init = match &a.init {
        Some(path) => {
            let labels = load_labels(path)?;
            if labels.len() != n {
                return Err(Failure::Data(format!(
                    "{}: {} labels for {n} points",
                    path.display(),
                    labels.len()
                )));
            }
            Init::Partition(Partition::from_labels(&labels)?)
        }
        None => Init::Seed(a.seed),
    };
    let run = match &d {
        Some(d) => run_ksets(d, a.k, init, a.max_passes)?,
        None => run_dual_ksets(&g, a.k, init, a.max_passes)?,
    };
    let labels = run.partition.assignment().to_vec();
    let q = modularity(&g, &run.partition)?;
    let score = truth_nmi(a.io.truth.as_deref(), &labels)?;
    let skipped = run.history.iter().filter(|m| m.skipped).count();

    report.set("n", n);
    report.set("k", a.k);
    report.set("passes", run.passes);
    report.set("converged", run.converged);
    report.set("moves", run.move_count());
    report.set("skipped_moves", skipped);
    report.set("R", run.final_r());
    report.set("R_trace", &run.r_trace);
    report.set("Q", q);
    report.set("NMI", score);
    report.set("set_sizes", set_sizes(&run.partition));
    report.set("labels", &labels);
    eprintln!(
        "{}: K = {}, {} passes{}, {} moves, R = {}, Q = {q}{}",
        if dual { "dual-ksets" } else { "ksets" },
        a.k,
        run.passes,
        if run.converged {
            ""
        } else {
            " (not converged)"
        },
        run.move_count(),
        run.final_r(),
        fmt_nmi(score)
    );
    write_to(&a.io.output, |w| write_labels(w, &labels))?;
    report.write(a.io.report.as_deref())
}

// ------------------------------------------------------------------ verify

fn scaled(tol: f64, magnitude: f64) -> f64 {
    tol * magnitude.max(1.0)
}

pub fn verify(cmd: VerifyCommand) -> CliResult {
    match cmd {
        VerifyCommand::Metric(a) => {
            let report = validate_metric(&load_matrix(&a.input)?);
            println!("metric: {report}");
            if !report.is_valid() {
                return Err(Failure::Verify(report.to_string()));
            }
        }
        VerifyCommand::Cohesion(a) => {
            let report = validate_cohesion(&load_matrix(&a.input)?);
            println!("cohesion: {report}");
            if !report.is_valid() {
                return Err(Failure::Verify(report.to_string()));
            }
        }
        VerifyCommand::Duality(a) => duality(a)?,
        VerifyCommand::Theorem1(a) => statements(a)?,
    }
    Ok(())
}

fn duality(a: VerifyArgs) -> CliResult {
    let m = load_matrix(&a.input)?;
    let (axioms, first, second) = match a.kind {
        MatrixKind::Distance => {
            let axioms = validate_metric(&m);
            let d = DistanceMatrix::new(m)?;
            let g = cohesion_matrix(&d);
            let d2 = dual_distance(&g)?;
            let g2 = cohesion_matrix(&d2);
            let tol = scaled(1e-9, d.max_entry());
            println!("max |d** - d| = {:e}", d2.matrix().max_abs_diff(d.matrix()));
            println!("max |g** - g| = {:e}", g2.matrix().max_abs_diff(g.matrix()));
            (
                axioms,
                (d2.matrix().max_abs_diff(d.matrix()), tol),
                (
                    g2.matrix().max_abs_diff(g.matrix()),
                    scaled(1e-9, g.max_abs()),
                ),
            )
        }
        MatrixKind::Cohesion => {
            let axioms = validate_cohesion(&m);
            let g = CohesionMatrix::new(m)?;
            let d = dual_distance(&g)?;
            let g2 = cohesion_matrix(&d);
            let d2 = dual_distance(&g2)?;
            println!("max |g** - g| = {:e}", g2.matrix().max_abs_diff(g.matrix()));
            println!("max |d** - d| = {:e}", d2.matrix().max_abs_diff(d.matrix()));
            (
                axioms,
                (
                    g2.matrix().max_abs_diff(g.matrix()),
                    scaled(1e-9, g.max_abs()),
                ),
                (
                    d2.matrix().max_abs_diff(d.matrix()),
                    scaled(1e-9, d.max_entry()),
                ),
            )
        }
    };
    println!("axioms: {axioms}");
    if !axioms.is_valid() {
        return Err(Failure::Verify(format!("input fails its axioms: {axioms}")));
    }
    for (err, tol) in [first, second] {
        if err.is_nan() || err >= tol {
            return Err(Failure::Verify(format!(
                "round-trip error {err:e} exceeds {tol:e}"
            )));
        }
    }
    println!("duality round trip ok");
    Ok(())
}

fn statements(a: Theorem1Args) -> CliResult {
    let d = load_distance(&a.input)?;
    let n = d.n();
    let sets: Vec<PointSet> = match &a.set {
        Some(members) => vec![PointSet::new(n, members.iter().copied())?],
        None if n > MAX_ENUMERATED => {
            return Err(Failure::Usage(format!(
                "n = {n} is too large to enumerate every subset; pass --set"
            )))
        }
        None => (1u64..(1 << n) - 1)
            .map(|mask| PointSet::new(n, (0..n).filter(|&x| mask >> x & 1 == 1)))
            .collect::<ksets_core::Result<_>>()?,
    };
    let mut clusters = 0;
    for s in &sets {
        let r = theorem1_statements(&d, s)?;
        if !r.unanimous() {
            return Err(Failure::Verify(format!(
                "statements disagree on {s}: {:?}",
                r.statements
            )));
        }
        clusters += r.is_cluster as usize;
    }
    println!(
        "{} set(s) checked, {clusters} cluster(s); all ten statements agree on every set",
        sets.len()
    );
    Ok(())
}

// ------------------------------------------------------------------ score

pub fn score(cmd: ScoreCommand) -> CliResult {
    match cmd {
        ScoreCommand::Nmi(a) => {
            let (x, y) = (load_labels(&a.a)?, load_labels(&a.b)?);
            if x.len() != y.len() {
                return Err(Failure::Data(format!("{} vs {} labels", x.len(), y.len())));
            }
            println!("{}", nmi(&x, &y)?);
        }
        ScoreCommand::Modularity(a) => {
            let g = load_cohesion(&a.input, a.kind)?;
            let labels = load_labels(&a.labels)?;
            if labels.len() != g.n() {
                return Err(Failure::Data(format!(
                    "{} labels for {} points",
                    labels.len(),
                    g.n()
                )));
            }
            let p = Partition::from_labels(&labels)?;
            println!("Q = {}", modularity(&g, &p)?);
            println!("R = {}", normalized_modularity(&g, &p)?);
        }
    }
    Ok(())
}
