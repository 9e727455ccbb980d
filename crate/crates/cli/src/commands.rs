// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::path::Path;

use anyhow::Context;
use overlapnet::gml::load_gml;
use overlapnet::graph::{load_edge_list, parse_community_file, write_community_file};
use overlapnet::metrics::{gnmi, nmi, MetricReport};
use overlapnet::pipeline::{entropy_report, harden, sweep_detailed};
use overlapnet::sbmf::BinaryCover;
use overlapnet::synth::{generate_gn, generate_planted_overlap, GnSpec, OverlapSpec};
use overlapnet::{BinarizeConfig, CommunityCover, Detection, RunConfig};
use serde_json::json;

use crate::output::{digest, parse_soft_csv, read_input, soft_csv, to_json, OutputDir};
use crate::{
    DetectArgs, EntropyArgs, EvalArgs, GenerateArgs, GenerateKind, Metric, OverlapArgs, Preset,
};

pub fn detect(args: &DetectArgs) -> anyhow::Result<()> {
    let text = read_input(&args.input)?;
    let is_gml = args
        .input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gml"));
    let parsed = if is_gml {
        load_gml(&text).map(|net| (net.graph, net.report))
    } else {
        load_edge_list(&text, args.one_based)
    };
    let (graph, load) = parsed.with_context(|| format!("cannot parse {}", args.input.display()))?;
    let mut cfg = RunConfig::new(args.c.unwrap_or(1), args.seed);
    cfg.restarts = args.restarts;
    cfg.iters = args.iters;
    cfg.binarize = BinarizeConfig {
        norm_mode: args.norm,
        penalty_mode: args.penalty,
        ..BinarizeConfig::default()
    };

    let mut out = OutputDir::create(&args.out)?;
    out.write("load.json", &to_json(&load)?)?;
    let detection: Detection = match (args.c, args.sweep) {
        (Some(c), _) => overlapnet::detect(&graph, &cfg.with_c(c))?,
        (None, Some((lo, hi))) => {
            let counts: Vec<usize> = (lo..=hi).collect();
            let (report, detections) = sweep_detailed(&graph, &counts, &cfg)?;
            out.write("sweep.csv", &report.to_csv())?;
            out.write("sweep.json", &to_json(&report)?)?;
            detections
                .into_iter()
                .find(|d| d.c == report.selected_c)
                .expect("selected count is one of the swept counts")
        }
        (None, None) => unreachable!("clap requires --c or --sweep"),
    };

    let best = &detection.best;
    let cover = detection.cover();
    out.write("cover.txt", &cover.to_cover_file())?;
    let density = json!({
        "c": detection.c,
        "restart": best.restart,
        "restart_seed": best.seed,
        "communities": cover.len(),
        "overlapping": best.found.overlapping.len(),
        "restart_densities": detection.densities,
        "restart_communities": detection.effective_c,
        "report": detection.density(),
    });
    out.write("density.json", &to_json(&density)?)?;
    out.write("density.csv", &detection.density().to_csv())?;

    // retained columns first, so column k of soft.csv is community k
    let mut order = best.found.columns.clone();
    order.extend((0..detection.soft().communities()).filter(|t| !best.found.columns.contains(t)));
    out.write("soft.csv", &soft_csv(detection.soft(), &order))?;
    let entropy = entropy_report(detection.soft(), cover)?;
    out.write("entropy.csv", &entropy.nodes_csv(cover))?;
    out.write("entropy_summary.csv", &entropy.summary_csv())?;
    let threshold = json!({
        "summary": best.threshold,
        "columns": best.found.columns,
        "all_empty": best.found.all_empty,
    });
    out.write("threshold.json", &to_json(&threshold)?)?;
    out.write("trace.csv", &best.trace.to_csv())?;

    let flags = json!({
        "input": args.input.display().to_string(),
        "one_based": args.one_based,
        "c": args.c,
        "sweep": args.sweep.map(|(lo, hi)| format!("{lo}:{hi}")),
        "restarts": args.restarts,
        "iters": args.iters,
        "norm": args.norm.to_string(),
        "penalty": args.penalty.to_string(),
    });
    out.finish(
        "detect",
        flags,
        Some(args.seed),
        &[digest(&args.input, &text)],
    )?;
    println!(
        "c={} communities={} overlapping={} outliers={} D={}",
        detection.c,
        cover.len(),
        best.found.overlapping.len(),
        cover.outliers().len(),
        overlapnet::numfmt::fmt_sig(detection.density().density)
    );
    Ok(())
}

fn overlap_spec(args: &OverlapArgs) -> OverlapSpec {
    let mut spec = match args.preset {
        Preset::LfrPaper => OverlapSpec::lfr_paper(args.seed),
    };
    spec.n = args.n.unwrap_or(spec.n);
    spec.min_size = args.min_size.unwrap_or(spec.min_size);
    spec.max_size = args.max_size.unwrap_or(spec.max_size);
    spec.mu = args.mu.unwrap_or(spec.mu);
    spec.overlap_fraction = args.overlap_fraction.unwrap_or(spec.overlap_fraction);
    spec.memberships_per_overlap = args.memberships.unwrap_or(spec.memberships_per_overlap);
    spec.avg_degree = args.avg_degree.unwrap_or(spec.avg_degree);
    spec.max_degree = args.max_degree.unwrap_or(spec.max_degree);
    spec.gamma = args.gamma.unwrap_or(spec.gamma);
    spec.beta = args.beta.unwrap_or(spec.beta);
    spec
}

pub fn generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let (dir, graph, cover, flags, seed) = match &args.kind {
        GenerateKind::Gn(gn) => {
            let spec = GnSpec::new(gn.zout, gn.seed);
            let (graph, labels) = generate_gn(&spec)?;
            let flags = json!({"kind": "gn", "zout": gn.zout});
            (
                &gn.out,
                graph,
                CommunityCover::from_labeling(&labels),
                flags,
                gn.seed,
            )
        }
        GenerateKind::Overlap(ov) => {
            let spec = overlap_spec(ov);
            let (graph, cover) = generate_planted_overlap(&spec)?;
            let mut flags = serde_json::to_value(spec)?;
            flags["kind"] = json!("overlap");
            (&ov.out, graph, cover, flags, ov.seed)
        }
    };
    let mut out = OutputDir::create(dir)?;
    out.write("network.dat", &graph.to_edge_list(true))?;
    out.write("community.dat", &write_community_file(&cover, true))?;
    out.finish("generate", flags, Some(seed), &[])?;
    println!(
        "nodes={} edges={} communities={}",
        graph.node_count(),
        graph.edge_count(),
        cover.len()
    );
    Ok(())
}

/// Cover files are recognized by their `id:` prefix; anything else is read
/// as a community file.
fn read_cover(path: &Path, one_based: bool) -> anyhow::Result<(CommunityCover, String)> {
    let text = read_input(path)?;
    let is_cover_file = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.contains(':'));
    let cover = if is_cover_file {
        CommunityCover::parse_cover_file(&text)
    } else {
        parse_community_file(&text, one_based)
    }
    .with_context(|| format!("cannot parse {}", path.display()))?;
    Ok((cover, text))
}

pub fn eval(args: &EvalArgs) -> anyhow::Result<()> {
    let (truth, truth_text) = read_cover(&args.truth, args.one_based)?;
    let (found, found_text) = read_cover(&args.found, args.one_based)?;
    let mut inputs = vec![
        digest(&args.truth, &truth_text),
        digest(&args.found, &found_text),
    ];
    let (value, k_found) = match args.metric {
        Metric::Gnmi => (gnmi(&truth, &found)?, found.len()),
        Metric::Nmi => {
            let truth_labels = truth
                .to_labeling()
                .context("truth has overlapping or unassigned nodes; use --metric gnmi")?;
            let found_labels = match (&args.soft, args.force_hard) {
                (Some(path), true) => {
                    let text = read_input(path)?;
                    inputs.push(digest(path, &text));
                    let soft = parse_soft_csv(&text)
                        .with_context(|| format!("cannot parse {}", path.display()))?;
                    if soft.communities() < found.len() {
                        anyhow::bail!(
                            "{} has {} columns but the found cover has {} communities",
                            path.display(),
                            soft.communities(),
                            found.len()
                        );
                    }
                    let binary = BinaryCover {
                        columns: (0..found.len()).collect(),
                        overlapping: found.overlapping(),
                        all_empty: found.is_empty(),
                        cover: found.clone(),
                    };
                    harden(&soft, &binary)?
                }
                _ => found.to_labeling().context(
                    "found cover has overlapping or unassigned nodes; use --force-hard or --metric gnmi",
                )?,
            };
            let k = found_labels.num_clusters();
            (nmi(&truth_labels, &found_labels)?, k)
        }
    };
    let metric = match args.metric {
        Metric::Nmi => "nmi",
        Metric::Gnmi => "gnmi",
    };
    let report = MetricReport {
        metric: metric.to_string(),
        value,
        n: truth.node_count(),
        k_truth: truth.len(),
        k_found,
    };
    let text = to_json(&report)?;
    print!("{text}");
    if let Some(dir) = &args.out {
        let mut out = OutputDir::create(dir)?;
        out.write("metric.json", &text)?;
        let flags = json!({
            "metric": metric,
            "one_based": args.one_based,
            "force_hard": args.force_hard,
        });
        out.finish("eval", flags, None, &inputs)?;
    }
    Ok(())
}

pub fn entropy(args: &EntropyArgs) -> anyhow::Result<()> {
    let soft_text = read_input(&args.soft)?;
    let soft = parse_soft_csv(&soft_text)
        .with_context(|| format!("cannot parse {}", args.soft.display()))?;
    let (cover, cover_text) = read_cover(&args.cover, false)?;
    let report = entropy_report(&soft, &cover)?;
    let mut out = OutputDir::create(&args.out)?;
    out.write("entropy.csv", &report.nodes_csv(&cover))?;
    out.write("entropy_summary.csv", &report.summary_csv())?;
    let inputs = [
        digest(&args.soft, &soft_text),
        digest(&args.cover, &cover_text),
    ];
    out.finish("entropy", json!({}), None, &inputs)?;
    Ok(())
}
