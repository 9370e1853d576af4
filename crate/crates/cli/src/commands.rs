// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use qdec_core::asymptotics::{iterate_oracle, AsymptoticAnalysis, AsymptoticOptions};
use qdec_core::io::{self, ChannelFile, ChannelMetadata, SubspaceReport};
use qdec_core::linalg::trace_product;
use qdec_core::{did, models, nfd, KrausMap, SubspaceBasis, Tolerances, ValidationReport};

use crate::report::{self, join_nums, num, ChannelSummary, Report};
use crate::{ExampleName, Failure, Method, Verdict};

pub struct Context {
    pub tol: Tolerances,
    pub allow_non_tp: bool,
}

struct Loaded {
    file: ChannelFile,
    map: KrausMap,
    validation: ValidationReport,
}

impl Loaded {
    fn summary(&self) -> ChannelSummary {
        let meta = self.file.metadata.clone().unwrap_or_default();
        ChannelSummary {
            dim: self.validation.dim,
            num_kraus: self.validation.num_kraus,
            is_tp: self.validation.is_tp,
            tp_residual: self.validation.tp_residual,
            name: meta.name,
            model: meta.model,
            gammas: meta.gammas,
        }
    }

    /// Recorded gammas and the index of the first one.
    fn gammas(&self) -> Option<(&[f64], usize)> {
        let meta = self.file.metadata.as_ref()?;
        let first = usize::from(meta.model.as_deref() != Some("toy3"));
        meta.gammas.as_deref().map(|g| (g, first))
    }
}

fn load(ctx: &Context, path: &Path, require_tp: bool) -> Result<Loaded, Failure> {
    let file = ChannelFile::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let map = file
        .to_map()
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let validation = map.validate(&ctx.tol);
    if require_tp && !validation.is_tp && !ctx.allow_non_tp {
        return Err(Failure::Negative(format!(
            "map is not trace preserving (residual {:.3e}); pass --allow-non-tp to analyze it anyway",
            validation.tp_residual
        )));
    }
    Ok(Loaded {
        file,
        map,
        validation,
    })
}

pub fn validate(ctx: &Context, path: &Path, json: bool) -> Verdict {
    let ch = load(ctx, path, false)?;
    let v = &ch.validation;
    if json {
        Report::new("validate", ch.summary()).print();
    } else {
        let yes = if v.is_tp { "yes" } else { "no" };
        println!("TP: {yes} (residual {:.1e})", v.tp_residual);
        println!("d: {}, K: {}", v.dim, v.num_kraus);
    }
    Ok(v.is_tp)
}

fn dedup_supports(supports: &[SubspaceBasis], tol: &Tolerances) -> Vec<SubspaceBasis> {
    let mut out: Vec<SubspaceBasis> = Vec::new();
    for s in supports {
        if !out.last().is_some_and(|l| l.same_as(s, tol)) {
            out.push(s.clone());
        }
    }
    out
}

fn run_dual(
    map: &KrausMap,
    hs: &SubspaceBasis,
    tol: &Tolerances,
) -> Result<(report::DualReport, String), Failure> {
    let seq = map.dual_support_sequence(hs, map.dim() + 1, tol)?;
    let gas = seq.covers_space();
    let supports = dedup_supports(&seq.supports, tol);
    let chain: Vec<String> = supports.iter().map(|s| report::subspace(s, tol)).collect();
    let mut text = format!(
        "GAS: {}; supports: {}",
        if gas { "yes" } else { "no" },
        chain.join(" → ")
    );
    if !gas {
        text.push_str(" (stalled)");
    }
    let rep = report::DualReport {
        gas,
        stalled: !gas,
        supports: supports.iter().map(|s| SubspaceReport::new(s, tol)).collect(),
    };
    Ok((rep, text))
}

fn run_did(
    map: &KrausMap,
    hs: &SubspaceBasis,
    tol: &Tolerances,
) -> Result<(report::DidReport, String), Failure> {
    let res = did::did(map, hs, tol)?;
    let gas = res.is_successful();
    let transient = if gas {
        &res.stages[..]
    } else {
        &res.stages[..res.stages.len() - 1]
    };
    let bottleneck = if gas { res.bottleneck()? } else { None };
    let labels: Vec<String> = transient
        .iter()
        .map(|s| {
            let name = report::subspace(&s.ht, tol);
            match bottleneck {
                Some(b) if s.gamma_min == b => format!("{name} (γmin={})", num(b)),
                _ => name,
            }
        })
        .collect();
    let stages = if labels.is_empty() {
        "none".to_string()
    } else {
        labels.join(", ")
    };
    let mut text = format!("GAS: {}; stages: {stages}", if gas { "yes" } else { "no" });
    match (bottleneck, res.trapped()) {
        (Some(b), _) => text.push_str(&format!("; bottleneck {}", num(b))),
        (None, Some(t)) => text.push_str(&format!("; trapped: {}", report::subspace(t, tol))),
        (None, None) => {}
    }
    for (i, s) in transient.iter().enumerate() {
        text.push_str(&format!(
            "\n  stage {} {}: γmin={} γmax={}",
            i + 1,
            report::subspace(&s.ht, tol),
            num(s.gamma_min),
            num(s.gamma_max)
        ));
    }
    let rep = report::DidReport {
        gas,
        outcome: if gas { "successful" } else { "unsuccessful" },
        stages: transient
            .iter()
            .map(|s| report::DidStageReport {
                subspace: SubspaceReport::new(&s.ht, tol),
                gamma_min: s.gamma_min,
                gamma_max: s.gamma_max,
            })
            .collect(),
        trapped: res.trapped().map(|t| SubspaceReport::new(t, tol)),
        bottleneck,
    };
    Ok((rep, text))
}

fn run_nfd(
    map: &KrausMap,
    hs: &SubspaceBasis,
    gammas: Option<(&[f64], usize)>,
    tol: &Tolerances,
) -> Result<(report::NfdReport, String), Failure> {
    let res = nfd::nfd(map, hs, tol)?;
    let labels: Vec<Option<String>> = res
        .stages
        .iter()
        .map(|s| gammas.and_then(|(g, first)| report::radius_label(s.sigma, g, first)))
        .collect();
    let names: Vec<String> = res.stages.iter().map(|s| report::subspace(&s.ht, tol)).collect();
    let stages = if names.is_empty() {
        "none".to_string()
    } else {
        names.join(", ")
    };
    let mut text = format!("GAS: {}; stages: {stages}", if res.is_gas { "yes" } else { "no" });
    if !res.stages.is_empty() {
        let radii = res.radii();
        if labels.iter().any(Option::is_some) {
            let symbolic: Vec<String> = labels
                .iter()
                .zip(&radii)
                .map(|(l, r)| l.clone().unwrap_or_else(|| num(*r)))
                .collect();
            text.push_str(&format!("\nradii: {}", symbolic.join(", ")));
            text.push_str(&format!("\nnumeric radii: {}", join_nums(&radii)));
        } else {
            text.push_str(&format!("\nradii: {}", join_nums(&radii)));
        }
    }
    text.push_str(&format!(
        "\nminimal GAS extension: {}",
        report::subspace(&res.minimal_gas, tol)
    ));
    let rep = report::NfdReport {
        gas: res.is_gas,
        stages: res
            .stages
            .iter()
            .zip(labels)
            .map(|(s, label)| report::NfdStageReport {
                subspace: SubspaceReport::new(&s.ht, tol),
                sigma: s.sigma,
                label,
            })
            .collect(),
        minimal_gas: SubspaceReport::new(&res.minimal_gas, tol),
    };
    Ok((rep, text))
}

pub fn analyze(ctx: &Context, path: &Path, spec: &str, method: Method, json: bool) -> Verdict {
    let tol = &ctx.tol;
    let ch = load(ctx, path, true)?;
    let hs = io::parse_subspace(spec, ch.map.dim(), tol)?;
    let inv = ch.map.is_invariant(&hs, tol)?;
    if !inv.invariant {
        return Err(Failure::Negative(format!(
            "subspace {} is not invariant: max_k ‖M_k,Q‖ = {:.3e}",
            report::subspace(&hs, tol),
            inv.residual
        )));
    }

    let mut rep = Report::new("analyze", ch.summary());
    rep.subspace = Some(SubspaceReport::new(&hs, tol));
    rep.invariance_residual = Some(inv.residual);
    let mut sections = Vec::new();
    let mut verdicts = Vec::new();
    if matches!(method, Method::Dual | Method::All) {
        let (r, text) = run_dual(&ch.map, &hs, tol)?;
        verdicts.push(("dual", r.gas));
        sections.push(("dual", text));
        rep.dual = Some(r);
    }
    if matches!(method, Method::Did | Method::All) {
        let (r, text) = run_did(&ch.map, &hs, tol)?;
        verdicts.push(("did", r.gas));
        sections.push(("did", text));
        rep.did = Some(r);
    }
    if matches!(method, Method::Nfd | Method::All) {
        let (r, text) = run_nfd(&ch.map, &hs, ch.gammas(), tol)?;
        verdicts.push(("nfd", r.gas));
        sections.push(("nfd", text));
        rep.nfd = Some(r);
    }
    let gas = verdicts[0].1;
    if verdicts.iter().any(|(_, v)| *v != gas) {
        let detail: Vec<String> = verdicts.iter().map(|(n, v)| format!("{n} {v}")).collect();
        return Err(Failure::Internal(format!(
            "GAS deciders disagree: {}",
            detail.join(", ")
        )));
    }
    rep.gas = Some(gas);

    if json {
        rep.print();
    } else if sections.len() == 1 {
        println!("{}", sections[0].1);
    } else {
        for (name, text) in &sections {
            println!("[{name}]\n{text}");
        }
        println!("GAS: {} (deciders agree)", if gas { "yes" } else { "no" });
    }
    Ok(gas)
}

pub fn asympt(
    ctx: &Context,
    path: &Path,
    parts_spec: &str,
    state_spec: &str,
    container: Option<&str>,
    oracle: Option<usize>,
    json: bool,
) -> Verdict {
    let tol = &ctx.tol;
    let ch = load(ctx, path, true)?;
    let d = ch.map.dim();
    let parts = io::parse_parts(parts_spec, d, tol)?;
    if parts.is_empty() {
        return Err(Failure::Input("no parts given".into()));
    }
    let rho = io::parse_state(state_spec, d, tol)?;
    let container = container.map(|c| io::parse_subspace(c, d, tol)).transpose()?;
    let options = AsymptoticOptions {
        gas_verified: false,
        container,
    };
    let an = AsymptoticAnalysis::new(&ch.map, &parts, &options, tol).map_err(|e| match e {
        qdec_core::Error::NotGas => Failure::Negative(
            "the direct sum of the parts (or the container) is not globally asymptotically stable".into(),
        ),
        other => other.into(),
    })?;
    let res = an.report(&rho)?;

    let oracle_report = match oracle {
        Some(n) => {
            let late = iterate_oracle(&ch.map, &rho, n, tol)?;
            let probs: Vec<f64> = parts
                .iter()
                .map(|p| trace_product(&p.projector(), late.matrix()).re)
                .collect();
            let max_gap = probs
                .iter()
                .zip(&res.probabilities)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Some(report::OracleReport {
                steps: n,
                probabilities: probs,
                max_gap,
            })
        }
        None => None,
    };

    if json {
        let mut rep = Report::new("asympt", ch.summary());
        rep.asymptotics = Some(report::AsymptoticsReport {
            parts: parts.iter().map(|p| SubspaceReport::new(p, tol)).collect(),
            probabilities: res.probabilities.clone(),
            remainder: res.remainder,
            limit_duals: res.limit_duals.iter().map(io::matrix_to_json).collect(),
            route_gap: res.route_gap,
            oracle: oracle_report,
        });
        rep.print();
    } else {
        println!("{}", join_nums(&res.probabilities));
        if let Some(r) = res.remainder {
            println!("remainder: {}", num(r));
        }
        if let Some(o) = &oracle_report {
            println!(
                "oracle after {} steps: {} (max gap {:.1e})",
                o.steps,
                join_nums(&o.probabilities),
                o.max_gap
            );
        }
    }
    Ok(true)
}

pub fn example(name: ExampleName, gammas: Option<&[f64]>, output: Option<&Path>) -> Verdict {
    let (model, description, map, gammas) = match name {
        ExampleName::Toy3 => {
            let g = gammas.unwrap_or(&models::TOY3_DEFAULT_GAMMAS).to_vec();
            let map = models::toy3(&g).map_err(|e| Failure::Negative(e.to_string()))?;
            ("toy3", "three-level toy model", map, g)
        }
        ExampleName::SevenLevel => {
            let g = gammas.unwrap_or(&models::SEVEN_LEVEL_DEFAULT_GAMMAS).to_vec();
            let map = models::seven_level(&g).map_err(|e| Failure::Negative(e.to_string()))?;
            (
                "seven_level",
                "seven-level model with two invariant subspaces",
                map,
                g,
            )
        }
    };
    let meta = ChannelMetadata {
        name: Some(model.into()),
        description: Some(description.into()),
        model: Some(model.into()),
        gammas: Some(gammas),
    };
    let text = ChannelFile::from_map(&map, Some(meta)).to_json();
    match output {
        Some(p) => {
            std::fs::write(p, text + "\n").map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        None => println!("{text}"),
    }
    Ok(true)
}
