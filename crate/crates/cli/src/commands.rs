use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};

use freerep::combinat::{enumerate_pp, gamma_perm};
use freerep::exec::Exec;
use freerep::experiments::{
    fluctuation_rows_with, fluctuation_sampler, restrict_rows, spectral_report, tensor_rows, ExactValue,
    ExperimentConfig,
};
use freerep::freeprob::{
    atomic_moments, free_compress, free_convolve, moments_to_free_cumulants, MomentSequence, MAX_NC_ORDER,
};
use freerep::hof::{exponent_table, limit_scan, triangle_check, verify_macro_micro, LimitTargets, MAX_KAPPA_ORDER};
use freerep::repunitary::ShiftedWeight;
use freerep::rmt::{eigenvalues, EnsembleSpec, Sampler, Scale, Spectrum};
use freerep::scalar::{int, parse_rational, rat, Rational};

use crate::output::{json_bytes, num, opt_num, Failure, Sink, Table};
use crate::svg;
use crate::ExperimentArgs;

/// Largest `k` for the exhaustive exponent inequality.
const MAX_INEQUALITY_ORDER: usize = 6;
/// Replicas whose eigenvalues enter a histogram.
const HISTOGRAM_REPLICAS: usize = 256;

pub struct Context {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
}

impl Context {
    fn sink(&self) -> Result<Sink, Failure> {
        Sink::new(self.out.as_deref())
    }

    fn no_config(&self, command: &str) -> Result<(), Failure> {
        match self.config {
            Some(_) => Err(Failure::validation(format!(
                "--config applies to tensor, restrict and simulate, not {command}"
            ))),
            None => Ok(()),
        }
    }

    /// Command defaults, overlaid with the JSON file and then the flags.
    fn experiment(&self, name: &str, args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
        let mut base = serde_json::to_value(ExperimentConfig::defaults_for(name))?;
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
            let overlay: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
            let Value::Object(fields) = overlay else {
                return Err(Failure::validation("the configuration must be a JSON object"));
            };
            let target = base.as_object_mut().expect("config serializes to an object");
            target.extend(fields);
        }
        let mut cfg: ExperimentConfig =
            serde_json::from_value(base).map_err(|e| Failure::validation(format!("configuration: {e}")))?;
        match cfg.experiment.as_deref() {
            Some(e) if e != name => {
                return Err(Failure::validation(format!("configuration is for {e}, not {name}")));
            }
            _ => cfg.experiment = Some(name.to_string()),
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = &args.n {
            cfg.n = n.clone();
        }
        if let Some(r) = args.replicas {
            cfg.replicas = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn rational_arg(s: &str, what: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| Failure::validation(format!("{what}: cannot parse {s:?} as a rational")))
}

fn exact_list(values: &[Rational]) -> Vec<ExactValue> {
    values.iter().map(ExactValue::new).collect()
}

pub fn spectral(ctx: &Context, l: Vec<i64>, eps: &str, orders: usize) -> Result<(), Failure> {
    ctx.no_config("spectral")?;
    let weight = ShiftedWeight::new(l)?;
    let eps = rational_arg(eps, "--eps")?;
    if eps <= int(0) {
        return Err(Failure::validation("--eps must be positive"));
    }
    if orders == 0 || orders > MAX_NC_ORDER {
        return Err(Failure::validation(format!("--orders must lie in 1..={MAX_NC_ORDER}")));
    }
    let report = spectral_report(&weight, &eps, orders);
    ctx.sink()?.emit("spectral.json", &json_bytes(&serde_json::to_value(report)?)?, true)
}

pub fn tensor(ctx: &Context, args: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = ctx.experiment("tensor", args)?;
    let rows = tensor_rows(&cfg, Exec::default(), !args.no_mc)?;
    let mut table = Table::new(&[
        "n", "k", "eps", "components", "rep_mean", "rep_var", "target", "gap", "mc_mean", "mc_se", "skipped",
    ]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            num(r.eps),
            r.components.to_string(),
            num(r.rep_mean),
            num(r.rep_var),
            num(r.target),
            num(r.gap),
            opt_num(r.mc_mean),
            opt_num(r.mc_se),
            r.skipped.clone().unwrap_or_default(),
        ]);
    }
    let sink = ctx.sink()?;
    sink.emit("tensor.csv", &table.to_bytes()?, true)?;
    let sidecar = json!({ "config": cfg, "rows": rows });
    sink.emit("tensor.json", &json_bytes(&sidecar)?, false)
}

pub fn restrict(ctx: &Context, args: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = ctx.experiment("restrict", args)?;
    let rows = restrict_rows(&cfg, Exec::default(), !args.no_mc)?;
    let mut table = Table::new(&[
        "n", "m", "k", "eps", "components", "branch_mean", "target", "gap", "corner_mc", "corner_se", "skipped",
    ]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            num(r.eps),
            r.components.map(|c| c.to_string()).unwrap_or_default(),
            opt_num(r.branch_mean),
            num(r.target),
            opt_num(r.gap),
            opt_num(r.corner_mc),
            opt_num(r.corner_se),
            r.skipped.clone().unwrap_or_default(),
        ]);
    }
    let sink = ctx.sink()?;
    sink.emit("restrict.csv", &table.to_bytes()?, true)?;
    let sidecar = json!({ "config": cfg, "rows": rows });
    sink.emit("restrict.json", &json_bytes(&sidecar)?, false)
}

/// Staircase `(n-1, .., 0)` at scale `1/n`.
fn staircase(n: usize) -> ShiftedWeight {
    ShiftedWeight::new((0..n as i64).rev().collect()).expect("strictly decreasing")
}

fn fixed_ensemble(n: usize) -> Result<EnsembleSpec, Failure> {
    let l: Vec<i64> = (0..n as i64).rev().map(|x| 2 * x + 1).collect();
    let w = ShiftedWeight::new(l)?;
    Ok(EnsembleSpec::from_weight(&w, Scale::Exact(rat(1, n as i64))))
}

/// Staircase and staircase with the top entry raised by `n`, weights 1/3 and 2/3.
fn mixture_ensemble(n: usize) -> Result<EnsembleSpec, Failure> {
    let base = staircase(n);
    let mut top = base.entries().to_vec();
    top[0] += n as i64;
    let atoms = [(base, rat(1, 3)), (ShiftedWeight::new(top)?, rat(2, 3))];
    Ok(EnsembleSpec::from_weights(&atoms, Scale::Exact(rat(1, n as i64)))?)
}

pub fn hof_check(
    ctx: &Context,
    ns: &[usize],
    max_order: usize,
    inequality_order: usize,
    extended: bool,
    limits: Option<&[usize]>,
) -> Result<(), Failure> {
    ctx.no_config("hof-check")?;
    if ns.is_empty() || ns.contains(&0) {
        return Err(Failure::validation("--n needs positive sizes"));
    }
    if max_order == 0 || inequality_order == 0 {
        return Err(Failure::validation("orders must be positive"));
    }
    if max_order > MAX_KAPPA_ORDER {
        return Err(Failure::Guard(format!(
            "refused: exact cumulant tables are limited to order {MAX_KAPPA_ORDER}"
        )));
    }
    if inequality_order > MAX_INEQUALITY_ORDER {
        return Err(Failure::Guard(format!(
            "refused: the exhaustive inequality check is limited to k = {MAX_INEQUALITY_ORDER}"
        )));
    }
    let mut identities = Vec::new();
    let mut all_pass = true;
    for &n in ns {
        for (name, spec) in [("fixed", fixed_ensemble(n)?), ("mixture", mixture_ensemble(n)?)] {
            for check in verify_macro_micro(&spec, max_order, extended)? {
                all_pass &= check.pass;
                identities.push(json!({
                    "ensemble": name,
                    "spec": spec.hash(),
                    "n": check.n,
                    "powers": check.powers,
                    "lhs": check.lhs,
                    "rhs": check.rhs,
                    "extended": check.extended,
                    "pass": check.pass,
                }));
            }
        }
    }
    let inequality = triangle_check(inequality_order)?;
    all_pass &= inequality.iter().all(|r| r.pass);
    let exponents: Vec<Value> = exponent_table(&gamma_perm(&[2])?)?
        .into_iter()
        .map(|(pp, e)| json!({ "pp": pp, "exponent": e }))
        .collect();
    let mut report = json!({
        "identities": identities,
        "inequality": inequality,
        "exponents_k2": exponents,
        "all_pass": all_pass,
    });

    let sink = ctx.sink()?;
    if let Some(schedule) = limits {
        let targets = LimitTargets {
            kappa: enumerate_pp(1)?.chain(enumerate_pp(2)?).collect(),
            moments: vec![vec![1], vec![2], vec![1, 1]],
        };
        let record = limit_scan(
            schedule,
            |n| mixture_ensemble(n).map_err(|e| freerep::Error::Invalid(e.to_string())),
            &targets,
            0.05,
        )?;
        let text = record.to_json()?;
        report["limits"] = serde_json::from_str(&text)?;
        sink.emit("limits.json", format!("{text}\n").as_bytes(), false)?;
    }
    sink.emit("hof_check.json", &json_bytes(&report)?, true)?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Check("some identities or inequalities did not hold".into()))
    }
}

fn tiled_sampler(values: &[Rational], n: usize) -> Result<Sampler, Failure> {
    if !n.is_multiple_of(values.len()) {
        return Err(Failure::validation(format!(
            "n = {n} is not a multiple of the {} given eigenvalues",
            values.len()
        )));
    }
    let eig: Vec<Rational> = values.iter().cycle().take(n).cloned().collect();
    Ok(Sampler::Single(EnsembleSpec::new(n, Spectrum::Fixed(eig), Scale::Exact(int(1)))?))
}

pub fn simulate(
    ctx: &Context,
    args: &ExperimentArgs,
    spectrum: Option<&[String]>,
    histogram: bool,
) -> Result<(), Failure> {
    let cfg = ctx.experiment("simulate", args)?;
    let sink = ctx.sink()?;
    if histogram && !sink.has_dir() {
        return Err(Failure::validation("--histogram needs --out"));
    }
    let values = match spectrum {
        Some([]) => return Err(Failure::validation("--spectrum is empty")),
        Some(list) => Some(
            list.iter()
                .map(|s| rational_arg(s, "--spectrum"))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let sampler_at = |n: usize| -> Result<Sampler, Failure> {
        match &values {
            Some(v) => tiled_sampler(v, n),
            None => Ok(fluctuation_sampler(&cfg, n)?),
        }
    };
    let samplers = cfg.n.iter().map(|&n| sampler_at(n)).collect::<Result<Vec<_>, _>>()?;
    let (tables, rows) = fluctuation_rows_with(&cfg, Exec::default(), |n| {
        let i = cfg.n.iter().position(|&m| m == n).expect("n from the schedule");
        Ok(samplers[i].clone())
    })?;

    let mut summary = Table::new(&[
        "n",
        "p",
        "mean",
        "mean_se",
        "scaled_variance",
        "variance_se",
        "scaled_third",
        "third_se",
    ]);
    for r in &rows {
        summary.push(vec![
            r.n.to_string(),
            r.p.to_string(),
            num(r.mean.value),
            num(r.mean.std_error),
            num(r.scaled_variance.value),
            num(r.scaled_variance.std_error),
            num(r.scaled_third.value),
            num(r.scaled_third.std_error),
        ]);
    }
    for t in &tables {
        let mut bytes = Vec::new();
        t.write_csv(&mut bytes)?;
        sink.emit(&format!("trace_n{}.csv", t.n), &bytes, false)?;
    }
    sink.emit("cumulants.csv", &summary.to_bytes()?, true)?;
    let ensembles: Vec<Value> = samplers
        .iter()
        .map(|s| json!({ "n": s.n(), "hash": s.hash(), "sampler": s.to_json() }))
        .collect();
    let sidecar = json!({ "config": cfg, "ensembles": ensembles, "rows": rows });
    sink.emit("simulate.json", &json_bytes(&sidecar)?, false)?;

    if histogram {
        for s in &samplers {
            let count = cfg.replicas.min(HISTOGRAM_REPLICAS);
            let mut eigs = Vec::with_capacity(count * s.n());
            for r in 0..count {
                eigs.extend(eigenvalues(&s.replica(cfg.seed, r as u64)?)?);
            }
            let title = format!("eigenvalues, n = {}, {} replicas", s.n(), count);
            sink.emit(&format!("hist_n{}.svg", s.n()), svg::histogram(&eigs, &title).as_bytes(), false)?;
        }
    }
    Ok(())
}

/// Parses `x:w,x:w,..` into atoms with nonnegative weights summing to 1.
fn parse_atoms(s: &str, what: &str) -> Result<Vec<(Rational, Rational)>, Failure> {
    let atoms = s
        .split(',')
        .map(|part| {
            let (x, w) = part
                .split_once(':')
                .ok_or_else(|| Failure::validation(format!("{what}: expected x:w, got {part:?}")))?;
            Ok((rational_arg(x, what)?, rational_arg(w, what)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if atoms.iter().any(|(_, w)| *w < int(0)) {
        return Err(Failure::validation(format!("{what}: weights must be nonnegative")));
    }
    if atoms.iter().map(|(_, w)| w).sum::<Rational>() != int(1) {
        return Err(Failure::validation(format!("{what}: weights must sum to 1")));
    }
    Ok(atoms)
}

fn describe(m: &MomentSequence<Rational>) -> Result<Value, Failure> {
    let c = moments_to_free_cumulants(m)?;
    Ok(json!({ "moments": exact_list(&m.0), "freeCumulants": exact_list(&c.0) }))
}

pub fn freeconv(
    ctx: &Context,
    a: &str,
    b: Option<&str>,
    alpha: Option<&str>,
    orders: usize,
) -> Result<(), Failure> {
    ctx.no_config("freeconv")?;
    if orders == 0 || orders > MAX_NC_ORDER {
        return Err(Failure::validation(format!("--orders must lie in 1..={MAX_NC_ORDER}")));
    }
    let ma = atomic_moments(&parse_atoms(a, "--a")?, orders);
    let mut report = json!({ "orders": orders, "a": describe(&ma)? });
    if let Some(b) = b {
        let mb = atomic_moments(&parse_atoms(b, "--b")?, orders);
        report["b"] = describe(&mb)?;
        report["convolution"] = describe(&free_convolve(&ma, &mb, orders)?)?;
    }
    if let Some(alpha) = alpha {
        let t = rational_arg(alpha, "--alpha")?;
        let compressed = free_compress(&ma, &t, orders)?;
        let mut d = describe(&compressed)?;
        d["alpha"] = serde_json::to_value(ExactValue::new(&t))?;
        report["compression"] = d;
    }
    ctx.sink()?.emit("freeconv.json", &json_bytes(&report)?, true)
}
