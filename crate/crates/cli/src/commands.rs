use muntz::prelude::*;
use muntz::{
    apply, coefficient_convergence, distance_sweep, dual_family, eigen_check, gram,
    hereditary_check, hereditary_sweep, lower_bound_certificate, remez_sweep, solve_moments,
    Decimal, GramOptions, MomentData, MpDomain, MpExponents, MpFloat, MuntzSeries, OperatorSpec,
    Partition, PartitionSampling, TargetFunction,
};
use serde_json::{json, Value};

use crate::config::{OperatorConfig, PartitionConfig, RunConfig, TargetConfig};
use crate::output::{Fmt, Report, Table};
use crate::Failure;

const DEFAULT_REL_TOL: &str = "1e-6";
const DEFAULT_GRID_POINTS: usize = 1000;
const ORACLE_SOURCE: &str =
    "closed-form product (2λn+1)^(-1/2) Π |λn-λk|/(λn+λk+1), valid for A = [0, 1], w = 1";

struct Ctx {
    cfg: RunConfig,
    wd: MpDomain,
    seq: MpExponents,
    opts: GramOptions,
    fmt: Fmt,
}

impl Ctx {
    fn new(cfg: RunConfig) -> Result<Self, Failure> {
        let bits = cfg.precision_bits;
        let wd = MpDomain::from_spec(&cfg.domain, bits)?;
        let seq = MpExponents::from_spec(&cfg.exponents, bits)?;
        let opts = GramOptions {
            precision_bits: bits,
            max_precision_bits: cfg.max_precision_bits,
        };
        Ok(Ctx {
            fmt: Fmt::for_bits(bits),
            cfg,
            wd,
            seq,
            opts,
        })
    }

    fn num(&self, d: &Decimal) -> Result<MpFloat, Failure> {
        Ok(d.parse(self.cfg.precision_bits)?)
    }

    fn section(&mut self) -> Result<usize, Failure> {
        let n = *self.cfg.section.get_or_insert(self.seq.len());
        if n == 0 || n > self.seq.len() {
            return Err(missing(format!("N = {n} must lie in 1..={}", self.seq.len())));
        }
        Ok(n)
    }

    fn sections(&mut self, default: Vec<usize>) -> Result<Vec<usize>, Failure> {
        let list = self.cfg.n_list.get_or_insert(default).clone();
        if list.is_empty() {
            return Err(missing("N_list is empty"));
        }
        Ok(list)
    }

    fn lambda(&self, k: usize) -> String {
        self.fmt.s(&self.seq.values()[k])
    }

    fn finish(self, command: &'static str, precision_bits: u32, result: Value, table: Table) -> Report {
        Report {
            command,
            config: self.cfg,
            precision_bits,
            result,
            table,
        }
    }
}

fn missing(msg: impl Into<String>) -> Failure {
    Failure::config("MalformedConfig", msg)
}

/// Runs one subcommand and renders its report.
pub fn dispatch(command: &str, cfg: RunConfig) -> Result<String, Failure> {
    let ctx = Ctx::new(cfg)?;
    let report = match command {
        "validate" => validate(ctx),
        "gram" => gram_cmd(ctx),
        "distances" => distances(ctx),
        "duals" => duals(ctx),
        "expand" => expand(ctx),
        "remez" => remez(ctx),
        "moments" => moments(ctx),
        "operator" => operator(ctx),
        "hereditary" => hereditary(ctx),
        other => Err(Failure::config("UnknownSubcommand", format!("unknown subcommand {other:?}"))),
    }?;
    report.render()
}

fn validate(ctx: Ctx) -> Result<Report, Failure> {
    let f = ctx.fmt;
    let wd = &ctx.wd;
    let intervals: Vec<Value> = wd
        .intervals()
        .iter()
        .map(|iv| json!({"lo": f.n(&iv.lo), "hi": f.n(&iv.hi)}))
        .collect();
    let weights: Vec<Value> = wd
        .weights()
        .iter()
        .map(|w| json!({"coeff": f.n(&w.coeff), "power": f.n(&w.power)}))
        .collect();
    let result = json!({
        "domain": {
            "r_A": f.n(wd.r_a()),
            "r_w": f.n(wd.r_w()),
            "total_measure": f.n(wd.total_measure()),
            "weight_mass": f.n(wd.weight_mass()),
            "intervals": intervals,
            "weights": weights,
        },
        "exponents": {
            "count": ctx.seq.len(),
            "values": f.v(ctx.seq.values()),
            "gap": f.n(ctx.seq.gap()),
            "summability": ctx.seq.summability(),
        },
    });
    let mut table = Table::new(vec!["n", "lambda_n"]);
    for k in 0..ctx.seq.len() {
        table.push(vec![(k + 1).to_string(), ctx.lambda(k)]);
    }
    let bits = ctx.cfg.precision_bits;
    Ok(ctx.finish("validate", bits, result, table))
}

fn gram_cmd(mut ctx: Ctx) -> Result<Report, Failure> {
    let n = ctx.section()?;
    let g = gram(&ctx.wd, &ctx.seq, n, &ctx.opts)?;
    let f = ctx.fmt;
    let result = json!({
        "N": n,
        "exponents": f.v(g.exponents()),
        "entries": f.m(g.entries()),
        "cond_estimate": f.n(g.cond_estimate()),
        "precision_bits": g.precision_bits(),
    });
    let mut table = Table::new(vec!["i", "j", "entry"]);
    for i in 0..n {
        for j in 0..n {
            table.push(vec![(i + 1).to_string(), (j + 1).to_string(), f.s(&g.entries()[(i, j)])]);
        }
    }
    Ok(ctx.finish("gram", g.precision_bits(), result, table))
}

fn distances(mut ctx: Ctx) -> Result<Report, Failure> {
    let n = *ctx.cfg.n.get_or_insert(1);
    if n == 0 || n > ctx.seq.len() {
        return Err(missing(format!("n = {n} must lie in 1..={} (1-based)", ctx.seq.len())));
    }
    let sections = ctx.sections((n..=ctx.seq.len()).collect())?;
    let rel_tol_dec = ctx.cfg.rel_tol.get_or_insert_with(|| Decimal::from(DEFAULT_REL_TOL)).clone();
    let rel_tol = ctx.num(&rel_tol_dec)?;
    let report = distance_sweep(&ctx.wd, &ctx.seq, n - 1, &sections, &rel_tol, &ctx.opts)?;
    let f = ctx.fmt;

    let mut rows = Vec::new();
    let mut table = Table::new(vec!["N", "distance", "oracle", "relative_error"]);
    for (i, (size, d)) in report.sections.iter().enumerate() {
        let mut row = json!({"N": size, "distance": f.n(d)});
        let mut csv = vec![size.to_string(), f.s(d), String::new(), String::new()];
        if let Some(oracle) = &report.oracle {
            let o = &oracle[i];
            let err = (d.clone() - o.clone()).abs() / o.clone();
            row["oracle"] = f.n(o);
            row["relative_error"] = f.n(&err);
            csv[2] = f.s(o);
            csv[3] = f.s(&err);
        }
        rows.push(row);
        table.push(csv);
    }
    let certificate = match &ctx.cfg.epsilon {
        Some(eps) => {
            let c = lower_bound_certificate(std::slice::from_ref(&report), &ctx.num(eps)?)?;
            json!({
                "epsilon": f.n(&c.epsilon),
                "u_epsilon": f.n(&c.u_epsilon),
                "pass": c.pass,
                "section_u": c.section_u.iter().map(|(s, u)| json!({"N": s, "u": f.n(u)})).collect::<Vec<_>>(),
                "variation": f.n(&c.variation),
                "stable": c.stable,
                "exponent_slope": c.exponent_slopes.first().map(|(_, s)| f.n(s)),
            })
        }
        None => Value::Null,
    };
    let slope = report.limit_estimate.ln() / report.lambda_n.clone();
    let result = json!({
        "n": n,
        "lambda_n": f.n(&report.lambda_n),
        "sections": rows,
        "oracle_source": report.oracle.as_ref().map(|_| ORACLE_SOURCE),
        "monotone": report.monotone,
        "stabilized": report.stabilized,
        "limit_estimate": f.n(&report.limit_estimate),
        "log_distance_over_lambda": f.n(&slope),
        "ln_r_w": f.n(&report.r_w.ln()),
        "certificate": certificate,
        "cond_estimate": f.n(&report.cond_estimate),
        "precision_bits": report.precision_bits,
    });
    Ok(ctx.finish("distances", report.precision_bits, result, table))
}

fn duals(mut ctx: Ctx) -> Result<Report, Failure> {
    let n = ctx.section()?;
    let g = gram(&ctx.wd, &ctx.seq, n, &ctx.opts)?;
    let d = dual_family(&g);
    let f = ctx.fmt;
    let result = json!({
        "N": n,
        "exponents": f.v(g.exponents()),
        "norms": f.v(d.norms()),
        "distances": f.v(d.distances()),
        "coefficients": f.m(d.coeffs()),
        "biorthogonality_residual": f.n(&d.biorthogonality_residual(&g)),
        "cond_estimate": f.n(g.cond_estimate()),
        "precision_bits": g.precision_bits(),
    });
    let mut table = Table::new(vec!["n", "lambda_n", "dual_norm", "distance"]);
    for k in 0..n {
        table.push(vec![(k + 1).to_string(), ctx.lambda(k), f.s(&d.norms()[k]), f.s(&d.distances()[k])]);
    }
    Ok(ctx.finish("duals", g.precision_bits(), result, table))
}

fn target(ctx: &Ctx) -> Result<(TargetFunction<MpFloat>, Value), Failure> {
    let f = ctx.fmt;
    match &ctx.cfg.target {
        None => Err(missing("expand needs a \"target\" block")),
        Some(TargetConfig::PurePower { mu }) => {
            let mu = ctx.num(mu)?;
            let desc = json!({"kind": "pure_power", "mu": f.n(&mu)});
            Ok((TargetFunction::pure_power(mu)?, desc))
        }
        Some(TargetConfig::MuntzCombo { coeffs }) => {
            let coeffs = coeffs.iter().map(|c| ctx.num(c)).collect::<Result<Vec<_>, _>>()?;
            let k = coeffs.len().min(ctx.seq.len());
            let desc = json!({"kind": "muntz_combo", "coeffs": f.v(&coeffs)});
            let s = MuntzSeries::new(ctx.seq.values()[..k].to_vec(), coeffs, ctx.wd.r_w().clone())?;
            Ok((TargetFunction::MuntzCombo(s), desc))
        }
    }
}

fn expand(mut ctx: Ctx) -> Result<Report, Failure> {
    let (target, desc) = target(&ctx)?;
    let sections = ctx.sections(vec![ctx.seq.len()])?;
    let t = coefficient_convergence(&ctx.wd, &ctx.seq, &target, &sections, &ctx.opts)?;
    let f = ctx.fmt;
    let rows: Vec<Value> = t
        .rows
        .iter()
        .zip(&t.residuals)
        .map(|((size, c), r)| json!({"N": size, "coefficients": f.v(c), "residual": f.n(r)}))
        .collect();
    let result = json!({
        "target": desc,
        "sections": rows,
        "differences": t.differences.iter().map(|d| f.v(d)).collect::<Vec<_>>(),
        "cauchy_like": t.cauchy_like,
        "precision_bits": t.precision_bits,
    });
    let mut table = Table::new(vec!["N", "n", "lambda_n", "coefficient"]);
    for (size, c) in &t.rows {
        for (k, a) in c.iter().enumerate() {
            table.push(vec![size.to_string(), (k + 1).to_string(), ctx.lambda(k), f.s(a)]);
        }
    }
    Ok(ctx.finish("expand", t.precision_bits, result, table))
}

fn remez(mut ctx: Ctx) -> Result<Report, Failure> {
    let rhos = match &ctx.cfg.rho {
        Some(r) if !r.is_empty() => r.iter().map(|d| ctx.num(d)).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(missing("remez needs \"rho\"")),
    };
    let grid = *ctx.cfg.grid_points.get_or_insert(DEFAULT_GRID_POINTS);
    let sections = ctx.sections((1..=ctx.seq.len()).collect())?;
    let s = remez_sweep(&ctx.wd, &ctx.seq, &sections, &rhos, grid, &ctx.opts)?;
    let f = ctx.fmt;
    let rows: Vec<Value> = s
        .sections
        .iter()
        .zip(&s.values)
        .map(|(size, v)| json!({"N": size, "c_N": f.v(v)}))
        .collect();
    let result = json!({
        "rho": f.v(&s.rhos),
        "rho_below_domain": s.rho_below_domain,
        "grid_points": s.grid_points,
        "sections": rows,
        "successive_ratios": s.successive_ratios.iter().map(|r| f.v(r)).collect::<Vec<_>>(),
        "cond_estimate": f.n(&s.cond_estimate),
        "precision_bits": s.precision_bits,
    });
    let mut table = Table::new(vec!["N", "rho", "c_N"]);
    for (size, v) in s.sections.iter().zip(&s.values) {
        for (rho, c) in s.rhos.iter().zip(v) {
            table.push(vec![size.to_string(), f.s(rho), f.s(c)]);
        }
    }
    Ok(ctx.finish("remez", s.precision_bits, result, table))
}

fn moments(mut ctx: Ctx) -> Result<Report, Failure> {
    let d = match &ctx.cfg.d {
        Some(d) if !d.is_empty() => d.iter().map(|x| ctx.num(x)).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(missing("moments needs a nonempty \"d\" list")),
    };
    let default = d.len().min(ctx.seq.len());
    let n = *ctx.cfg.section.get_or_insert(default);
    let data = MomentData::new(d, &ctx.seq, ctx.wd.r_w())?;
    let sol = solve_moments(&ctx.wd, &ctx.seq, &data, n, &ctx.opts)?;
    let f = ctx.fmt;
    let cert = &sol.certificate;
    let result = json!({
        "N": n,
        "coefficients": f.v(sol.series.coeffs()),
        "residuals": f.v(&sol.residuals),
        "max_residual": f.n(&sol.max_residual()),
        "solution_norm": f.n(&sol.solution_norm),
        "fit": {"a": f.n(&sol.fit.a), "C": f.n(&sol.fit.c)},
        "growth_ok": sol.growth_ok,
        "certificate": {
            "terms": f.v(&cert.terms),
            "sum": f.n(&cert.sum),
            "ratios": cert.ratios.iter().map(|r| r.as_ref().map(|x| f.n(x))).collect::<Vec<_>>(),
            "passed": cert.passed,
        },
        "cond_estimate": f.n(&sol.cond_estimate),
        "precision_bits": sol.precision_bits,
    });
    let mut table = Table::new(vec!["n", "lambda_n", "coefficient", "residual"]);
    for k in 0..n {
        table.push(vec![
            (k + 1).to_string(),
            ctx.lambda(k),
            f.s(&sol.series.coeffs()[k]),
            f.s(&sol.residuals[k]),
        ]);
    }
    Ok(ctx.finish("moments", sol.precision_bits, result, table))
}

fn operator(mut ctx: Ctx) -> Result<Report, Failure> {
    let rho = match ctx.cfg.rho.as_deref() {
        Some([r]) => ctx.num(r)?,
        _ => return Err(missing("operator needs exactly one \"rho\"")),
    };
    let spec = match &ctx.cfg.operator {
        None => return Err(missing("operator needs an \"operator\" block")),
        Some(OperatorConfig::Dilation) => OperatorSpec::dilation(rho),
        Some(OperatorConfig::DiagonalList { u }) => {
            let u = u.iter().map(|x| ctx.num(x)).collect::<Result<Vec<_>, _>>()?;
            OperatorSpec::diagonal_list(u, rho)
        }
    };
    let n = ctx.section()?;
    let g = gram(&ctx.wd, &ctx.seq, n, &ctx.opts)?;
    let r = eigen_check(&spec, &g)?;
    let ones = MuntzSeries::on_section(&g, vec![MpFloat::one(); n])?;
    let image = apply(&spec, &ones)?;
    let f = ctx.fmt;
    let result = json!({
        "kind": spec.kind,
        "rho": f.n(&spec.rho),
        "N": n,
        "eigenvalues": f.v(&r.u),
        "eigen_ok": r.eigen_ok,
        "adjoint_eigen_ok": r.adjoint_eigen_ok,
        "adjoint_defect": f.n(&r.adjoint_defect),
        "simplicity_ok": r.simplicity_ok,
        "kernel_trivial_ok": r.kernel_trivial_ok,
        "normality_defect": f.n(&r.normality_defect),
        "tail_bounds": r.tail_bounds.iter().map(|(m, b)| json!({"m": m, "bound": f.n(b)})).collect::<Vec<_>>(),
        "tail_ratio_limit": f.n(&r.tail_ratio_limit),
        "tail_ok": r.tail_ok,
        "tail_truncated": r.tail_truncated,
        "apply": {
            "input": f.v(ones.coeffs()),
            "output": f.v(image.coeffs()),
        },
        "precision_bits": r.precision_bits,
    });
    let mut table = Table::new(vec!["n", "lambda_n", "eigenvalue", "tail_bound"]);
    for k in 0..r.u.len() {
        let tail = r
            .tail_bounds
            .iter()
            .find(|(m, _)| *m == k + 1)
            .map(|(_, b)| f.s(b))
            .unwrap_or_default();
        table.push(vec![(k + 1).to_string(), ctx.lambda(k), f.s(&r.u[k]), tail]);
    }
    Ok(ctx.finish("operator", r.precision_bits, result, table))
}

fn zero_based(idx: &[usize]) -> Result<Vec<usize>, Failure> {
    idx.iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| Failure::config("BadPartition", "partition indices are 1-based"))
        })
        .collect()
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn hereditary(mut ctx: Ctx) -> Result<Report, Failure> {
    let f = ctx.fmt;
    let sampling = match ctx.cfg.partition.clone() {
        None => return Err(missing("hereditary needs a \"partition\" block")),
        Some(PartitionConfig::Explicit { n1, n2 }) => {
            let p = Partition::new(zero_based(&n1)?, zero_based(&n2)?);
            let n = *ctx.cfg.section.get_or_insert(n1.len() + n2.len());
            let g = gram(&ctx.wd, &ctx.seq, n, &ctx.opts)?;
            let r = hereditary_check(&g, &p)?;
            let result = json!({
                "N": n,
                "N1": one_based(&r.partition.first),
                "N2": one_based(&r.partition.second),
                "mixed_matrix_det": f.n(&r.mixed_matrix_det),
                "inverse_minor_det": f.n(&r.inverse_minor_det),
                "min_singular_value": f.n(&r.min_singular_value),
                "nonsingular": r.nonsingular,
                "exploratory": r.exploratory,
                "cond_estimate": f.n(g.cond_estimate()),
                "precision_bits": g.precision_bits(),
            });
            let mut table = Table::new(vec!["N", "min_singular_value"]);
            table.push(vec![n.to_string(), f.s(&r.min_singular_value)]);
            return Ok(ctx.finish("hereditary", g.precision_bits(), result, table));
        }
        Some(PartitionConfig::All) => PartitionSampling::All,
        Some(PartitionConfig::Random { count, seed }) => PartitionSampling::Random { count, seed },
    };
    let default = vec![ctx.cfg.section.unwrap_or(ctx.seq.len())];
    let sections = ctx.sections(default)?;
    let largest = *sections.iter().max().expect("nonempty");
    let full = gram(&ctx.wd, &ctx.seq, largest, &ctx.opts)?;
    let mut rows = Vec::new();
    let mut table = Table::new(vec!["N", "partitions_checked", "min_singular_value"]);
    for &n in &sections {
        let s = hereditary_sweep(&full.leading(n)?, sampling)?;
        table.push(vec![n.to_string(), s.partitions_checked.to_string(), f.s(&s.min_singular_value)]);
        rows.push(json!({
            "N": n,
            "partitions_checked": s.partitions_checked,
            "all_nonsingular": s.all_nonsingular,
            "det_identity_ok": s.det_identity_ok,
            "max_det_mismatch": f.n(&s.max_det_mismatch),
            "min_singular_value": f.n(&s.min_singular_value),
            "worst_partition": {
                "N1": one_based(&s.worst_partition.first),
                "N2": one_based(&s.worst_partition.second),
            },
            "exploratory": s.exploratory,
        }));
    }
    let result = json!({
        "sections": rows,
        "cond_estimate": f.n(full.cond_estimate()),
        "precision_bits": full.precision_bits(),
    });
    Ok(ctx.finish("hereditary", full.precision_bits(), result, table))
}
