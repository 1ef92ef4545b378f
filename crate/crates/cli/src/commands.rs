use std::path::Path;
use std::sync::Arc;

use fracmt_core::mt_functional::Weight;
use fracmt_core::{
    alpha_star, concentration_fn_check, extremal_search, full_norm_p, gagliardo_p_pl, gamma_s,
    lp_norm_p, moser_decomposition, mt_integral, polya_szego_gap, rate_check, rearrange,
    sharpness_scan, BuiltinWeight, Cell, Domain, Error, ExtremalOptions, GridFunction, MTConfig,
    Normalization, Params, QuadratureSpec, Result, ScanReport, Variant,
};

use crate::args::{AlphaArgs, Cli, Command};

pub fn quadrature_spec(cli: &Cli) -> Result<QuadratureSpec> {
    let d = QuadratureSpec::default();
    QuadratureSpec::new(
        cli.rel_tol.unwrap_or(d.rel_tol),
        cli.abs_tol.unwrap_or(d.abs_tol),
        cli.max_panels.unwrap_or(d.max_panels),
        d.domain_cut,
    )
}

fn resolve_alpha(alpha: AlphaArgs, params: Params, spec: &QuadratureSpec) -> Result<f64> {
    match (alpha.alpha, alpha.alpha_mult) {
        (Some(a), None) => Ok(a),
        (None, Some(m)) => Ok(m * alpha_star(params, spec)?),
        _ => Err(Error::Input(
            "give exactly one of --alpha and --alpha-mult".into(),
        )),
    }
}

fn mt_config(
    alpha: f64,
    params: Params,
    norm: Normalization,
    variant: Variant,
    weight: Option<BuiltinWeight>,
) -> Result<MTConfig> {
    let cfg = MTConfig::new(alpha, params, norm, variant)?;
    Ok(match weight {
        Some(w) => cfg.with_weight(Arc::new(w) as Arc<dyn Weight>),
        None => cfg,
    })
}

fn read_grid(path: &Path) -> Result<GridFunction> {
    GridFunction::read_csv_path(path)
}

/// Runs the subcommand and returns its report. Side files (`--output`,
/// `--best`) are written here; the report itself is emitted by the caller.
pub fn execute(cli: &Cli) -> Result<ScanReport> {
    let spec = quadrature_spec(cli)?;
    match &cli.command {
        Command::Constants { s, method } => {
            let r = gamma_s(Params::new(*s)?, *method, &spec)?;
            let mut report =
                ScanReport::new(&["s", "p", "gamma_s", "alpha_star", "method", "est_error"]);
            report.push_row(vec![
                Cell::Num(r.s),
                Cell::Num(r.p),
                Cell::Num(r.gamma_s),
                Cell::Num(r.alpha_star),
                Cell::from(r.method.to_string()),
                Cell::Num(r.est_error),
            ]);
            Ok(report)
        }
        Command::Seminorm { input, s } => {
            let params = Params::new(*s)?;
            let u = read_grid(input)?;
            let semi = gagliardo_p_pl(&u, params)?;
            let lp = lp_norm_p(&u, params.p(), &spec)?;
            let full = full_norm_p(&u, params, &spec)?;
            let mut report = ScanReport::new(&[
                "s",
                "p",
                "seminorm_p",
                "abs_err",
                "lp_norm_p",
                "full_norm_p",
            ]);
            report.push_row(vec![
                Cell::Num(*s),
                Cell::Num(params.p()),
                Cell::Num(semi.value),
                Cell::Num(semi.abs_err),
                Cell::Num(lp.value),
                Cell::Num(full.value),
            ]);
            Ok(report)
        }
        Command::MoserTable { s, eps } => {
            let params = Params::new(*s)?;
            let mut report =
                ScanReport::new(&["eps", "i1", "i2", "i3", "i4", "total", "gap", "log_rate"]);
            for &e in eps {
                let d = moser_decomposition(e, params, &spec)?;
                report.push_row(
                    [
                        d.eps,
                        d.i1,
                        d.i2,
                        d.i3,
                        d.i4,
                        d.total,
                        d.gamma_gap,
                        d.log_rate,
                    ]
                    .into_iter()
                    .map(Cell::Num)
                    .collect(),
                );
            }
            Ok(report)
        }
        Command::Rate { s, eps, mode } => rate_check(eps, Params::new(*s)?, *mode, &spec),
        Command::Rearrange { input, output } => {
            let u = read_grid(input)?;
            let pair = rearrange(&u, 2.0)?;
            pair.rearranged.write_csv_path(output)?;
            let mut report = ScanReport::new(&["nodes", "l2_drift", "output"]);
            report.push_row(vec![
                Cell::from(u.len()),
                Cell::Num(pair.lp_drift),
                Cell::from(output.display().to_string()),
            ]);
            Ok(report)
        }
        Command::PolyaSzego { input, s } => {
            let params = Params::new(*s)?;
            let pair = rearrange(&read_grid(input)?, params.p())?;
            let before = gagliardo_p_pl(&pair.original, params)?;
            let after = gagliardo_p_pl(&pair.rearranged, params)?;
            let gap = polya_szego_gap(&pair, params)?;
            let mut report =
                ScanReport::new(&["seminorm_original", "seminorm_rearranged", "gap", "abs_err"]);
            report.push_row(vec![
                Cell::Num(before.value),
                Cell::Num(after.value),
                Cell::Num(gap.value),
                Cell::Num(gap.abs_err),
            ]);
            report.set_meta("passed", gap.value >= -gap.abs_err);
            Ok(report)
        }
        Command::Mt {
            input,
            s,
            alpha,
            variant,
            weight,
            norm,
        } => {
            let params = Params::new(*s)?;
            let u = read_grid(input)?;
            let a = resolve_alpha(*alpha, params, &spec)?;
            let cfg = mt_config(a, params, *norm, *variant, *weight)?;
            let domain = match variant {
                Variant::ExpInterval => Domain::Interval(u.nodes()[0], u.nodes()[u.len() - 1]),
                Variant::PhiLine => Domain::Line,
            };
            let est = mt_integral(&u, &cfg, domain, &spec)?;
            let mut report = ScanReport::new(&["alpha", "value", "abs_err"]);
            report.push_row(vec![
                Cell::Num(a),
                Cell::Num(est.value),
                Cell::Num(est.abs_err),
            ]);
            report.set_meta("variant", variant.to_string());
            report.set_meta("normalization", norm.to_string());
            report.set_meta(
                "weight",
                weight.map_or("none".to_string(), |w| w.to_string()),
            );
            Ok(report)
        }
        Command::Sharpness {
            s,
            alpha,
            eps,
            weight,
            norm,
            variant,
        } => {
            let params = Params::new(*s)?;
            let a = resolve_alpha(*alpha, params, &spec)?;
            sharpness_scan(&mt_config(a, params, *norm, *variant, *weight)?, eps, &spec)
        }
        Command::RufCheck { s, r0, samples } => {
            if *samples == 0 {
                return Err(Error::Input("--samples must be positive".into()));
            }
            let ts: Vec<f64> = (1..=*samples)
                .map(|i| i as f64 / (*samples + 1) as f64)
                .collect();
            let r = concentration_fn_check(*s, *r0, &ts)?;
            let mut report = ScanReport::new(&[
                "s", "r0", "tau", "sigma", "t2", "max_f", "samples", "passed",
            ]);
            report.push_row(vec![
                Cell::Num(*s),
                Cell::Num(*r0),
                Cell::Num(r.tau),
                Cell::Num(r.sigma),
                Cell::Num(r.t2),
                Cell::Num(r.max_f),
                Cell::from(r.samples),
                Cell::from(r.passed),
            ]);
            Ok(report)
        }
        Command::Extremal {
            s,
            alpha,
            cells,
            iters,
            seed,
            norm,
            variant,
            best,
        } => {
            let params = Params::new(*s)?;
            let a = resolve_alpha(*alpha, params, &spec)?;
            let cfg = mt_config(a, params, *norm, *variant, None)?;
            let res = extremal_search(&cfg, &ExtremalOptions::new(*cells, *iters, *seed))?;
            if let Some(path) = best {
                res.best.write_csv_path(path)?;
            }
            let mut report = res.trace_report();
            report.set_meta("alpha", a);
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::Parser;

    use super::*;

    fn run(args: &[&str]) -> Result<ScanReport> {
        let cli =
            Cli::try_parse_from(std::iter::once("fracmt").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    #[test]
    fn constants_row() {
        let r = run(&["constants", "--s", "0.5"]).unwrap();
        let g = r.column_f64("gamma_s").unwrap()[0];
        let two_pi_sq = 2.0 * std::f64::consts::PI.powi(2);
        assert!((g - two_pi_sq).abs() < 1e-10 * two_pi_sq);
        assert!((r.column_f64("alpha_star").unwrap()[0] - two_pi_sq).abs() < 1e-10 * two_pi_sq);
    }

    #[test]
    fn moser_table_keeps_order_and_columns() {
        let r = run(&["moser-table", "--s", "0.5", "--eps", "1e-2,1e-4,1e-6"]).unwrap();
        assert_eq!(
            r.columns,
            ["eps", "i1", "i2", "i3", "i4", "total", "gap", "log_rate"]
        );
        assert_eq!(r.column_f64("eps").unwrap(), [1e-2, 1e-4, 1e-6]);
    }

    #[test]
    fn alpha_multiplier_scales_threshold() {
        let a = run(&[
            "sharpness",
            "--s",
            "0.5",
            "--alpha-mult",
            "1",
            "--eps",
            "1e-2",
        ])
        .unwrap();
        let b = run(&[
            "sharpness",
            "--s",
            "0.5",
            "--alpha",
            "19.739208802178716",
            "--eps",
            "1e-2",
        ])
        .unwrap();
        let (a, b) = (
            a.column_f64("alpha").unwrap()[0],
            b.column_f64("alpha").unwrap()[0],
        );
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn alpha_flags_are_exclusive_and_required() {
        let parse = |args: &[&str]| {
            Cli::try_parse_from(std::iter::once("fracmt").chain(args.iter().copied()))
        };
        assert!(parse(&["sharpness", "--s", "0.5", "--eps", "1e-2"]).is_err());
        assert!(parse(&[
            "sharpness",
            "--s",
            "0.5",
            "--alpha",
            "1",
            "--alpha-mult",
            "1",
            "--eps",
            "1e-2"
        ])
        .is_err());
    }

    #[test]
    fn invalid_values_are_input_errors() {
        assert_eq!(
            run(&["constants", "--s", "1.5"]).unwrap_err().kind(),
            "input"
        );
        assert_eq!(
            run(&["ruf-check", "--s", "0.5", "--r0", "4", "--samples", "0"])
                .unwrap_err()
                .kind(),
            "input"
        );
        assert_eq!(
            run(&["rate", "--s", "0.5", "--eps", "1e-4,1e-2"])
                .unwrap_err()
                .kind(),
            "input"
        );
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("u.csv");
        let output = dir.path().join("star.csv");
        let u = GridFunction::uniform(0.0, 1.0, 8, |x| (x * (1.0 - x) * 7.0).sin().abs()).unwrap();
        u.write_csv_path(&input).unwrap();
        let (i, o) = (input.to_str().unwrap(), output.to_str().unwrap());
        run(&["rearrange", "--input", i, "--output", o]).unwrap();
        let star = GridFunction::read_csv_path(&output).unwrap();
        assert_eq!(star, rearrange(&u, 2.0).unwrap().rearranged);
        let ps = run(&["polya-szego", "--input", i, "--s", "0.5"]).unwrap();
        assert!(ps.column_f64("gap").unwrap()[0] >= -1e-8);
        let semi = run(&["seminorm", "--input", i, "--s", "0.5"]).unwrap();
        assert_eq!(
            semi.column_f64("seminorm_p").unwrap(),
            ps.column_f64("seminorm_original").unwrap()
        );
        let mt = run(&[
            "mt",
            "--input",
            i,
            "--s",
            "0.5",
            "--alpha",
            "1",
            "--variant",
            "phi",
        ])
        .unwrap();
        assert!(mt.column_f64("value").unwrap()[0] > 0.0);
        let missing = dir.path().join("missing.csv");
        let err = run(&[
            "seminorm",
            "--input",
            missing.to_str().unwrap(),
            "--s",
            "0.5",
        ])
        .unwrap_err();
        assert_eq!(err.kind(), "io");
    }
}
