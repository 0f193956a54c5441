use std::path::Path;

use wade_core::dynamics::{GrowthRate, ReversalConvention};
use wade_core::io::{self, ResampleMode};
use wade_core::model::{super_profit_series, ReferencePrice};
use wade_core::plot::{crisis_price_markers, PlotSeries, PlotSpec};
use wade_core::pontryagin::{solve_pmp_with_rate, PriceGuard, SingularPolicy};
use wade_core::sweeps::{
    run_initial_sweep_with_rate, run_terminal_sweep_with, Indexing, SweepMode,
};
use wade_core::winwin::{evolve_winwin_price, winwin_consistency, InvestmentResponse};
use wade_core::{
    calibrate_c0, make_grid, stationarity_residual, ModelParams, PriceContext, Series, SweepSpec,
    TimeGrid, Trajectory, WinWinParams,
};

use crate::args::*;
use crate::error::{CliError, CliResult, InputContext};
use crate::output::RunDir;

fn ensure_exists(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "input file not found: {}",
            path.display()
        )))
    }
}

fn load(path: &Path) -> CliResult<Vec<io::AnnualRecord>> {
    ensure_exists(path)?;
    io::load_annual_csv_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn mode(r: Resampling) -> ResampleMode {
    match r {
        Resampling::Step => ResampleMode::Step,
        Resampling::Linear => ResampleMode::Linear,
    }
}

/// Yearly grid spanning the records, optionally refined to `steps`.
fn record_grid(
    records: &[io::AnnualRecord],
    steps: Option<usize>,
    what: &Path,
) -> CliResult<TimeGrid> {
    let (first, last) = match (records.first(), records.last()) {
        (Some(f), Some(l)) if l.year > f.year => (f.year, l.year),
        _ => {
            return Err(CliError::Usage(format!(
                "{}: need records for at least two distinct years",
                what.display()
            )))
        }
    };
    let n = steps.unwrap_or((last - first) as usize);
    make_grid(first as f64, last as f64, n).input()
}

struct PricePath {
    grid: TimeGrid,
    prices: Series,
    w: Series,
}

fn price_path(args: &PathArgs, run: &mut RunDir) -> CliResult<PricePath> {
    let (grid, prices) = match (&args.prices, &args.synthetic_prices) {
        (Some(path), _) => {
            let records = load(path)?;
            let grid = record_grid(&records, args.steps, path)?;
            let prices = io::resample(&records, &grid, mode(args.price_resample)).input()?;
            run.record("prices", path.display());
            run.record(
                "price_resample",
                format!("{:?}", args.price_resample).to_lowercase(),
            );
            (grid, prices)
        }
        (None, Some(ramp)) => {
            let (lo, hi) = parse_ramp(ramp)?;
            let grid = make_grid(args.t_start, args.t_end, args.steps.unwrap_or(100)).input()?;
            let span = grid.span();
            let t0 = grid.t_start();
            let prices = Series::from_fn(grid, |t| lo + (hi - lo) * (t - t0) / span).input()?;
            run.record("synthetic_prices", ramp);
            (grid, prices)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --prices or --synthetic-prices is required".into(),
            ))
        }
    };
    run.record(
        "grid",
        format!("{}:{}:{}", grid.t_start(), grid.t_end(), grid.n_steps()),
    );

    let w = match &args.other_demand {
        Some(path) => {
            run.record("other_demand", path.display());
            io::resample(&load(path)?, &grid, ResampleMode::Linear).input()?
        }
        None => {
            run.record("w", args.w);
            Series::constant(grid, args.w).input()?
        }
    };
    Ok(PricePath { grid, prices, w })
}

fn parse_ramp(ramp: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("--synthetic-prices expects LO:HI, got `{ramp}`"));
    let (lo, hi) = ramp.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((lo, hi))
}

struct Model {
    params: ModelParams,
    guard: PriceGuard<f64>,
    rate: GrowthRate<f64>,
}

fn resolve_model(args: &ModelArgs, path: &PricePath, run: &mut RunDir) -> CliResult<Model> {
    let guard = PriceGuard::new(
        args.epsilon_band,
        if args.clip {
            SingularPolicy::Clip
        } else {
            SingularPolicy::Error
        },
    )
    .input()?;
    let mut params = ModelParams::new(
        args.alpha,
        args.m,
        args.c0.unwrap_or(wade_core::model::DEFAULT_C0),
        args.p0,
    )
    .input()?;
    if let Some(a_obs) = args.calibrate_demand {
        let c0 = calibrate_c0(a_obs, path.prices.first(), 0.0, &params, &guard).input()?;
        params = params.with_c0(c0).input()?;
        run.record("c0_mode", "calibrated");
        run.record("calibrate_demand", a_obs);
    } else {
        run.record("c0_mode", "explicit");
    }
    let rate = match &args.alpha_csv {
        Some(csv) => {
            run.record("alpha_csv", csv.display());
            GrowthRate::Varying(
                io::resample(&load(csv)?, &path.grid, ResampleMode::Linear).input()?,
            )
        }
        None => GrowthRate::Constant(params.alpha),
    };
    run.record("alpha", params.alpha);
    run.record("m", params.m);
    run.record("c0", params.c0);
    run.record("p0", params.p0_base);
    run.record("epsilon_band", guard.epsilon_band);
    run.record("clip", args.clip);
    Ok(Model {
        params,
        guard,
        rate,
    })
}

fn output_dir(command: &str, out: &OutputArgs) -> CliResult<RunDir> {
    RunDir::create(command, out.out_dir.as_deref(), out.out_root.as_deref())
}

fn line_plot(title: &str, x: &str, y: &str, series: Vec<PlotSeries>) -> PlotSpec {
    PlotSpec {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        series,
        ..Default::default()
    }
}

fn points(s: &Series) -> Vec<(f64, f64)> {
    s.points().collect()
}

pub fn superprofit(args: &SuperprofitArgs) -> CliResult<()> {
    ensure_exists(&args.prices)?;
    if let Some(q) = &args.quantities {
        ensure_exists(q)?;
    }
    let mut run = output_dir("superprofit", &args.output)?;
    let records = load(&args.prices)?;
    let grid = record_grid(&records, None, &args.prices)?;
    let prices = io::resample(&records, &grid, mode(args.price_resample)).input()?;
    let q = match &args.quantities {
        Some(path) => {
            run.record("quantities", path.display());
            io::resample(&load(path)?, &grid, ResampleMode::Linear).input()?
        }
        None => {
            run.record("quantity", args.quantity);
            Series::constant(grid, args.quantity).input()?
        }
    };
    if !(args.p0.is_finite() && args.p0 > 0.0) {
        return Err(CliError::Usage(format!(
            "--p0 must be a positive price, got {}",
            args.p0
        )));
    }
    let s = super_profit_series(&prices, &q, &ReferencePrice::Constant(args.p0)).input()?;
    run.record("prices", args.prices.display());
    run.record("p0", args.p0);
    run.record(
        "price_resample",
        format!("{:?}", args.price_resample).to_lowercase(),
    );

    let t: Vec<f64> = grid.nodes().collect();
    run.write_columns(
        "superprofit.csv",
        &[
            ("t", &t),
            ("p", prices.values()),
            ("q", q.values()),
            ("S", s.values()),
        ],
    )?;
    if args.output.plot {
        run.write_plot(
            "superprofit.svg",
            &line_plot(
                "Super profit",
                "year",
                "S (USD)",
                vec![PlotSeries::new("S(t)", points(&s))],
            ),
        )?;
        let mut price_plot = line_plot(
            "Barrel price",
            "year",
            "USD/barrel",
            vec![PlotSeries::new("p(t)", points(&prices))],
        );
        price_plot.horizontal_markers = crisis_price_markers();
        run.write_plot("prices.svg", &price_plot)?;
    }
    finish(run)
}

fn finish(run: RunDir) -> CliResult<()> {
    let dir = run.finish()?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn write_trajectory(run: &mut RunDir, name: &str, traj: &Trajectory) -> CliResult<()> {
    run.write_with(name, |sink| io::write_trajectory_csv(traj, sink))
}

fn trajectory_plots(run: &mut RunDir, traj: &Trajectory, m: u32) -> CliResult<()> {
    let mut demand: Vec<(f64, f64)> = traj
        .price
        .values()
        .iter()
        .copied()
        .zip(traj.a_star.values().iter().copied())
        .collect();
    demand.sort_by(|a, b| a.0.total_cmp(&b.0));
    run.write_plot(
        "demand_vs_price.svg",
        &line_plot(
            "Optimal demand",
            "price (USD/barrel)",
            "a*",
            vec![PlotSeries::new("a*(p)", demand)],
        ),
    )?;
    let objective = traj.super_profit.map(|s| s.powi(m as i32)).compute()?;
    run.write_plot(
        "objective.svg",
        &line_plot(
            "Objective integrand",
            "t",
            &format!("S^{m}"),
            vec![PlotSeries::new(format!("S(t)^{m}"), points(&objective))],
        ),
    )?;
    run.write_plot(
        "reserves.svg",
        &line_plot(
            "Reserves",
            "t",
            "R",
            vec![PlotSeries::new("R(t)", points(&traj.reserves))],
        ),
    )
}

fn check_files(model: &ModelArgs, path: &PathArgs) -> CliResult<()> {
    for p in [&path.prices, &path.other_demand, &model.alpha_csv]
        .into_iter()
        .flatten()
    {
        ensure_exists(p)?;
    }
    Ok(())
}

pub fn optimal(args: &OptimalArgs) -> CliResult<()> {
    check_files(&args.model, &args.path)?;
    let mut run = output_dir("optimal", &args.output)?;
    let path = price_path(&args.path, &mut run)?;
    let model = resolve_model(&args.model, &path, &mut run)?;
    let ctx = PriceContext::new(path.prices.clone(), path.w.clone(), model.guard).input()?;
    run.record("q0", args.path.q0);

    let traj = solve_pmp_with_rate(&model.params, &model.rate, &ctx, args.path.q0, &path.grid)
        .compute()?;
    run.record(
        "stationarity_residual",
        format!("{:e}", stationarity_residual(&traj, &ctx, &model.params)),
    );
    run.record("objective", traj.objective(model.params.m));
    write_trajectory(&mut run, "trajectory.csv", &traj)?;
    if args.output.plot {
        trajectory_plots(&mut run, &traj, model.params.m)?;
    }
    finish(run)
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    check_files(&args.model, &args.path)?;
    if args.check_reversal && args.mode != SweepModeArg::Terminal {
        return Err(CliError::Usage(
            "--check-reversal requires --mode terminal".into(),
        ));
    }
    let mut run = output_dir("sweep", &args.output)?;
    let path = price_path(&args.path, &mut run)?;
    let model = resolve_model(&args.model, &path, &mut run)?;
    let ctx = PriceContext::new(path.prices.clone(), path.w.clone(), model.guard).input()?;

    let spec = SweepSpec {
        t0: args.t0,
        h: args.h.unwrap_or(path.grid.span()),
        lo: args.lo,
        hi: args.hi,
        k_values: args.k.clone(),
        mode: match args.mode {
            SweepModeArg::Initial => SweepMode::Initial,
            SweepModeArg::Terminal => SweepMode::Terminal,
        },
        indexing: match args.k_max {
            Some(k_max) => Indexing::Normalized { k_max },
            None => Indexing::Horizon,
        },
    };
    spec.validate().input()?;
    for &k in &spec.k_values {
        wade_core::qk(k, &spec).input()?;
    }
    run.record("mode", format!("{:?}", args.mode).to_lowercase());
    run.record("lo", spec.lo);
    run.record("hi", spec.hi);
    run.record("t0", spec.t0);
    run.record("h", spec.h);
    run.record(
        "k",
        spec.k_values
            .iter()
            .map(i64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    run.record(
        "indexing",
        match spec.indexing {
            Indexing::Horizon => "horizon".to_string(),
            Indexing::Normalized { k_max } => format!("normalized:{k_max}"),
        },
    );

    let convention = match args.reversal {
        ReversalArg::TimeReversed => ReversalConvention::TimeReversed,
        ReversalArg::Literal => ReversalConvention::Literal,
    };
    let result = match spec.mode {
        SweepMode::Initial => {
            run_initial_sweep_with_rate(&spec, &model.params, &model.rate, &ctx, &path.grid)
                .compute()?
        }
        SweepMode::Terminal => {
            run.record("reversal", format!("{:?}", args.reversal).to_lowercase());
            run_terminal_sweep_with(
                &spec,
                &model.params,
                &model.rate,
                &ctx,
                &path.grid,
                convention,
            )
            .compute()?
        }
    };
    run.write_with("sweep.csv", |sink| io::write_sweep_csv(&result, sink))?;
    run.write_with("objectives.csv", |sink| {
        io::write_sweep_objectives_csv(&result, sink)
    })?;

    if args.check_reversal {
        let forward =
            solve_pmp_with_rate(&model.params, &model.rate, &ctx, args.path.q0, &path.grid)
                .compute()?;
        let single = SweepSpec {
            lo: forward.reserves.last(),
            hi: forward.reserves.last(),
            k_values: vec![0],
            ..spec.clone()
        };
        let back = run_terminal_sweep_with(
            &single,
            &model.params,
            &model.rate,
            &ctx,
            &path.grid,
            convention,
        )
        .compute()?;
        let y = back.entries[0].trajectory.reserves.values();
        let r = forward.reserves.values();
        let n = r.len() - 1;
        let max_rel = (0..=n)
            .map(|j| ((y[j] - r[n - j]) / r[n - j].abs().max(f64::MIN_POSITIVE)).abs())
            .fold(0.0, f64::max);
        run.record("q0", args.path.q0);
        run.record("reversal_max_relative_error", max_rel);
        run.write_text(
            "reversal_check.txt",
            &format!("max_relative_error={max_rel}\n"),
        )?;
        println!("reversal max relative error: {max_rel:e}");
    }

    if args.output.plot {
        let series = result
            .entries
            .iter()
            .map(|e| PlotSeries::new(format!("k = {}", e.k), points(&e.trajectory.reserves)))
            .collect();
        let x_label = if spec.mode == SweepMode::Terminal {
            "s = T - t"
        } else {
            "t"
        };
        run.write_plot(
            "sweep_reserves.svg",
            &line_plot("Reserves by sweep index", x_label, "R", series),
        )?;
    }
    finish(run)
}

pub fn winwin(args: &WinwinArgs) -> CliResult<()> {
    for p in [
        &args.investment,
        &args.chain_prices,
        &args.chain_model.alpha_csv,
    ]
    .into_iter()
    .flatten()
    {
        ensure_exists(p)?;
    }
    let mut run = output_dir("winwin", &args.output)?;

    let chain_records = match &args.chain_prices {
        Some(p) => Some(load(p)?),
        None => None,
    };
    let investment_records = match &args.investment {
        Some(p) => Some(load(p)?),
        None => None,
    };
    let grid = match (&chain_records, &investment_records) {
        (Some(recs), _) => record_grid(
            recs,
            args.steps,
            args.chain_prices.as_deref().unwrap_or(Path::new("")),
        )?,
        (None, Some(recs)) => record_grid(
            recs,
            args.steps,
            args.investment.as_deref().unwrap_or(Path::new("")),
        )?,
        (None, None) => make_grid(args.t_start, args.t_end, args.steps.unwrap_or(500)).input()?,
    };
    run.record(
        "grid",
        format!("{}:{}:{}", grid.t_start(), grid.t_end(), grid.n_steps()),
    );

    let investment = match &investment_records {
        Some(recs) => {
            run.record(
                "investment",
                args.investment
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
            );
            io::resample(recs, &grid, ResampleMode::Linear).input()?
        }
        None => {
            run.record("investment_const", args.investment_const);
            Series::constant(grid, args.investment_const).input()?
        }
    };
    let response = match args.response {
        ResponseArg::Linear => {
            run.record("kappa", args.kappa);
            InvestmentResponse::Linear { kappa: args.kappa }
        }
        ResponseArg::Saturating => {
            run.record("ceiling", args.ceiling);
            InvestmentResponse::Saturating {
                ceiling: args.ceiling,
            }
        }
        ResponseArg::Constant => {
            run.record("f_value", args.f_value);
            InvestmentResponse::Constant {
                value: args.f_value,
            }
        }
    };
    run.record("f", response.name());
    run.record("mu", args.mu);
    run.record("pr", args.pr);
    run.record("p0_init", args.p0_init);
    let ww = WinWinParams::new(args.mu, args.pr, investment, response).input()?;
    let p0 = evolve_winwin_price(&ww, args.p0_init, &grid).compute()?;
    let residual = winwin_consistency(&p0, &ww).compute()?;
    let t: Vec<f64> = grid.nodes().collect();
    run.write_columns(
        "winwin.csv",
        &[
            ("t", &t),
            ("P0", p0.values()),
            ("i", ww.investment.values()),
            ("residual", residual.values()),
        ],
    )?;

    if let (Some(recs), Some(path)) = (&chain_records, &args.chain_prices) {
        let prices = io::resample(recs, &grid, ResampleMode::Step).input()?;
        let w = Series::constant(grid, 0.0).input()?;
        let price_path = PricePath { grid, prices, w };
        run.record("chain_prices", path.display());
        let model = resolve_model(&args.chain_model, &price_path, &mut run)?;
        let ctx = PriceContext::new(price_path.prices.clone(), price_path.w.clone(), model.guard)
            .input()?
            .with_reference(ReferencePrice::Path(p0.clone()))
            .input()?;
        run.record("q0", args.q0);
        let traj =
            solve_pmp_with_rate(&model.params, &model.rate, &ctx, args.q0, &grid).compute()?;
        write_trajectory(&mut run, "trajectory.csv", &traj)?;
    }

    if args.output.plot {
        run.write_plot(
            "winwin.svg",
            &line_plot(
                "Win-win reference price",
                "t",
                "USD/barrel",
                vec![
                    PlotSeries::new("P0(t)", points(&p0)),
                    PlotSeries::new("P0 - i - pr", points(&residual)),
                ],
            ),
        )?;
    }
    finish(run)
}
