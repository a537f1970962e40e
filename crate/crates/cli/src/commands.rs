//! Subcommand implementations. Each returns the text to emit.

use std::sync::Arc;

use corrlab::discord::{
    discord_exact, discord_weak, principal_axis_angle, profile, sector_scan, GridAxis, SectorScan,
};
use corrlab::entropy::{bloch_entropy, EntropicForm, EntropyRegistry};
use corrlab::geometry::{correlation_ellipsoid, sample_surface};
use corrlab::optimizer::{Method, MinimizerRegistry};
use corrlab::states::BlochDecomposition;
use corrlab::{Error, MinimizerConfig, Tolerances};
use serde_json::{json, Value};

use crate::input::StateFile;
use crate::output::{Cell, ResultRecord, Table};
use crate::CliError;

pub struct Loaded {
    pub file: StateFile,
    pub state: BlochDecomposition,
}

fn entropy(name: &str) -> Result<Arc<dyn EntropicForm>, CliError> {
    Ok(EntropyRegistry::with_builtins().parse(name)?)
}

fn input_echo(loaded: &Loaded, options: Value) -> Value {
    json!({ "state": loaded.file, "options": options })
}

fn rows(m: &corrlab::RMatrix) -> Vec<Vec<f64>> {
    m.to_rows()
}

pub fn analyze(loaded: &Loaded, entropy_name: &str, tol: &Tolerances) -> Result<String, CliError> {
    let f = entropy(entropy_name)?;
    let b = &loaded.state;
    let svd = b.principal_frame();
    let s_a = bloch_entropy(b.r_a(), b.basis(), f.as_ref())?;
    let s_b = bloch_entropy(b.r_b(), corrlab::states::OperatorBasis::shared(2)?.as_ref(), f.as_ref())?;
    let ellipsoid = match correlation_ellipsoid(b) {
        Ok(e) => json!({
            "center": e.center,
            "rank": e.rank(),
            "axes": e.axes.iter().map(|a| json!({ "direction": a.direction, "semi_axis": a.semi_axis })).collect::<Vec<_>>(),
        }),
        Err(Error::DegenerateQubit) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let output = json!({
        "d_A": b.d_a(),
        "r_A": b.r_a(),
        "r_B": b.r_b(),
        "C": rows(b.correlations()),
        "singular_values": svd.singular_values,
        "entropy": f.name(),
        "S_A": s_a,
        "S_B": s_b,
        "min_eigenvalue": b.check_positive().min_eigenvalue,
        "ellipsoid": ellipsoid,
    });
    let input = input_echo(loaded, json!({ "entropy": entropy_name }));
    Ok(ResultRecord::new("analyze", input, tol, output).to_json())
}

pub fn optimize(
    loaded: &Loaded,
    entropy_name: &str,
    method: &str,
    config: &MinimizerConfig,
    tol: &Tolerances,
) -> Result<String, CliError> {
    let f = entropy(entropy_name)?;
    let minimizer = MinimizerRegistry::with_builtins().get(method, config)?;
    let b = &loaded.state;
    let mut r = minimizer.minimize(b, f.as_ref())?;
    if let Some(gap) = r.eigen_gap {
        r.degenerate = gap < tol.degenerate;
    }
    let angle = if b.d_a() == 2 { Some(principal_axis_angle(b, &r.k_opt)) } else { None };
    let output = json!({
        "method": r.method.as_str(),
        "entropy": f.name(),
        "k_opt": r.k_opt,
        "lambda_max": r.lambda_max,
        "s_min": r.s_min,
        "degenerate": r.degenerate,
        "principal_axis_angle": angle,
        "crossover": angle.is_some_and(|a| a > tol.crossover_angle),
    });
    let input = input_echo(
        loaded,
        json!({ "entropy": entropy_name, "method": r.method.as_str(), "grid": config.grid_n }),
    );
    Ok(ResultRecord::new("optimize", input, tol, output).to_json())
}

pub fn discord(loaded: &Loaded, method: &str, config: &MinimizerConfig, tol: &Tolerances) -> Result<String, CliError> {
    let b = &loaded.state;
    let method: Method = method.parse()?;
    let d = match method {
        Method::Oracle => discord_exact(b, config, tol.crossover_angle)?,
        Method::WeakCorrelation => discord_weak(b)?,
        Method::ExactQuadratic => {
            return Err(CliError::usage("discord supports `oracle` and `weak`".to_string()))
        }
    };
    let output = json!({
        "method": d.method.as_str(),
        "discord": d.discord,
        "mutual_info": d.mutual_info,
        "k_opt": d.k_opt,
        "crossover": d.crossover,
        "degenerate": d.degenerate,
    });
    let input = input_echo(loaded, json!({ "method": d.method.as_str(), "grid": config.grid_n }));
    Ok(ResultRecord::new("discord", input, tol, output).to_json())
}

pub fn profile_csv(loaded: &Loaded, steps: usize, extra: &[String]) -> Result<String, CliError> {
    let forms = extra.iter().map(|n| entropy(n)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&dyn EntropicForm> = forms.iter().map(|f| f.as_ref()).collect();
    let rows = profile(&loaded.state, steps, &refs)?;
    let mut header: Vec<String> =
        ["theta", "ds_quad", "ds_vn", "ds_vn_weak", "discord", "discord_quad"].map(String::from).to_vec();
    header.extend(forms.iter().map(|f| format!("ds_{}", f.name())));
    let mut table = Table::new(header);
    for r in rows {
        let mut cells: Vec<Cell> = vec![
            r.theta.into(),
            r.ds_quad.into(),
            r.ds_vn.into(),
            r.ds_vn_weak.into(),
            r.discord.into(),
            r.discord_quad.into(),
        ];
        cells.extend(r.extra.into_iter().map(Cell::from));
        table.push(cells);
    }
    Ok(table.to_csv())
}

pub struct ScanArgs {
    pub r_b: f64,
    pub j_z: f64,
    pub grid: usize,
    pub r_a_max: f64,
    pub j_x_max: f64,
}

pub fn scan_sectors_csv(args: &ScanArgs, config: &MinimizerConfig, tol: &Tolerances) -> Result<String, CliError> {
    for (name, v) in [("r_B", args.r_b), ("J_z", args.j_z), ("r_A max", args.r_a_max), ("J_x max", args.j_x_max)] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(CliError::usage(format!("{name} = {v} is outside [-1, 1]")));
        }
    }
    if args.grid == 0 {
        return Err(CliError::usage("grid must be positive".to_string()));
    }
    let scan = SectorScan {
        r_a: GridAxis::new(0.0, args.r_a_max, args.grid),
        j_x: GridAxis::new(0.0, args.j_x_max, args.grid),
        oracle: *config,
        crossover_angle: tol.crossover_angle,
        ..SectorScan::new(args.r_b, args.j_z)
    };
    let points = sector_scan(&scan)?;
    let mut table = Table::new(["r_A", "J_x", "sector", "crossover"]);
    for p in points {
        table.push(vec![p.r_a.into(), p.j_x.into(), p.label.as_str().into(), p.crossover.into()]);
    }
    Ok(table.to_csv())
}

pub fn ellipsoid_csv(loaded: &Loaded, samples: usize) -> Result<String, CliError> {
    let b = &loaded.state;
    // fails early on a pure qubit marginal
    correlation_ellipsoid(b)?;
    let mut table = Table::new((1..=b.big_d()).map(|i| format!("r{i}")));
    for p in sample_surface(b, samples) {
        table.push(p.into_iter().map(Cell::from).collect());
    }
    Ok(table.to_csv())
}
