//! Benchmark runner: trains registered suites, sweeps hyperparameters,
//! and compares integrators, emitting machine-readable CSV/JSON reports.
//!
//! Reports are deterministic for identical flags apart from the
//! `wall_time_ms` column. The default output directory can be set with the
//! `QUADNN_OUT_DIR` environment variable.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quadnn::problems::registry::{suite_ids, suite_registry};
use quadnn::problems::{train_best_of, Suite, TrainConfig};
use quadnn::quadrature::{map_rule, monte_carlo, trapezoid, Family, QuadratureRule};

use report::{QuadCompareRow, ReportRow};

#[derive(Parser)]
#[command(name = "quadnn-cli", about = "physics-informed solver benchmarks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuadFamilyArg {
    Legendre,
    Chebyshev1,
    Chebyshev2,
    Chebyshev3,
    Chebyshev4,
}

impl QuadFamilyArg {
    fn family(self) -> Family {
        match self {
            QuadFamilyArg::Legendre => Family::Legendre,
            QuadFamilyArg::Chebyshev1 => Family::Chebyshev1,
            QuadFamilyArg::Chebyshev2 => Family::Chebyshev2,
            QuadFamilyArg::Chebyshev3 => Family::Chebyshev3,
            QuadFamilyArg::Chebyshev4 => Family::Chebyshev4,
        }
    }
}

#[derive(Args, Clone)]
struct RunOverrides {
    /// Training points (per axis for multi-dimensional problems).
    #[arg(long)]
    n: Option<usize>,
    /// Hidden widths, comma separated (e.g. 10,10).
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    epochs_adam: Option<usize>,
    #[arg(long)]
    epochs_lbfgs: Option<usize>,
    /// L-BFGS initial step scale.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    adam_lr: Option<f64>,
    /// Quadrature family for finite 1-D axes.
    #[arg(long, value_enum)]
    quad_family: Option<QuadFamilyArg>,
    /// Use the singularity-matched Gauss-Jacobi inner rule on Abel terms.
    #[arg(long)]
    abel_jacobi: bool,
    #[arg(long)]
    lambda_ic: Option<f64>,
    #[arg(long)]
    lambda_bc: Option<f64>,
    #[arg(long)]
    lambda_data: Option<f64>,
}

impl RunOverrides {
    fn apply(&self, mut config: TrainConfig) -> TrainConfig {
        if let Some(n) = self.n {
            config.n_train = n;
        }
        if let Some(h) = &self.hidden {
            config.hidden = h
                .split(',')
                .map(|s| s.trim().parse().expect("hidden widths"))
                .collect();
        }
        if let Some(e) = self.epochs_adam {
            config.schedule.adam_epochs = e;
        }
        if let Some(e) = self.epochs_lbfgs {
            config.schedule.lbfgs_epochs = e;
        }
        if let Some(lr) = self.lr {
            config.schedule.lbfgs_lr = lr;
        }
        if let Some(lr) = self.adam_lr {
            config.schedule.adam_lr = lr;
        }
        if let Some(f) = self.quad_family {
            config.quad_family = f.family();
        }
        if self.abel_jacobi {
            config.abel_jacobi = true;
        }
        if let Some(l) = self.lambda_ic {
            config.lambdas.ic = l;
        }
        if let Some(l) = self.lambda_bc {
            config.lambdas.bc = l;
        }
        if let Some(l) = self.lambda_data {
            config.lambdas.data = l;
        }
        config
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train suites matched by the selector and write one report row per
    /// (suite, seed).
    Run {
        /// Suite id or glob (`t3r*`, `oc-ex1`, ...).
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        overrides: RunOverrides,
        /// Base seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Run seeds seed..seed+k and mark the best row per suite.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Cartesian hyperparameter sweep over matched suites.
    Sweep {
        #[arg(long, default_value = "ex*")]
        suite: String,
        /// Node counts, comma separated.
        #[arg(long, default_value = "5,10,20")]
        n_list: String,
        /// L-BFGS step scales, comma separated.
        #[arg(long, default_value = "0.1")]
        lr_list: String,
        /// Hidden-width alternatives, semicolon separated
        /// (e.g. `10,10;16,16;10,10,10`).
        #[arg(long)]
        hidden_list: Option<String>,
        #[arg(long)]
        epochs_lbfgs: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Absolute integration errors of Gauss-Legendre, trapezoid and Monte
    /// Carlo on a built-in test function.
    QuadCompare {
        /// One of: exp, sin, runge, sqrt.
        #[arg(long, default_value = "exp")]
        function: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value = "4,8,16,32")]
        n_list: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// List every registered suite.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { suite, overrides, seed, seeds, out, format } => {
            run(&suite, &overrides, seed, seeds, out, format)
        }
        Command::Sweep { suite, n_list, lr_list, hidden_list, epochs_lbfgs, seed, out, format } => {
            sweep(&suite, &n_list, &lr_list, hidden_list.as_deref(), epochs_lbfgs, seed, out, format)
        }
        Command::QuadCompare { function, a, b, n_list, seed, out, format } => {
            quad_compare(&function, a, b, &n_list, seed, out, format)
        }
        Command::List => {
            for (id, description) in suite_ids() {
                println!("{id:14} {description}");
            }
            ExitCode::SUCCESS
        }
    }
}

/// `*`-wildcard matcher over suite ids.
fn glob_match(pattern: &str, id: &str) -> bool {
    fn rec(p: &[u8], s: &[u8]) -> bool {
        match (p.first(), s.first()) {
            (None, None) => true,
            (Some(b'*'), _) => rec(&p[1..], s) || (!s.is_empty() && rec(p, &s[1..])),
            (Some(&pc), Some(&sc)) if pc == sc => rec(&p[1..], &s[1..]),
            _ => false,
        }
    }
    rec(pattern.as_bytes(), id.as_bytes())
}

fn matched_suites(selector: &str) -> Result<Vec<Suite>, ExitCode> {
    let suites: Vec<Suite> = suite_registry()
        .into_iter()
        .filter(|s| glob_match(selector, s.id))
        .collect();
    if suites.is_empty() {
        eprintln!("unknown suite selector {selector:?}; valid ids:");
        for (id, _) in suite_ids() {
            eprintln!("  {id}");
        }
        return Err(ExitCode::from(1));
    }
    Ok(suites)
}

fn output_path(out: Option<PathBuf>) -> Option<PathBuf> {
    let out = out?;
    if out.is_absolute() {
        return Some(out);
    }
    match std::env::var_os("QUADNN_OUT_DIR") {
        Some(dir) => Some(PathBuf::from(dir).join(out)),
        None => Some(out),
    }
}

fn emit(rows: &[ReportRow], out: Option<PathBuf>, format: Format) -> ExitCode {
    let text = match format {
        Format::Csv => report::to_csv(rows),
        Format::Json => report::to_json(rows),
    };
    match output_path(out) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{text}"),
    }
    if rows.iter().any(|r| !r.final_loss.is_finite()) {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn run(
    selector: &str,
    overrides: &RunOverrides,
    seed: u64,
    seeds: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
) -> ExitCode {
    let suites = match matched_suites(selector) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let seed_list: Vec<u64> = match seeds {
        Some(k) => (0..k as u64).map(|i| seed + i).collect(),
        None => vec![seed],
    };
    let mut rows = Vec::new();
    for suite in &suites {
        let config = overrides.apply(suite.defaults.clone());
        match train_best_of(suite, &config, &seed_list) {
            Ok((reports, best)) => {
                for (i, r) in reports.iter().enumerate() {
                    rows.push(ReportRow::from_report(r, seed_list.len() > 1 && i == best));
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", suite.id);
                return ExitCode::from(2);
            }
        }
    }
    emit(&rows, out, format)
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    selector: &str,
    n_list: &str,
    lr_list: &str,
    hidden_list: Option<&str>,
    epochs_lbfgs: Option<usize>,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
) -> ExitCode {
    let suites = match matched_suites(selector) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let ns: Vec<usize> = n_list.split(',').map(|s| s.trim().parse().expect("n list")).collect();
    let lrs: Vec<f64> = lr_list.split(',').map(|s| s.trim().parse().expect("lr list")).collect();
    let hiddens: Vec<Option<Vec<usize>>> = match hidden_list {
        None => vec![None],
        Some(spec) => spec
            .split(';')
            .map(|group| {
                Some(
                    group
                        .split(',')
                        .map(|s| s.trim().parse().expect("hidden widths"))
                        .collect(),
                )
            })
            .collect(),
    };
    if ns.is_empty() || lrs.is_empty() || hiddens.is_empty() {
        eprintln!("empty sweep grid");
        return ExitCode::from(1);
    }
    let mut rows = Vec::new();
    for suite in &suites {
        for &n in &ns {
            for &lr in &lrs {
                for hidden in &hiddens {
                    let mut config = suite.defaults.clone();
                    config.n_train = n;
                    config.schedule.lbfgs_lr = lr;
                    if let Some(h) = hidden {
                        config.hidden = h.clone();
                    }
                    if let Some(e) = epochs_lbfgs {
                        config.schedule.lbfgs_epochs = e;
                    }
                    config.seed = seed;
                    match suite.train(&config) {
                        Ok(r) => rows.push(ReportRow::from_report(&r, false)),
                        Err(e) => {
                            eprintln!("{} (n={n}, lr={lr}): {e}", suite.id);
                            return ExitCode::from(2);
                        }
                    }
                }
            }
        }
    }
    emit(&rows, out, format)
}

fn quad_compare(
    function: &str,
    a: f64,
    b: f64,
    n_list: &str,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
) -> ExitCode {
    // test functions with closed-form antiderivatives
    let (f, exact): (fn(f64) -> f64, Box<dyn Fn(f64, f64) -> f64>) = match function {
        "exp" => (f64::exp, Box::new(|a: f64, b: f64| b.exp() - a.exp())),
        "sin" => (f64::sin, Box::new(|a: f64, b: f64| a.cos() - b.cos())),
        "runge" => (
            |x| 1.0 / (1.0 + 25.0 * x * x),
            Box::new(|a: f64, b: f64| ((5.0 * b).atan() - (5.0 * a).atan()) / 5.0),
        ),
        "sqrt" => (
            |x| x.sqrt(),
            Box::new(|a: f64, b: f64| 2.0 / 3.0 * (b.powf(1.5) - a.powf(1.5))),
        ),
        other => {
            eprintln!("unknown function {other:?}; choose exp, sin, runge or sqrt");
            return ExitCode::from(1);
        }
    };
    if function == "sqrt" && a < 0.0 {
        eprintln!("sqrt needs a >= 0");
        return ExitCode::from(1);
    }
    let truth = exact(a, b);
    let ns: Vec<usize> = n_list.split(',').map(|s| s.trim().parse().expect("n list")).collect();
    let mut rows = Vec::new();
    for &n in &ns {
        let rule = QuadratureRule::new(Family::Legendre, n).expect("legendre rule");
        let gauss = map_rule(&rule, a, b).expect("map").integrate_fn(f);
        let samples: Vec<f64> = (0..n.max(2))
            .map(|i| f(a + (b - a) * i as f64 / (n.max(2) as f64 - 1.0)))
            .collect();
        let trap = trapezoid(&samples, a, b).expect("trapezoid");
        let mc = monte_carlo(f, a, b, n, seed).expect("monte carlo");
        rows.push(QuadCompareRow {
            function: function.to_string(),
            a,
            b,
            n,
            gauss_error: (gauss - truth).abs(),
            trapezoid_error: (trap - truth).abs(),
            monte_carlo_error: (mc - truth).abs(),
        });
    }
    let text = match format {
        Format::Csv => report::quad_to_csv(&rows),
        Format::Json => report::quad_to_json(&rows),
    };
    match output_path(out) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

#[cfg(test)]
mod tests {
    use super::glob_match;

    #[test]
    fn globs() {
        assert!(glob_match("t3r*", "t3r11"));
        assert!(glob_match("t3r1", "t3r1"));
        assert!(!glob_match("t3r1", "t3r11"));
        assert!(glob_match("*", "oc-ex4"));
        assert!(glob_match("pop-*-a1", "pop-k0.1-a1"));
        assert!(!glob_match("t4r*", "t3r2"));
    }
}
