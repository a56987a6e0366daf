use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dimer_core::config::{parse_list, Grid, Overrides, RunConfig};
use dimer_core::eigen::diagonalize;
use dimer_core::error::{Error, Result};
use dimer_core::hamiltonian::ChainParams;
use dimer_core::scans::{self, AlphaCRow, GapRow, LevelRow, ProfileRow, RowKind, SweepRecord, TcRow};

#[derive(Parser)]
#[command(
    name = "dimer",
    version,
    about = "Exact diagonalization and entanglement scans of the dimerized Heisenberg ring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// All eigenvalues, sector by sector
    Spectrum,
    /// Entanglement gap g_E(alpha) and its bound, with the located minimum
    GapScan,
    /// Thermal witness W(alpha, T) and the W = 0 contour
    WitnessMap,
    /// Characteristic temperature T_c(alpha) per ring size
    TcCurve,
    /// Critical alternation alpha_c per ring size
    AlphaC,
    /// Ground-state correlation K0_{1,j} versus distance
    CorrProfile,
    /// Cross-check the closed-form four-site solution
    ValidateL4,
}

#[derive(Args)]
struct Flags {
    /// Ring sizes, comma separated
    #[arg(long = "L", global = true, value_name = "L[,L...]")]
    sites: Option<String>,

    /// Alternation values, comma separated
    #[arg(long, global = true, value_name = "A[,A...]")]
    alpha: Option<String>,

    /// Alternation grid
    #[arg(long = "alpha-grid", global = true, value_name = "MIN:MAX:STEPS")]
    alpha_grid: Option<String>,

    /// Temperature grid
    #[arg(long = "T-grid", global = true, value_name = "MIN:MAX:STEPS")]
    t_grid: Option<String>,

    /// Intra-dimer coupling J'
    #[arg(long, global = true)]
    jprime: Option<f64>,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Flat key = value configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Root-finding tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
}

impl Flags {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            sites: self.sites.as_deref().map(|v| parse_list("L", v)).transpose()?,
            alphas: self.alpha.as_deref().map(|v| parse_list("alpha", v)).transpose()?,
            alpha_grid: self.alpha_grid.as_deref().map(str::parse::<Grid>).transpose()?,
            t_grid: self.t_grid.as_deref().map(str::parse::<Grid>).transpose()?,
            j_prime: self.jprime,
            out: self.out.clone(),
            tol: self.tol,
        })
    }
}

fn build_config(command: Command, flags: &Flags) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if command == Command::AlphaC {
        cfg.sites = vec![4, 6, 8, 10, 12];
    }
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        cfg.apply_text(&text)?;
    }
    cfg.apply(flags.overrides()?);
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    match out {
        Some(path) => {
            scans::write_csv(path, header, rows)?;
            let n = scans::validate_csv(path)?;
            eprintln!("wrote {n} rows to {}", path.display());
            Ok(())
        }
        None => {
            let stdout = io::stdout();
            let mut w = csv::Writer::from_writer(stdout.lock());
            let to_err = |e: csv::Error| Error::Csv {
                path: PathBuf::from("<stdout>"),
                source: e,
            };
            w.write_record(header).map_err(to_err)?;
            for row in rows {
                w.write_record(&row).map_err(to_err)?;
            }
            w.flush().map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn fmt_tc(row: &TcRow) -> String {
    row.critical_temperature()
        .map_or_else(|| "absent".to_string(), |t| format!("{t:.6}"))
}

fn run(command: Command, cfg: &RunConfig) -> Result<()> {
    let out = cfg.out.as_deref();
    match command {
        Command::Spectrum => {
            let alphas = cfg
                .alphas
                .clone()
                .ok_or_else(|| Error::Config("spectrum needs --alpha".into()))?;
            let mut rows: Vec<LevelRow> = Vec::new();
            for &sites in &cfg.sites {
                for &alpha in &alphas {
                    let spectrum = diagonalize(&ChainParams::new(sites, alpha, cfg.j_prime)?)?;
                    eprintln!(
                        "L = {sites}, alpha = {alpha}: E0 = {:.12}{}",
                        spectrum.ground_energy(),
                        if spectrum.is_ground_degenerate() { " (degenerate)" } else { "" }
                    );
                    rows.extend(scans::spectrum_rows(&spectrum));
                }
            }
            emit(out, &LevelRow::HEADER, rows.iter().map(LevelRow::fields))
        }
        Command::GapScan => {
            let rows = scans::gap_scan(cfg)?;
            for r in rows.iter().filter(|r| r.kind == RowKind::Minimum) {
                eprintln!("L = {}: minimum g_E = {:.9} at alpha = {:.5}", r.sites, r.gap.gap, r.alpha);
            }
            emit(out, &GapRow::HEADER, rows.iter().map(GapRow::fields))
        }
        Command::WitnessMap => {
            let map = scans::witness_map(cfg)?;
            for r in &map.contour {
                if r.sign_changes > 1 {
                    eprintln!("warning: L = {}, alpha = {}: {} sign changes of W", r.sites, r.alpha, r.sign_changes);
                }
            }
            emit(out, &SweepRecord::HEADER, map.records.iter().map(SweepRecord::fields))?;
            match out {
                Some(path) => emit(Some(&sibling(path, "contour")), &TcRow::HEADER, map.contour.iter().map(TcRow::fields)),
                None => {
                    for r in &map.contour {
                        eprintln!("L = {}, alpha = {:.4}: T_c = {}", r.sites, r.alpha, fmt_tc(r));
                    }
                    Ok(())
                }
            }
        }
        Command::TcCurve => {
            let rows = scans::tc_curve(cfg)?;
            emit(out, &TcRow::HEADER, rows.iter().map(TcRow::fields))
        }
        Command::AlphaC => {
            let rows = scans::alpha_c_scan(cfg)?;
            for r in &rows {
                match r.alpha_c() {
                    Some(a) => eprintln!("L = {}: alpha_c = {a:.6}", r.sites),
                    None => eprintln!("L = {}: inter-dimer correlation never reaches -1", r.sites),
                }
            }
            emit(out, &AlphaCRow::HEADER, rows.iter().map(AlphaCRow::fields))?;
            if rows.iter().any(|r| r.root.is_none()) {
                return Err(Error::Validation("critical alternation not found for every L".into()));
            }
            Ok(())
        }
        Command::CorrProfile => {
            let rows = scans::correlation_profile(cfg)?;
            emit(out, &ProfileRow::HEADER, rows.iter().map(ProfileRow::fields))
        }
        Command::ValidateL4 => {
            let report = scans::validate_l4()?;
            let mut text = String::new();
            for c in &report.checks {
                text.push_str(&format!(
                    "[{}] {}{}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) }
                ));
            }
            for note in &report.notes {
                text.push_str(&format!("       {note}\n"));
            }
            match out {
                Some(path) => std::fs::write(path, &text).map_err(|source| Error::Io {
                    path: path.to_path_buf(),
                    source,
                })?,
                None => {
                    let _ = io::stdout().write_all(text.as_bytes());
                }
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Error::Validation("four-site cross-checks failed".into()))
            }
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParam { .. } | Error::Config(_) | Error::Io { .. } | Error::Csv { .. } | Error::OracleTooLarge(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(cli.command, &cli.flags).and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
