//! Subcommand implementations.

use std::process::ExitCode;

use skinburst_core::config::{load_config, scan_grid, FileConfig, ScanParams};
use skinburst_core::dynamics::{dissipation_profile, eta_scan, Controls};
use skinburst_core::export;
use skinburst_core::lattice::{Basis, Hamiltonian, LatticeConfig};
use skinburst_core::spectral::{analytic_limit_spectrum, classify_spectrum, diagonalize, LimitKind, LoopTag};
use skinburst_core::transfer::{
    default_fit_window, fit_lyapunov, profile_from_vector, reconstruct_eigenstate,
    select_loop_state, LoopSide, StateSelector,
};
use skinburst_core::validate::{run_suite, Suite};
use skinburst_core::{eigen, C64};

use crate::manifest::RunManifest;
use crate::{emit_error, BasisArg, Failure, LimitArg, SelectArg, SideArg, SuiteArg};

fn load(config_path: &str) -> Result<(FileConfig, LatticeConfig), Failure> {
    if !std::path::Path::new(config_path).exists() {
        return Err(Failure::usage("config_not_found", format!("no such file: {config_path}")));
    }
    let file = load_config(config_path)?;
    let lattice = file.lattice_config()?;
    Ok((file, lattice))
}

fn config_snapshot(file: &FileConfig, overrides: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "file": serde_json::to_value(file).expect("config serializes"),
        "overrides": overrides,
    })
}

pub fn spectrum(
    config_path: &str,
    basis: BasisArg,
    limit: Option<LimitArg>,
    classify: bool,
    dump_hamiltonian: bool,
    out: &str,
) -> Result<(), Failure> {
    let (file, lattice) = load(config_path)?;
    let basis_tag = match basis {
        BasisArg::Cross => Basis::CrossStitch,
        BasisArg::Ssh => Basis::Ssh,
    };
    let mut manifest = RunManifest::new(
        "spectrum",
        out,
        config_snapshot(
            &file,
            serde_json::json!({ "basis": match basis { BasisArg::Cross => "cross", BasisArg::Ssh => "ssh" }, "classify": classify }),
        ),
    )?;
    let h = Hamiltonian::build(&lattice, basis_tag);
    let mut spec = classify_spectrum(diagonalize(&h, false)?, &lattice);
    if !classify {
        spec.classification = None;
    }
    manifest.write("spectrum.csv", &export::spectrum_csv(&spec))?;
    if let Some(kind) = limit {
        let (kind, name) = match kind {
            LimitArg::EtaZero => (LimitKind::EtaZero, "limit_eta_zero.csv"),
            LimitArg::EtaInf => (LimitKind::EtaInf, "limit_eta_inf.csv"),
            LimitArg::Pbc => (LimitKind::Pbc, "limit_pbc.csv"),
        };
        manifest.write(name, &export::limit_csv(&analytic_limit_spectrum(&lattice, kind)))?;
    }
    if dump_hamiltonian {
        manifest.write("hamiltonian.csv", &export::hamiltonian_csv(&h))?;
    }
    manifest.finish()
}

pub fn eigenstates(
    config_path: &str,
    side: SideArg,
    select: SelectArg,
    out: &str,
) -> Result<(), Failure> {
    let (file, lattice) = load(config_path)?;
    let mut manifest = RunManifest::new(
        "eigenstates",
        out,
        config_snapshot(
            &file,
            serde_json::json!({
                "side": match side { SideArg::Right => "right", SideArg::Left => "left" },
                "select": match select {
                    SelectArg::MaxIm => "max-im",
                    SelectArg::MinIm => "min-im",
                    SelectArg::MaxRe => "max-re",
                    SelectArg::SmallPosRe => "small-pos-re",
                },
            }),
        ),
    )?;
    let h = Hamiltonian::build(&lattice, Basis::CrossStitch);
    let spec = classify_spectrum(diagonalize(&h, false)?, &lattice);
    let side = match side {
        SideArg::Right => LoopSide::Right,
        SideArg::Left => LoopSide::Left,
    };
    let selector = match select {
        SelectArg::MaxIm => StateSelector::MaxIm,
        SelectArg::MinIm => StateSelector::MinIm,
        SelectArg::MaxRe => StateSelector::MaxRe,
        SelectArg::SmallPosRe => StateSelector::SmallestPositiveRe,
    };
    let idx = select_loop_state(&spec, side, selector).ok_or_else(|| {
        Failure::usage("config_error", "no loop eigenvalue matches the selection")
    })?;
    let e = spec.eigenvalues[idx];
    let v = eigen::eigenvector_for(h.matrix(), e)?;
    let mut profile = profile_from_vector(e, &v, &lattice);
    if let Ok(window) = default_fit_window(&lattice) {
        if let Ok((lam, se)) = fit_lyapunov(&profile, window, &lattice) {
            profile.set_fit(skinburst_core::transfer::LyapunovFit { lambda: lam, stderr: se, window });
        }
    }
    manifest.write("profile.csv", &export::profile_csv(&profile))?;

    // Lyapunov table over the loop sector: analytic exponent plus a fit of
    // the reconstructed state at each eigenvalue
    let tags = spec.classification.as_ref().expect("classified");
    let lams = spec.lyapunov_analytic.as_ref().expect("annotated");
    let window = default_fit_window(&lattice).ok();
    let mut rows: Vec<(C64, f64, f64, f64)> = Vec::new();
    for i in 0..spec.eigenvalues.len() {
        if tags[i] == LoopTag::Detached {
            continue;
        }
        let e = spec.eigenvalues[i];
        let (fit, se) = match (window, reconstruct_eigenstate(e, &lattice)) {
            (Some(w), Ok(p)) => fit_lyapunov(&p, w, &lattice).unwrap_or((f64::NAN, f64::NAN)),
            _ => (f64::NAN, f64::NAN),
        };
        rows.push((e, lams[i], fit, se));
    }
    manifest.write("lyapunov.csv", &export::lyapunov_csv(&rows))?;
    manifest.finish()
}

fn parse_scan_flag(text: &str) -> Result<ScanParams, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::usage("config_error", format!("scan must be lo:hi:steps, got {text}")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::usage("config_error", format!("bad scan bound {}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::usage("config_error", format!("bad scan bound {}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| Failure::usage("config_error", format!("bad scan steps {}", parts[2])))?;
    Ok(ScanParams { lneta_min: lo, lneta_max: hi, steps, sites: Vec::new() })
}

fn parse_sites(text: &str, n: usize) -> Result<Vec<usize>, Failure> {
    let mut sites = Vec::new();
    for item in text.split(',') {
        let site: usize = item
            .trim()
            .parse()
            .map_err(|_| Failure::usage("config_error", format!("bad site {item}")))?;
        if site < 1 || site > n {
            return Err(Failure::usage("config_error", format!("site {site} outside 1..={n}")));
        }
        sites.push(site);
    }
    Ok(sites)
}

#[allow(clippy::too_many_arguments)]
pub fn dynamics(
    config_path: &str,
    n0_flag: Option<usize>,
    scan_flag: Option<&str>,
    sites_flag: Option<&str>,
    dt: Option<f64>,
    t_max: Option<f64>,
    eps_stop: Option<f64>,
    out: &str,
) -> Result<(), Failure> {
    let (file, lattice) = load(config_path)?;
    let n = lattice.n_cells();
    let n0 = n0_flag
        .or_else(|| file.dynamics.as_ref().map(|d| d.n0))
        .ok_or_else(|| Failure::usage("bad_initial_cell", "no initial cell: pass --n0 or a [dynamics] block"))?;
    if n0 < 1 || n0 > n {
        return Err(Failure::usage("bad_initial_cell", format!("initial cell {n0} outside 1..={n}")));
    }
    let file_dyn = file.dynamics.clone();
    let controls = Controls {
        dt: dt.or(file_dyn.as_ref().and_then(|d| d.dt).filter(|v| *v > 0.0)),
        t_max: t_max.or(file_dyn.as_ref().and_then(|d| d.t_max)),
        eps_stop: eps_stop
            .or(file_dyn.as_ref().and_then(|d| d.eps_stop))
            .unwrap_or(Controls::default().eps_stop),
        sample_stride: 1,
    };
    let scan_params: Option<ScanParams> = match scan_flag {
        Some(text) => {
            let mut params = parse_scan_flag(text)?;
            params.sites = match sites_flag {
                Some(s) => parse_sites(s, n)?,
                None => file.scan.as_ref().map(|s| s.sites.clone()).unwrap_or_default(),
            };
            Some(params)
        }
        None => match &file.scan {
            Some(s) => {
                let mut params = s.clone();
                if let Some(text) = sites_flag {
                    params.sites = parse_sites(text, n)?;
                }
                Some(params)
            }
            None => None,
        },
    };

    let overrides = serde_json::json!({
        "n0": n0,
        "dt": controls.dt,
        "t_max": controls.t_max,
        "eps_stop": controls.eps_stop,
        "scan": scan_flag,
        "sites": sites_flag,
    });
    let mut manifest = RunManifest::new("dynamics", out, config_snapshot(&file, overrides))?;

    match scan_params {
        None => {
            let profile = dissipation_profile(&lattice, n0, &controls)?;
            manifest.write("dissipation.csv", &export::dissipation_csv(&profile))?;
            manifest.write("survival.csv", &export::survival_csv(&profile))?;
            manifest.write(
                "plot_dissipation.gp",
                &export::dissipation_plot_script("dissipation.csv", "survival.csv"),
            )?;
            println!(
                "dissipation profile: t_stop = {:.2}, sum P = {:.8}, tail = {:.2e}{}",
                profile.t_stop,
                profile.total(),
                profile.tail,
                if profile.tail_too_fat { " (tail not fully absorbed)" } else { "" }
            );
        }
        Some(params) => {
            if params.sites.is_empty() {
                return Err(Failure::usage("config_error", "scan mode needs monitored sites"));
            }
            let grid = scan_grid(&params)?;
            let scan = eta_scan(&lattice, &grid, n0, &params.sites, &controls)?;
            manifest.write("scan.csv", &export::scan_csv(&scan))?;
            manifest.write("scan_summary.csv", &export::scan_summary_csv(&scan))?;
            manifest.write("plot_scan.gp", &export::scan_plot_script("scan.csv", &scan.sites))?;
            for (k, &site) in scan.sites.iter().enumerate() {
                println!(
                    "site {site}: {} (drop threshold {})",
                    scan.tags[k],
                    scan.thresholds[k]
                        .map(|t| format!("{t:.3}"))
                        .unwrap_or_else(|| "none".to_string())
                );
            }
            let failures = scan.statuses.iter().flatten().count();
            if failures > 0 {
                println!("{failures} of {} scan points failed; see statuses", grid.len());
            }
        }
    }
    manifest.finish()
}

pub fn validate(suite: SuiteArg, out: Option<&str>) -> ExitCode {
    let suite = match suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let reports = run_suite(suite);
    for report in &reports {
        println!("{}", report.status_line());
        for line in &report.details {
            println!("  {line}");
        }
    }
    let failing: Vec<String> =
        reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    if let Some(dir) = out {
        let mut csv = String::from("# id,name,passed,seconds\n");
        for r in &reports {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                r.id,
                r.name,
                r.passed,
                export::fmt17(r.duration.as_secs_f64())
            ));
        }
        let write = || -> Result<(), Failure> {
            let mut manifest =
                RunManifest::new("validate", dir, serde_json::json!({ "suite": format!("{suite:?}") }))?;
            manifest.write("report.csv", &csv)?;
            manifest.finish()
        };
        if let Err(f) = write() {
            emit_error(f.slug, &f.message);
            return ExitCode::from(f.exit);
        }
    }
    if failing.is_empty() {
        ExitCode::SUCCESS
    } else {
        emit_error("validation_failed", &format!("failing criteria: {}", failing.join(", ")));
        ExitCode::from(1)
    }
}
