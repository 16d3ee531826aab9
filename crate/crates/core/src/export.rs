//! Deterministic CSV and plot-script emission.
//!
//! All numbers are printed as fixed 17-significant-digit scientific notation
//! so reruns produce byte-identical files on any platform; every CSV starts
//! with a single `#` header naming columns and units.

use crate::dynamics::{BurstScanResult, DissipationProfile};
use crate::lattice::Hamiltonian;
use crate::spectral::SpectrumResult;
use crate::transfer::EigenstateProfile;
use crate::C64;

/// 17 significant digits, scientific; `nan` for undefined entries.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Spectrum CSV: `re_E, im_E, tag, r_mag, r_ph, lambda_analytic`.
pub fn spectrum_csv(spec: &SpectrumResult) -> String {
    let mut out = String::from(
        "# re_E,im_E,tag,r_mag,r_ph,lambda_analytic (E in units of J; residuals dimensionless; lambda per unit cell)\n",
    );
    for (i, e) in spec.eigenvalues.iter().enumerate() {
        let tag = spec
            .classification
            .as_ref()
            .map(|t| t[i].to_string())
            .unwrap_or_else(|| "NONE".to_string());
        let (rm, rp) = spec
            .closure_residual
            .as_ref()
            .map(|r| r[i])
            .unwrap_or((f64::NAN, f64::NAN));
        let lam = spec.lyapunov_analytic.as_ref().map(|l| l[i]).unwrap_or(f64::NAN);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(e.re),
            fmt17(e.im),
            tag,
            fmt17(rm),
            fmt17(rp),
            fmt17(lam)
        ));
    }
    out
}

/// Limit-spectrum CSV: `re_E, im_E, multiplicity`.
pub fn limit_csv(limit: &[(C64, usize)]) -> String {
    let mut out =
        String::from("# re_E,im_E,multiplicity (E in units of J; multiplicity dimensionless)\n");
    for (e, m) in limit {
        out.push_str(&format!("{},{},{m}\n", fmt17(e.re), fmt17(e.im)));
    }
    out
}

/// Eigenstate profile CSV: `n, n_over_N, rho_n, abs_q, abs_p`.
pub fn profile_csv(profile: &EigenstateProfile) -> String {
    let mut out = String::from(
        "# n,n_over_N,rho_n,abs_q,abs_p (cell index dimensionless; rho normalized to unit sum)\n",
    );
    for (i, ((p, q), (&rho, &x))) in profile
        .amplitudes_ssh
        .iter()
        .zip(profile.density.iter().zip(profile.coords.iter()))
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            fmt17(x),
            fmt17(rho),
            fmt17(q.norm()),
            fmt17(p.norm())
        ));
    }
    out
}

/// Lyapunov table CSV: `re_E, im_E, lambda_analytic, lambda_fit, stderr`.
pub fn lyapunov_csv(rows: &[(C64, f64, f64, f64)]) -> String {
    let mut out = String::from(
        "# re_E,im_E,lambda_analytic,lambda_fit,stderr (E in units of J; lambda per unit cell)\n",
    );
    for (e, analytic, fit, se) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt17(e.re),
            fmt17(e.im),
            fmt17(*analytic),
            fmt17(*fit),
            fmt17(*se)
        ));
    }
    out
}

/// Dissipation CSV: `n, P_n`.
pub fn dissipation_csv(profile: &DissipationProfile) -> String {
    let mut out = String::from("# n,P_n (cell index dimensionless; P_n is integrated probability)\n");
    for (i, p) in profile.p.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt17(*p)));
    }
    out
}

/// Survival CSV: `t, S`.
pub fn survival_csv(profile: &DissipationProfile) -> String {
    let mut out = String::from("# t,S (t in inverse energy units; S is survival probability)\n");
    for (t, s) in &profile.survival {
        out.push_str(&format!("{},{}\n", fmt17(*t), fmt17(*s)));
    }
    out
}

/// Scan CSV: `ln_eta, site, P`.
pub fn scan_csv(scan: &BurstScanResult) -> String {
    let mut out =
        String::from("# ln_eta,site,P (ln_eta dimensionless; P is integrated probability)\n");
    for (si, &site) in scan.sites.iter().enumerate() {
        for (k, &le) in scan.ln_eta.iter().enumerate() {
            out.push_str(&format!("{},{site},{}\n", fmt17(le), fmt17(scan.curves[si][k])));
        }
    }
    out
}

/// Scan summary CSV: `site, shape_tag, drop_threshold`.
pub fn scan_summary_csv(scan: &BurstScanResult) -> String {
    let mut out = String::from("# site,shape_tag,drop_threshold (threshold in ln_eta units)\n");
    for (si, &site) in scan.sites.iter().enumerate() {
        let th = scan.thresholds[si].map(fmt17).unwrap_or_else(|| "nan".to_string());
        out.push_str(&format!("{site},{},{th}\n", scan.tags[si]));
    }
    out
}

/// Hamiltonian dump CSV: `row, col, re, im` for structurally nonzero entries
/// (0-based matrix indices).
pub fn hamiltonian_csv(h: &Hamiltonian) -> String {
    let mut out =
        String::from("# row,col,re,im (0-based matrix indices; entries in units of J)\n");
    let m = h.matrix();
    for r in 0..h.dim() {
        for c in 0..h.dim() {
            let v = m[[r, c]];
            if v != C64::default() {
                out.push_str(&format!("{r},{c},{},{}\n", fmt17(v.re), fmt17(v.im)));
            }
        }
    }
    out
}

/// Gnuplot script for a single dissipation run.
pub fn dissipation_plot_script(csv_name: &str, survival_name: &str) -> String {
    format!(
        "set datafile separator \",\"\n\
         set terminal pngcairo size 1000,700\n\
         set output \"dissipation.png\"\n\
         set multiplot layout 2,1\n\
         set xlabel \"n\"\n\
         set ylabel \"P_n\"\n\
         set logscale y\n\
         plot \"{csv_name}\" using 1:2 with impulses lw 2 title \"integrated loss\"\n\
         unset logscale y\n\
         set xlabel \"t\"\n\
         set ylabel \"S(t)\"\n\
         set logscale y\n\
         plot \"{survival_name}\" using 1:2 with lines lw 2 title \"survival\"\n\
         unset multiplot\n"
    )
}

/// Gnuplot script for scan curves, one panel per monitored site.
pub fn scan_plot_script(csv_name: &str, sites: &[usize]) -> String {
    let rows = sites.len().div_ceil(2).max(1);
    let mut out = format!(
        "set datafile separator \",\"\n\
         set terminal pngcairo size 1200,{}\n\
         set output \"scan.png\"\n\
         set multiplot layout {rows},2\n\
         set xlabel \"ln eta\"\n",
        350 * rows
    );
    for &site in sites {
        out.push_str(&format!(
            "set ylabel \"P_{{{site}}}\"\n\
             plot \"{csv_name}\" using (column(2)=={site}?column(1):1/0):3 with linespoints pt 7 title \"site {site}\"\n"
        ));
    }
    out.push_str("unset multiplot\n");
    out
}
