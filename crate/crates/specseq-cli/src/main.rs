//! Command-line front door for the specseq engine: load JSON inputs (or
//! `builtin:NAME` fixtures), validate systems, compute and print pages,
//! run comparisons, and emit consequence reports.
//!
//! Exit codes are stable across commands: 0 when every requested check
//! passes, 1 when a mathematical check fails (a Maurer-Cartan residual, a
//! non-commuting square, pages that match nowhere), 2 for input errors
//! (unreadable files, malformed JSON, schema violations).

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use specseq::builtin::{shipped_coalgebras, shipped_systems};
use specseq::comparison::{
    chain_map_check, is_retract_pair, page_morphisms, validate_b, ComparisonData,
};
use specseq::complex::{assemble, assemble_unchecked};
use specseq::consequences::consequences;
use specseq::dga::{cobar, homology_dims, DGCoalgebra};
use specseq::json::{
    coalgebra_from_value, comparison_from_value, pages_to_value, system_from_value,
    to_pretty_string, value_from_str,
};
use specseq::pages::{compare_up_to_translation, compute_pages, PageSet};
use specseq::serre::serre_pages;
use specseq::system::GeneratorSystem;
use specseq::{Error, Result};

#[derive(Parser)]
#[command(
    name = "specseq",
    about = "GF(2) spectral sequences of extended complexes over loop-space chain algebras",
    version
)]
struct Cli {
    /// Also print a machine-readable JSON report to stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a system file: structure, ordering, the matrix identity
    /// dA = A.A, and the assembled boundary squaring to zero.
    Check {
        /// System JSON file, or builtin:NAME.
        path: String,
    },
    /// Compute and print the spectral-sequence pages of a system.
    Pages {
        /// System JSON file, or builtin:NAME.
        path: String,
        /// Total-degree window for the assembled complex.
        #[arg(long, default_value_t = 12)]
        cap: i64,
        /// Last page to compute (default: filtration width + 1).
        #[arg(long)]
        rmax: Option<i64>,
    },
    /// Pages of the path-fibration model of a coalgebra (the comparison
    /// oracle).
    Serre {
        /// Coalgebra JSON file, or builtin:NAME.
        path: String,
        /// Total-degree window for the model.
        #[arg(long, default_value_t = 12)]
        cap: usize,
        /// Last page to compute (default: base filtration width + 1).
        #[arg(long)]
        rmax: Option<i64>,
    },
    /// Compare the pages of two systems up to a filtration translation.
    Compare {
        /// First system JSON file, or builtin:NAME.
        path_a: String,
        /// Second system JSON file, or builtin:NAME; with --oracle, a
        /// coalgebra whose path-model pages are the comparison target.
        path_b: String,
        /// First page that must already agree.
        #[arg(long, default_value_t = 2)]
        rmin: i64,
        /// Total-degree window for both sides.
        #[arg(long, default_value_t = 12)]
        cap: i64,
        /// Last page to compare (default: filtration width + 1).
        #[arg(long)]
        rmax: Option<i64>,
        /// Treat the second path as a coalgebra and compare against its
        /// path-model pages.
        #[arg(long)]
        oracle: bool,
    },
    /// Validate a comparison file (B matrix): the identity dB = A.B + B.A'
    /// and the assembled chain map; optionally page functoriality and
    /// retract detection.
    Morphism {
        /// Comparison JSON file.
        path: String,
        /// Second comparison file g; when given, also decide whether
        /// (f, g) is a retract pair.
        path_g: Option<String>,
        /// Total-degree window for the chain-level check.
        #[arg(long, default_value_t = 12)]
        cap: i64,
        /// Also compute the induced maps on every certified page cell
        /// (costly; uses the explicit-basis engine on both sides).
        #[arg(long)]
        pages: bool,
        /// Last page for --pages (default: filtration width + 1).
        #[arg(long)]
        rmax: Option<i64>,
    },
    /// Report the algebraic consequences of a system's pages: forced
    /// connection claims, the base-row rank bound, and coefficient
    /// coverage of the ring's homology.
    Consequences {
        /// System JSON file, or builtin:NAME.
        path: String,
        /// Total-degree window for the assembled complex.
        #[arg(long, default_value_t = 12)]
        cap: i64,
        /// Last page to compute (default: filtration width + 1).
        #[arg(long)]
        rmax: Option<i64>,
        /// Homology window for the coverage check (default: one below
        /// the ring's degree cap, clamped to the cap window).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Build the loop-space chain algebra of a coalgebra and print its
    /// generators and homology.
    Cobar {
        /// Coalgebra JSON file, or builtin:NAME.
        path: String,
        /// Degree cap of the constructed algebra.
        #[arg(long, default_value_t = 12)]
        cap: usize,
        /// Homology window (default: cap - 1).
        #[arg(long)]
        window: Option<usize>,
    },
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (`specseq pages ... |
    // head`) instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// 1 for failed mathematical checks, 2 for anything that prevented the
/// check from running (unreadable, malformed, or ill-typed input).
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Structural(_)
        | Error::ActionOrder { .. }
        | Error::MaurerCartan(_)
        | Error::Morphism(_)
        | Error::NotACycle
        | Error::PathModelBroken
        | Error::DegreeMismatch { .. } => 1,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Check { path } => cmd_check(path, cli.json),
        Command::Pages { path, cap, rmax } => cmd_pages(path, *cap, *rmax, cli.json),
        Command::Serre { path, cap, rmax } => cmd_serre(path, *cap, *rmax, cli.json),
        Command::Compare {
            path_a,
            path_b,
            rmin,
            cap,
            rmax,
            oracle,
        } => cmd_compare(path_a, path_b, *rmin, *cap, *rmax, *oracle, cli.json),
        Command::Morphism {
            path,
            path_g,
            cap,
            pages,
            rmax,
        } => cmd_morphism(path, path_g.as_deref(), *cap, *pages, *rmax, cli.json),
        Command::Consequences {
            path,
            cap,
            rmax,
            window,
        } => cmd_consequences(path, *cap, *rmax, *window, cli.json),
        Command::Cobar { path, cap, window } => cmd_cobar(path, *cap, *window, cli.json),
    }
}

// --------------------------------------------------------------------
// input loading

fn load_json(path: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    value_from_str(&text)
}

fn load_system(path: &str) -> Result<GeneratorSystem> {
    if let Some(name) = path.strip_prefix("builtin:") {
        let systems = shipped_systems();
        let names: Vec<&str> = systems.iter().map(|(n, _)| n.as_str()).collect();
        systems
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| {
                Error::UnknownName(format!(
                    "builtin system `{name}` (available: {})",
                    names.join(", ")
                ))
            })
    } else {
        system_from_value(&load_json(path)?)
    }
}

fn load_coalgebra(path: &str) -> Result<DGCoalgebra> {
    if let Some(name) = path.strip_prefix("builtin:") {
        let coalgebras = shipped_coalgebras();
        let names: Vec<&str> = coalgebras.iter().map(|(n, _)| n.as_str()).collect();
        coalgebras
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.clone())
            .ok_or_else(|| {
                Error::UnknownName(format!(
                    "builtin coalgebra `{name}` (available: {})",
                    names.join(", ")
                ))
            })
    } else {
        coalgebra_from_value(&load_json(path)?)
    }
}

fn load_comparison(path: &str) -> Result<ComparisonData> {
    comparison_from_value(&load_json(path)?)
}

// --------------------------------------------------------------------
// pages printing

/// Cell text: dimension, ">k" when d^r has rank k out of the cell, "?"
/// when the window cannot certify the value. Zero certified cells print
/// as ".".
fn cell_text(ps: &PageSet, r: i64, p: i64, q: i64) -> String {
    let cell = ps.cell_or_zero(r, p, q);
    let mut s = if cell.dim == 0 && cell.d_rank == 0 && cell.certified {
        ".".to_string()
    } else {
        let mut s = cell.dim.to_string();
        if cell.d_rank > 0 {
            s.push_str(&format!(">{}", cell.d_rank));
        }
        s
    };
    if !cell.certified {
        s.push('?');
    }
    s
}

fn print_pages(ps: &PageSet) {
    println!(
        "columns p in [{}, {}]; certified total degrees n in [{}, {}]",
        ps.filt_min, ps.filt_max, ps.n_min, ps.n_max
    );
    println!("cell legend: dim, >k = differential of rank k out of the cell, ? = uncertified, . = certified zero");
    for page in &ps.pages {
        let r = page.r;
        // Show rows q that hold anything visible on this page.
        let mut q_min = 0;
        let mut q_max = 0;
        for (&(_, q), cell) in &page.cells {
            if cell.dim > 0 || !cell.certified {
                q_min = q_min.min(q);
                q_max = q_max.max(q);
            }
        }
        let ps_cols: Vec<i64> = (ps.filt_min..=ps.filt_max).collect();
        let mut widths: Vec<usize> = ps_cols
            .iter()
            .map(|&p| p.to_string().len())
            .collect();
        let mut rows_text: Vec<(i64, Vec<String>)> = Vec::new();
        for q in (q_min..=q_max).rev() {
            let texts: Vec<String> = ps_cols
                .iter()
                .map(|&p| cell_text(ps, r, p, q))
                .collect();
            for (j, t) in texts.iter().enumerate() {
                widths[j] = widths[j].max(t.len());
            }
            rows_text.push((q, texts));
        }
        let q_width = rows_text
            .iter()
            .map(|(q, _)| q.to_string().len())
            .max()
            .unwrap_or(1)
            .max("q\\p".len());
        println!();
        println!("page r = {r}");
        let header: Vec<String> = ps_cols
            .iter()
            .zip(&widths)
            .map(|(p, w)| format!("{p:>w$}"))
            .collect();
        println!("  {:>q_width$} | {}", "q\\p", header.join("  "));
        let rule_len = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
        println!("  {}-+-{}", "-".repeat(q_width), "-".repeat(rule_len));
        for (q, texts) in &rows_text {
            let cells: Vec<String> = texts
                .iter()
                .zip(&widths)
                .map(|(t, w)| format!("{t:>w$}"))
                .collect();
            println!("  {q:>q_width$} | {}", cells.join("  "));
        }
        let mut arrows: Vec<String> = Vec::new();
        for (&(p, q), cell) in &page.cells {
            if cell.d_rank > 0 {
                arrows.push(format!(
                    "d^{r}: ({p}, {q}) -> ({}, {}) rank {}{}",
                    p - r,
                    q + r - 1,
                    cell.d_rank,
                    if cell.certified { "" } else { " ?" }
                ));
            }
        }
        for a in arrows {
            println!("  {a}");
        }
    }
}

// --------------------------------------------------------------------
// commands

fn cmd_check(path: &str, as_json: bool) -> Result<bool> {
    let sys = load_system(path)?;
    let mc = sys.validate_mc()?;
    let fc = assemble_unchecked(&sys, 12)?;
    let square_zero = fc.is_square_zero();
    let passed = mc.passed() && square_zero;
    if as_json {
        let failures: Vec<Value> = mc
            .failures
            .iter()
            .map(|f| {
                json!({
                    "x": f.x,
                    "z": f.z,
                    "residual": f.residual().to_string(),
                })
            })
            .collect();
        print!(
            "{}",
            to_pretty_string(&json!({
                "command": "check",
                "passed": passed,
                "maurer_cartan": {"passed": mc.passed(), "failures": failures},
                "square_zero": square_zero,
            }))
        );
        return Ok(passed);
    }
    println!("structure and ordering: ok");
    if mc.passed() {
        println!("matrix identity dA = A.A: ok");
    } else {
        println!(
            "matrix identity dA = A.A: FAILED on {} pair(s)",
            mc.failures.len()
        );
        for f in &mc.failures {
            println!("  ({}, {}): residual {}", f.x, f.z, f.residual());
        }
    }
    println!(
        "assembled boundary squares to zero: {}",
        if square_zero { "ok" } else { "FAILED" }
    );
    Ok(passed)
}

fn default_rmax(sys: &GeneratorSystem) -> i64 {
    let mus: Vec<i64> = sys.generators().iter().map(|g| g.mu).collect();
    let width = mus.iter().max().unwrap_or(&0) - mus.iter().min().unwrap_or(&0);
    width + 1
}

fn cmd_pages(path: &str, cap: i64, rmax: Option<i64>, as_json: bool) -> Result<bool> {
    let sys = load_system(path)?;
    let rmax = rmax.unwrap_or_else(|| default_rmax(&sys)).max(1);
    let fc = assemble(&sys, cap)?;
    let ps = compute_pages(&fc, rmax)?;
    if as_json {
        print!("{}", to_pretty_string(&pages_to_value(&ps)));
    } else {
        print_pages(&ps);
    }
    Ok(true)
}

fn cmd_serre(path: &str, cap: usize, rmax: Option<i64>, as_json: bool) -> Result<bool> {
    let c = load_coalgebra(path)?;
    // The model is filtered by base degree, so the filtration width is the
    // coalgebra's top degree.
    let rmax = rmax.unwrap_or(c.max_degree() as i64 + 1).max(1);
    let ps = serre_pages(&c, cap, rmax)?;
    if as_json {
        print!("{}", to_pretty_string(&pages_to_value(&ps)));
    } else {
        print_pages(&ps);
    }
    Ok(true)
}

fn cmd_compare(
    path_a: &str,
    path_b: &str,
    rmin: i64,
    cap: i64,
    rmax: Option<i64>,
    oracle: bool,
    as_json: bool,
) -> Result<bool> {
    let sys_a = load_system(path_a)?;
    let rmax_a = rmax.unwrap_or_else(|| default_rmax(&sys_a)).max(1);
    let pages_a = compute_pages(&assemble(&sys_a, cap)?, rmax_a)?;
    let pages_b = if oracle {
        let c = load_coalgebra(path_b)?;
        serre_pages(&c, cap.max(0) as usize, rmax.unwrap_or(rmax_a).max(1))?
    } else {
        let sys_b = load_system(path_b)?;
        let rmax_b = rmax.unwrap_or_else(|| default_rmax(&sys_b)).max(1);
        compute_pages(&assemble(&sys_b, cap)?, rmax_b)?
    };
    let shift = compare_up_to_translation(&pages_a, &pages_b, rmin);
    if as_json {
        print!(
            "{}",
            to_pretty_string(&json!({
                "command": "compare",
                "rmin": rmin,
                "shift": shift,
            }))
        );
    } else {
        match shift {
            Some(k) => println!("match: pages agree up to translation by {k} (r >= {rmin})"),
            None => println!("no match: certified pages disagree for every candidate translation"),
        }
    }
    Ok(shift.is_some())
}

fn cmd_morphism(
    path: &str,
    path_g: Option<&str>,
    cap: i64,
    pages: bool,
    rmax: Option<i64>,
    as_json: bool,
) -> Result<bool> {
    let f = load_comparison(path)?;
    let mut passed = true;
    let b = validate_b(&f)?;
    passed &= b.passed();
    let cm = chain_map_check(&f, cap)?;
    passed &= cm.commutes;
    let page_report = if pages {
        let rmax = rmax.unwrap_or_else(|| default_rmax(f.source())).max(1);
        let report = page_morphisms(&f, cap, rmax)?;
        passed &= report.all_commute();
        Some(report)
    } else {
        None
    };
    let retract = match path_g {
        Some(gp) => {
            let g = load_comparison(gp)?;
            Some(is_retract_pair(&f, &g)?)
        }
        None => None,
    };
    if as_json {
        let b_failures: Vec<Value> = b
            .failures
            .iter()
            .map(|fail| {
                json!({
                    "x": fail.x,
                    "z": fail.z,
                    "boundary_side": fail.boundary_side.to_string(),
                    "composite_side": fail.composite_side.to_string(),
                })
            })
            .collect();
        let pages_json = match &page_report {
            Some(report) => json!({
                "commute": report.all_commute(),
                "injective": report.all_injective(),
            }),
            None => Value::Null,
        };
        print!(
            "{}",
            to_pretty_string(&json!({
                "command": "morphism",
                "passed": passed,
                "b_identity": {"passed": b.passed(), "failures": b_failures},
                "chain_map": {"passed": cm.commutes, "failing_degrees": cm.failing_degrees},
                "pages": pages_json,
                "retract": retract,
            }))
        );
        return Ok(passed);
    }
    if b.passed() {
        println!("entry identity dB = A.B + B.A': ok");
    } else {
        println!(
            "entry identity dB = A.B + B.A': FAILED on {} pair(s)",
            b.failures.len()
        );
        for fail in &b.failures {
            println!(
                "  ({}, {}): d-side {}, composite side {}",
                fail.x, fail.z, fail.boundary_side, fail.composite_side
            );
        }
    }
    if cm.commutes {
        println!("assembled chain map commutes with the boundaries: ok");
    } else {
        println!(
            "assembled chain map commutes with the boundaries: FAILED in degrees {:?}",
            cm.failing_degrees
        );
    }
    if let Some(report) = &page_report {
        println!(
            "induced page maps commute with d^r on certified cells: {}",
            if report.all_commute() { "ok" } else { "FAILED" }
        );
        println!(
            "induced page maps injective on certified cells: {}",
            if report.all_injective() { "yes" } else { "no" }
        );
    }
    if let Some(is_retract) = retract {
        println!(
            "retract pair (composite triangular with unit diagonal): {}",
            if is_retract { "yes" } else { "no" }
        );
    }
    Ok(passed)
}

fn cmd_consequences(
    path: &str,
    cap: i64,
    rmax: Option<i64>,
    window: Option<usize>,
    as_json: bool,
) -> Result<bool> {
    let sys = load_system(path)?;
    let rmax = rmax.unwrap_or_else(|| default_rmax(&sys)).max(1);
    let ring_cap = sys.ring().degree_cap();
    let window = window.unwrap_or_else(|| {
        let by_cap = if cap > 0 { cap as usize } else { 0 };
        ring_cap.saturating_sub(1).min(by_cap)
    });
    let report = consequences(&sys, cap, rmax, window)?;
    if as_json {
        let claims: Vec<Value> = report
            .claims
            .iter()
            .map(|c| {
                json!({
                    "r": c.r,
                    "witnesses": c.witnesses,
                    "evidence": c.evidence.iter().map(|&(p, q, rank)| json!({
                        "p": p, "q": q, "rank": rank,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        print!(
            "{}",
            to_pretty_string(&json!({
                "command": "consequences",
                "claims": claims,
                "rank_bound": report.rank_bound,
                "coverage": {
                    "window": report.coverage_window,
                    "covered": report.homology_covered,
                },
            }))
        );
        return Ok(true);
    }
    if report.claims.is_empty() {
        println!("no certified nonzero differentials: no connection claims forced");
    }
    for claim in &report.claims {
        let pairs: Vec<String> = claim
            .witnesses
            .iter()
            .map(|(x, y)| format!("({x}, {y})"))
            .collect();
        println!(
            "claim: some generator pair at index gap {} is connected; candidates: {}",
            claim.r,
            if pairs.is_empty() {
                "none among the entries (!)".to_string()
            } else {
                pairs.join(", ")
            }
        );
        for (p, q, rank) in &claim.evidence {
            println!("  evidence: d^{} at ({p}, {q}) has rank {rank}", claim.r);
        }
    }
    println!("base-row rank bound: {}", report.rank_bound);
    println!(
        "cycle entries generate the ring's homology through degree {}: {}",
        report.coverage_window,
        if report.homology_covered { "yes" } else { "no" }
    );
    Ok(true)
}

fn cmd_cobar(path: &str, cap: usize, window: Option<usize>, as_json: bool) -> Result<bool> {
    let c = load_coalgebra(path)?;
    let ring = cobar(&c, cap)?;
    let window = window.unwrap_or_else(|| cap.saturating_sub(1));
    let dims = homology_dims(&ring, window)?;
    if as_json {
        let gens: Vec<Value> = ring
            .generators()
            .iter()
            .map(|g| json!({"name": g.name, "degree": g.degree}))
            .collect();
        print!(
            "{}",
            to_pretty_string(&json!({
                "command": "cobar",
                "cap": cap,
                "generators": gens,
                "homology": dims,
            }))
        );
        return Ok(true);
    }
    println!("letters (one per reduced coalgebra element, degree shifted down by one):");
    for g in ring.generators() {
        println!("  {} (degree {})", g.name, g.degree);
    }
    let dim_strs: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    println!(
        "loop homology dimensions, degrees 0..={}: [{}]",
        window,
        dim_strs.join(", ")
    );
    Ok(true)
}
