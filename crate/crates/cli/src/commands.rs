//! Subcommand bodies. Each writes its report to `out` and says whether the
//! outcome counts as success (exit 0) or a rejection (exit 1).

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use qbc_core::adversary::run_protocol;
use qbc_core::nogo::{
    bell_phi_plus, bell_psi_plus, cheating_unitary, fidelity, partial_trace_a, random_density_matrix,
    random_purification, trace_distance, PureState, UnitaryMatrix, DEFAULT_TOL,
};
use qbc_core::optics::{screen_pdf, SlitConfig};
use qbc_core::protocol::Protocol;
use qbc_core::record::{write_records, RunMeta};
use qbc_core::rng::{substream, Role};
use qbc_core::Error;

use crate::config::ExperimentConfig;
use crate::experiments::{binding_sweep, concealing_test};

/// Largest subsystem dimension accepted by the no-go demo.
pub const MAX_DEMO_DIM: usize = 16;

/// Largest TV distance between detection-count histograms reported as a pass.
pub const TV_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Rejected,
}

fn csv_writer<W: Write>(cfg: &ExperimentConfig, mut out: W) -> Result<csv::Writer<W>> {
    writeln!(out, "{}", cfg.stamp())?;
    Ok(csv::Writer::from_writer(out))
}

/// Screen densities: both slits open, one slit open, and the equal mixture of
/// left-only and right-only. Rows are the bin centers plus the dark-fringe
/// positions of the two-slit pattern.
pub fn pattern<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<Outcome> {
    let both = screen_pdf(&cfg.optics, SlitConfig::BothOpen)?;
    let left = screen_pdf(&cfg.optics, SlitConfig::LeftOnly)?;
    let right = screen_pdf(&cfg.optics, SlitConfig::RightOnly)?;
    let mix = left.mixture(&right, 0.5)?;
    let mut xs: Vec<f64> = both.grid().centers().to_vec();
    xs.extend(cfg.optics.dark_fringes());
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut w = csv_writer(cfg, out)?;
    w.write_record(["x_m", "density_both_open", "density_single", "density_mixture"])?;
    for x in xs {
        w.serialize((x, both.density_at(x), left.density_at(x), mix.density_at(x)))?;
    }
    w.flush()?;
    Ok(Outcome::Success)
}

/// One full protocol run as line-delimited JSON. Optionally writes the
/// verifier's checks as CSV to `checks_csv`.
pub fn run<W: Write>(cfg: &ExperimentConfig, mut out: W, bob_view: bool, checks_csv: Option<&Path>) -> Result<Outcome> {
    let protocol = Protocol::new(cfg.protocol_params())?;
    let result = run_protocol(&cfg.strategy, &protocol, 0)?;
    let meta = RunMeta {
        master_seed: cfg.master_seed,
        n_rounds: cfg.protocol.n_rounds,
        strategy: cfg.strategy,
        config_sha256: Some(cfg.sha256()),
    };
    let secrets = bob_view.then_some(result.secrets.as_slice());
    write_records(
        &mut out,
        Some(&meta),
        &result.transcript,
        &result.unveil,
        secrets,
        &result.verdict,
    )?;

    if let Some(path) = checks_csv {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = csv_writer(cfg, file)?;
        w.write_record(["check", "passed", "statistic", "p_value", "detail"])?;
        for c in &result.verdict.checks {
            w.serialize((c.check.as_str(), c.passed, c.statistic, c.p_value, c.detail.as_deref()))?;
        }
        w.flush()?;
    }
    Ok(if result.verdict.accepted {
        Outcome::Success
    } else {
        Outcome::Rejected
    })
}

/// Acceptance of the configured strategy at each round count in the sweep.
pub fn sweep<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<Outcome> {
    if cfg.sweep.n_values.is_empty() {
        bail!("sweep.n_values is empty");
    }
    let result = binding_sweep(&cfg.strategy, &cfg.protocol_params(), &cfg.sweep.n_values, cfg.trials)?;
    let (slope, se) = match result.fit {
        Some(f) => (Some(f.slope), Some(f.slope_se)),
        None => (None, None),
    };
    let mut w = csv_writer(cfg, out)?;
    w.write_record([
        "strategy",
        "N",
        "trials",
        "accepted",
        "acceptance",
        "ci_low",
        "ci_high",
        "log2_value",
        "upper_bound",
        "fitted_log2_slope",
        "slope_se",
        "slope_status",
    ])?;
    for row in &result.rows {
        let e = &row.estimate;
        w.serialize((
            cfg.strategy.label(),
            e.n_rounds,
            e.trials,
            e.accepted,
            e.acceptance_rate,
            e.wilson_ci_95.0,
            e.wilson_ci_95.1,
            row.log2_value,
            row.upper_bound,
            slope,
            se,
            result.status.as_str(),
        ))?;
    }
    w.flush()?;
    Ok(Outcome::Success)
}

/// Compare Bob's pre-unveil view under the two honest commitments.
pub fn concealing<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<Outcome> {
    let params = qbc_core::protocol::ProtocolParams {
        n_rounds: cfg.concealing.n_rounds,
        ..cfg.protocol_params()
    };
    let r = concealing_test(&params, cfg.concealing.trials)?;
    let structural_pass = r.differing_transcripts == 0;
    let tv_pass = r.tv_distance < TV_THRESHOLD;

    let mut w = csv_writer(cfg, out)?;
    w.write_record([
        "check",
        "n_rounds",
        "efficiency",
        "trials",
        "value",
        "threshold",
        "pass",
    ])?;
    w.serialize((
        "shared-secret-transcript-distance",
        r.n_rounds,
        r.efficiency,
        r.trials,
        r.structural_distance(),
        0.0,
        structural_pass,
    ))?;
    w.serialize((
        "detected-count-tv-distance",
        r.n_rounds,
        r.efficiency,
        r.trials,
        r.tv_distance,
        TV_THRESHOLD,
        tv_pass,
    ))?;
    w.flush()?;
    Ok(if structural_pass && tv_pass {
        Outcome::Success
    } else {
        Outcome::Rejected
    })
}

#[derive(Debug, Clone, Default)]
pub struct NogoOptions {
    pub random: bool,
    pub dims: Option<(usize, usize)>,
    pub mismatched: bool,
}

fn fmt_complex(z: Complex64) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    format!("{:+.6}{:+.6}i", clean(z.re), clean(z.im))
}

fn write_matrix<W: Write>(out: &mut W, name: &str, m: &DMatrix<Complex64>) -> Result<()> {
    writeln!(out, "{name} ({}x{}):", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_complex(m[(i, j)])).collect();
        writeln!(out, "  [{}]", row.join("  "))?;
    }
    Ok(())
}

/// Whether `u` equals `target` up to a global phase.
fn equal_up_to_phase(u: &DMatrix<Complex64>, target: &DMatrix<Complex64>) -> bool {
    if u.shape() != target.shape() {
        return false;
    }
    let overlap: Complex64 = u.iter().zip(target.iter()).map(|(a, b)| b.conj() * a).sum();
    if overlap.norm() < 1e-12 {
        return false;
    }
    let phase = overlap / overlap.norm();
    (u - target * phase).iter().all(|z| z.norm() < 1e-9)
}

pub struct NogoDemo {
    pub psi0: PureState,
    pub psi1: PureState,
    pub unitary: std::result::Result<UnitaryMatrix, Error>,
}

/// Build the demo states and, if their marginals agree, the cheating unitary.
pub fn nogo_states(seed: u64, opts: &NogoOptions) -> Result<NogoDemo> {
    let (psi0, psi1) = match (opts.random, opts.mismatched) {
        (false, false) => {
            if opts.dims.is_some_and(|d| d != (2, 2)) {
                bail!("the Bell-pair example is 2x2; use --random for other dimensions");
            }
            (bell_phi_plus(), bell_psi_plus())
        }
        (false, true) => {
            let c = |v: f64| Complex64::new(v, 0.0);
            (
                PureState::new(2, 2, vec![c(1.0), c(0.0), c(0.0), c(0.0)])?,
                PureState::new(2, 2, vec![c(0.0), c(1.0), c(0.0), c(0.0)])?,
            )
        }
        (true, mismatched) => {
            let (da, db) = opts.dims.unwrap_or((4, 4));
            if da == 0 || db == 0 || da > MAX_DEMO_DIM || db > MAX_DEMO_DIM {
                bail!("dimensions must lie in 1..={MAX_DEMO_DIM}, got {da}x{db}");
            }
            let mut rng = substream(seed, Role::Aux, da as u64, db as u64);
            let rank = da.min(db);
            let rho = random_density_matrix(db, rank, &mut rng)?;
            let psi0 = random_purification(&rho, da, &mut rng)?;
            let other = if mismatched {
                random_density_matrix(db, rank, &mut rng)?
            } else {
                rho
            };
            (psi0, random_purification(&other, da, &mut rng)?)
        }
    };
    let unitary = cheating_unitary(&psi0, &psi1, DEFAULT_TOL);
    Ok(NogoDemo { psi0, psi1, unitary })
}

/// Worked example of the local cheating unitary, in plain text.
pub fn nogo<W: Write>(
    cfg: &ExperimentConfig,
    mut out: W,
    opts: &NogoOptions,
    matrices_csv: Option<&Path>,
) -> Result<Outcome> {
    let demo = nogo_states(cfg.master_seed, opts)?;
    let (p0, p1) = (&demo.psi0, &demo.psi1);
    writeln!(out, "dim_A = {}, dim_B = {}", p0.dim_a(), p0.dim_b())?;
    write_matrix(&mut out, "psi0 coefficients", &p0.coefficients())?;
    write_matrix(&mut out, "psi1 coefficients", &p1.coefficients())?;
    let r0 = partial_trace_a(p0)?;
    let r1 = partial_trace_a(p1)?;
    write_matrix(&mut out, "rho_B from psi0", r0.entries())?;
    write_matrix(&mut out, "rho_B from psi1", r1.entries())?;
    writeln!(out, "marginal trace distance = {:.3e}", trace_distance(&r0, &r1)?)?;

    let u = match demo.unitary {
        Ok(u) => u,
        Err(e @ Error::NotEquallyConcealing { .. }) => {
            writeln!(out, "error: {e}")?;
            out.flush()?;
            eprintln!("error: {e}");
            return Ok(Outcome::Rejected);
        }
        Err(e) => return Err(e.into()),
    };
    write_matrix(&mut out, "U_A", u.entries())?;
    if u.dim() == 2 {
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        if equal_up_to_phase(u.entries(), &x) {
            writeln!(out, "U_A = Pauli-X up to a global phase")?;
        } else if equal_up_to_phase(u.entries(), &DMatrix::identity(2, 2)) {
            writeln!(out, "U_A = identity up to a global phase")?;
        }
    }
    let f = fidelity(&u.apply(p0)?, p1)?;
    writeln!(out, "unitarity defect = {:.3e}", u.unitarity_defect())?;
    writeln!(out, "fidelity |<psi1|(U_A x I)|psi0>| = {f:.12}")?;
    out.flush()?;

    if let Some(path) = matrices_csv {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = csv_writer(cfg, file)?;
        w.write_record(["matrix", "row", "col", "re", "im"])?;
        for (name, m) in [
            ("psi0", p0.coefficients()),
            ("psi1", p1.coefficients()),
            ("u_a", u.entries().clone()),
        ] {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    w.serialize((name, i, j, m[(i, j)].re, m[(i, j)].im))?;
                }
            }
        }
        w.flush()?;
    }
    Ok(if f >= 1.0 - 1e-9 {
        Outcome::Success
    } else {
        Outcome::Rejected
    })
}
