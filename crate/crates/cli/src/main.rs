//! Batch command-line front end over state, Bloch and Hamiltonian files.
//!
//! Exit codes: 0 on success, 1 on validation errors (malformed files, bad
//! flags), 2 when an input is rejected by a theorem precondition (for
//! example a spectrum no pure state can produce). Every failure prints a
//! single machine-parsable line to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use evenodd::dynamics;
use evenodd::entanglement;
use evenodd::error::{Error, ErrorClass};
use evenodd::inversion;
use evenodd::io;
use evenodd::oracle::{self, NamedState};
use evenodd::reconstruction as recon;
use evenodd::state::{self, QuantumState};

mod output;
use output::{sf, Emitter, Format};

#[derive(Parser)]
#[command(
    name = "evenodd",
    version,
    about = "Even/odd Bloch correlation analysis for multiqubit states",
    disable_help_subcommand = true
)]
struct Cli {
    /// Output style for stdout reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Tolerance for spectral preconditions, relative to 2^(n-1).
    #[arg(long, global = true, default_value_t = recon::DEFAULT_SPECTRUM_TOL,
          value_parser = positive_f64)]
    spectrum_tol: f64,

    #[command(subcommand)]
    command: Command,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("tolerance must be positive and finite".into())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bloch-decompose a state file.
    Decompose {
        state: PathBuf,
        /// Restrict to these weights (comma separated); default all.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<usize>>,
        /// Write the coefficients as a Bloch file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Split a state into even and odd Bloch files.
    Split {
        state: PathBuf,
        #[arg(long)]
        even_out: PathBuf,
        #[arg(long)]
        odd_out: PathBuf,
    },
    /// Apply the state inversion.
    Invert {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = InvertMethod::Operator)]
        method: InvertMethod,
        /// Four comma-separated reals (unit norm) for --method flip.
        #[arg(long, value_delimiter = ',')]
        flip_vec: Option<Vec<f64>>,
        /// Write the inverted state.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Overlap between a state and its inversion.
    Alpha { state: PathBuf },
    /// Spectra of the even and odd correlation components of a pure state.
    Spectra { state: PathBuf },
    /// Rebuild one correlation component from the other.
    #[command(subcommand)]
    Reconstruct(ReconstructCmd),
    /// Certify the unique state carrying the given odd correlations.
    CertifyUda {
        #[arg(long)]
        input: PathBuf,
        /// Write the certified state.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build H = -P_o for a pure state and report its ground-state data.
    GroundHam {
        state: PathBuf,
        /// Write the Hamiltonian (Bloch grammar).
        #[arg(long)]
        ham_out: Option<PathBuf>,
    },
    /// Evolve a state under a Hamiltonian file and print trajectory rows.
    Evolve {
        state: PathBuf,
        #[arg(long)]
        ham: PathBuf,
        /// End of the time grid; default 2 pi / ||H||.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Record alpha(t).
        #[arg(long)]
        track_alpha: bool,
        /// Record the GHZ fidelity.
        #[arg(long)]
        track_ghz: bool,
    },
    /// Biseparability scan from odd correlations of weight <= n-2.
    Bisep {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a reference state.
    Named {
        #[arg(long, value_enum)]
        state: NamedKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReconstructCmd {
    /// P_e from P_o: unique for the odd-style spectrum, or one member of the
    /// even-n family when --phi is given.
    EvenFromOdd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        phi: Option<f64>,
        #[command(flatten)]
        out: ReconOut,
    },
    /// P_o from P_e: the sign pair for even-style input (--which-sign), or
    /// one member of the two-parameter family when --theta and --phi are
    /// given.
    OddFromEven {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long, value_enum, default_value_t = WhichSign::Plus)]
        which_sign: WhichSign,
        #[command(flatten)]
        out: ReconOut,
    },
}

#[derive(Args)]
struct ReconOut {
    /// Write the reconstructed component as a Bloch file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the assembled pure state.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvertMethod {
    Operator,
    Reductions,
    Flip,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, ValueEnum)]
enum NamedKind {
    Ghz,
    W,
    Bell,
}

/// Local failure wrapper carrying the exit class.
enum CliError {
    Lib(Error),
    Usage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e.class() {
                ErrorClass::Validation => 1,
                ErrorClass::TheoremPrecondition => 2,
            },
            CliError::Usage(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self.code() {
            2 => "precondition",
            _ => "validation",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Usage(m) => m.clone(),
        }
    }
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Lib(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("bad arguments");
            eprintln!("error code=1 kind=validation msg={first:?}");
            return ExitCode::from(1);
        }
    };
    let mut emit = Emitter::new(cli.format);
    match run(&cli.command, cli.spectrum_tol, &mut emit) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error code={} kind={} msg={:?}", e.code(), e.kind(), e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cmd: &Command, tol: f64, emit: &mut Emitter) -> Result<(), CliError> {
    match cmd {
        Command::Decompose { state, weights, output } => decompose(state, weights, output, emit),
        Command::Split { state, even_out, odd_out } => split(state, even_out, odd_out, emit),
        Command::Invert { state, method, flip_vec, output } => {
            invert(state, *method, flip_vec, output, emit)
        }
        Command::Alpha { state } => alpha(state, emit),
        Command::Spectra { state } => spectra(state, emit),
        Command::Reconstruct(rc) => reconstruct(rc, tol, emit),
        Command::CertifyUda { input, output } => certify_uda(input, output, tol, emit),
        Command::GroundHam { state, ham_out } => ground_ham(state, ham_out, emit),
        Command::Evolve { state, ham, t_max, steps, track_alpha, track_ghz } => {
            evolve(state, ham, *t_max, *steps, *track_alpha, *track_ghz, emit)
        }
        Command::Bisep { input } => bisep(input, tol, emit),
        Command::Named { state, n, output } => named(*state, *n, output, emit),
    }
}

fn write_or_print_state(state: &QuantumState, path: &Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => io::save_state(state, p)?,
        None => println!("{}", io::state_to_string(state)),
    }
    Ok(())
}

fn decompose(
    path: &Path,
    weights: &Option<Vec<usize>>,
    output: &Option<PathBuf>,
    emit: &mut Emitter,
) -> Result<(), CliError> {
    let st = io::load_state(path)?;
    let b = match weights {
        Some(ws) => state::bloch_decompose_weights(&st, ws)?,
        None => state::bloch_decompose(&st)?,
    };
    emit.kv("decompose", &[("n", st.n().to_string()), ("terms", b.len().to_string())]);
    for (p, c) in b.terms() {
        emit.kv("term", &[("pauli", p.label()), ("coeff", sf(c))]);
    }
    if let Some(out) = output {
        io::save_bloch(&b, out)?;
    }
    Ok(())
}

fn split(path: &Path, even_out: &Path, odd_out: &Path, emit: &mut Emitter) -> Result<(), CliError> {
    let st = io::load_state(path)?;
    let split = state::even_odd_split(&st)?;
    io::save_bloch(split.pe(), even_out)?;
    io::save_bloch(split.po(), odd_out)?;
    emit.kv(
        "split",
        &[
            ("n", split.n().to_string()),
            ("even_terms", split.pe().len().to_string()),
            ("odd_terms", split.po().len().to_string()),
            ("purity", sf(split.purity())),
            ("alpha", sf(split.alpha())),
        ],
    );
    Ok(())
}

fn invert(
    path: &Path,
    method: InvertMethod,
    flip_vec: &Option<Vec<f64>>,
    output: &Option<PathBuf>,
    emit: &mut Emitter,
) -> Result<(), CliError> {
    let st = io::load_state(path)?;
    let (result, raw_trace) = match method {
        InvertMethod::Operator => (inversion::invert_qubit(&st)?, None),
        InvertMethod::Reductions => {
            let raw = inversion::invert_via_reductions(&st)?;
            let trace = evenodd::linalg::trace(&raw).re;
            let normalized = raw.mapv(|z| z / trace);
            (QuantumState::mixed_from_matrix(st.n(), st.local_dim(), normalized)?, Some(trace))
        }
        InvertMethod::Flip => {
            let vec = flip_vec
                .as_ref()
                .ok_or_else(|| CliError::Usage("--method flip requires --flip-vec".into()))?;
            if vec.len() != 4 {
                return Err(CliError::Usage(format!(
                    "--flip-vec needs exactly 4 comma-separated values, got {}",
                    vec.len()
                )));
            }
            let spec = inversion::FlipSpec::new([vec[0], vec[1], vec[2], vec[3]])?;
            (inversion::apply_general_flip(&st, &spec)?, None)
        }
    };
    let mut fields = vec![("n", st.n().to_string())];
    if let Some(trace) = raw_trace {
        fields.push(("raw_trace", sf(trace)));
    }
    emit.kv("invert", &fields);
    write_or_print_state(&result, output)
}

fn alpha(path: &Path, emit: &mut Emitter) -> Result<(), CliError> {
    let st = io::load_state(path)?;
    let data = inversion::overlap_alpha(&st)?;
    let class = match data.class() {
        inversion::AlphaClass::Zero => "zero",
        inversion::AlphaClass::Generic => "generic",
        inversion::AlphaClass::One => "one",
    };
    let mut fields = vec![
        ("n", st.n().to_string()),
        ("alpha", sf(data.alpha)),
        ("trace_form", sf(data.trace_form)),
        ("class", class.to_string()),
    ];
    if let Some(phase) = data.phase {
        fields.push(("phase", sf(phase)));
    }
    emit.kv("alpha", &fields);
    Ok(())
}

fn spectra(path: &Path, emit: &mut Emitter) -> Result<(), CliError> {
    let st = io::load_state(path)?;
    let split = state::even_odd_split(&st)?;
    let report = recon::spectra_check(&split)?;
    emit.kv(
        "spectra",
        &[
            ("n", report.n.to_string()),
            ("case", report.case_label.as_str().to_string()),
            ("alpha", sf(report.alpha)),
            ("commutator_norm", sf(report.commutator_norm)),
            ("deviation", sf(report.spectra_deviation())),
        ],
    );
    for (which, values) in [("pe", &report.eig_pe), ("po", &report.eig_po)] {
        for (idx, v) in values.iter().enumerate() {
            emit.kv(
                "eig",
                &[("which", which.to_string()), ("idx", idx.to_string()), ("value", sf(*v))],
            );
        }
    }
    Ok(())
}

fn reconstruct(rc: &ReconstructCmd, tol: f64, emit: &mut Emitter) -> Result<(), CliError> {
    match rc {
        ReconstructCmd::EvenFromOdd { input, phi, out } => {
            let b = io::load_bloch(input)?;
            let n = b.n();
            let po = b.materialize()?;
            let (pe, assembled) = match phi {
                None => {
                    let r = recon::even_from_odd_with_tol(&po, n, tol)?;
                    (r.pe, r.state)
                }
                Some(phi) => {
                    let family = recon::even_family_from_odd_even_n_with_tol(&po, n, tol)?;
                    emit.kv(
                        "family",
                        &[
                            ("kind", "one-param-even".to_string()),
                            ("alpha", sf(family.alpha)),
                            ("lambda", sf(family.lambda)),
                        ],
                    );
                    (family.sample(*phi), family.assemble(*phi))
                }
            };
            let pe_bloch = state::operator_bloch(&pe)?;
            emit.kv(
                "reconstruct",
                &[
                    ("direction", "even-from-odd".to_string()),
                    ("n", n.to_string()),
                    ("terms", pe_bloch.len().to_string()),
                ],
            );
            if let Some(p) = &out.output {
                io::save_bloch(&pe_bloch, p)?;
            }
            if let Some(p) = &out.state_out {
                io::save_state(&assembled, p)?;
            }
            Ok(())
        }
        ReconstructCmd::OddFromEven { input, theta, phi, which_sign, out } => {
            let b = io::load_bloch(input)?;
            let n = b.n();
            let pe = b.materialize()?;
            let (po, assembled) = match (theta, phi) {
                (Some(theta), Some(phi)) => {
                    let family = recon::odd_family_from_even_with_tol(&pe, n, tol)?;
                    emit.kv(
                        "family",
                        &[
                            ("kind", "two-param-odd".to_string()),
                            ("theta", sf(*theta)),
                            ("phi", sf(*phi)),
                        ],
                    );
                    (family.sample(*theta, *phi), family.assemble(*theta, *phi))
                }
                (None, None) => {
                    let pair = recon::odd_from_even_even_n_with_tol(&pe, n, tol)?;
                    emit.kv(
                        "family",
                        &[("kind", "sign-pair".to_string()), ("alpha", sf(pair.alpha))],
                    );
                    match which_sign {
                        WhichSign::Plus => (pair.po_plus, pair.state_plus),
                        WhichSign::Minus => (pair.po_minus, pair.state_minus),
                    }
                }
                _ => {
                    return Err(CliError::Usage("--theta and --phi must be given together".into()))
                }
            };
            let po_bloch = state::operator_bloch(&po)?;
            emit.kv(
                "reconstruct",
                &[
                    ("direction", "odd-from-even".to_string()),
                    ("n", n.to_string()),
                    ("terms", po_bloch.len().to_string()),
                ],
            );
            if let Some(p) = &out.output {
                io::save_bloch(&po_bloch, p)?;
            }
            if let Some(p) = &out.state_out {
                io::save_state(&assembled, p)?;
            }
            Ok(())
        }
    }
}

fn certify_uda(
    input: &Path,
    output: &Option<PathBuf>,
    tol: f64,
    emit: &mut Emitter,
) -> Result<(), CliError> {
    let b = io::load_bloch(input)?;
    let n = b.n();
    let po = b.materialize()?;
    let cert = recon::uda_certify_with_tol(&po, n, tol)?;
    emit.kv(
        "certify-uda",
        &[("n", n.to_string()), ("assembly_residual", sf(cert.assembly_residual))],
    );
    write_or_print_state(&cert.state, output)
}

fn ground_ham(path: &Path, ham_out: &Option<PathBuf>, emit: &mut Emitter) -> Result<(), CliError> {
    let st = io::load_state(path)?;
    let st = io::state_as_pure(&st)?;
    let gh = recon::ground_hamiltonian_from_state(&st)?;
    emit.kv(
        "ground-ham",
        &[
            ("n", st.n().to_string()),
            ("ground_energy", sf(gh.ground_energy)),
            ("gap", sf(gh.gap)),
            ("ground_fidelity", sf(gh.ground_fidelity)),
        ],
    );
    if let Some(p) = ham_out {
        let b = state::operator_bloch(&gh.matrix)?;
        let terms: std::collections::BTreeMap<_, _> = b.terms().map(|(s, c)| (*s, c)).collect();
        let h = dynamics::PauliHamiltonian::from_terms(st.n(), terms)?;
        io::save_hamiltonian(&h, p)?;
    }
    Ok(())
}

fn evolve(
    path: &Path,
    ham: &Path,
    t_max: Option<f64>,
    steps: usize,
    track_alpha: bool,
    track_ghz: bool,
    emit: &mut Emitter,
) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let st = io::load_state(path)?;
    let h = io::load_hamiltonian(ham)?;
    let prop = dynamics::Propagator::new(&h)?;
    let times: Vec<f64> = match t_max {
        Some(t_max) if t_max > 0.0 => {
            (0..steps).map(|k| t_max * k as f64 / (steps - 1) as f64).collect()
        }
        Some(_) => return Err(CliError::Usage("--t-max must be positive".into())),
        None => dynamics::default_times(&prop, steps),
    };
    let traj = dynamics::alpha_trajectory(&st, &h, &times, track_ghz)?;
    emit.kv(
        "evolve",
        &[
            ("n", st.n().to_string()),
            ("steps", times.len().to_string()),
            ("parity", h.parity_class().as_str().to_string()),
        ],
    );
    for (idx, &t) in traj.times.iter().enumerate() {
        let mut fields = vec![("t", sf(t)), ("energy", sf(traj.energy_series[idx]))];
        if track_alpha {
            fields.push(("alpha", sf(traj.alpha_series[idx])));
        }
        if let Some(ghz) = &traj.ghz_fidelity_series {
            fields.push(("ghz_fidelity", sf(ghz[idx])));
        }
        emit.kv("traj", &fields);
    }
    Ok(())
}

fn bisep(input: &Path, tol: f64, emit: &mut Emitter) -> Result<(), CliError> {
    let b = io::load_bloch(input)?;
    let corrs = entanglement::OddCorrelations::from_bloch(&b)?;
    let report = entanglement::bisep_scan_with_tol(&corrs, tol);
    emit.kv(
        "bisep",
        &[
            ("n", report.n.to_string()),
            ("consistent_cuts", report.consistent_cuts().count().to_string()),
        ],
    );
    for (k, results) in &report.cut_results {
        for r in results {
            let subset = r.subset.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
            emit.kv(
                "cut",
                &[
                    ("k", k.to_string()),
                    ("subset", subset),
                    ("verdict", r.verdict.as_str().to_string()),
                    ("diag", r.diagnostics.clone()),
                ],
            );
        }
    }
    Ok(())
}

fn named(
    kind: NamedKind,
    n: usize,
    output: &Option<PathBuf>,
    emit: &mut Emitter,
) -> Result<(), CliError> {
    let spec = match kind {
        NamedKind::Ghz => NamedState::Ghz { n },
        NamedKind::W => NamedState::W { n },
        NamedKind::Bell => {
            if n != 2 {
                return Err(CliError::Usage("--state bell requires --n 2".into()));
            }
            NamedState::Bell
        }
    };
    let st = oracle::make_named(&spec)?;
    emit.kv("named", &[("n", st.n().to_string())]);
    write_or_print_state(&st, output)
}
