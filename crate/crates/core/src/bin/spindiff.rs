use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;

use spindiff::config::{key_table, Scenario};
use spindiff::dynamics::{pump_sweep, ModeAmplitudes, SweepContext};
use spindiff::eigenmodes::{ModeCatalog, ModeIndex};
use spindiff::figures::{fit_table, sweep_table, write_figure, FigureTag};
use spindiff::gas::{diffusion_coefficient, total_decoherence_rate};
use spindiff::optics::{slit_image, Axis, BeamSpec};
use spindiff::output::{read_spectrum, Table};
use spindiff::signal::{fit_lorentzians, Spectrum};
use spindiff::{selftest, Error, Result};

#[derive(Parser)]
#[command(
    name = "spindiff",
    version,
    about = "Spin-diffusion eigenmodes and coupled-mode sweeps of alkali vapor cells"
)]
struct Cli {
    /// Scenario file of `key = value` lines; missing keys take their defaults.
    #[arg(long, global = true, env = "SPINDIFF_CONFIG")]
    config: Option<PathBuf>,

    /// Output directory for CSV files.
    #[arg(long, global = true, env = "SPINDIFF_OUT", default_value = "out")]
    out: PathBuf,

    /// Overrides the `seed` key.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "SPINDIFF_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mode table of the configured cell.
    Modes,
    /// Slit images of selected modes.
    Image {
        /// Comma-separated mode ids such as s000,s01z or b111; default the first three radial modes.
        #[arg(long, value_delimiter = ',')]
        modes: Vec<String>,
    },
    /// Pump-power sweep of the two coupled modes.
    SweepPump,
    /// Coupled-mode matrix at `couple.power` and the free decay from mode 1.
    Couple {
        /// Samples of the decay trace.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Fit Lorentzians to a lock-in spectrum with columns freq_Hz, X, Y.
    Fit {
        csv: PathBuf,
        /// Number of components (default `fit.components`).
        #[arg(long)]
        components: Option<usize>,
    },
    /// Reproduce a figure's data: fig2, fig3, fig4, fig5, suppl-beam, suppl-noneon or all.
    Figure { tag: String },
    /// Run the invariant suite; nonzero exit on any failure.
    Selftest {
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Print the configuration key table as markdown.
    Keys,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(cli: &Cli) -> Result<Scenario> {
    let mut s = Scenario::load_settings(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        s.set("seed", &seed.to_string())?;
    }
    Scenario::from_settings(&s)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Command::Selftest { inject_fault } = &cli.command {
        return selftest_cmd(inject_fault.as_deref(), cli.seed.unwrap_or(0));
    }
    if let Command::Keys = cli.command {
        print!("{}", key_table());
        return Ok(ExitCode::SUCCESS);
    }
    let s = load(cli)?;
    let out = cli.out.as_path();
    let paths = match &cli.command {
        Command::Modes => vec![modes(&s)?.write(out, "modes.csv", &s.hash)?],
        Command::Image { modes } => vec![image(&s, modes)?.write(out, "image.csv", &s.hash)?],
        Command::SweepPump => {
            let pts = pump_sweep(&s.sweep()?)?;
            vec![sweep_table(&pts).write(out, "sweep.csv", &s.hash)?]
        }
        Command::Couple { samples } => couple(&s, *samples, out)?,
        Command::Fit { csv, components } => {
            vec![fit(csv, components.unwrap_or(s.fit_components))?.write(out, "fit.csv", &s.hash)?]
        }
        Command::Figure { tag } => {
            let tags: Vec<FigureTag> =
                if tag == "all" { FigureTag::ALL.to_vec() } else { vec![tag.parse::<FigureTag>()?] };
            let mut paths = Vec::new();
            for t in tags {
                paths.extend(write_figure(t, &s, out)?);
            }
            paths
        }
        Command::Selftest { .. } | Command::Keys => unreachable!(),
    };
    report(&paths);
    Ok(ExitCode::SUCCESS)
}

fn selftest_cmd(fault: Option<&str>, seed: u64) -> Result<ExitCode> {
    match fault {
        None => {}
        Some("bessel") => spindiff::eigenmodes::bessel::inject_fault(Some(1.001)),
        Some(other) => return Err(Error::Config(format!("unknown fault '{other}', expected bessel"))),
    }
    let r = selftest::run(seed);
    println!("{r}");
    Ok(if r.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn modes(s: &Scenario) -> Result<Table> {
    let d = diffusion_coefficient(s.temperature, &s.gas)?;
    let cat = ModeCatalog::solve(&s.cell, s.l_max, s.mode_count, d, total_decoherence_rate(&s.rates))?;
    let mut t = Table::new(&[
        ("id", ""),
        ("n", ""),
        ("l", ""),
        ("p", ""),
        ("kR", ""),
        ("k_per_m", "1/m"),
        ("gamma_per_s", "1/s"),
        ("norm", "m^3"),
    ])
    .note("box modes: n, l, p hold nx, ny, nz; kR uses the radius or the largest half edge");
    for r in cat.rows() {
        t.push(vec![
            r.id.into(),
            (r.n as f64).into(),
            (r.l as f64).into(),
            r.p.into(),
            r.kr.into(),
            r.k.into(),
            r.gamma.into(),
            r.norm.into(),
        ])?;
    }
    Ok(t)
}

fn image(s: &Scenario, ids: &[String]) -> Result<Table> {
    let d = diffusion_coefficient(s.temperature, &s.gas)?;
    let g0 = total_decoherence_rate(&s.rates);
    let ids: Vec<ModeIndex> = if ids.is_empty() {
        match s.cell {
            spindiff::eigenmodes::Cell::Sphere { .. } => {
                (0..3).map(|n| ModeIndex::sphere(n, 0, 0)).collect::<Result<_>>()?
            }
            spindiff::eigenmodes::Cell::Box { .. } => {
                (1..4).map(|nz| ModeIndex::cuboid(1, 1, nz)).collect::<Result<_>>()?
            }
        }
    } else {
        ids.iter().map(|i| i.parse()).collect::<Result<_>>()?
    };
    let probe = BeamSpec::new(Axis::X, s.probe_waist, 1.0)?;
    let mut t = Table::new(&[("z0_mm", "mm")]).note("probe power normalized to 1 W; columns are mode ids");
    let mut cols = Vec::new();
    for id in &ids {
        let m = spindiff::eigenmodes::solve_mode(&s.cell, *id, d, g0)?;
        cols.push(slit_image(&m, &probe, &s.slit, s.order)?);
        t = t.column(id.to_string(), "m^1.5");
    }
    for (i, z) in s.slit.positions.iter().enumerate() {
        let mut row = vec![(z * 1e3).into()];
        row.extend(cols.iter().map(|c| c[i].into()));
        t.push(row)?;
    }
    Ok(t)
}

fn couple(s: &Scenario, samples: usize, out: &Path) -> Result<Vec<PathBuf>> {
    let ctx = SweepContext::new(&s.sweep()?)?;
    let (sys, p_a) = ctx.system_at(s.coupling.power)?;
    let ev = sys.eigenvalues();
    let mut t = Table::new(&[("quantity", ""), ("re", "1/s"), ("im", "1/s")]).note(format!(
        "P = {} mW, p_A = {p_a}, modes {} and {}; a_k = -Gamma_k + i omega_k",
        s.coupling.power * 1e3,
        ctx.modes[0].index,
        ctx.modes[1].index
    ));
    let d = sys.diagonal();
    let rows: [(&str, C64); 7] = [
        ("a1", d[0]),
        ("a2", d[1]),
        ("J", sys.j),
        ("Delta", sys.delta),
        ("lambda1", ev.values[0]),
        ("lambda2", ev.values[1]),
        ("g1_g2", C64::new(sys.gain[0].re, sys.gain[1].re)),
    ];
    for (name, z) in rows {
        t.push(vec![name.into(), z.re.into(), z.im.into()])?;
    }
    t.notes.push(format!("coalesced = {}; g1_g2 holds the two real drive gains", ev.coalesced));
    let passive = sys.without_gain().in_frame(0.5 * (sys.omega()[0] + sys.omega()[1]));
    let t_end = 5.0 / sys.gamma()[0];
    let c0 = ModeAmplitudes::first_mode();
    let mut tr = Table::new(&[("t_s", "s"), ("c1_sq", ""), ("c2_sq", "")])
        .note("free decay from c0 = (1, 0) without drive, frame at the mean frequency");
    for k in 0..=samples {
        let time = t_end * k as f64 / samples.max(1) as f64;
        let c = passive.evolve(&c0, time)?;
        tr.push(vec![time.into(), c.c[0].norm_sqr().into(), c.c[1].norm_sqr().into()])?;
    }
    Ok(vec![t.write(out, "couple.csv", &s.hash)?, tr.write(out, "couple_trace.csv", &s.hash)?])
}

fn fit(path: &Path, n: usize) -> Result<Table> {
    let (f, x, y) = read_spectrum(path)?;
    let spec = Spectrum::new(f, x, y, 0.0)?;
    let r = fit_lorentzians(&spec, n)?;
    let mut t = fit_table(&r);
    t.notes.push(format!("{} iterations, input {}", r.iterations, path.display()));
    Ok(t)
}
