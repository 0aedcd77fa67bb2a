//! Command-line surface over the engine: build and serialize balls, run
//! rule tables, close them under slot rotation, hunt tiles where stepping
//! and moving fail to commute, recover local rules from black-box maps,
//! measure configuration distances, and draw SVG figures.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 a commutation
//! sweep found a counterexample.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperca_core::ca_engine::structure::{staged_alphabet, structure_table};
use hyperca_core::ca_engine::synthesis::{
    schedule_labeling, synthesize_propagation_table, SynthesisSchedule,
};
use hyperca_core::ca_engine::Rule;
use hyperca_core::hedlund::{
    check_commutation, commutation_sweep, extract_local_rule, GlobalMap, HedlundError,
    TableGlobalMap,
};
use hyperca_core::metric::{distance, LevelWeights};
use hyperca_core::render::{emit_svg, layout, Palette};
use hyperca_core::tiling::{evaluate_word, rotation_about_center, shift_generators};
use hyperca_core::{
    build_ball, build_ball_with_cap, step, Alphabet, Automorphism, Configuration, GridKind,
    RuleTable, StateId, TilingBall,
};

/// Overrides the builder's radius cap when set.
const ENV_MAX_RADIUS: &str = "HYPERCA_MAX_RADIUS";

#[derive(Parser)]
#[command(
    name = "hyperca",
    version,
    about = "Cellular automata on {p,q} tilings of the hyperbolic plane"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct BallArgs {
    /// Tiling: pentagrid, heptagrid, or p,q
    #[arg(long, default_value = "pentagrid")]
    grid: GridKind,
    /// Ball radius in rings
    #[arg(long, default_value_t = 6)]
    radius: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    /// Roots spark a distinct state and deeper cells settle two steps
    /// after their ring is reached
    Staged,
    /// Every cell of a ring assumes its final status the moment the ring
    /// is reached (known to be contradictory; kept for the diagnostic)
    RingSync,
}

impl From<ScheduleArg> for SynthesisSchedule {
    fn from(s: ScheduleArg) -> SynthesisSchedule {
        match s {
            ScheduleArg::Staged => SynthesisSchedule::Staged,
            ScheduleArg::RingSync => SynthesisSchedule::RingSync,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a ball and serialize its combinatorial map
    Ball {
        #[command(flatten)]
        ball: BallArgs,
        /// Output file (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the ring sizes 1..radius
    Rings {
        #[command(flatten)]
        ball: BallArgs,
    },
    /// Emit the built-in neighborhood-status table of a grid
    Table {
        /// Tiling: pentagrid or heptagrid
        #[arg(long, default_value = "pentagrid")]
        grid: GridKind,
        /// Close the table under slot rotation before emitting
        #[arg(long)]
        closed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grow the status labeling outward from a central seed
    Label {
        #[command(flatten)]
        ball: BallArgs,
        /// Steps to run (default: enough to settle the surviving region)
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Staged)]
        schedule: ScheduleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a rule table to a configuration
    Step {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Close a rule table under rotation of the neighbor slots
    Closure {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exit 0 iff the table is rotation invariant
    CheckRot {
        #[arg(long)]
        table: PathBuf,
    },
    /// Sweep for tiles where stepping and moving fail to commute
    Commute {
        #[arg(long)]
        table: PathBuf,
        /// Random configurations per automorphism
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Random generator words to add to the corpus
        #[arg(long, default_value_t = 10)]
        words: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        radius: u32,
    },
    /// Recover a local rule from a table treated as a black-box global map
    Extract {
        /// Rule table whose induced global map is probed
        #[arg(long = "table-as-global")]
        table_as_global: PathBuf,
        /// Probing ball radius; cost grows as |alphabet|^(alpha+1)
        #[arg(long, default_value_t = 3)]
        radius: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact distance between two configurations
    Dist {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
        /// Comma-separated state names (default: the staged status states)
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Draw a configuration as an SVG figure
    Render {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        ball: BallArgs,
        /// Palette file of state=#rrggbb lines
        #[arg(long)]
        palette: Option<PathBuf>,
        /// Comma-separated state names (default: the staged status states)
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn build(grid: GridKind, radius: u32) -> Result<TilingBall> {
    let ball = match std::env::var(ENV_MAX_RADIUS) {
        Ok(v) => {
            let cap = v.trim().parse().with_context(|| {
                format!("{ENV_MAX_RADIUS} must be an integer, got {v:?}")
            })?;
            build_ball_with_cap(grid, radius, cap)?
        }
        Err(_) => build_ball(grid, radius)?,
    };
    Ok(ball)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_table(path: &Path) -> Result<RuleTable> {
    RuleTable::from_text(&read(path)?)
        .with_context(|| format!("parsing table {}", path.display()))
}

fn parse_alphabet(flag: &Option<String>) -> Result<Alphabet> {
    match flag {
        None => Ok(staged_alphabet()),
        Some(list) => Ok(Alphabet::new(
            list.split(',').map(|s| s.trim().to_string()).collect(),
        )?),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn describe_rule(alphabet: &Alphabet, rule: &Rule) -> Result<String> {
    let neighbors = rule
        .neighbors
        .iter()
        .map(|&s| alphabet.name(s).map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?
        .join(" ");
    Ok(format!(
        "{neighbors} | {} -> {}",
        alphabet.name(rule.own)?,
        alphabet.name(rule.result)?
    ))
}

/// Generator shifts with their inverses, `words` random generator words
/// with a nonempty comparison region, and every rotation about the centre.
fn automorphism_corpus(
    ball: &TilingBall,
    map: &dyn GlobalMap,
    words: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(String, Automorphism)>> {
    let named = shift_generators(ball)?.named();
    let mut corpus: Vec<(String, Automorphism)> = Vec::new();
    for (name, a) in &named {
        corpus.push((name.clone(), a.clone()));
        corpus.push((format!("{name}^-1"), a.invert()?));
    }
    let probe = Configuration::quiescent(ball);
    let atoms = ["t1", "t1^-1", "t2", "t2^-1"];
    let mut found = 0;
    let mut attempts = 0;
    while found < words {
        attempts += 1;
        if attempts > 200 + 50 * words {
            bail!("could not sample {words} generator words that keep a nonempty comparison region at radius {}", ball.radius());
        }
        let len = rng.gen_range(1..=6);
        let word = (0..len)
            .map(|_| atoms[rng.gen_range(0..atoms.len())])
            .collect::<Vec<_>>()
            .join("*");
        let auto = evaluate_word(ball, &named, &word)?;
        // long words can displace the whole ball out of itself; only keep
        // words the checker can actually compare somewhere
        match check_commutation(map, &auto, &probe) {
            Ok(_) => {
                corpus.push((word, auto));
                found += 1;
            }
            Err(HedlundError::EmptyRegion) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    for j in 1..ball.p() {
        corpus.push((format!("r{j}"), rotation_about_center(ball, j)?));
    }
    Ok(corpus)
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Ball { ball, out } => {
            let b = build(ball.grid, ball.radius)?;
            emit(&out, &b.to_text())?;
        }
        Cmd::Rings { ball } => {
            let b = build(ball.grid, ball.radius)?;
            let sizes: Vec<String> = (1..=b.radius())
                .map(|n| b.ring_cells(n).len().to_string())
                .collect();
            println!("{}", sizes.join(" "));
        }
        Cmd::Table { grid, closed, out } => {
            let t = structure_table(grid)?;
            let t = if closed { t.rotation_closure()? } else { t };
            emit(&out, &t.to_text())?;
        }
        Cmd::Label {
            ball,
            steps,
            schedule,
            out,
        } => {
            let b = build(ball.grid, ball.radius)?;
            let schedule = SynthesisSchedule::from(schedule);
            let table = synthesize_propagation_table(&b, schedule)?;
            let mut config = schedule_labeling(&b, schedule, 0)?;
            // cells at ring r settle by time r+2, and t steps keep rings
            // up to radius-t, so (radius+2)/2 rounded up settles them all
            let steps = steps.unwrap_or(b.radius().div_ceil(2) + 1);
            for _ in 0..steps {
                config = step(&b, &table, &config)?;
            }
            emit(&out, &config.to_text(&b, table.alphabet())?)?;
        }
        Cmd::Step {
            table,
            config,
            steps,
            radius,
            out,
        } => {
            let t = read_table(&table)?;
            let b = build(t.grid(), radius)?;
            let mut c = Configuration::from_text(&b, t.alphabet(), &read(&config)?)?;
            for _ in 0..steps {
                c = step(&b, &t, &c)?;
            }
            emit(&out, &c.to_text(&b, t.alphabet())?)?;
        }
        Cmd::Closure { table, out } => {
            let t = read_table(&table)?;
            let closed = t
                .rotation_closure()
                .context("the table cannot be closed under rotation")?;
            emit(&out, &closed.to_text())?;
        }
        Cmd::CheckRot { table } => {
            let t = read_table(&table)?;
            match t.rotation_invariance_witness() {
                None => println!("rotation invariant"),
                Some((rule, j)) => {
                    println!(
                        "not rotation invariant: rule [{}] turned by {j} is absent or contradicted",
                        describe_rule(t.alphabet(), &rule)?
                    );
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Cmd::Commute {
            table,
            trials,
            words,
            seed,
            radius,
        } => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let t = read_table(&table)?;
            let b = build(t.grid(), radius)?;
            let map = TableGlobalMap::new(&b, &t)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let corpus = automorphism_corpus(&b, &map, words, &mut rng)?;
            let states = t.alphabet().len();
            let configs: Vec<Configuration> = (0..trials)
                .map(|_| {
                    let mut c = Configuration::quiescent(&b);
                    for tile in b.tiles() {
                        c.set_state(tile, StateId(rng.gen_range(0..states) as u8));
                    }
                    c
                })
                .collect();
            let outcomes = commutation_sweep(&map, &corpus, &configs)?;
            let mut report = String::new();
            let mut failed = false;
            for o in &outcomes {
                match &o.counterexample {
                    None => report.push_str("PASS\n"),
                    Some(c) => {
                        failed = true;
                        let _ = writeln!(
                            report,
                            "FAIL tile={} expected={} got={} automorphism={}",
                            c.tile,
                            t.alphabet().name(c.expected)?,
                            t.alphabet().name(c.got)?,
                            o.word
                        );
                    }
                }
            }
            print!("{report}");
            if failed {
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Extract {
            table_as_global,
            radius,
            out,
        } => {
            let t = read_table(&table_as_global)?;
            let b = build(t.grid(), radius)?;
            let map = TableGlobalMap::new(&b, &t)?;
            let extracted = extract_local_rule(&map)?;
            emit(&out, &extracted.to_text())?;
        }
        Cmd::Dist {
            config_a,
            config_b,
            ball,
            alphabet,
        } => {
            let b = build(ball.grid, ball.radius)?;
            let alphabet = parse_alphabet(&alphabet)?;
            let a = Configuration::from_text(&b, &alphabet, &read(&config_a)?)?;
            let c = Configuration::from_text(&b, &alphabet, &read(&config_b)?)?;
            let weights = LevelWeights::for_ball(&b);
            println!("{}", distance(&b, &weights, &a, &c)?);
        }
        Cmd::Render {
            config,
            ball,
            palette,
            alphabet,
            out,
        } => {
            let b = build(ball.grid, ball.radius)?;
            let l = layout(&b)?;
            let alphabet = parse_alphabet(&alphabet)?;
            let c = Configuration::from_text(&b, &alphabet, &read(&config)?)?;
            let pal = match &palette {
                Some(p) => Palette::from_text(&read(p)?)?,
                None => Palette::default_structure(),
            };
            emit(&out, &emit_svg(&b, &l, &c, &alphabet, &pal)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
