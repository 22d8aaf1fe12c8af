//! `jou`: exact computations with pointed maps from the Jouanolou device to P1.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use jou_core::acceptance::{self, Config, EXAMPLE_FIXTURE};
use jou_core::artifact::{
    parse_map, parse_ring, parse_sl2, read_map, read_sl2, read_witness, write_map, write_witness, ArtifactError,
};
use jou_core::bundle::HomogPair;
use jou_core::exec::Exec;
use jou_core::field::FieldCtx;
use jou_core::groebner::{express_in_ideal, IdealProblem, Membership};
use jou_core::homgrp::{decompose, oplus, NegativeRefs, ReferenceFamily};
use jou_core::homotopy::verify_with;
use jou_core::jring::RingElement;
use jou_core::morphism::JMap;
use jou_core::mwk::{k1_canonical, kappa_rep, MWSymbolWord};
use jou_core::poly::{MPoly, W, X};
use jou_core::realize::{winding, WindingOptions};
use jou_core::sl2::{act, row_sum, PointedSL2};
use jou_core::text::parse_poly;

#[derive(Parser)]
#[command(name = "jou", version, about = "Pointed maps from the Jouanolou device to P1, computed exactly")]
struct Cli {
    /// Base field: `Q` or `Fp=<p>`.
    #[arg(long, global = true, default_value = "Q", value_parser = parse_field)]
    field: FieldCtx,
    /// Run data-parallel sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form `a(y, z) + x b(y, z)` of a ring element.
    Normalize { expr: String },
    /// Express a target in the ideal of the generators, or report NOT-IN-IDEAL.
    Ideal {
        #[arg(long)]
        target: String,
        /// Comma-separated generators.
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<String>,
        /// Work in k[x, y, z] and add the surface relation as an extra generator.
        #[arg(long)]
        with_relation: bool,
    },
    /// Resultant of two binary forms given by coefficient lists `c0; c1; ... | d0; d1; ...`.
    Resultant {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        degree: u32,
    },
    /// Sum of two degree-zero maps.
    Sum { f: String, g: String },
    /// Action of a pointed SL2 matrix `sl2 [A; -V | B; U]` on a map.
    Act { matrix: String, map: String },
    /// The group operation.
    Oplus {
        f: String,
        g: String,
        #[arg(long, value_enum, default_value_t = RefNeg::Qbasis)]
        ref_neg: RefNeg,
    },
    /// Write a map as `M . ref(n)` plus a witness homotopy.
    Decompose {
        map: String,
        #[arg(long, value_enum, default_value_t = RefNeg::Qbasis)]
        ref_neg: RefNeg,
        /// Also write the witness artifact here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Check a witness file against two maps.
    VerifyHomotopy {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Topological degree of the real realization along the circle.
    Realize {
        map: String,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Canonical form in K1 and its representative row.
    K1mw {
        #[arg(long)]
        word: String,
    },
    /// Run the acceptance battery.
    Selftest {
        /// Run only criteria whose id, name or tag matches.
        #[arg(long)]
        filter: Option<String>,
        /// Directory holding `example_u2.witness`; the built-in copy is used otherwise.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RefNeg {
    Naive,
    Qbasis,
}

impl From<RefNeg> for NegativeRefs {
    fn from(r: RefNeg) -> Self {
        match r {
            RefNeg::Naive => NegativeRefs::Naive,
            RefNeg::Qbasis => NegativeRefs::QBasis,
        }
    }
}

/// Failures sorted by exit code.
enum Failure {
    /// A well-posed question with a negative mathematical answer.
    Math(String),
    /// Bad input.
    Usage(String),
}

impl Failure {
    fn math(e: impl Display) -> Self {
        Failure::Math(e.to_string())
    }
}

impl From<ArtifactError> for Failure {
    fn from(e: ArtifactError) -> Self {
        match e {
            ArtifactError::Parse(_) | ArtifactError::Layout { .. } => Failure::Usage(e.to_string()),
            e => Failure::Math(e.to_string()),
        }
    }
}

fn parse_field(s: &str) -> Result<FieldCtx, String> {
    s.parse::<FieldCtx>().map_err(|e| e.to_string())
}

fn is_literal(s: &str, heads: &[&str]) -> bool {
    let t = s.trim_start();
    heads.iter().any(|h| t.starts_with(h))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// A map literal, or the path of a map artifact.
fn load_map(ctx: FieldCtx, arg: &str) -> Result<JMap, Failure> {
    if is_literal(arg, &["row", "map"]) {
        Ok(parse_map(ctx, arg)?)
    } else {
        Ok(read_map(&read_file(Path::new(arg))?)?)
    }
}

fn load_sl2(ctx: FieldCtx, arg: &str) -> Result<PointedSL2, Failure> {
    if is_literal(arg, &["sl2"]) {
        Ok(parse_sl2(ctx, arg)?)
    } else {
        Ok(read_sl2(&read_file(Path::new(arg))?)?)
    }
}

/// Parses a polynomial for the ideal engine, replacing `w` by `1 - x`.
fn free_poly(ctx: FieldCtx, s: &str) -> Result<MPoly, Failure> {
    let p = parse_poly(ctx, s).map_err(|e| Failure::Usage(format!("`{s}`: {e}")))?;
    let mut images: [MPoly; 5] = std::array::from_fn(|i| MPoly::var(ctx, i));
    images[W] = MPoly::one(ctx).sub(&MPoly::var(ctx, X));
    Ok(p.compose(&images))
}

fn coefficient_list(ctx: FieldCtx, s: &str) -> Result<Vec<RingElement>, Failure> {
    s.split(';').map(|c| parse_ring(ctx, c.trim()).map_err(Failure::from)).collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = cli.field;
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.command {
        Command::Normalize { expr } => println!("{}", parse_ring(ctx, &expr)?),
        Command::Ideal { target, gens, with_relation } => {
            let problem = IdealProblem {
                generators: gens.iter().map(|g| free_poly(ctx, g)).collect::<Result<_, _>>()?,
                target: free_poly(ctx, &target)?,
                with_relation,
            };
            match express_in_ideal(&problem).map_err(Failure::math)? {
                Membership::NotInIdeal => println!("NOT-IN-IDEAL"),
                Membership::Member(cert) => {
                    for (i, c) in cert.cofactors.iter().enumerate() {
                        println!("c{i} = {c}");
                    }
                    if let Some(r) = cert.relation {
                        println!("relation = {r}");
                    }
                }
            }
        }
        Command::Resultant { pair, degree } => {
            let (s0, s1) = pair.split_once('|').ok_or_else(|| Failure::Usage("--pair expects `<S0>|<S1>`".into()))?;
            let pair = HomogPair::new(degree, coefficient_list(ctx, s0)?, coefficient_list(ctx, s1)?)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            println!("{}", pair.resultant());
        }
        Command::Sum { f, g } => {
            println!("{}", row_sum(&load_map(ctx, &f)?, &load_map(ctx, &g)?).map_err(Failure::math)?);
        }
        Command::Act { matrix, map } => {
            println!("{}", act(&load_sl2(ctx, &matrix)?, &load_map(ctx, &map)?).map_err(Failure::math)?);
        }
        Command::Oplus { f, g, ref_neg } => {
            let refs = ReferenceFamily::new(ctx, ref_neg.into());
            println!("{}", oplus(&load_map(ctx, &f)?, &load_map(ctx, &g)?, &refs).map_err(Failure::math)?);
        }
        Command::Decompose { map, ref_neg, witness_out } => {
            let refs = ReferenceFamily::new(ctx, ref_neg.into());
            let d = decompose(&load_map(ctx, &map)?, &refs).map_err(Failure::math)?;
            println!("n = {}", d.n);
            println!("M = {}", d.m);
            let text = write_witness(&d.witness);
            match witness_out {
                Some(path) => {
                    std::fs::write(&path, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                }
                None => print!("{text}"),
            }
        }
        Command::VerifyHomotopy { file, from, to } => {
            let w = read_witness(&read_file(&file)?)?;
            let (f, g) = (load_map(w.ctx(), &from)?, load_map(w.ctx(), &to)?);
            let verdict = verify_with(&w, &f, &g, exec);
            println!("{verdict}");
            if !verdict.is_valid() {
                return Err(Failure::Math(format!("{} does not connect the two maps", file.display())));
            }
        }
        Command::Realize { map, samples } => {
            let f = load_map(ctx, &map)?;
            let opts = WindingOptions { samples, exec, ..WindingOptions::default() };
            let w = winding(&f, &opts).map_err(Failure::math)?;
            println!("degree {}", w.degree);
            println!("residual {:.3e}", w.residual);
        }
        Command::K1mw { word } => {
            let word = MWSymbolWord::parse(ctx, &word).map_err(|e| Failure::Usage(e.to_string()))?;
            let class = k1_canonical(&word).map_err(Failure::math)?;
            println!("{class}");
            println!("{}", write_map(&kappa_rep(&class).map_err(Failure::math)?).lines().nth(1).unwrap_or_default());
        }
        Command::Selftest { filter, fixtures } => {
            let example_fixture = match fixtures {
                Some(dir) => read_file(&dir.join("example_u2.witness"))?,
                None => EXAMPLE_FIXTURE.to_string(),
            };
            let cfg = Config { exec, filter, example_fixture, ..Config::default() };
            let reports = acceptance::run(&cfg);
            for r in &reports {
                println!("{r}");
            }
            let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            if reports.is_empty() {
                return Err(Failure::Usage("no criterion matches the filter".into()));
            }
            if !failed.is_empty() {
                return Err(Failure::Math(format!("failed: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("jou: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("jou: {msg}");
            ExitCode::from(2)
        }
    }
}
