use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdn::io::{read_matrix_csv, write_matrix_csv};
use sdn::network::MatrixKind;
use sdn::scattering::{
    admittance_scattering, check_isotropic_uniqueness, householder_cost, is_lossless, isotropic_matrix,
    nearest_householder, nearest_orthogonal, normalized_householder, random_lossless, LosslessMatrix, RandomKind,
    Weighting,
};

use crate::{CliResult, Failure};

#[derive(Subcommand, Debug)]
pub enum MatrixCommand {
    /// Write a lossless scattering matrix as CSV.
    Construct {
        #[arg(long, default_value = "isotropic", value_name = "KIND")]
        kind: MatrixKind,
        /// Number of ports.
        #[arg(long, default_value_t = 5, value_name = "K")]
        size: usize,
        #[arg(long, default_value_t = 0, value_name = "U64")]
        seed: u64,
        /// Comma separated port admittances for householder and admittance matrices.
        #[arg(long, value_name = "Y,..", value_delimiter = ',')]
        admittance: Option<Vec<f64>>,
        /// CSV destination; printed to stdout when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Check whether a CSV matrix is lossless. Exits with 1 when it is not.
    Verify {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        /// Test against `diag(Y)` instead of searching for a weighting.
        #[arg(long, value_name = "Y,..", value_delimiter = ',')]
        admittance: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Project a CSV matrix onto the nearest orthogonal or Householder matrix.
    Nearest {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Target::Orthogonal)]
        target: Target,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Target {
    Orthogonal,
    Householder,
}

fn construct(kind: MatrixKind, k: usize, seed: u64, y: Option<&[f64]>) -> sdn::Result<LosslessMatrix> {
    let admittance = || match y {
        Some(y) => y.to_vec(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k).map(|_| rng.random_range(0.5..2.0)).collect()
        }
    };
    match kind {
        MatrixKind::Isotropic => isotropic_matrix(k),
        MatrixKind::Householder => normalized_householder(&admittance()),
        MatrixKind::Admittance => admittance_scattering(&admittance()),
        MatrixKind::Orthogonal => random_lossless(RandomKind::OrthogonalGivens, k, seed),
        MatrixKind::Permutation => random_lossless(RandomKind::Permutation, k, seed),
        MatrixKind::Circulant => random_lossless(RandomKind::CirculantAllpass, k, seed),
    }
}

fn emit(m: &DMatrix<f64>, out: Option<&PathBuf>) -> CliResult {
    match out {
        Some(p) => {
            write_matrix_csv(p, m)?;
            eprintln!("wrote {}x{} matrix to {}", m.nrows(), m.ncols(), p.display());
        }
        None => {
            for row in m.row_iter() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                println!("{}", cells.join(","));
            }
        }
    }
    Ok(())
}

pub fn run(cmd: &MatrixCommand) -> CliResult {
    match cmd {
        MatrixCommand::Construct { kind, size, seed, admittance, out } => {
            if let Some(y) = admittance {
                if y.len() != *size {
                    return Err(Failure::Validation(format!("expected {size} admittances, got {}", y.len())));
                }
            }
            let m = construct(*kind, *size, *seed, admittance.as_deref())?;
            emit(m.entries(), out.as_ref())
        }
        MatrixCommand::Verify { input, admittance, tol } => {
            let a = read_matrix_csv(input)?;
            let y = admittance.as_ref().map(|y| DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(y)));
            if let Some(y) = &y {
                if y.nrows() != a.nrows() {
                    return Err(Failure::Validation("admittance count does not match the matrix".into()));
                }
            }
            let weighting = y.as_ref().map_or(Weighting::Auto, Weighting::Given);
            let v = is_lossless(&a, weighting, *tol);
            println!("lossless: {}", if v.lossless { "yes" } else { "no" });
            println!("residual: {:.3e}", v.residual);
            let moduli: Vec<String> = v.eigenvalues.iter().map(|z| format!("{:.6}", z.norm())).collect();
            println!("eigenvalue moduli: [{}]", moduli.join(", "));
            println!("isotropic: {}", if check_isotropic_uniqueness(&a, *tol) { "yes" } else { "no" });
            match (v.lossless, v.reason) {
                (true, _) => Ok(()),
                (false, r) => Err(Failure::Validation(r.unwrap_or_else(|| "matrix is not lossless".into()))),
            }
        }
        MatrixCommand::Nearest { input, target, out } => {
            let d = read_matrix_csv(input)?;
            let m = match target {
                Target::Orthogonal => {
                    let q = nearest_orthogonal(&d)?.into_entries();
                    eprintln!("distance {:.6}", (&q - &d).norm());
                    q
                }
                Target::Householder => {
                    let fit = nearest_householder(&d)?;
                    eprintln!("distance {:.6}", householder_cost(&fit.vector, &d).sqrt());
                    if fit.degenerate {
                        eprintln!("warning: the nearest Householder matrix is not unique");
                    }
                    fit.matrix.into_entries()
                }
            };
            emit(&m, out.as_ref())
        }
    }
}
