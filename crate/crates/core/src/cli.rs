//! The `ckp` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cuts::{for_each_admissible, Family, GeneratedCut};
use crate::error::{Error, Result};
use crate::format::{
    parse_inequality, parse_instance, parse_point, point_entries, write_inequality, write_instance, write_point,
};
use crate::model::{normalize, validate_assumptions, Instance, LinearInequality};
use crate::oracle::{
    check_validity, enumerate_candidate_vertices, face_dimension, maximize_over_s, Validity, DEFAULT_ENUM_LIMIT,
};
use crate::separation::{build_partition_reduction, separate_exact, separate_greedy, PartitionInput};
use crate::solver::{branch_and_cut, SeparationMode, SolveConfig, SolveStatus};

/// Environment variable overriding the default enumeration limit.
pub const ENUM_LIMIT_VAR: &str = "CKP_ENUM_LIMIT";

#[derive(Debug, Parser)]
#[command(
    name = "ckp",
    version,
    about = "Exact cuts, oracles and branch-and-cut for the complementarity knapsack problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct LimitArg {
    /// Maximum number of support patterns to enumerate [default: $CKP_ENUM_LIMIT or 1000000]
    #[arg(long, value_name = "N")]
    enumerate_limit: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the standing assumptions and, when they fail, the trivial optimum
    Check { instance: PathBuf },
    /// Maximize over the feasible set by brute force
    Oracle {
        instance: PathBuf,
        /// Inequality file whose left-hand side is the objective (default: profits)
        #[arg(long, value_name = "FILE")]
        objective: Option<PathBuf>,
        /// Also list every candidate vertex
        #[arg(long)]
        vertices: bool,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Print every member of a cut family, in input slot order
    Cuts {
        instance: PathBuf,
        /// pack1, pack2, pack3, lcover1, lcover2 or all
        #[arg(long, value_name = "FAMILY")]
        family: String,
        /// Compute the face dimension of each cut instead of reporting `unknown`
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Check validity and facet status of an inequality
    Verify {
        instance: PathBuf,
        inequality: PathBuf,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Look for a violated cut at a point
    Separate {
        instance: PathBuf,
        point: PathBuf,
        /// A family token, a comma-separated list, or all
        #[arg(long, value_name = "FAMILY", default_value = "all")]
        family: String,
        /// Search every admissible member
        #[arg(long, conflicts_with = "greedy", required_unless_present = "greedy")]
        exact: bool,
        /// Greedy pack heuristic
        #[arg(long)]
        greedy: bool,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Solve to optimality by branch-and-cut
    Solve {
        instance: PathBuf,
        /// Comma-separated families to separate, or none
        #[arg(long, value_name = "LIST", default_value = "pack1,pack2,pack3,lcover1,lcover2")]
        cuts: String,
        /// Fall back to exact separation when the greedy finds nothing
        #[arg(long)]
        exact_sep: bool,
        #[arg(long, value_name = "N", default_value_t = 10)]
        max_cuts_per_node: usize,
        #[arg(long, value_name = "N", default_value_t = 100_000)]
        node_limit: u64,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Write the separation instance built from a partition input
    ReducePartition {
        /// Comma-separated positive integers summing to 2 * beta
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<u64>,
        #[arg(long)]
        beta: u64,
        /// Output prefix; writes <PREFIX>.ckp and <PREFIX>.point
        #[arg(long, value_name = "PREFIX")]
        out: PathBuf,
    },
}

/// Exit status for a library error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Parse { .. }
        | Error::Validation(_)
        | Error::Usage(_)
        | Error::Io(_)
        | Error::DimensionMismatch { .. }
        | Error::VarOutOfRange { .. } => 1,
        Error::Precondition(_) | Error::NotValid { .. } | Error::NoPoints => 2,
        Error::ResourceLimit { .. } => 3,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                1
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?)
}

fn enum_limit(arg: &LimitArg) -> Result<u64> {
    if let Some(n) = arg.enumerate_limit {
        return Ok(n);
    }
    match std::env::var(ENUM_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{ENUM_LIMIT_VAR} must be a non-negative integer, found `{v}`"))),
        Err(_) => Ok(DEFAULT_ENUM_LIMIT),
    }
}

fn parse_families(list: &str) -> Result<Vec<Family>> {
    match list {
        "all" => Ok(Family::ALL.to_vec()),
        "none" => Ok(Vec::new()),
        _ => {
            let mut out = Vec::new();
            for token in list.split(',') {
                let f: Family = token.trim().parse().map_err(Error::Usage)?;
                if !out.contains(&f) {
                    out.push(f);
                }
            }
            Ok(out)
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_cut(out: &mut String, cut: &GeneratedCut, facet: &str) {
    writeln!(out, "# {} {}", cut.family, cut.provenance).unwrap();
    out.push_str(&write_inequality(&cut.inequality));
    writeln!(out, "# facet: {facet}").unwrap();
}

fn execute(command: Command) -> Result<(String, i32)> {
    let mut out = String::new();
    let mut code = 0;
    match command {
        Command::Check { instance } => {
            let inst = load_instance(&instance)?;
            let norm = normalize(&inst);
            let report = validate_assumptions(&norm.instance);
            writeln!(out, "groups: {}", inst.num_groups()).unwrap();
            writeln!(out, "dimension: {}", inst.dimension()).unwrap();
            writeln!(out, "normalized: {}", yes_no(inst.is_normalized())).unwrap();
            let m0: Vec<String> = report.m0_set.iter().map(|g| g.to_string()).collect();
            writeln!(out, "singleton-groups: {}", m0.join(" ")).unwrap();
            writeln!(out, "assumption-1: {}", yes_no(report.assumption1_holds)).unwrap();
            writeln!(out, "assumption-2: {}", yes_no(report.assumption2_holds)).unwrap();
            if let Some((value, point)) = &report.trivial_optimum {
                writeln!(out, "trivial-optimum: {value}").unwrap();
                out.push_str(&point_entries(&norm.point_to_original(point)));
            }
        }
        Command::Oracle {
            instance,
            objective,
            vertices,
            limit,
        } => {
            let inst = load_instance(&instance)?;
            let limit = enum_limit(&limit)?;
            let objective = match objective {
                Some(path) => parse_inequality(&read(&path)?)?.coeffs().clone(),
                None => inst.profit_objective(),
            };
            let (value, point) = maximize_over_s(&inst, &objective, limit)?;
            writeln!(out, "value: {value}").unwrap();
            out.push_str(&point_entries(&point));
            if vertices {
                let set = enumerate_candidate_vertices(&inst, limit)?;
                writeln!(out, "vertices: {}", set.len()).unwrap();
                for p in set.points() {
                    out.push('\n');
                    out.push_str(&write_point(p));
                }
            }
        }
        Command::Cuts {
            instance,
            family,
            verify,
            limit,
        } => {
            let inst = load_instance(&instance)?;
            let limit = enum_limit(&limit)?;
            let families = parse_families(&family)?;
            let norm = normalize(&inst);
            if !norm.is_identity() {
                out.push_str("# input is not normalized; cuts are listed in input slots\n");
            }
            let mut cuts = Vec::new();
            for fam in Family::ALL.into_iter().filter(|f| families.contains(f)) {
                for_each_admissible(&norm.instance, &[fam], limit, |spec| {
                    cuts.push(spec.materialize(&norm.instance));
                })?;
            }
            let mut seen = std::collections::BTreeSet::new();
            let mut first = true;
            for cut in cuts {
                let facet = if verify {
                    yes_no(face_dimension(&norm.instance, &cut.inequality, limit)?.is_facet())
                } else if cut.facet_guaranteed {
                    "yes"
                } else {
                    "unknown"
                };
                let cut = cut.to_original(&norm);
                if !seen.insert((cut.family, write_inequality(&cut.inequality))) {
                    continue;
                }
                if !first {
                    out.push('\n');
                }
                first = false;
                write_cut(&mut out, &cut, facet);
            }
        }
        Command::Verify {
            instance,
            inequality,
            limit,
        } => {
            let inst = load_instance(&instance)?;
            let limit = enum_limit(&limit)?;
            let ineq: LinearInequality = parse_inequality(&read(&inequality)?)?;
            for v in ineq.coeffs().keys() {
                inst.check_var(*v)?;
            }
            match check_validity(&inst, &ineq, limit)? {
                Validity::Violated(witness) => {
                    out.push_str("valid: no\n");
                    out.push_str(&point_entries(&witness));
                }
                Validity::Valid => {
                    let face = face_dimension(&inst, &ineq, limit)?;
                    out.push_str("valid: yes\n");
                    writeln!(out, "face-dim: {}", face.dimension).unwrap();
                    writeln!(out, "facet: {}", yes_no(face.is_facet())).unwrap();
                }
            }
        }
        Command::Separate {
            instance,
            point,
            family,
            exact,
            greedy: _,
            limit,
        } => {
            let inst = load_instance(&instance)?;
            let limit = enum_limit(&limit)?;
            let families = parse_families(&family)?;
            let point = parse_point(&read(&point)?)?;
            let norm = normalize(&inst);
            let x = norm.point_to_normalized(&inst, &point)?;
            let result = if exact {
                separate_exact(&norm.instance, &x, &families, limit)?
            } else {
                separate_greedy(&norm.instance, &x, &families)?
            };
            match result.found() {
                None => out.push_str("violated: no\n"),
                Some(found) => {
                    out.push_str("violated: yes\n");
                    writeln!(out, "violation: {}", found.violation).unwrap();
                    let cut = found.cut.to_original(&norm);
                    let facet = if cut.facet_guaranteed { "yes" } else { "unknown" };
                    write_cut(&mut out, &cut, facet);
                }
            }
            writeln!(out, "candidates: {}", result.stats.candidates).unwrap();
        }
        Command::Solve {
            instance,
            cuts,
            exact_sep,
            max_cuts_per_node,
            node_limit,
            limit,
        } => {
            let inst = load_instance(&instance)?;
            let config = SolveConfig {
                families: parse_families(&cuts)?,
                max_cuts_per_node,
                node_limit,
                separation: if exact_sep {
                    SeparationMode::GreedyWithExactFallback
                } else {
                    SeparationMode::Greedy
                },
                enum_limit: enum_limit(&limit)?,
            };
            let report = branch_and_cut(&inst, &config)?;
            let status = match report.status {
                SolveStatus::Optimal => "optimal",
                SolveStatus::NodeLimit => {
                    code = 3;
                    "node-limit"
                }
            };
            writeln!(out, "status: {status}").unwrap();
            writeln!(out, "value: {}", report.value).unwrap();
            writeln!(out, "best-bound: {}", report.best_bound).unwrap();
            writeln!(out, "nodes: {}", report.nodes).unwrap();
            writeln!(out, "lp-pivots: {}", report.lp_pivots).unwrap();
            for fam in Family::ALL {
                let n = report.cuts_per_family.get(&fam).copied().unwrap_or(0);
                writeln!(out, "cuts {}: {n}", fam.token()).unwrap();
            }
            out.push_str(&point_entries(&report.point));
        }
        Command::ReducePartition {
            alphas,
            beta,
            out: prefix,
        } => {
            let input = PartitionInput::new(alphas, beta)?;
            let (inst, point) = build_partition_reduction(&input)?;
            let with_ext = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            let (inst_path, point_path) = (with_ext(".ckp"), with_ext(".point"));
            std::fs::write(&inst_path, write_instance(&inst))?;
            std::fs::write(&point_path, write_point(&point))?;
            writeln!(out, "wrote {}", inst_path.display()).unwrap();
            writeln!(out, "wrote {}", point_path.display()).unwrap();
        }
    }
    Ok((out, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families(s: &str) -> Vec<Family> {
        parse_families(s).unwrap()
    }

    #[test]
    fn family_lists() {
        assert_eq!(families("all"), Family::ALL.to_vec());
        assert!(families("none").is_empty());
        assert_eq!(
            families("pack2, lcover1,pack2"),
            vec![Family::Pack2, Family::LiftedCover1]
        );
        assert!(parse_families("pack4").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["ckp", "frobnicate"], &mut out, &mut err), 1);
        assert_eq!(run(["ckp", "check"], &mut out, &mut err), 1);
        assert_eq!(
            run(["ckp", "separate", "a", "b", "--exact", "--greedy"], &mut out, &mut err),
            1
        );
        out.clear();
        assert_eq!(run(["ckp", "--help"], &mut out, &mut err), 0);
        assert!(String::from_utf8(out).unwrap().contains("reduce-partition"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::parse(3, "x")), 1);
        assert_eq!(exit_code(&Error::precondition("x")), 2);
        assert_eq!(exit_code(&Error::ResourceLimit { estimated: 9, limit: 1 }), 3);
    }
}
