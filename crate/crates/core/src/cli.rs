//! Command implementations behind the `csmrf` binary. Each command returns
//! its output and exit status instead of printing, so it can be tested
//! in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::domain::{DomainSchema, VarSet};
use crate::error::{Error, Result};
use crate::factorizer::{
    factorize_csi, format_residual, sparsity_report, verify_cshc, VerifyOptions,
};
use crate::format::{write_csi_listing, write_features, DistributionFile};
use crate::graph::pairwise_graph;
use crate::independence::{build_csi_model, reduce, DEFAULT_TOL};
use crate::loglinear::{fit_restricted, LogLinearModel, MatchMode};
use crate::table::JointTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }
}

pub fn load(path: &Path) -> Result<DistributionFile> {
    DistributionFile::parse(&fs::read_to_string(path)?)
}

fn load_positive(path: &Path) -> Result<JointTable> {
    let p = load(path)?.to_table()?;
    if !p.is_positive() {
        return Err(Error::NotPositive);
    }
    Ok(p)
}

/// `a,c` or `a c`; `-` or an empty string is the empty set.
pub fn parse_var_list(schema: &DomainSchema, input: &str) -> Result<VarSet> {
    let names: Vec<&str> = input
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty() && *s != "-")
        .collect();
    schema.set_of(names)
}

fn context_vars(schema: &DomainSchema, flag: Option<&str>) -> Result<VarSet> {
    match flag {
        Some(s) => parse_var_list(schema, s),
        None => Ok(schema.all()),
    }
}

pub fn cmd_validate(path: &Path) -> Result<Outcome> {
    let file = load(path)?;
    let schema = &file.schema;
    let mut out = String::new();
    let vars: Vec<String> = schema
        .variables()
        .iter()
        .map(|v| format!("{}({})", v.name, v.cardinality))
        .collect();
    writeln!(out, "variables: {}", vars.join(" ")).unwrap();
    writeln!(out, "states: {}", schema.states()).unwrap();
    for (k, v) in &file.meta {
        writeln!(out, "meta {k}: {v}").unwrap();
    }
    let total = file.total();
    let defect = (total - 1.0).abs();
    let normalized = defect <= DEFAULT_TOL;
    writeln!(out, "sum: {total} (defect {defect:.3e})").unwrap();
    // An all-zero table is an input error.
    file.to_table()?;
    let zeros: Vec<usize> = (0..file.values.len())
        .filter(|&i| file.values[i] == 0.0)
        .collect();
    writeln!(
        out,
        "positive: {}",
        if zeros.is_empty() { "yes" } else { "no" }
    )
    .unwrap();
    writeln!(
        out,
        "{}, {}, {} states",
        if zeros.is_empty() {
            "positive"
        } else {
            "not positive"
        },
        if normalized {
            "normalized"
        } else {
            "unnormalized"
        },
        schema.states()
    )
    .unwrap();
    let mut stderr = String::new();
    if let Some(&i) = zeros.first() {
        let x = schema.assignment(i).as_context();
        writeln!(
            stderr,
            "warning: {} zero entries (first at {}); factorization preconditions unmet",
            zeros.len(),
            schema.render_context(&x)
        )
        .unwrap();
    }
    Ok(Outcome {
        stdout: out,
        stderr,
        code: 0,
    })
}

pub fn cmd_csis(path: &Path, context_vars_flag: Option<&str>, tol: f64) -> Result<Outcome> {
    let p = load_positive(path)?;
    let within = context_vars(p.schema(), context_vars_flag)?;
    let ic = build_csi_model(&p, tol)?;
    Ok(Outcome::ok(write_csi_listing(&ic, within)))
}

pub fn cmd_graph(path: &Path, context: Option<&str>, tol: f64) -> Result<Outcome> {
    let p = load_positive(path)?;
    let ctx = p.schema().parse_context(context.unwrap_or(""))?;
    let ic = build_csi_model(&p, tol)?;
    let g = pairwise_graph(&reduce(&ic, &ctx)?);
    let mut out = format!("# context {{{}}}\n", p.schema().render_context(&ctx));
    out.push_str(&g.render_adjacency());
    Ok(Outcome::ok(out))
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyFlags {
    pub tol: f64,
    pub residual_threshold: f64,
    pub strict_matching: bool,
    pub json: bool,
}

impl Default for VerifyFlags {
    fn default() -> Self {
        let d = VerifyOptions::default();
        VerifyFlags {
            tol: d.tol,
            residual_threshold: d.residual_threshold,
            strict_matching: false,
            json: false,
        }
    }
}

impl VerifyFlags {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            tol: self.tol,
            residual_threshold: self.residual_threshold,
            mode: if self.strict_matching {
                MatchMode::Strict
            } else {
                MatchMode::Consistent
            },
        }
    }
}

pub fn cmd_verify(path: &Path, flags: VerifyFlags) -> Result<Outcome> {
    let p = load(path)?.to_table()?;
    if !p.is_positive() {
        return Err(Error::PreconditionFailed {
            precondition: "positivity".into(),
            witness: "distribution has a zero entry".into(),
        });
    }
    let ic = build_csi_model(&p, flags.tol)?;
    let report = verify_cshc(&p, &ic, flags.options())?;
    let stdout = if flags.json {
        let mut s = serde_json::to_string_pretty(&report.to_json()).expect("serializable report");
        s.push('\n');
        s
    } else {
        report.render_text()
    };
    Ok(Outcome {
        stdout,
        stderr: String::new(),
        code: if report.theorem_verified { 0 } else { 1 },
    })
}

/// Weights this close to zero are written as zero.
const WEIGHT_SNAP: f64 = 1e-12;

pub fn cmd_factorize(
    path: &Path,
    context_vars_flag: Option<&str>,
    tol: f64,
    out: Option<&Path>,
) -> Result<Outcome> {
    let p = load_positive(path)?;
    let within = context_vars(p.schema(), context_vars_flag)?;
    let family: Vec<VarSet> = within.subsets().collect();
    let ic = build_csi_model(&p, tol)?;
    let features = factorize_csi(&p, &ic, &family, MatchMode::Consistent)?;
    let fit = fit_restricted(&p, &features)?;
    let weights = fit
        .model
        .weights()
        .iter()
        .map(|&w| if w.abs() < WEIGHT_SNAP { 0.0 } else { w })
        .collect();
    let model = LogLinearModel::new(p.schema_arc().clone(), features, weights)?;
    let residual = p
        .schema()
        .assignments()
        .zip(p.probs())
        .map(|(x, q)| (q.ln() - model.log_prob(&x)).abs())
        .fold(0.0, f64::max);
    let mut text = write_features(&model);
    writeln!(text, "# residual {}", format_residual(residual)).unwrap();
    match out {
        Some(dest) => {
            fs::write(dest, &text)?;
            Ok(Outcome::ok(format!(
                "wrote {} features to {} (residual {})\n",
                model.features().len(),
                dest.display(),
                format_residual(residual)
            )))
        }
        None => Ok(Outcome::ok(text)),
    }
}

pub fn cmd_report(path: &Path, flags: VerifyFlags) -> Result<Outcome> {
    let p = load_positive(path)?;
    let ic = build_csi_model(&p, flags.tol)?;
    let report = sparsity_report(&p, &ic, flags.options())?;
    Ok(Outcome::ok(report.render_text()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{write_distribution, FeatureFile};
    use crate::testkit;
    use std::path::PathBuf;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    fn fixture_file(dir: &tempfile::TempDir, name: &str) -> PathBuf {
        let p = testkit::fixture(name).unwrap();
        write_tmp(dir, &format!("{name}.csd"), &write_distribution(&p, &[]))
    }

    #[test]
    fn validate_examples() {
        let dir = tempfile::tempdir().unwrap();
        let ok = write_tmp(
            &dir,
            "u.csd",
            "csmrf-distribution 1\nvar a 2\nvar b 2\ntable\n.25 .25 .25 .25\n",
        );
        let out = cmd_validate(&ok).unwrap();
        assert!(
            out.stdout.contains("positive, normalized, 4 states"),
            "{}",
            out.stdout
        );
        let short = write_tmp(
            &dir,
            "s.csd",
            "csmrf-distribution 1\nvar a 2\nvar b 2\ntable\n.25 .25 .25\n",
        );
        let err = cmd_validate(&short).unwrap_err();
        assert!(err
            .to_string()
            .contains("expected 4 table entries, found 3"));
        assert_eq!(err.exit_code(), 2);
        let zero = write_tmp(
            &dir,
            "z.csd",
            "csmrf-distribution 1\nvar a 2\nvar b 2\ntable\n1 0 1 1\n",
        );
        let out = cmd_validate(&zero).unwrap();
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("positive: no"));
        assert!(out.stderr.contains("preconditions unmet"));
    }

    #[test]
    fn csis_filtering() {
        let dir = tempfile::tempdir().unwrap();
        let d2 = fixture_file(&dir, "d2");
        let all = cmd_csis(&d2, None, DEFAULT_TOL).unwrap().stdout;
        assert!(all.contains("a b | {} | {c=0}"));
        assert!(!all.contains("a b | {} | {c=1}"));
        let only_c = cmd_csis(&d2, Some("c"), DEFAULT_TOL).unwrap().stdout;
        assert!(only_c
            .lines()
            .all(|l| !l.contains("a=") && !l.contains("b=")));
        let none = cmd_csis(&d2, Some("-"), DEFAULT_TOL).unwrap().stdout;
        assert!(none.lines().all(|l| l.ends_with("| {}")));
    }

    #[test]
    fn graph_contexts() {
        let dir = tempfile::tempdir().unwrap();
        let d2 = fixture_file(&dir, "d2");
        assert_eq!(
            cmd_graph(&d2, Some("c=0"), DEFAULT_TOL).unwrap().stdout,
            "# context {c=0}\na:\nb:\n"
        );
        assert_eq!(
            cmd_graph(&d2, Some("c=1"), DEFAULT_TOL).unwrap().stdout,
            "# context {c=1}\na: b\nb: a\n"
        );
        assert_eq!(
            cmd_graph(&d2, None, DEFAULT_TOL).unwrap().stdout,
            "# context {}\na: b c\nb: a c\nc: a b\n"
        );
        let err = cmd_graph(&d2, Some("z=1"), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::BadContext { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn verify_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["d2", "xor", "chain"] {
            let out = cmd_verify(&fixture_file(&dir, name), VerifyFlags::default()).unwrap();
            assert_eq!(out.code, 0, "{name}: {}", out.stdout);
        }
        let zero = write_tmp(
            &dir,
            "z.csd",
            "csmrf-distribution 1\nvar a 2\nvar b 2\ntable\n1 0 1 1\n",
        );
        let err = cmd_verify(&zero, VerifyFlags::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("positivity"));
        let json = cmd_verify(
            &fixture_file(&dir, "d2"),
            VerifyFlags {
                json: true,
                ..VerifyFlags::default()
            },
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
        assert_eq!(v["theorem_verified"], true);
    }

    #[test]
    fn factorize_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let d2 = fixture_file(&dir, "d2");
        let text = cmd_factorize(&d2, Some("c"), DEFAULT_TOL, None)
            .unwrap()
            .stdout;
        let file = FeatureFile::parse(&text).unwrap();
        let ab: Vec<String> = file
            .features
            .iter()
            .filter(|(f, _)| f.scope().contains(0) && f.scope().contains(1))
            .map(|(f, _)| f.render(&file.schema))
            .collect();
        assert!(!ab.is_empty());
        assert!(ab.iter().all(|f| f.ends_with("c=1")), "{ab:?}");

        let uniform = fixture_file(&dir, "uniform");
        let dest = dir.path().join("u.features");
        cmd_factorize(&uniform, None, DEFAULT_TOL, Some(&dest)).unwrap();
        let file = FeatureFile::parse(&fs::read_to_string(&dest).unwrap()).unwrap();
        assert!(file
            .features
            .iter()
            .all(|(f, w)| f.scope().len() == 1 && *w == 0.0));

        let chain = fixture_file(&dir, "chain");
        let file = FeatureFile::parse(
            &cmd_factorize(&chain, Some("-"), DEFAULT_TOL, None)
                .unwrap()
                .stdout,
        )
        .unwrap();
        let scopes: Vec<VarSet> = file
            .features
            .iter()
            .map(|(f, _)| f.scope())
            .filter(|s| s.len() > 1)
            .collect();
        assert!(scopes
            .iter()
            .all(|s| *s == VarSet::from_iter([0, 1]) || *s == VarSet::from_iter([1, 2])));
        assert!(!scopes.is_empty());
    }

    #[test]
    fn report_counts() {
        let dir = tempfile::tempdir().unwrap();
        let d2 = cmd_report(&fixture_file(&dir, "d2"), VerifyFlags::default())
            .unwrap()
            .stdout;
        assert!(d2.contains("ci-pruned             7"), "{d2}");
        assert!(d2.contains("csi-pruned            4"), "{d2}");
        let coins = cmd_report(&fixture_file(&dir, "coins"), VerifyFlags::default())
            .unwrap()
            .stdout;
        assert!(coins.contains("ci-pruned             3"));
        assert!(coins.contains("csi-pruned            3"));
        assert!(coins.contains("saturated             7"));
    }
}
