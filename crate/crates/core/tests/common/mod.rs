#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use csmrf::cli::{self, VerifyFlags};
use csmrf::format::write_distribution;
use csmrf::independence::DEFAULT_TOL;
use csmrf::testkit;
use csmrf::{Context, JointTable};

pub const GOLDEN_FIXTURES: [&str; 3] = ["d2", "xor", "chain"];
pub const GOLDEN_COMMANDS: [&str; 4] = ["csis", "graph", "verify", "report"];

pub fn tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn fixture_path(name: &str) -> PathBuf {
    tests_dir().join("fixtures").join(format!("{name}.csd"))
}

pub fn golden_path(fixture: &str, command: &str) -> PathBuf {
    tests_dir()
        .join("golden")
        .join(format!("{fixture}.{command}.txt"))
}

pub fn fixture_text(name: &str) -> String {
    let p = testkit::fixture(name).expect("known fixture");
    write_distribution(&p, &[("description", name)])
}

/// Output of a CLI command on a checked-in fixture file.
pub fn run_command(fixture: &str, command: &str) -> String {
    let path = fixture_path(fixture);
    let out = match command {
        "csis" => cli::cmd_csis(&path, None, DEFAULT_TOL),
        "graph" => cli::cmd_graph(&path, None, DEFAULT_TOL),
        "verify" => cli::cmd_verify(&path, VerifyFlags::default()),
        "report" => cli::cmd_report(&path, VerifyFlags::default()),
        other => panic!("unknown command {other}"),
    };
    out.unwrap_or_else(|e| panic!("{command} on {fixture}: {e}"))
        .stdout
}

/// The CSI listing as derived by the brute-force oracle.
pub fn oracle_csis(p: &JointTable) -> String {
    let ic = testkit::oracle_csi_set(p, DEFAULT_TOL);
    let mut out = String::new();
    for (t, holds) in ic.iter() {
        if holds {
            out.push_str(&t.render(p.schema()));
            out.push('\n');
        }
    }
    out
}

/// The unconditioned pairwise graph, straight from the oracle: `a` and `b`
/// are adjacent unless they are independent in every full context of the
/// remaining variables.
pub fn oracle_graph(p: &JointTable) -> String {
    let schema = p.schema();
    let ic = testkit::oracle_csi_set(p, DEFAULT_TOL);
    let n = schema.len();
    let adjacent = |a: usize, b: usize| {
        let (lo, hi) = (a.min(b), a.max(b));
        let rest = schema.all().without(lo).without(hi);
        !schema.contexts(rest).into_iter().all(|ctx: Context| {
            let t = csmrf::independence::Triplet::new(lo, hi, csmrf::VarSet::EMPTY, ctx).unwrap();
            ic.holds(&t)
        })
    };
    let mut out = String::from("# context {}\n");
    for a in 0..n {
        out.push_str(schema.name(a));
        out.push(':');
        for b in (0..n).filter(|&b| b != a && adjacent(a, b)) {
            out.push(' ');
            out.push_str(schema.name(b));
        }
        out.push('\n');
    }
    out
}

/// The expected golden content: oracle renderings where an oracle exists,
/// otherwise the pipeline output.
pub fn expected_golden(fixture: &str, command: &str) -> String {
    let p = testkit::fixture(fixture).expect("known fixture");
    match command {
        "csis" => oracle_csis(&p),
        "graph" => oracle_graph(&p),
        _ => run_command(fixture, command),
    }
}

pub fn read(path: &PathBuf) -> Option<String> {
    fs::read_to_string(path).ok()
}

pub fn update_requested() -> bool {
    std::env::var_os("UPDATE_GOLDENS").is_some_and(|v| v == "1")
}

/// Rewrite `path` only when its content changes, so concurrent readers never
/// see a truncated file.
pub fn write_if_changed(path: &PathBuf, text: &str) {
    if read(path).as_deref() != Some(text) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, text).unwrap();
    }
}
