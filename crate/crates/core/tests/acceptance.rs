//! Acceptance criteria, one PASS/FAIL line per checked quantity.
//!
//! Run with `cargo test --release -p holoww-core --test acceptance`.

use holoww::verify::{run_suite, Suite};
use std::process::ExitCode;

const SEED: u64 = 20_261_016;

fn criteria(s: Suite) -> &'static str {
    match s {
        Suite::Dispersion => "1 dispersion",
        Suite::Conservation => "2-4 conservation, density equivalence, local balance",
        Suite::Qm => "5 Qm dual path",
        Suite::Kernel => "6 kernel",
        Suite::Virial => "7 virial",
        Suite::Identities => "8 identity verifiers",
        Suite::LinearMorawetz => "9 linear Morawetz identities",
        Suite::Operators => "10 operator properties",
    }
}

fn main() -> ExitCode {
    let mut failed = 0usize;
    for suite in Suite::ALL {
        println!("[criterion {}]", criteria(suite));
        match run_suite(suite, SEED) {
            Ok(report) => {
                for v in &report.verdicts {
                    println!("  {v}");
                    failed += usize::from(!v.pass);
                }
                for n in &report.notes {
                    println!("  note: {n}");
                }
                println!("  ({:.1} s)", report.seconds);
            }
            Err(e) => {
                println!("  FAIL {}: {e}", suite.tag());
                failed += 1;
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} check(s) failed");
        ExitCode::FAILURE
    }
}
