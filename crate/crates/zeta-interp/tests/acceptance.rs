use std::process::ExitCode;
use zeta_interp::acceptance::run;

/// Rows that are reported but not asserted; see the decisions ledger.
const KNOWN_UNATTAINABLE: [usize; 1] = [12];

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=13 {
        let row = run(id, false);
        println!("{}", row.line());
        if !row.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all asserted rows pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing rows {failed:?}");
        ExitCode::FAILURE
    }
}
