use chronon_core::identities::run_identity_checks;
use chronon_core::series::MAX_CERTIFIED_M;

use crate::output::OutputSet;
use crate::{CliResult, Failure, IdentityArgs};

pub fn execute(args: &IdentityArgs) -> CliResult<()> {
    if args.max_m == 0 || args.ntrunc == 0 {
        return Err(Failure::Usage("--max-m and --ntrunc must be at least 1".into()));
    }
    if args.max_m > MAX_CERTIFIED_M {
        log::warn!("--max-m {} is beyond the certified range (m <= {MAX_CERTIFIED_M})", args.max_m);
    }
    let report = run_identity_checks(args.max_m, args.ntrunc).map_err(|e| Failure::Numeric(e.to_string()))?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(dir) = &args.out {
        let mut out = OutputSet::new(dir);
        out.add("identities.json", format!("{text}\n").into_bytes());
        out.commit()?;
    }
    println!("{text}");
    if report.all_passed {
        return Ok(());
    }
    for row in report.rows.iter().filter(|r| !r.passed) {
        eprintln!(
            "FAIL {}: value {:e}, expected {:e}, error {:e} > tolerance {:e}",
            row.name, row.value, row.expected, row.error, row.tolerance
        );
    }
    Err(Failure::Numeric(format!("{} identity rows failed", report.failing.len())))
}
