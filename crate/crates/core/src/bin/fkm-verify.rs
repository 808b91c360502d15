use std::process::ExitCode;
use std::time::Instant;

use fkm_core::report::{
    dump_grid, failing_checks, parse_cli, run_suite, OutputFormat, EXIT_NUMERICAL, EXIT_USAGE,
    SEED_ENV,
};

fn main() -> ExitCode {
    let opts = match parse_cli(std::env::args_os(), std::env::var(SEED_ENV).ok()) {
        Ok(o) => o,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };

    if let Some(path) = &opts.dump_matrices {
        let written = dump_grid(&opts.config.configurations)
            .map_err(|e| e.to_string())
            .and_then(|text| std::fs::write(path, text).map_err(|e| e.to_string()));
        if let Err(e) = written {
            eprintln!("error: cannot write matrix dump to {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }

    let start = Instant::now();
    let mut report = run_suite(&opts.config);
    let elapsed = start.elapsed();
    if opts.timing {
        report.wall_time_ms = Some(elapsed.as_millis() as u64);
    }

    let rendered = match opts.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Text => report.to_text(),
    };
    match &opts.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("error: cannot write report to {}: {e}", path.display());
                return ExitCode::from(EXIT_NUMERICAL as u8);
            }
        }
        None => print!("{rendered}"),
    }

    let failing = failing_checks(&report);
    eprintln!(
        "fkm-verify: {} configuration(s), overall {} in {:.2}s",
        report.configurations.len(),
        if report.overall_pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for (name, count) in &failing {
        eprintln!("  failing: {name} ({count} configuration(s))");
    }
    ExitCode::from(report.exit_code() as u8)
}
