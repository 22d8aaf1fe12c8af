use std::process::ExitCode;

use jou_core::acceptance::{run, Config};

fn main() -> ExitCode {
    let cfg = Config { filter: std::env::var("JOU_ACCEPT_FILTER").ok(), ..Config::default() };
    let reports = run(&cfg);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
