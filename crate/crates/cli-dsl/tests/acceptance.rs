use std::process::ExitCode;

/// Prints one line per criterion. Set `QUADSIM_STRICT=1` to turn any failing criterion into a failing exit status.
fn main() -> ExitCode {
    let mut failed = vec![];
    for id in 1..=10 {
        let r = cli_dsl::criterion(id);
        println!("{r}");
        if !r.pass {
            failed.push(id.to_string());
        }
    }
    if failed.is_empty() {
        println!("acceptance: 10 of 10 criteria pass");
        return ExitCode::SUCCESS;
    }
    println!("acceptance: {} of 10 criteria pass, failing: {}", 10 - failed.len(), failed.join(", "));
    if std::env::var("QUADSIM_STRICT").is_ok_and(|v| v == "1") {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
