use std::process::ExitCode;

fn main() -> ExitCode {
    let verdicts = mllu_validation::run_all(&mut |v| println!("{v}"));
    let failed: Vec<u32> = verdicts
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.id)
        .collect();
    println!(
        "acceptance: {}/{} criteria pass{}",
        verdicts.len() - failed.len(),
        verdicts.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(", failing {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
