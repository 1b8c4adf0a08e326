use std::io::Write;

fn main() {
    let budget = std::env::var(cohtt::cli::BUDGET_VAR).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = cohtt::cli::run(std::env::args_os(), budget.as_deref(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
