use std::process::ExitCode;

fn main() -> ExitCode {
    let code = kober::run(
        std::env::args_os(),
        std::env::var("KOBER_SEED").ok(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
