use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = metzler_sign::cli::run(&args, &mut lock);
    ExitCode::from(code.clamp(0, 255) as u8)
}
