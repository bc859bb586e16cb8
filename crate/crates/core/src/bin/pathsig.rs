use std::process::ExitCode;

use pathsig::cli::{run, Streams};

fn main() -> ExitCode {
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let code = run(std::env::args_os(), &mut Streams { out: &mut out, err: &mut err });
    ExitCode::from(code as u8)
}
