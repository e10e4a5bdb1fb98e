//! `cwikel-lab`: run experiment suites and emit reports.

fn main() -> std::process::ExitCode {
    cwikel_lab::cli::main_with(std::env::args_os())
}
