use std::path::PathBuf;

use proxnet_cli::{main_with, OUT_ENV};

fn main() {
    let env_out = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    std::process::exit(main_with(std::env::args_os(), env_out));
}
