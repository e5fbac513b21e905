use std::path::PathBuf;

fn main() {
    let env_config = std::env::var_os(padic_opalg::config::CONFIG_ENV).map(PathBuf::from);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = padic_opalg::run(std::env::args_os(), env_config, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
