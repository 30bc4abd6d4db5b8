use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    // clap's own error exit code (2) would collide with the divergence
    // code, so parse failures map to the config-error code instead;
    // --help/--version stay successful.
    let cli = match fracsync::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => fracsync::EXIT_OK,
                _ => fracsync::EXIT_CONFIG,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    std::process::exit(fracsync::run(cli));
}
