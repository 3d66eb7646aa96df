use rule_status::cli;

fn main() {
    std::process::exit(cli::run());
}
