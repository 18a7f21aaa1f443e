use weilforge::cli;

fn main() {
    std::process::exit(cli::run());
}
