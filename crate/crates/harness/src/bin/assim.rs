fn main() {
    std::process::exit(assim_harness::cli_main(std::env::args_os()));
}
