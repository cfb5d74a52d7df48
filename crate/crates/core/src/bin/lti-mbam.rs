fn main() {
    let code = lti_mbam::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
