//! Runs CLI subcommands in-process and prints where the reports went.

fn main() {
    let dir = std::env::temp_dir().join("hankel-up-example");
    let out = dir.to_str().expect("utf-8 temp dir");
    for args in [
        &["transform", "--alpha", "0.5", "--f", "gaussian"][..],
        &["annihilate", "--S", "0,0.5", "--Sigma", "0,0.5", "--R", "4", "--n", "256", "--instances", "20"],
        &["thin-check", "--kmax", "1000"],
    ] {
        let argv = std::iter::once("hankel-up").chain(args.iter().copied()).chain(["--out", out]);
        let code = hankel_up::cli::main_with(argv);
        println!("exit status {code}");
    }
}
