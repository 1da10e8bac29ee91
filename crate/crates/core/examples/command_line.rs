// Driving the command-line front end from code, writing into a temporary directory.

use std::process::ExitCode;

use zero_attractor::cli;

pub fn run_example() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join(format!("zero-attractor-example-{}", std::process::id()));
    let dir_arg = dir.to_string_lossy().into_owned();
    let runs: [&[&str]; 3] = [
        &["gen-poly", "--family", "residue", "--a", "1", "--p", "3", "--max-n", "20", "--format", "csv"],
        &["roots", "--family", "odd", "--n", "30", "--format", "json"],
        &["attractor", "--family", "residue", "--a", "1", "--p", "3", "--format", "csv"],
    ];
    for args in runs {
        let mut full = vec!["zero-attractor"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out-dir", &dir_arg]);
        let code = cli::run(full);
        anyhow::ensure!(code == ExitCode::SUCCESS, "{} failed", args[0]);
    }
    let mut names: Vec<String> =
        std::fs::read_dir(&dir)?.map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned())).collect::<Result<_, _>>()?;
    names.sort();
    println!("wrote {}", names.join(", "));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
