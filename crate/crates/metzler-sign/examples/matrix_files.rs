//! The text format and report pipeline that the `metzler-sign` binary
//! exposes, driven programmatically: parse named matrices, run a command,
//! and collect the byte-stable JSON report.
//!
//! ```bash
//! cargo run -p metzler-sign --example matrix_files
//! ```

use metzler_sign::cli::{self, format_matrix_file, parse_matrix_file};
use metzler_sign::signs::MixedMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "# sign entries, indefinite marks, and real literals mix freely\n\
                @A\n- + ?\n0 - 2.5\n0 0 -\n\n@B\n1 -1\n-0 3e-2\n";
    let matrices = parse_matrix_file(text)?;
    for (name, m) in &matrices {
        println!("parsed {name}: {}x{} ({})", m.rows(), m.cols(), if m.is_pure_sign() {
            "sign"
        } else if m.is_pure_real() {
            "real"
        } else {
            "mixed"
        });
    }

    // formatting inverts parsing exactly
    let round_trip = parse_matrix_file(&format_matrix_file(&matrices))?;
    println!("round trip preserved everything: {}\n", round_trip == matrices);

    // drive the subcommand dispatcher directly; stdout goes to any writer
    let dir = std::env::temp_dir().join("metzler_sign_example");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("exchange.txt");
    std::fs::write(&input, "@M1\n- +\n+ -\n")?;
    let args: Vec<String> = ["check", "--input", input.to_str().unwrap(), "--json"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut report = Vec::new();
    let exit = cli::run(&args, &mut report);
    println!("exit code {exit}; JSON report:\n{}", String::from_utf8(report)?);

    // a sampled member can be written back out in the same format
    let pattern = matrices[0].1.to_qual();
    let member = { // the indefinite slot must be resolved before sampling
        let mut p = pattern.clone();
        p.set(0, 2, metzler_sign::SignValue::Zero);
        p.sample(42, 1.0)?
    };
    let named = vec![("member".to_string(), MixedMatrix::from_real(&member))];
    println!("sampled member in file form:\n{}", format_matrix_file(&named));
    Ok(())
}
