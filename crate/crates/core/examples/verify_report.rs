//! Builds the verification table and prints it as Markdown.
//!
//! ```bash
//! cargo run --release --example verify_report
//! ```

use qutrit_codec::report::{cmd_verify, render, Format, VerifyParams};

fn main() -> qutrit_codec::Result<()> {
    let params = VerifyParams {
        trials: 200_000,
        ..VerifyParams::default()
    };
    let doc = cmd_verify(&params)?;
    print!("{}", render(&doc, Format::Md));
    std::process::exit(doc.exit_code());
}
