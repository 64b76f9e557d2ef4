//! Drive the command-line pipeline from an in-memory problem file.

use nilforms::cli::{execute, Overrides};
use nilforms::problem::{parse, Kind};
use nilforms::report::to_json;

const PROBLEM: &str = r#"{
  "schema": "nilforms/1",
  "kind": "systole",
  "lattices": [
    {"id": "hexagonal", "basis": [[1.0, 0.0], [0.5, 0.8660254037844386]], "expect_equality": true}
  ]
}"#;

fn main() -> nilforms::Result<()> {
    let file = parse(PROBLEM)?;
    let outcome = execute(Kind::Systole, &file, Overrides::default())?;
    print!("{}", to_json(&outcome.report)?);
    Ok(())
}
