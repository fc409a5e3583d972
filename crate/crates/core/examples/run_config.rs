//! Runs a sweep from an inline TOML config through the same path as the
//! binary, writing CSV files to a temporary directory.

use cavitylink::runner::{parse_config_str, run, Overrides, Scenario};

const CONFIG: &str = r#"
[system]
kappa1 = 1
kappa2 = 0.5

[sweep]
symbol = "kappa_m"
grid = "0:10:2.5"
phi = ["pi/2", "0.9pi"]
"#;

fn main() -> cavitylink::Result<()> {
    let out = std::env::temp_dir().join("cavitylink-run-config");
    let mut config = parse_config_str(CONFIG, Some(Scenario::Sweep))?;
    config.apply(&Overrides {
        out: Some(out),
        ..Overrides::default()
    });
    let outcome = run(&config)?;
    for file in &outcome.files {
        println!("{}", file.display());
    }
    for table in &outcome.tables {
        println!("{}: {} rows", table.stem, table.rows.len());
    }
    Ok(())
}
