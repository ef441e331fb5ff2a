//! Driving an experiment from a `key=value` configuration and reading its CSV back.

use shearlet_transport::cli::{parse_config, run_command, Table};

fn main() -> shearlet_transport::Result<()> {
    let text = "\
# bisection benchmark on a short scale range
command=bisect-bench
j_min=6
j_max=10
";
    let cfg = parse_config(text)?;
    let (table, _) = run_command(&cfg)?;
    let mut csv = Vec::new();
    table.write(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let back = Table::read(&csv[..])?;
    println!("read back {} rows; first rate is empty: {}", back.rows.len(), back.rows[0][3].is_nan());

    match parse_config("command=solve\ntheta=1.5") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("theta outside (0, 1)"),
    }
    Ok(())
}
