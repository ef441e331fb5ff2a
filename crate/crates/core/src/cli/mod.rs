//! Run configuration, experiment drivers and CSV/JSON-lines output for the binary.
//!
//! A configuration is a list of `key=value` lines; command-line flags are applied
//! on top through the same setter, so both share one set of range checks.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::cartoon::{build_bisection_partition, build_oracle_partition, nterm_error, Cartoon};
use crate::geometry::mesh_io::write_mesh;
use crate::parametric::{
    default_template, reference_integral, run_sparse, work_accounting, FunctionalG, ParametricProblem, SparseTensorPlan,
};
use crate::solver::{run_adaptive, Mode, SolveReport, SolverConfig, TransportProblem};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    CartoonBench,
    BisectBench,
    Parametric,
    Delta,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        Some(match s {
            "solve" => Command::Solve,
            "cartoon-bench" => Command::CartoonBench,
            "bisect-bench" => Command::BisectBench,
            "parametric" => Command::Parametric,
            "delta" => Command::Delta,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::CartoonBench => "cartoon-bench",
            Command::BisectBench => "bisect-bench",
            Command::Parametric => "parametric",
            Command::Delta => "delta",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: String,
    pub solver: SolverConfig,
    pub max_level: usize,
    pub c_dof: usize,
    pub alpha: f64,
    pub full_tensor: bool,
    /// Scale range of the cartoon benchmarks.
    pub j_min: u32,
    pub j_max: u32,
    pub csv: Option<PathBuf>,
    pub mesh_dump: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Solve,
            problem: "curve".into(),
            solver: SolverConfig::default(),
            max_level: 3,
            c_dof: 6,
            alpha: 1.0,
            full_tensor: false,
            j_min: 6,
            j_max: 12,
            csv: None,
            mesh_dump: None,
        }
    }
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| config_err(line, format!("{key}: cannot parse '{value}'")))
}

impl RunConfig {
    /// Sets one key; `line` is 0 for command-line flags. Keys ignore case, `-` and `_`.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let k = normalize(key);
        let v = value.trim();
        match k.as_str() {
            "command" => {
                self.command = Command::parse(v).ok_or_else(|| config_err(line, format!("unknown command '{v}'")))?
            }
            "problem" => self.problem = v.to_string(),
            "mode" => {
                self.solver.mode = match v {
                    "aniso" | "anisotropic" => Mode::Anisotropic,
                    "iso" | "isotropic" => Mode::Isotropic,
                    _ => return Err(config_err(line, format!("mode must be aniso or iso, got '{v}'"))),
                }
            }
            "theta" => self.solver.theta = num(line, &k, v)?,
            "k" => self.solver.k = num(line, &k, v)?,
            "j0" => self.solver.j0 = num(line, &k, v)?,
            "eps" => self.solver.eps = num(line, &k, v)?,
            "max_cycles" => self.solver.max_cycles = num(line, &k, v)?,
            "dof_budget" => self.solver.dof_budget = if v == "none" { None } else { Some(num(line, &k, v)?) },
            "l" => self.max_level = num(line, &k, v)?,
            "cdof" => self.c_dof = num(line, &k, v)?,
            "alpha" => self.alpha = num(line, &k, v)?,
            "full_tensor" => self.full_tensor = num(line, &k, v)?,
            "j_min" => self.j_min = num(line, &k, v)?,
            "j_max" => self.j_max = num(line, &k, v)?,
            "csv" => self.csv = Some(PathBuf::from(v)),
            "mesh_dump" => self.mesh_dump = Some(PathBuf::from(v)),
            _ => return Err(config_err(line, format!("unknown key '{}'", key.trim()))),
        }
        self.check_key(&k, line)
    }

    /// Range check of the knob just set, so errors carry its line.
    fn check_key(&self, key: &str, line: usize) -> Result<()> {
        let fail = |msg: String| Err(config_err(line, msg));
        match key {
            "theta" | "k" | "j0" | "eps" | "max_cycles" => self.solver.validate().map_err(|e| match e {
                Error::Config { msg, .. } => config_err(line, msg),
                other => other,
            }),
            "dof_budget" if self.solver.dof_budget == Some(0) => fail("dof_budget must be positive".into()),
            "l" | "cdof" | "alpha" => self.plan(self.max_level).validate().map_err(|e| match e {
                Error::Config { msg, .. } => config_err(line, msg),
                other => other,
            }),
            "j_min" | "j_max" if !(1..=14).contains(&self.j_min) || !(1..=14).contains(&self.j_max) => {
                fail(format!("cartoon scales must lie in 1..=14, got {}..={}", self.j_min, self.j_max))
            }
            _ => Ok(()),
        }
    }

    /// Checks relations between keys after all of them are set.
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.plan(self.max_level).validate()?;
        if self.j_min > self.j_max {
            return Err(config_err(0, format!("j_min = {} exceeds j_max = {}", self.j_min, self.j_max)));
        }
        if matches!(self.command, Command::Solve | Command::Delta) && TransportProblem::builtin(&self.problem).is_none() {
            return Err(config_err(0, format!("unknown problem '{}'", self.problem)));
        }
        Ok(())
    }

    pub fn plan(&self, level: usize) -> SparseTensorPlan {
        SparseTensorPlan { max_level: level, c_dof: self.c_dof, alpha: self.alpha, full_tensor: self.full_tensor }
    }
}

/// Parses `key=value` lines; `#` starts a comment. Line numbers start at 1.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &[])
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// As [`parse_config`], with `overrides` replacing any file line of the same key.
pub fn parse_config_with(text: &str, overrides: &[(&str, String)]) -> Result<RunConfig> {
    let mut entries: Vec<(String, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| config_err(i + 1, format!("expected key=value, got '{line}'")))?;
        entries.push((k.trim().to_string(), v.to_string(), i + 1));
    }
    for (k, v) in overrides {
        entries.retain(|(key, _, _)| normalize(key) != normalize(k));
        entries.push((k.to_string(), v.clone(), 0));
    }
    let mut cfg = RunConfig::default();
    for (k, v, line) in &entries {
        cfg.set(k, v, *line)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config_file(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(s)
}

/// Six significant digits in the style of C's `%g`; NaN prints as an empty field.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..6).contains(&exp) {
        trim(format!("{x:.*}", (5 - exp).max(0) as usize))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant.to_string()), exp.abs())
    }
}

/// Numeric table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        out.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            out.write_record(r.iter().map(|&x| fmt_g(x))).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Parse(format!("csv: {e}")))?;
        Ok(())
    }

    /// Reads a table written by [`Table::write`]; empty fields become NaN.
    pub fn read<R: Read>(r: R) -> Result<Table> {
        let mut rd = csv::Reader::from_reader(r);
        let io = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        let header = rd.headers().map_err(io)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(io)?;
            let row = rec
                .iter()
                .map(|f| if f.is_empty() { Ok(f64::NAN) } else { f.parse().map_err(|_| Error::Parse(format!("csv: bad number '{f}'"))) })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Table { header, rows })
    }
}

/// `log₂(e_{i−1}/e_i) / log₂(n_i/n_{i−1})`, NaN in the first row.
pub fn rates(n: &[f64], err: &[f64]) -> Vec<f64> {
    (0..n.len())
        .map(|i| if i == 0 { f64::NAN } else { (err[i - 1] / err[i]).log2() / (n[i] / n[i - 1]).log2() })
        .collect()
}

/// Columns `n, delta, error, rate`.
pub fn solve_table(report: &SolveReport) -> Table {
    let n: Vec<f64> = report.rows.iter().map(|r| r.n as f64).collect();
    let e: Vec<f64> = report.rows.iter().map(|r| r.error.unwrap_or(f64::NAN)).collect();
    let rate = rates(&n, &e);
    let mut t = Table::new(&["n", "delta", "error", "rate"]);
    for (i, r) in report.rows.iter().enumerate() {
        t.rows.push(vec![n[i], r.delta.unwrap_or(f64::NAN), e[i], rate[i]]);
    }
    t
}

/// Columns `cycle, n, delta, errbound, error, ratio`.
pub fn delta_table(report: &SolveReport) -> Table {
    let mut t = Table::new(&["cycle", "n", "delta", "errbound", "error", "ratio"]);
    for r in &report.rows {
        let e = r.error.unwrap_or(f64::NAN);
        t.rows.push(vec![r.cycle as f64, r.n as f64, r.delta.unwrap_or(f64::NAN), r.errbound, e, r.errbound / e]);
    }
    t
}

/// Columns `J, N, error, rate`, the rate being per unit of `J`.
pub fn cartoon_table(rows: &[(u32, usize, f64)]) -> Table {
    let mut t = Table::new(&["J", "N", "error", "rate"]);
    for (i, &(j, n, e)) in rows.iter().enumerate() {
        let rate = if i == 0 { f64::NAN } else { (rows[i - 1].2 / e).log2() / (j - rows[i - 1].0) as f64 };
        t.rows.push(vec![j as f64, n as f64, e, rate]);
    }
    t
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn solver_config(cfg: &RunConfig) -> SolverConfig {
    SolverConfig { delta: true, ..cfg.solver.clone() }
}

/// Runs the configured command and returns its table.
pub fn run_command(cfg: &RunConfig) -> Result<(Table, Option<SolveReport>)> {
    cfg.validate()?;
    match cfg.command {
        Command::Solve | Command::Delta => {
            let problem = TransportProblem::builtin(&cfg.problem).expect("validated");
            let config = solver_config(cfg);
            let report = run_adaptive(&problem, &config)?;
            report.ensure_converged(config.eps)?;
            let table = if cfg.command == Command::Solve { solve_table(&report) } else { delta_table(&report) };
            Ok((table, Some(report)))
        }
        Command::CartoonBench => {
            let cartoon = Cartoon::reference();
            let mut rows = Vec::new();
            for j in cfg.j_min..=cfg.j_max {
                let b = build_oracle_partition(&cartoon, j)?;
                rows.push((j, b.partition.len(), nterm_error(&cartoon, &b.partition)));
            }
            Ok((cartoon_table(&rows), None))
        }
        Command::BisectBench => {
            let cartoon = Cartoon::reference();
            let mut rows = Vec::new();
            // the split rules alternate in pairs of scales
            for j in (cfg.j_min.max(2)..=cfg.j_max).filter(|j| j % 2 == 0) {
                let b = build_bisection_partition(&cartoon, j)?;
                rows.push((j, b.partition.len(), nterm_error(&cartoon, &b.partition)));
            }
            Ok((cartoon_table(&rows), None))
        }
        Command::Parametric => {
            let g = FunctionalG::default();
            let reference = reference_integral(&g);
            let problem = ParametricProblem::sheared();
            let template = default_template();
            let mut t = Table::new(&["n", "inv_n", "log_inv_n", "E_L"]);
            for l in cfg.max_level.min(1)..=cfg.max_level {
                let rep = run_sparse(&problem, &g, &cfg.plan(l), &template, reference)?;
                let w = work_accounting(&rep);
                t.rows.push(vec![w.n as f64, w.inv_n, w.log_inv_n, w.error]);
            }
            Ok((t, None))
        }
    }
}

/// Runs the command, writing its CSV to `cfg.csv` (or `stdout`) and the optional mesh dump.
pub fn execute<W: Write>(cfg: &RunConfig, stdout: W) -> Result<()> {
    let (table, report) = run_command(cfg)?;
    match &cfg.csv {
        Some(path) => table.write(create(path)?)?,
        None => table.write(stdout)?,
    }
    if let (Some(path), Some(rep)) = (&cfg.mesh_dump, &report) {
        let mut w = create(path)?;
        write_mesh(&rep.partition.cells, &mut w)
            .and_then(|_| w.flush())
            .map_err(|source| Error::Io { path: path.clone(), source })?;
    }
    Ok(())
}

/// Process exit code of a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Io { .. } => 2,
        _ => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn range_errors_carry_line_numbers() {
        match parse_config("problem=curve\ntheta=1.5") {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("theta"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("K=0"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("bogus=1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("\n\nno equals sign"), Err(Error::Config { line: 3, .. })));
        assert!(matches!(parse_config("L=abc"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("command=solve\nproblem=nope"), Err(Error::Config { line: 0, .. })));
    }

    #[test]
    fn parametric_round_trip() {
        let cfg = parse_config("command=parametric\nL=3").unwrap();
        assert_eq!(cfg.command, Command::Parametric);
        assert_eq!(cfg.max_level, 3);
        let text = format!("command={}\nL={}\ncdof={}\nmode=iso\nmax-cycles=7", cfg.command.as_str(), cfg.max_level, cfg.c_dof);
        let again = parse_config(&text).unwrap();
        assert_eq!(again.solver.mode, Mode::Isotropic);
        assert_eq!(again.solver.max_cycles, 7);
        assert_eq!(again.plan(3), cfg.plan(3));
    }

    #[test]
    fn flags_override_file() {
        let cfg = parse_config_with("theta=0.3\nK=4", &[("theta", "0.7".into())]).unwrap();
        assert_eq!(cfg.solver.theta, 0.7);
        assert_eq!(cfg.solver.k, 4);
        // an overridden line is never checked
        let cfg = parse_config_with("K=0", &[("k", "3".into())]).unwrap();
        assert_eq!(cfg.solver.k, 3);
        assert!(matches!(parse_config_with("", &[("theta", "2".into())]), Err(Error::Config { line: 0, .. })));
    }

    #[test]
    fn g_format() {
        let cases = [
            (48.0, "48"),
            (0.012404, "0.012404"),
            (1.0 / 3.0, "0.333333"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (1.5e-7, "1.5e-07"),
            (6.414264e-5, "6.41426e-05"),
            (0.000123, "0.000123"),
            (-0.5, "-0.5"),
            (0.0, "0"),
            (99999.95, "99999.9"),
            // rounding carries into the next decade
            (9.999996, "10"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
        assert_eq!(fmt_g(f64::NAN), "");
    }

    #[test]
    fn table_round_trip_and_rates() {
        let n = [48.0, 96.0, 192.0];
        let e = [0.1, 0.05, 0.025];
        let r = rates(&n, &e);
        assert!(r[0].is_nan());
        assert!((r[1] - 1.0).abs() < 1e-14 && (r[2] - 1.0).abs() < 1e-14);
        let mut t = Table::new(&["n", "error", "rate"]);
        for i in 0..3 {
            t.rows.push(vec![n[i], e[i], r[i]]);
        }
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "n,error,rate");
        assert_eq!(text.lines().nth(1).unwrap(), "48,0.1,");
        assert!(text.ends_with('\n'));
        let back = Table::read(&buf[..]).unwrap();
        assert_eq!(back.header, t.header);
        assert!(back.rows[0][2].is_nan());
        assert_eq!(back.rows[2], vec![192.0, 0.025, 1.0]);
    }

    #[test]
    fn one_row_gives_two_lines() {
        let mut t = Table::new(&["J", "N", "error", "rate"]);
        t.rows.push(vec![6.0, 100.0, 0.01, f64::NAN]);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&config_err(3, "x")), 2);
        assert_eq!(exit_code(&Error::Factorization("x".into())), 3);
    }
}
