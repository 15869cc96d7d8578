use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands;
use crate::manifest::{self, replayable_args, sha256_hex, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Tolerance(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Tolerance(m) => f.write_str(m),
        }
    }
}

impl From<homloss::Error> for CliError {
    fn from(e: homloss::Error) -> Self {
        match e {
            homloss::Error::InvalidInput(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Output directory plus the inputs read and files written so far.
pub struct RunCtx {
    pub out: PathBuf,
    pub seed: u64,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl RunCtx {
    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    /// Writes `bytes` to `name` inside the output directory.
    pub fn write_output(&mut self, name: &str, bytes: &[u8]) -> CliResult {
        let path = self.out.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }
}

pub fn dispatch(cli: Cli, argv: &[String]) -> CliResult {
    if let Some(path) = &cli.from_manifest {
        let m = RunManifest::load(path)?;
        m.verify_inputs()?;
        let mut replay = vec!["homloss".to_string()];
        replay.extend(m.args.iter().cloned());
        replay.push("--out".into());
        replay.push(cli.out.display().to_string());
        let again = Cli::try_parse_from(&replay).map_err(|e| CliError::Usage(format!("manifest arguments: {e}")))?;
        return execute(again, &replay);
    }
    execute(cli, argv)
}

fn execute(cli: Cli, argv: &[String]) -> CliResult {
    let command = cli
        .command
        .as_ref()
        .ok_or_else(|| CliError::Usage("no subcommand given (see --help)".into()))?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Data(format!("{}: {e}", cli.out.display())))?;
    let mut ctx = RunCtx {
        out: cli.out.clone(),
        seed: cli.seed,
        inputs: BTreeMap::new(),
        outputs: BTreeMap::new(),
    };
    let result = match command {
        Command::Landscape(a) => commands::landscape::run(&mut ctx, a),
        Command::Gradcheck(a) => commands::gradcheck::run(&mut ctx, a),
        Command::Optimize(a) => commands::optimize::run(&mut ctx, a),
        Command::Slabs(a) => commands::slabs::run(&mut ctx, a),
        Command::Eval(a) => commands::eval::run(&mut ctx, a),
    };
    // Tolerance failures still leave a complete, replayable record.
    if matches!(result, Ok(()) | Err(CliError::Tolerance(_))) {
        let m = RunManifest {
            tool: "homloss".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.name().into(),
            args: replayable_args(argv),
            seed: cli.seed,
            config: serde_json::to_value(command).expect("arguments serialize"),
            inputs: ctx.inputs,
            outputs: ctx.outputs,
        };
        let path = cli.out.join(manifest::FILE_NAME);
        std::fs::write(&path, m.to_json()).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    result
}
