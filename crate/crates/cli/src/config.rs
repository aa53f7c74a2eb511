//! `--config FILE`: a JSON object whose keys mirror the command-line flags.
//!
//! The file's entries are spliced in directly after the subcommand, so any
//! flag given on the command line comes later and wins.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};
use serde_json::Value;

pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        match arg.to_str() {
            Some("--config") => path = Some(iter.next().context("--config needs a file")?),
            Some(s) if s.starts_with("--config=") => path = Some(OsString::from(&s["--config=".len()..])),
            _ => rest.push(arg),
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.to_string_lossy()))?;
    let Value::Object(entries) = serde_json::from_str(&text).context("config is not valid JSON")? else {
        bail!("config must be a JSON object");
    };

    let program = rest.first().cloned().unwrap_or_else(|| "dl-harmonics".into());
    // `--config` is the only top-level option taking a value, so once it is
    // removed a subcommand given on the command line comes first.
    let given = rest.get(1).filter(|a| !a.to_string_lossy().starts_with('-'));
    let (subcommand, tail) = match given {
        Some(sub) => (sub.clone(), rest[2..].to_vec()),
        None => match entries.get("subcommand") {
            Some(Value::String(s)) => (OsString::from(s), rest[1..].to_vec()),
            _ => bail!("no subcommand given on the command line or in the config"),
        },
    };

    let mut out = vec![program, subcommand];
    for (key, value) in &entries {
        if key == "subcommand" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => out.extend([flag.into(), s.into()]),
            Value::Number(n) => out.extend([flag.into(), n.to_string().into()]),
            other => out.extend([flag.into(), other.to_string().into()]),
        }
    }
    out.extend(tail);
    Ok(out)
}
