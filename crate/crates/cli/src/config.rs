//! `--config study.json` support: the file's keys are turned back into
//! command-line flags and parsed by the same parser.

use std::ffi::OsString;
use std::path::Path;

use serde_json::{Map, Value};

/// Rewrites `argv` when it contains `--config FILE` (or `--config=FILE`).
///
/// The optional `command` key holds the subcommand path (`"disk hardy"` or
/// `["disk", "hardy"]`); every other key `foo_bar` becomes `--foo-bar`.
/// Flags given on the command line follow the config flags and win.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut rest = Vec::new();
    let mut it = argv.into_iter();
    let program = it.next().unwrap_or_else(|| "resolab".into());
    while let Some(arg) = it.next() {
        let text = arg.to_string_lossy().into_owned();
        if text == "--config" {
            path = Some(it.next().ok_or("--config needs a file argument")?);
        } else if let Some(p) = text.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let map = read(Path::new(&path))?;
    let mut out = vec![program];
    let explicit_command = rest.first().is_some_and(|a| !a.to_string_lossy().starts_with('-'));
    if !explicit_command {
        match map.get("command") {
            Some(Value::String(s)) => out.extend(s.split_whitespace().map(OsString::from)),
            Some(Value::Array(words)) => {
                for w in words {
                    out.push(w.as_str().ok_or("command entries must be strings")?.into());
                }
            }
            Some(_) => return Err("command must be a string or a list of strings".into()),
            None => {}
        }
    } else {
        // The subcommand words come first so the config flags attach to it.
        while let Some(first) = rest.first() {
            if first.to_string_lossy().starts_with('-') {
                break;
            }
            out.push(rest.remove(0));
        }
    }
    for (key, value) in &map {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(",");
                out.push(format!("{flag}={joined}").into());
            }
            other => out.push(format!("{flag}={}", scalar(other)?).into()),
        }
    }
    out.extend(rest);
    Ok(out)
}

fn read(path: &Path) -> Result<Map<String, Value>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(format!("config {} must hold a JSON object", path.display())),
        Err(e) => Err(format!("malformed config {}: {e}", path.display())),
    }
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(format!("unsupported config value {other}")),
    }
}
