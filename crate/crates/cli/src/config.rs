//! Flat `key = value` config files, merged into argv ahead of the
//! command-line flags so that flags given explicitly win.

use std::ffi::OsString;
use std::path::Path;

use crate::error::CliError;

/// Translate a config file into flags. `true` becomes a bare switch, `false`
/// is dropped; every other value is passed through as `--key value`.
pub fn parse_config(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {lineno}: expected `key = value`, got `{line}`")))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(CliError::Config(format!("config line {lineno}: invalid key `{key}`")));
        }
        if key == "config" {
            return Err(CliError::Config(format!("config line {lineno}: config files cannot include other config files")));
        }
        // Keys such as `L` and `C` are case sensitive; underscores are accepted
        // as spellings of hyphens.
        let flag = format!("--{}", key.replace('_', "-"));
        let value = value.trim_matches('"');
        match value {
            "true" => flags.push(flag.into()),
            "false" => {}
            "" => return Err(CliError::Config(format!("config line {lineno}: key `{key}` has no value"))),
            v => {
                flags.push(flag.into());
                flags.push(v.into());
            }
        }
    }
    Ok(flags)
}

/// Locate `--config` in argv, returning its value if present.
fn find_config(argv: &[OsString]) -> Result<Option<OsString>, CliError> {
    let mut found = None;
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        let Some(s) = arg.to_str() else { continue };
        if s == "--" {
            break;
        }
        if s == "--config" {
            let v = iter.next().ok_or_else(|| CliError::Config("--config needs a path".into()))?;
            found = Some(v.clone());
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(v.into());
        }
    }
    Ok(found.filter(|v| !v.is_empty()))
}

/// Splice the flags of the config file (if any) right after the subcommand.
pub fn expand_argv(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = find_config(&argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let flags = parse_config(&text)?;
    // The subcommand is the first argument not starting with `-`.
    let Some(pos) = argv.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(argv);
    };
    let at = pos + 2;
    let mut out = argv[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_flags_and_switches() {
        let f = parse_config("# comment\nn = 4\nexhaustive = true\ncenter = false\n\nk_max=2\n").unwrap();
        assert_eq!(f, os(&["--n", "4", "--exhaustive", "--k-max", "2"]));
    }

    #[test]
    fn malformed_line_names_line_number() {
        let err = parse_config("n = 3\nthis is wrong\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn file_flags_precede_command_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "n = 4\n").unwrap();
        let argv = os(&["ranklab", "rank-prob", "--config", path.to_str().unwrap(), "--n", "5"]);
        let out = expand_argv(argv).unwrap();
        assert_eq!(out[2..4], os(&["--n", "4"])[..]);
        assert_eq!(out.last().unwrap(), "5");
    }
}
