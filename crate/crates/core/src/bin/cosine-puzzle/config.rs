use std::collections::HashMap;
use std::path::Path;

use cosine_puzzle::{Error, Result};

/// Reads `key = value` lines; `#` starts a comment, keys are flag names
/// without the leading dashes (`-` and `_` are interchangeable).
pub fn read(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse(format!("config line {}: expected key = value", n + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_normalized() {
        let c = parse("# params\nmax_iter = 300\n--u = 2,0  # trailing\n\nviewport=1,2,3\n").unwrap();
        assert_eq!(c["max-iter"], "300");
        assert_eq!(c["u"], "2,0");
        assert_eq!(c["viewport"], "1,2,3");
        assert!(parse("novalue").is_err());
    }
}
