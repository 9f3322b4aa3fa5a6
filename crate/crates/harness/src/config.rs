//! Flat `key = value` configuration with dotted keys.
//!
//! Lines starting with `#` are comments. Every experiment publishes its full
//! set of keys with defaults; overrides may only replace existing keys.

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    entries: Vec<(String, String)>,
}

impl Config {
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Self { entries: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }

    /// Parses `key = value` lines. Repeated keys keep the last value.
    pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
        let mut out: Vec<(String, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(HarnessError::Usage(format!("config line {}: expected key = value, got `{line}`", n + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                return Err(HarnessError::Usage(format!("config line {}: bad key `{k}`", n + 1)));
            }
            out.retain(|(key, _)| key != k);
            out.push((k.to_string(), v.to_string()));
        }
        Ok(out)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// Replaces known keys; an unknown key is a usage error naming the valid ones.
    pub fn apply(&mut self, overrides: &[(String, String)]) -> Result<()> {
        for (k, v) in overrides {
            match self.entries.iter_mut().find(|(key, _)| key == k) {
                Some(slot) => slot.1 = v.clone(),
                None => {
                    let valid: Vec<&str> = self.keys().collect();
                    return Err(HarnessError::Usage(format!(
                        "unknown parameter `{k}`; valid keys: {}",
                        valid.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| HarnessError::value(key, "missing"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.raw(key)?)
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let v = self.raw(key)?;
        parse_count(v).ok_or_else(|| HarnessError::value(key, format!("expected a nonnegative integer, got `{v}`")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        Ok(self.u64(key)? as usize)
    }

    /// Comma-separated list of reals; must be nonempty.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.raw(key)?;
        let xs = v.split(',').map(|s| parse_f64(key, s.trim())).collect::<Result<Vec<_>>>()?;
        if xs.is_empty() {
            return Err(HarnessError::value(key, "empty list"));
        }
        Ok(xs)
    }

    pub fn u64_list(&self, key: &str) -> Result<Vec<u64>> {
        let v = self.raw(key)?;
        v.split(',')
            .map(|s| {
                parse_count(s.trim())
                    .ok_or_else(|| HarnessError::value(key, format!("expected nonnegative integers, got `{v}`")))
            })
            .collect()
    }

    /// Real in the closed interval `[lo, hi]`.
    pub fn f64_in(&self, key: &str, lo: f64, hi: f64) -> Result<f64> {
        let x = self.f64(key)?;
        check_range(key, x, lo, hi)?;
        Ok(x)
    }

    pub fn f64_list_in(&self, key: &str, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let xs = self.f64_list(key)?;
        for &x in &xs {
            check_range(key, x, lo, hi)?;
        }
        Ok(xs)
    }

    /// Positive integer.
    pub fn count(&self, key: &str) -> Result<u64> {
        let n = self.u64(key)?;
        if n == 0 {
            return Err(HarnessError::value(key, "must be at least 1"));
        }
        Ok(n)
    }

    /// Dump in parse-compatible form.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }
}

/// Accepts plain integers and exact integral scientific forms such as `2e5`.
fn parse_count(s: &str) -> Option<u64> {
    if let Ok(n) = s.parse::<u64>() {
        return Some(n);
    }
    let x: f64 = s.parse().ok()?;
    (x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53)).then_some(x as u64)
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(HarnessError::value(key, format!("expected a finite number, got `{s}`"))),
    }
}

fn check_range(key: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if x < lo || x > hi {
        return Err(HarnessError::value(key, format!("{x} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_round_trip() {
        let text = "# comment\nseed = 7\n\nagent.alpha=0.35\nagent.alpha = 0.4\n";
        let pairs = Config::parse(text).unwrap();
        assert_eq!(pairs, vec![("seed".into(), "7".into()), ("agent.alpha".into(), "0.4".into())]);
        let mut c = Config::from_pairs(&[("seed", "1"), ("agent.alpha", "0.1")]);
        c.apply(&pairs).unwrap();
        assert_eq!(Config::parse(&c.render()).unwrap(), pairs);
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let mut c = Config::from_pairs(&[("seed", "1"), ("trials", "5")]);
        let err = c.apply(&[("trails".into(), "3".into())]).unwrap_err().to_string();
        assert!(err.contains("trails") && err.contains("seed, trials"), "{err}");
    }

    #[test]
    fn typed_getters() {
        let c = Config::from_pairs(&[("h", "2e5"), ("xs", "0.1, 0.2,0.3"), ("bad", "1.5"), ("z", "0")]);
        assert_eq!(c.u64("h").unwrap(), 200_000);
        assert_eq!(c.f64_list("xs").unwrap(), vec![0.1, 0.2, 0.3]);
        assert!(c.u64("bad").is_err());
        assert!(c.count("z").is_err());
        assert!(c.f64_in("bad", 0.0, 1.0).is_err());
        assert!(Config::parse("novalue").is_err());
    }
}
