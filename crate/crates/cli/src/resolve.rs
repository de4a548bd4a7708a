use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use shellrig::config::KeyValues;

use crate::Failure;

/// Merges flags over a config file and remembers every resolved value for provenance.
#[derive(Default)]
pub struct Resolver {
    kv: KeyValues,
    echo: Vec<(String, String)>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let kv = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", p.display())))?;
                KeyValues::parse(&text)?
            }
            None => KeyValues::default(),
        };
        Ok(Resolver { kv, echo: Vec::new() })
    }

    fn lookup(&self, key: &str) -> Option<&str> {
        self.kv.get(key).or_else(|| self.kv.get(&key.replace('_', "-")))
    }

    pub fn optional<V>(&mut self, key: &str, flag: Option<V>) -> Result<Option<V>, Failure>
    where
        V: FromStr + Display,
        V::Err: Display,
    {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.lookup(key) {
                Some(s) => Some(s.parse::<V>().map_err(|e| Failure::Usage(format!("config `{key} = {s}`: {e}")))?),
                None => None,
            },
        };
        if let Some(v) = &v {
            self.record(key, v.to_string());
        }
        Ok(v)
    }

    pub fn value<V>(&mut self, key: &str, flag: Option<V>, default: impl FnOnce() -> V) -> Result<V, Failure>
    where
        V: FromStr + Display,
        V::Err: Display,
    {
        match self.optional(key, flag)? {
            Some(v) => Ok(v),
            None => {
                let v = default();
                self.record(key, v.to_string());
                Ok(v)
            }
        }
    }

    pub fn record(&mut self, key: &str, value: String) {
        self.echo.retain(|(k, _)| k != key);
        self.echo.push((key.to_string(), value));
    }

    pub fn forget(&mut self, key: &str) {
        self.echo.retain(|(k, _)| k != key);
    }

    pub fn echo(&self) -> &[(String, String)] {
        &self.echo
    }

    pub fn echo_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in &self.echo {
            m.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        serde_json::Value::Object(m)
    }
}

/// A positive number or `2^e`.
pub fn parse_h(s: &str) -> Result<f64, Failure> {
    let s = s.trim();
    let v = match s.strip_prefix("2^") {
        Some(e) => e.trim().parse::<f64>().map(f64::exp2),
        None => s.parse::<f64>(),
    }
    .map_err(|e| Failure::Usage(format!("bad thickness `{s}`: {e}")))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("thickness `{s}` must be positive")))
    }
}

/// Base-2 exponent of `h`.
pub fn log2_h(s: &str) -> Result<f64, Failure> {
    parse_h(s).map(f64::log2)
}
