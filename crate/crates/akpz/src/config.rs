//! Run configuration: a flat key-value document with sections, in TOML
//! syntax. Keys are addressed as `section.key`.

use std::path::Path;

use akpz_core::pde::drift::DEFAULT_MARGIN;
use akpz_core::{ProfileSpec, Slope};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Doc {
    pub path: String,
    pub table: Table,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Doc {
    pub fn parse(path: &str, text: &str) -> Result<Self, CliError> {
        match text.parse::<Table>() {
            Ok(table) => Ok(Doc {
                path: path.to_string(),
                table,
            }),
            Err(e) => {
                let at = e.span().map(|s| format!("line {}: ", line_of(text, s.start))).unwrap_or_default();
                Err(CliError::Parse {
                    path: path.to_string(),
                    message: format!("{at}{}", e.message()),
                })
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn empty(path: &str) -> Self {
        Doc {
            path: path.to_string(),
            table: Table::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        let mut cur = &self.table;
        let mut parts = key.split('.').peekable();
        while let Some(p) = parts.next() {
            let v = cur.get(p)?;
            if parts.peek().is_none() {
                return Some(v);
            }
            cur = v.as_table()?;
        }
        None
    }

    pub fn has(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// Insert or replace `key`, creating its section if needed.
    pub fn set(&mut self, key: &str, value: Value) {
        let mut cur = &mut self.table;
        let parts: Vec<&str> = key.split('.').collect();
        for p in &parts[..parts.len() - 1] {
            let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
            if !entry.is_table() {
                *entry = Value::Table(Table::new());
            }
            cur = entry.as_table_mut().expect("table");
        }
        cur.insert(parts[parts.len() - 1].to_string(), value);
    }

    pub fn to_text(&self) -> String {
        toml::to_string(&self.table).expect("tables always serialize")
    }

    fn missing(&self, key: &str) -> CliError {
        CliError::MissingKey {
            path: self.path.clone(),
            key: key.to_string(),
        }
    }

    fn bad(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::BadValue {
            path: self.path.clone(),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn require(&self, key: &str) -> Result<&Value, CliError> {
        self.get(key).ok_or_else(|| self.missing(key))
    }

    fn num(&self, key: &str, v: &Value) -> Result<f64, CliError> {
        match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            Value::String(s) if s == "inf" => Ok(f64::INFINITY),
            _ => Err(self.bad(key, "expected a number")),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.num(key, self.require(key)?)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.get(key).map_or(Ok(default), |v| self.num(key, v))
    }

    pub fn i64(&self, key: &str) -> Result<i64, CliError> {
        self.require(key)?.as_integer().ok_or_else(|| self.bad(key, "expected an integer"))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        let i = self.i64(key)?;
        u64::try_from(i).map_err(|_| self.bad(key, "expected a nonnegative integer"))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        if self.has(key) {
            self.u64(key)
        } else {
            Ok(default)
        }
    }

    pub fn str(&self, key: &str) -> Result<&str, CliError> {
        self.require(key)?.as_str().ok_or_else(|| self.bad(key, "expected a string"))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str, CliError> {
        if self.has(key) {
            self.str(key)
        } else {
            Ok(default)
        }
    }

    pub fn f64s(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let arr = self.require(key)?.as_array().ok_or_else(|| self.bad(key, "expected an array"))?;
        arr.iter().map(|v| self.num(key, v)).collect()
    }

    pub fn pair(&self, key: &str) -> Result<[f64; 2], CliError> {
        match self.f64s(key)?.as_slice() {
            &[a, b] => Ok([a, b]),
            _ => Err(self.bad(key, "expected two numbers")),
        }
    }

    pub fn int_pair(&self, key: &str) -> Result<[i64; 2], CliError> {
        let arr = self.require(key)?.as_array().ok_or_else(|| self.bad(key, "expected an array"))?;
        match arr.iter().map(Value::as_integer).collect::<Option<Vec<_>>>().as_deref() {
            Some(&[a, b]) => Ok([a, b]),
            _ => Err(self.bad(key, "expected two integers")),
        }
    }

    pub fn pairs(&self, key: &str) -> Result<Vec<[f64; 2]>, CliError> {
        let arr = self.require(key)?.as_array().ok_or_else(|| self.bad(key, "expected an array of pairs"))?;
        arr.iter()
            .map(|v| {
                let inner = v.as_array().ok_or_else(|| self.bad(key, "expected an array of pairs"))?;
                match inner.iter().map(|x| self.num(key, x)).collect::<Result<Vec<_>, _>>()?.as_slice() {
                    &[a, b] => Ok([a, b]),
                    _ => Err(self.bad(key, "expected pairs of numbers")),
                }
            })
            .collect()
    }

    pub fn u32s(&self, key: &str) -> Result<Vec<u32>, CliError> {
        let arr = self.require(key)?.as_array().ok_or_else(|| self.bad(key, "expected an array"))?;
        arr.iter()
            .map(|v| {
                v.as_integer()
                    .and_then(|i| u32::try_from(i).ok())
                    .ok_or_else(|| self.bad(key, "expected nonnegative integers"))
            })
            .collect()
    }

    /// Axis given as `[lo, hi, n]`.
    pub fn axis(&self, key: &str) -> Result<akpz_core::pde::Axis, CliError> {
        let v = self.f64s(key)?;
        if v.len() != 3 || v[2] < 1.0 || v[2].fract() != 0.0 {
            return Err(self.bad(key, "expected [lo, hi, nodes]"));
        }
        akpz_core::pde::Axis::spanning(v[0], v[1], v[2] as usize).map_err(|e| self.bad(key, e.to_string()))
    }

    pub fn slope(&self, key: &str, margin: f64) -> Result<Slope, CliError> {
        let [a, b] = self.pair(key)?;
        Slope::new(a, b, margin).map_err(|e| self.bad(key, e.to_string()))
    }

    /// A catalog profile from section `sec`: `kind` is `affine` (`rho`),
    /// `bump` (`rho`, `center`, `a`, `radius`) or `kink` (`minus`, `plus`).
    pub fn profile(&self, sec: &str) -> Result<ProfileSpec, CliError> {
        let k = |s: &str| format!("{sec}.{s}");
        let margin = self.f64_or(&k("margin"), DEFAULT_MARGIN)?;
        let kind = self.str(&k("kind"))?;
        let p = match kind {
            "affine" => ProfileSpec::affine(self.slope(&k("rho"), margin)?),
            "bump" => ProfileSpec::bump(
                self.slope(&k("rho"), margin)?,
                if self.has(&k("center")) { self.pair(&k("center"))? } else { [0.0, 0.0] },
                self.f64(&k("a"))?,
                self.f64(&k("radius"))?,
                margin,
            )?,
            "kink" => ProfileSpec::kink(self.pair(&k("minus"))?, self.pair(&k("plus"))?, margin)?,
            other => return Err(self.bad(&k("kind"), format!("unknown profile kind `{other}`"))),
        };
        Ok(p)
    }
}

/// A profile written back as config keys, so manifests can carry it.
pub fn profile_table(p: &ProfileSpec) -> Table {
    let arr = |a: [f64; 2]| Value::Array(vec![Value::Float(a[0]), Value::Float(a[1])]);
    let mut t = Table::new();
    t.insert("kind".into(), Value::String(p.name().into()));
    match *p {
        ProfileSpec::Affine { rho } => {
            t.insert("rho".into(), arr(rho));
        }
        ProfileSpec::Bump { rho, center, a, radius } => {
            t.insert("rho".into(), arr(rho));
            t.insert("center".into(), arr(center));
            t.insert("a".into(), Value::Float(a));
            t.insert("radius".into(), Value::Float(radius));
        }
        ProfileSpec::Kink { minus, plus } => {
            t.insert("minus".into(), arr(minus));
            t.insert("plus".into(), arr(plus));
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_names_the_line() {
        let e = Doc::parse("c.toml", "[run]\nt = 1.0\nseed = = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn missing_key_is_named() {
        let d = Doc::parse("c.toml", "[run]\nt = 1.0\n").unwrap();
        let e = d.u64("run.seed").unwrap_err();
        assert!(e.to_string().contains("run.seed"));
    }

    #[test]
    fn set_creates_sections() {
        let mut d = Doc::empty("x");
        d.set("run.seed", Value::Integer(5));
        assert_eq!(d.u64("run.seed").unwrap(), 5);
        let back = Doc::parse("x", &d.to_text()).unwrap();
        assert_eq!(back.table, d.table);
    }

    #[test]
    fn profiles_round_trip_through_tables() {
        let text = "[profile]\nkind = \"bump\"\nrho = [0.3, 0.3]\na = 0.2\nradius = 0.5\n";
        let d = Doc::parse("p", text).unwrap();
        let p = d.profile("profile").unwrap();
        let mut e = Doc::empty("q");
        e.table.insert("profile".into(), Value::Table(profile_table(&p)));
        assert_eq!(e.profile("profile").unwrap(), p);
    }
}
