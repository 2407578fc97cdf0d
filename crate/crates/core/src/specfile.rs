//! Endomorphism input files.
//!
//! UTF-8 `key = value` lines; `#` starts a comment. Recognised keys:
//!
//! ```text
//! p = 3
//! n = 2
//! field = 3^2 [1,0,1]     # optional: prime, p^m, or p^m with a modulus (low degree first)
//! phi.1 = z1 + z2^3*z3^2
//! ...
//! phi.4 = z4
//! budget = 10000000       # optional
//! tasks = analyze,gamma   # optional
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::parser::parse_expr_at;
use crate::scalars::Field;
use crate::weyl::{Algebra, WeylK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Validate,
    Analyze,
    Oracle,
    Gamma,
    Lift,
    Trace,
}

impl Task {
    pub const ALL: [Task; 6] = [Task::Validate, Task::Analyze, Task::Oracle, Task::Gamma, Task::Lift, Task::Trace];

    pub fn name(self) -> &'static str {
        match self {
            Task::Validate => "validate",
            Task::Analyze => "analyze",
            Task::Oracle => "oracle",
            Task::Gamma => "gamma",
            Task::Lift => "lift",
            Task::Trace => "trace",
        }
    }

    /// Parses a comma separated list; `all` selects every task. The result is
    /// sorted and deduplicated and always contains `validate`.
    pub fn parse_list(s: &str) -> Result<Vec<Task>> {
        let mut out = vec![Task::Validate];
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if part == "all" {
                out.extend(Task::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Task> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown task `{s}`")))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub m: usize,
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<Field> {
        Field::new(self.p, self.m, self.modulus.clone())
    }
}

/// One `phi.i` entry with the position of its value in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSource {
    pub expr: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub n: usize,
    pub field: FieldSpec,
    pub phi: Vec<ImageSource>,
    pub budget: Option<u128>,
    pub tasks: Option<Vec<Task>>,
}

impl SpecFile {
    pub fn parse(src: &str) -> Result<SpecFile> {
        let mut entries: BTreeMap<String, (String, usize, usize)> = BTreeMap::new();
        for (lno, raw) in src.lines().enumerate() {
            let line = lno + 1;
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let eq = body.find('=').ok_or(Error::SyntaxError {
                line,
                col: body.len() - body.trim_start().len() + 1,
                expected: "`key = value`".into(),
            })?;
            let key = body[..eq].trim().to_string();
            let rest = &body[eq + 1..];
            let lead = rest.len() - rest.trim_start().len();
            let col = body[..eq + 1 + lead].chars().count() + 1;
            if entries.insert(key.clone(), (rest.trim().to_string(), line, col)).is_some() {
                return Err(Error::Input(format!("duplicate key `{key}` on line {line}")));
            }
        }

        let take = |entries: &mut BTreeMap<String, (String, usize, usize)>, key: &str| entries.remove(key);
        let int = |key: &str, v: &(String, usize, usize)| -> Result<u128> {
            v.0.parse::<u128>().map_err(|_| Error::SyntaxError {
                line: v.1,
                col: v.2,
                expected: format!("unsigned integer for `{key}`"),
            })
        };

        let p = take(&mut entries, "p").map(|v| int("p", &v)).transpose()?;
        let field = take(&mut entries, "field").map(|v| parse_field(&v)).transpose()?;
        let field = match (p, field) {
            (Some(p), Some(f)) if f.p as u128 != p => {
                return Err(Error::Input(format!("p = {p} disagrees with field characteristic {}", f.p)))
            }
            (_, Some(f)) => f,
            (Some(p), None) => FieldSpec {
                p: u32::try_from(p).map_err(|_| Error::InvalidParams(format!("p = {p} too large")))?,
                m: 1,
                modulus: None,
            },
            (None, None) => return Err(Error::Input("missing key `p`".into())),
        };
        let n = take(&mut entries, "n")
            .ok_or_else(|| Error::Input("missing key `n`".into()))
            .and_then(|v| int("n", &v))?;
        if n == 0 || n > 8 {
            return Err(Error::InvalidParams(format!("n = {n} outside [1, 8]")));
        }
        let n = n as usize;
        let budget = take(&mut entries, "budget").map(|v| int("budget", &v)).transpose()?;
        let tasks = take(&mut entries, "tasks").map(|v| Task::parse_list(&v.0)).transpose()?;
        let mut phi = Vec::with_capacity(2 * n);
        for i in 1..=2 * n {
            let (expr, line, col) = take(&mut entries, &format!("phi.{i}"))
                .ok_or_else(|| Error::Input(format!("missing key `phi.{i}`")))?;
            phi.push(ImageSource { expr, line, col });
        }
        if let Some((key, (_, line, _))) = entries.into_iter().next() {
            return Err(Error::Input(format!("unexpected key `{key}` on line {line}")));
        }
        Ok(SpecFile { n, field, phi, budget, tasks })
    }

    pub fn algebra(&self) -> Result<Algebra> {
        Algebra::new(self.n, self.field.build()?)
    }

    /// Parses the images without checking the relations.
    pub fn images(&self, alg: &Algebra) -> Result<Vec<WeylK>> {
        self.phi.iter().map(|s| parse_expr_at(&s.expr, alg, s.line, s.col)).collect()
    }

    /// Parses and validates the endomorphism, applying the budget if given.
    pub fn endo(&self) -> Result<Endo> {
        let alg = self.algebra()?;
        let e = Endo::validate(&alg, self.images(&alg)?)?;
        Ok(match self.budget {
            Some(b) => e.with_budget(b),
            None => e,
        })
    }

    /// Writes `e` back in the input format.
    pub fn render(e: &Endo, tasks: Option<&[Task]>) -> String {
        let k = e.algebra().field();
        let mut out = format!("p = {}\nn = {}\n", k.p(), e.algebra().n());
        if k.m() > 1 {
            let md: Vec<String> = k.modulus().iter().map(u32::to_string).collect();
            out += &format!("field = {}^{} [{}]\n", k.p(), k.m(), md.join(","));
        }
        for (i, u) in e.images().iter().enumerate() {
            out += &format!("phi.{} = {}\n", i + 1, u);
        }
        if e.budget() != crate::endo::DEFAULT_BUDGET {
            out += &format!("budget = {}\n", e.budget());
        }
        if let Some(t) = tasks {
            let names: Vec<&str> = t.iter().map(|t| t.name()).collect();
            out += &format!("tasks = {}\n", names.join(","));
        }
        out
    }
}

fn parse_field(v: &(String, usize, usize)) -> Result<FieldSpec> {
    let (s, line, col) = (v.0.as_str(), v.1, v.2);
    let bad = |expected: &str| Error::SyntaxError { line, col, expected: expected.into() };
    let (head, modulus) = match s.find('[') {
        Some(b) => {
            let inner = s[b + 1..].trim_end().strip_suffix(']').ok_or_else(|| bad("`]` closing the modulus"))?;
            let coeffs = inner
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("comma separated modulus coefficients"))?;
            (s[..b].trim(), Some(coeffs))
        }
        None => (s, None),
    };
    let (p, m) = match head.split_once('^') {
        Some((p, m)) => (p.trim(), m.trim()),
        None => (head, "1"),
    };
    let p = p.parse::<u32>().map_err(|_| bad("prime, `p^m` or `p^m [c0,...,cm]`"))?;
    let m = m.parse::<usize>().map_err(|_| bad("extension degree"))?;
    Ok(FieldSpec { p, m, modulus })
}
