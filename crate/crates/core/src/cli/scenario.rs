//! Scenario files: JSON configs naming a ring, a connection, an optional
//! section and the checks to run.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::connections::{Connection, FormMatrix};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::ring::{IdealSpec, RingSpec, TruncatedSeries};
use crate::superlinear::BundleSpec;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    All,
    Koszul,
    Twisted,
    Supertrace,
    Chern,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::All => "all",
            CheckKind::Koszul => "koszul",
            CheckKind::Twisted => "twisted",
            CheckKind::Supertrace => "supertrace",
            CheckKind::Chern => "chern",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    ring: RawRing,
    bundle: RawBundle,
    #[serde(default)]
    connection: RawConnection,
    section: Option<RawSection>,
    ideal: Option<RawIdeal>,
    #[serde(default)]
    checks: Vec<CheckKind>,
    report: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    num_vars: usize,
    truncation: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    rank: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnection {
    gamma: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    tau: Vec<String>,
    u: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdeal {
    vars: Vec<usize>,
}

/// A section `τ` of `E^∨` with the ideal it generates.
#[derive(Clone, Debug)]
pub struct SectionSpec {
    pub tau: Vec<TruncatedSeries>,
    /// `u[j][i]` with `Σ_j u[j][i] τ_j = z_i`, when supplied.
    pub certificate: Option<Vec<Vec<TruncatedSeries>>>,
    pub ideal: IdealSpec,
}

impl SectionSpec {
    pub fn is_holomorphic(&self) -> bool {
        self.tau.iter().all(TruncatedSeries::is_holomorphic)
    }
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub ring: RingSpec,
    pub bundle: BundleSpec,
    pub connection: Connection,
    pub section: Option<SectionSpec>,
    pub checks: Vec<CheckKind>,
    pub report: Option<PathBuf>,
}

impl Scenario {
    /// The suites to run, with `all` expanded. Koszul checks need a
    /// holomorphic section, so `all` leaves them out otherwise.
    pub fn suites(&self) -> Vec<CheckKind> {
        let requested: Vec<CheckKind> = if self.checks.is_empty() {
            vec![CheckKind::All]
        } else {
            self.checks.clone()
        };
        let mut out = Vec::new();
        for c in requested {
            let expanded = match c {
                CheckKind::All => {
                    let mut v = Vec::new();
                    if let Some(s) = &self.section {
                        if s.is_holomorphic() {
                            v.push(CheckKind::Koszul);
                        }
                        v.push(CheckKind::Twisted);
                    }
                    v.extend([CheckKind::Supertrace, CheckKind::Chern]);
                    v
                }
                other => vec![other],
            };
            out.extend(expanded);
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Read and validate a scenario file. `truncation` overrides the ring's
/// truncation order before any expression is parsed.
pub fn load_scenario(path: &Path, truncation: Option<u32>) -> Result<Scenario> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut scenario = parse_scenario(&text, truncation)?;
    if let Some(report) = &scenario.report {
        if report.is_relative() {
            let base = path.parent().unwrap_or_else(|| Path::new(""));
            scenario.report = Some(base.join(report));
        }
    }
    Ok(scenario)
}

/// Validate scenario JSON; errors carry the path of the offending field.
pub fn parse_scenario(text: &str, truncation: Option<u32>) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(
            if path == "." { String::new() } else { path },
            e.inner().to_string(),
        )
    })?;

    let ring = RingSpec::new(raw.ring.num_vars, truncation.unwrap_or(raw.ring.truncation))
        .map_err(|e| Error::schema("ring", e.to_string()))?;
    let bundle = BundleSpec::new(raw.bundle.rank)
        .map_err(|e| Error::schema("bundle.rank", e.to_string()))?;
    let r = bundle.rank();

    let connection = match &raw.connection.gamma {
        None => Connection::trivial(ring, bundle),
        Some(rows) => {
            if rows.len() != r {
                return Err(Error::schema(
                    "connection.gamma",
                    format!("expected {r} rows for rank {r}, found {}", rows.len()),
                ));
            }
            let mut parsed = Vec::with_capacity(r);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != r {
                    return Err(Error::schema(
                        format!("connection.gamma[{i}]"),
                        format!("expected {r} entries, found {}", row.len()),
                    ));
                }
                let mut out = Vec::with_capacity(r);
                for (j, text) in row.iter().enumerate() {
                    let path = format!("connection.gamma[{i}][{j}]");
                    let f =
                        Form::parse(text, ring).map_err(|e| Error::schema(&path, e.to_string()))?;
                    f.require_bidegree(1, 0, "connection entry")
                        .map_err(|e| Error::schema(&path, e.to_string()))?;
                    out.push(f);
                }
                parsed.push(out);
            }
            let gamma = FormMatrix::new(ring, parsed)
                .map_err(|e| Error::schema("connection.gamma", e.to_string()))?;
            Connection::new(bundle, gamma)
                .map_err(|e| Error::schema("connection.gamma", e.to_string()))?
        }
    };

    let section = match (&raw.section, &raw.ideal) {
        (None, None) => None,
        (None, Some(_)) => return Err(Error::schema("ideal", "an ideal requires a section")),
        (Some(_), None) => return Err(Error::schema("ideal", "a section requires an ideal")),
        (Some(sec), Some(id)) => {
            if sec.tau.len() != r {
                return Err(Error::schema(
                    "section.tau",
                    format!(
                        "expected {r} components for rank {r}, found {}",
                        sec.tau.len()
                    ),
                ));
            }
            let tau = sec
                .tau
                .iter()
                .enumerate()
                .map(|(j, t)| {
                    TruncatedSeries::parse(t, ring)
                        .map_err(|e| Error::schema(format!("section.tau[{j}]"), e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let ideal = IdealSpec::new(&ring, id.vars.clone())
                .map_err(|e| Error::schema("ideal.vars", e.to_string()))?;
            let certificate = match &sec.u {
                None => None,
                Some(rows) => {
                    if rows.len() != r {
                        return Err(Error::schema(
                            "section.u",
                            format!(
                                "expected {r} rows, one per section component, found {}",
                                rows.len()
                            ),
                        ));
                    }
                    let mut u = Vec::with_capacity(r);
                    for (j, row) in rows.iter().enumerate() {
                        if row.len() != ideal.len() {
                            return Err(Error::schema(
                                format!("section.u[{j}]"),
                                format!(
                                    "expected {} entries, one per ideal generator, found {}",
                                    ideal.len(),
                                    row.len()
                                ),
                            ));
                        }
                        let parsed = row
                            .iter()
                            .enumerate()
                            .map(|(i, t)| {
                                TruncatedSeries::parse(t, ring).map_err(|e| {
                                    Error::schema(format!("section.u[{j}][{i}]"), e.to_string())
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        u.push(parsed);
                    }
                    Some(u)
                }
            };
            Some(SectionSpec {
                tau,
                certificate,
                ideal,
            })
        }
    };

    for (k, c) in raw.checks.iter().enumerate() {
        let needs_section = matches!(c, CheckKind::Koszul | CheckKind::Twisted);
        match &section {
            None if needs_section => {
                return Err(Error::schema(
                    format!("checks[{k}]"),
                    format!("{} checks require a section", c.name()),
                ));
            }
            Some(s) if *c == CheckKind::Koszul && !s.is_holomorphic() => {
                return Err(Error::schema(
                    "section.tau",
                    "koszul checks require a holomorphic section (no w variables)",
                ));
            }
            _ => {}
        }
    }

    Ok(Scenario {
        name: raw.name,
        ring,
        bundle,
        connection,
        section,
        checks: raw.checks,
        report: raw.report,
    })
}
