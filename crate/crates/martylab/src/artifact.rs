//! Persistence: JSON artifact schemas and CSV reports.
//!
//! Numbers travel as decimal strings carrying enough digits to reproduce the
//! working-precision value bit for bit on parse-back (`-inf` marks the
//! log-domain zero sentinel). All writes go through a temp-file rename so
//! readers never observe partial artifacts, and serialization is fully
//! deterministic: equal inputs give byte-identical files.

use crate::construct::{ConstructedFamily, CounterexampleSpec};
use crate::error::{Error, Result};
use crate::expcalc::PhiPsiRegistry;
use crate::hermite::HermiteData;
use crate::numerics::{BigComplex, BigReal, LogComplex, Precision};
use crate::poly::{Monomial, MultiPoly, Poly, Var};
use crate::verify::GridReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

fn real_to_string(v: &BigReal) -> String {
    v.to_decimal_string()
}

fn real_from_string(s: &str, prec: Precision) -> Result<BigReal> {
    BigReal::parse(s, prec)
}

fn complex_to_pair(z: &BigComplex) -> [String; 2] {
    [real_to_string(&z.re), real_to_string(&z.im)]
}

fn complex_from_pair(pair: &[String; 2], prec: Precision) -> Result<BigComplex> {
    Ok(BigComplex::new(
        real_from_string(&pair[0], prec)?,
        real_from_string(&pair[1], prec)?,
    ))
}

/// `{"log_mag": string|"-inf", "phase": string}` form of a log-domain value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogComplexArtifact {
    pub log_mag: String,
    pub phase: String,
}

impl LogComplexArtifact {
    pub fn from_value(v: &LogComplex) -> Self {
        LogComplexArtifact {
            log_mag: real_to_string(v.log_mag()),
            phase: real_to_string(v.phase()),
        }
    }

    pub fn to_value(&self, prec: Precision) -> Result<LogComplex> {
        Ok(LogComplex::from_polar_log(
            real_from_string(&self.log_mag, prec)?,
            real_from_string(&self.phase, prec)?,
        ))
    }
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Ascending-degree `[re, im]` decimal-string pairs.
pub fn poly_to_pairs(p: &Poly) -> Vec<[String; 2]> {
    p.coeffs().iter().map(complex_to_pair).collect()
}

pub fn poly_from_pairs(pairs: &[[String; 2]], prec: Precision) -> Result<Poly> {
    let coeffs = pairs
        .iter()
        .map(|pair| complex_from_pair(pair, prec))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::from_coeffs(coeffs))
}

/// One multivariate term: integer coefficient and named exponents.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermArtifact {
    pub coeff: i128,
    pub exponents: BTreeMap<String, u32>,
}

pub fn multipoly_to_terms(m: &MultiPoly) -> Result<Vec<TermArtifact>> {
    m.terms()
        .map(|(mono, coeff)| {
            let coeff = coeff.to_i128().ok_or_else(|| {
                Error::Parse("coefficient exceeds the artifact integer range".to_string())
            })?;
            Ok(TermArtifact {
                coeff,
                exponents: mono.exponents().map(|(v, e)| (v.to_string(), e)).collect(),
            })
        })
        .collect()
}

pub fn multipoly_from_terms(terms: &[TermArtifact]) -> Result<MultiPoly> {
    let mut parts = Vec::with_capacity(terms.len());
    for t in terms {
        let exponents = t
            .exponents
            .iter()
            .map(|(name, &e)| Ok((name.parse::<Var>()?, e)))
            .collect::<Result<Vec<_>>>()?;
        parts.push((
            Monomial::from_exponents(exponents),
            rug::Integer::from(t.coeff),
        ));
    }
    Ok(MultiPoly::from_terms(parts))
}

/// Registry dump: `phi_k` and `psi_k` keyed by `k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegistryArtifact {
    pub k_max: u32,
    pub phi: BTreeMap<String, Vec<TermArtifact>>,
    pub psi: BTreeMap<String, Vec<TermArtifact>>,
}

impl RegistryArtifact {
    pub fn from_registry(reg: &PhiPsiRegistry) -> Result<Self> {
        let mut phi = BTreeMap::new();
        let mut psi = BTreeMap::new();
        for k in 2..=reg.k_max() {
            phi.insert(k.to_string(), multipoly_to_terms(reg.phi(k))?);
            psi.insert(k.to_string(), multipoly_to_terms(reg.psi(k))?);
        }
        Ok(RegistryArtifact {
            k_max: reg.k_max(),
            phi,
            psi,
        })
    }
}

// ---------------------------------------------------------------------------
// Hermite data
// ---------------------------------------------------------------------------

/// Input schema of the `hermite` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HermiteDataArtifact {
    #[serde(default)]
    pub precision_bits: Option<u32>,
    pub nodes: Vec<[String; 2]>,
    pub values: Vec<Vec<[String; 2]>>,
}

impl HermiteDataArtifact {
    pub fn from_data(data: &HermiteData) -> Self {
        HermiteDataArtifact {
            precision_bits: Some(data.precision().bits()),
            nodes: data.nodes().iter().map(complex_to_pair).collect(),
            values: data
                .values()
                .iter()
                .map(|orders| orders.iter().map(complex_to_pair).collect())
                .collect(),
        }
    }

    pub fn to_data(&self, default_prec: Precision) -> Result<HermiteData> {
        let prec = match self.precision_bits {
            Some(bits) => Precision::new(bits)?,
            None => default_prec,
        };
        let nodes = self
            .nodes
            .iter()
            .map(|pair| complex_from_pair(pair, prec))
            .collect::<Result<Vec<_>>>()?;
        let values = self
            .values
            .iter()
            .map(|orders| {
                orders
                    .iter()
                    .map(|pair| complex_from_pair(pair, prec))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        HermiteData::new(nodes, values)
    }
}

// ---------------------------------------------------------------------------
// Constructed families
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecArtifact {
    pub k0: u32,
    pub alpha: String,
    #[serde(rename = "C")]
    pub c: String,
    pub p: u32,
    pub q: u32,
    #[serde(rename = "M")]
    pub m: String,
    pub precision_bits: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridReportArtifact {
    pub resolution: usize,
    pub max_log_quotient: String,
    pub argmax: [String; 2],
    pub threshold_log: String,
    pub pass: bool,
    pub samples_evaluated: usize,
}

impl GridReportArtifact {
    pub fn from_report(report: &GridReport) -> Self {
        GridReportArtifact {
            resolution: report.resolution,
            max_log_quotient: real_to_string(&report.max_log_quotient),
            argmax: complex_to_pair(&report.argmax),
            threshold_log: real_to_string(&report.threshold_log),
            pass: report.pass,
            samples_evaluated: report.samples_evaluated,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberArtifact {
    pub n: u32,
    pub pn_coeffs: Vec<[String; 2]>,
    pub log_cn: String,
    pub log_an: String,
    pub verification: GridReportArtifact,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyArtifact {
    pub spec: SpecArtifact,
    pub members: Vec<MemberArtifact>,
}

impl FamilyArtifact {
    pub fn from_family(family: &ConstructedFamily) -> Self {
        let spec = SpecArtifact {
            k0: family.spec.k0,
            alpha: real_to_string(&family.spec.alpha),
            c: real_to_string(&family.spec.c_bound),
            p: family.spec.p,
            q: family.spec.q,
            m: real_to_string(&family.spec.m_bound),
            precision_bits: family.spec.precision.bits(),
        };
        let members = family
            .members
            .iter()
            .zip(&family.verification)
            .map(|(m, v)| MemberArtifact {
                n: m.n,
                pn_coeffs: poly_to_pairs(m.pn()),
                log_cn: real_to_string(&m.log_cn),
                log_an: real_to_string(&m.log_an),
                verification: GridReportArtifact::from_report(&v.quotient),
            })
            .collect();
        FamilyArtifact { spec, members }
    }
}

/// A family read back from disk: parameters plus per-member data, parsed at
/// the precision recorded in the file (bit-exact round trip).
pub struct LoadedMember {
    pub n: u32,
    pub pn: Poly,
    pub log_cn: BigReal,
    pub log_an: BigReal,
    pub verification: GridReportArtifact,
}

pub struct LoadedFamily {
    pub spec: CounterexampleSpec,
    pub members: Vec<LoadedMember>,
}

impl LoadedFamily {
    pub fn from_artifact(artifact: &FamilyArtifact) -> Result<Self> {
        let prec = Precision::new(artifact.spec.precision_bits)?;
        let spec = CounterexampleSpec {
            k0: artifact.spec.k0,
            alpha: real_from_string(&artifact.spec.alpha, prec)?,
            c_bound: real_from_string(&artifact.spec.c, prec)?,
            p: artifact.spec.p,
            q: artifact.spec.q,
            m_bound: real_from_string(&artifact.spec.m, prec)?,
            precision: prec,
        };
        let members = artifact
            .members
            .iter()
            .map(|m| {
                Ok(LoadedMember {
                    n: m.n,
                    pn: poly_from_pairs(&m.pn_coeffs, prec)?,
                    log_cn: real_from_string(&m.log_cn, prec)?,
                    log_an: real_from_string(&m.log_an, prec)?,
                    verification: m.verification.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LoadedFamily { spec, members })
    }
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

/// Deterministic pretty JSON bytes (two-space indent, trailing newline).
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Write bytes through a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json_bytes(value)?)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// `verify` report rows: one line per member.
pub struct VerifyCsvRow {
    pub n: u32,
    pub resolution: usize,
    pub max_log_quotient: BigReal,
    pub argmax: BigComplex,
    pub pass: bool,
}

fn csv_real(v: &BigReal) -> String {
    if v.is_neg_infinity() {
        "-inf".to_string()
    } else {
        format!("{:.17e}", v.to_f64())
    }
}

pub fn write_verify_csv(path: &Path, rows: &[VerifyCsvRow]) -> Result<()> {
    let mut out = String::from("n,resolution,max_log_quotient,argmax_re,argmax_im,pass\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.n,
            row.resolution,
            csv_real(&row.max_log_quotient),
            csv_real(&row.argmax.re),
            csv_real(&row.argmax.im),
            row.pass
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// `diagnose` heat-map rows: one line per grid sample.
pub struct HeatCsvRow {
    pub z: BigComplex,
    pub log_quotient: BigReal,
    pub log_spherical: BigReal,
}

pub fn write_heat_csv(path: &Path, rows: &[HeatCsvRow]) -> Result<()> {
    let mut out = String::from("re,im,log_quotient,log_spherical\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_real(&row.z.re),
            csv_real(&row.z.im),
            csv_real(&row.log_quotient),
            csv_real(&row.log_spherical)
        ));
    }
    write_atomic(path, out.as_bytes())
}
