//! JSON formats.
//!
//! Complex numbers are `[re, im]` pairs and operators are row-major. Floats
//! are written in shortest round-trip form, so write-then-read is exact.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cagos::{ProcessSample, VectorEnsemble};
use crate::decomposition::{CklSystem, HfpcaReport};
use crate::error::{Error, Result};
use crate::filtering::{FirFilter, TransferFunction};
use crate::operator::{ComplexOperator, C64};
use crate::povm::{Atom, AtomicTracePovm};
use crate::spectral_bochner::AutocovarianceSequence;

pub type ComplexJson = [f64; 2];

fn pair(z: C64) -> ComplexJson {
    [z.re, z.im]
}

fn unpair(p: ComplexJson) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ComplexJson>,
}

impl From<&ComplexOperator> for OperatorJson {
    fn from(p: &ComplexOperator) -> Self {
        Self { rows: p.rows(), cols: p.cols(), entries: p.entries().iter().copied().map(pair).collect() }
    }
}

impl TryFrom<OperatorJson> for ComplexOperator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        ComplexOperator::new(j.rows, j.cols, j.entries.into_iter().map(unpair).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub freq: f64,
    pub weight: OperatorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub atoms: Vec<AtomJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovJson {
    pub dim: usize,
    pub max_lag: usize,
    pub values: Vec<OperatorJson>,
}

/// `values[t][r][k]`: coordinate `k` of realization `r` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub dim: usize,
    pub period: usize,
    pub realizations: usize,
    pub values: Vec<Vec<Vec<ComplexJson>>>,
}

/// `domains[j]` is `null` for an operator defined everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub freqs: Vec<f64>,
    pub ops: Vec<OperatorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domains: Option<Vec<Option<OperatorJson>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TapJson {
    pub s: i64,
    pub op: OperatorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirJson {
    pub taps: Vec<TapJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CklAtomJson {
    pub freq: f64,
    pub sigmas: Vec<f64>,
    pub vectors: Vec<Vec<ComplexJson>>,
    pub rank: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CklReportJson {
    pub atoms: Vec<CklAtomJson>,
    pub completeness_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfpcaReportJson {
    pub q: Vec<usize>,
    pub optimal_error: f64,
    pub achieved_error: f64,
    pub tie_warnings: Vec<String>,
}

fn dims_match(what: &str, declared: usize, actual: usize) -> Result<()> {
    if declared != actual {
        return Err(Error::Format(format!("{what}: declared {declared}, found {actual}")));
    }
    Ok(())
}

/// Types with a documented JSON representation.
pub trait JsonFormat: Sized {
    type Repr: Serialize + DeserializeOwned;

    fn to_repr(&self) -> Self::Repr;
    fn from_repr(repr: Self::Repr) -> Result<Self>;

    fn to_json(&self) -> String {
        to_json_string(&self.to_repr())
    }

    fn from_json(text: &str) -> Result<Self> {
        Self::from_repr(parse_json(text)?)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("in-memory JSON serialisation cannot fail")
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

impl JsonFormat for ComplexOperator {
    type Repr = OperatorJson;

    fn to_repr(&self) -> OperatorJson {
        self.into()
    }

    fn from_repr(repr: OperatorJson) -> Result<Self> {
        repr.try_into()
    }
}

impl JsonFormat for AtomicTracePovm {
    type Repr = PovmJson;

    fn to_repr(&self) -> PovmJson {
        PovmJson {
            dim: self.dim(),
            atoms: self.atoms().iter().map(|a| AtomJson { freq: a.freq, weight: (&a.weight).into() }).collect(),
        }
    }

    fn from_repr(repr: PovmJson) -> Result<Self> {
        let atoms = repr
            .atoms
            .into_iter()
            .map(|a| Ok(Atom { freq: a.freq, weight: a.weight.try_into()? }))
            .collect::<Result<Vec<_>>>()?;
        AtomicTracePovm::new(repr.dim, atoms)
    }
}

impl JsonFormat for AutocovarianceSequence {
    type Repr = AutocovJson;

    fn to_repr(&self) -> AutocovJson {
        AutocovJson { dim: self.dim(), max_lag: self.max_lag(), values: self.values().iter().map(Into::into).collect() }
    }

    fn from_repr(repr: AutocovJson) -> Result<Self> {
        dims_match("autocovariance lag count", repr.max_lag + 1, repr.values.len())?;
        let values = repr.values.into_iter().map(TryInto::try_into).collect::<Result<Vec<_>>>()?;
        AutocovarianceSequence::new(repr.dim, values)
    }
}

impl JsonFormat for ProcessSample {
    type Repr = SeriesJson;

    fn to_repr(&self) -> SeriesJson {
        SeriesJson {
            dim: self.dim(),
            period: self.period(),
            realizations: self.realizations(),
            values: self
                .values()
                .iter()
                .map(|ens| ens.iter().map(|x| x.iter().copied().map(pair).collect()).collect())
                .collect(),
        }
    }

    fn from_repr(repr: SeriesJson) -> Result<Self> {
        dims_match("series period", repr.period, repr.values.len())?;
        let values = repr
            .values
            .into_iter()
            .map(|rows| {
                dims_match("series realizations", repr.realizations, rows.len())?;
                let vectors: Vec<Vec<C64>> = rows.into_iter().map(|x| x.into_iter().map(unpair).collect()).collect();
                VectorEnsemble::from_vectors(repr.dim, &vectors)
            })
            .collect::<Result<Vec<_>>>()?;
        ProcessSample::new(repr.dim, values)
    }
}

impl JsonFormat for TransferFunction {
    type Repr = TransferJson;

    fn to_repr(&self) -> TransferJson {
        TransferJson {
            in_dim: self.in_dim(),
            out_dim: self.out_dim(),
            freqs: self.freqs().to_vec(),
            ops: self.ops().iter().map(Into::into).collect(),
            domains: if self.is_total() {
                None
            } else {
                Some(self.domains().iter().map(|d| d.as_ref().map(Into::into)).collect())
            },
        }
    }

    fn from_repr(repr: TransferJson) -> Result<Self> {
        let ops = repr.ops.into_iter().map(TryInto::try_into).collect::<Result<Vec<ComplexOperator>>>()?;
        let phi = TransferFunction::new(repr.freqs, ops)?;
        dims_match("transfer input dimension", repr.in_dim, phi.in_dim())?;
        dims_match("transfer output dimension", repr.out_dim, phi.out_dim())?;
        match repr.domains {
            None => Ok(phi),
            Some(domains) => {
                let domains = domains
                    .into_iter()
                    .map(|d| d.map(TryInto::try_into).transpose())
                    .collect::<Result<Vec<Option<ComplexOperator>>>>()?;
                phi.with_domains(domains)
            }
        }
    }
}

impl JsonFormat for FirFilter {
    type Repr = FirJson;

    fn to_repr(&self) -> FirJson {
        FirJson { taps: self.taps().map(|(s, op)| TapJson { s, op: op.into() }).collect() }
    }

    fn from_repr(repr: FirJson) -> Result<Self> {
        let taps = repr.taps.into_iter().map(|t| Ok((t.s, t.op.try_into()?))).collect::<Result<Vec<_>>>()?;
        FirFilter::new(taps)
    }
}

/// Per-atom eigenvalues and eigenvectors; vectors beyond the rank are zero.
pub fn ckl_report(sys: &CklSystem) -> CklReportJson {
    let nu = sys.source();
    CklReportJson {
        atoms: (0..sys.len())
            .map(|j| CklAtomJson {
                freq: nu.atoms()[j].freq,
                sigmas: sys.sigmas(j),
                vectors: (0..sys.dim()).map(|n| sys.vector(j, n).into_iter().map(pair).collect()).collect(),
                rank: sys.rank(j),
                mass: nu.weight(j).trace().re,
            })
            .collect(),
        completeness_residual: sys.completeness_residual(),
    }
}

pub fn hfpca_report(report: &HfpcaReport) -> HfpcaReportJson {
    HfpcaReportJson {
        q: report.q.clone(),
        optimal_error: report.optimal_error,
        achieved_error: report.achieved_error,
        tie_warnings: report.tie_warnings.clone(),
    }
}
