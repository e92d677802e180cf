use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::ckks::{Mode, SchemeParams};
use crate::error::{Error, Result};
use crate::fault::FaultSpec;
use crate::metrics::Metrics;

/// Column order of the results file.
pub const CSV_HEADER: [&str; 18] = [
    "mode",
    "N",
    "q0_bits",
    "L",
    "delta_log2",
    "slots",
    "stage",
    "target",
    "limb",
    "coeff",
    "bit",
    "wrapped",
    "scheme_seed",
    "input_seed",
    "l2",
    "mse",
    "frac_correct",
    "category",
];

/// One row: a fault trial, or the golden run of a seed pair when `fault` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub mode: Mode,
    pub ring_degree: usize,
    pub q0_bits: u32,
    pub limbs: usize,
    pub delta_log2: u32,
    pub slots: usize,
    pub fault: Option<FaultSpec>,
    pub wrapped: bool,
    pub scheme_seed: u64,
    pub input_seed: u64,
    pub metrics: Metrics,
}

impl TrialRecord {
    pub fn new(
        params: &SchemeParams,
        fault: Option<FaultSpec>,
        wrapped: bool,
        scheme_seed: u64,
        input_seed: u64,
        metrics: Metrics,
    ) -> Self {
        Self {
            mode: params.mode,
            ring_degree: params.ring_degree,
            q0_bits: params.q0_bits,
            limbs: params.limbs,
            delta_log2: params.delta_log2,
            slots: params.slots,
            fault,
            wrapped,
            scheme_seed,
            input_seed,
            metrics,
        }
    }

    pub fn is_golden(&self) -> bool {
        self.fault.is_none()
    }

    fn to_row(&self) -> Row {
        Row {
            mode: self.mode.as_str().to_string(),
            n: self.ring_degree,
            q0_bits: self.q0_bits,
            l: self.limbs,
            delta_log2: self.delta_log2,
            slots: self.slots,
            stage: self.fault.map_or("golden", |f| f.stage.as_str()).to_string(),
            target: self.fault.map_or("none", |f| f.target.as_str()).to_string(),
            limb: self.fault.map(|f| f.limb),
            coeff: self.fault.map(|f| f.coeff),
            bit: self.fault.map(|f| f.bit),
            wrapped: u8::from(self.wrapped),
            scheme_seed: self.scheme_seed,
            input_seed: self.input_seed,
            l2: self.metrics.l2,
            mse: self.metrics.mse,
            frac_correct: self.metrics.frac_correct,
            category: self.metrics.category.as_str().to_string(),
        }
    }

    fn from_row(row: Row) -> Result<Self> {
        let bad = |what: &str| Error::Argument(format!("malformed results row: {what}"));
        let fault = match (row.stage.as_str(), row.limb, row.coeff, row.bit) {
            ("golden", None, None, None) if row.target == "none" => None,
            ("golden", ..) => return Err(bad("golden row with fault fields")),
            (stage, Some(limb), Some(coeff), Some(bit)) => Some(FaultSpec::new(
                stage.parse()?,
                row.target.parse()?,
                limb,
                coeff,
                bit,
            )?),
            _ => return Err(bad("fault row without limb/coeff/bit")),
        };
        let wrapped = match row.wrapped {
            0 => false,
            1 => true,
            _ => return Err(bad("wrapped must be 0 or 1")),
        };
        Ok(Self {
            mode: row.mode.parse()?,
            ring_degree: row.n,
            q0_bits: row.q0_bits,
            limbs: row.l,
            delta_log2: row.delta_log2,
            slots: row.slots,
            fault,
            wrapped,
            scheme_seed: row.scheme_seed,
            input_seed: row.input_seed,
            metrics: Metrics {
                l2: row.l2,
                mse: row.mse,
                frac_correct: row.frac_correct,
                category: row.category.parse()?,
            },
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    mode: String,
    #[serde(rename = "N")]
    n: usize,
    q0_bits: u32,
    #[serde(rename = "L")]
    l: usize,
    delta_log2: u32,
    slots: usize,
    stage: String,
    target: String,
    limb: Option<usize>,
    coeff: Option<usize>,
    bit: Option<u32>,
    wrapped: u8,
    scheme_seed: u64,
    input_seed: u64,
    l2: f64,
    mse: f64,
    frac_correct: f64,
    category: String,
}

/// Streams records as CSV with the fixed header.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W) -> Self {
        Self {
            inner: csv::WriterBuilder::new().has_headers(true).from_writer(w),
        }
    }

    pub fn write(&mut self, r: &TrialRecord) -> Result<()> {
        self.inner.serialize(r.to_row())?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(e.into_error()))
    }
}

/// Parse a results file, checking the header.
pub fn read_records<R: Read>(r: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Argument(format!("unexpected header {header:?}")));
    }
    rdr.deserialize::<Row>()
        .map(|row| TrialRecord::from_row(row?))
        .collect()
}
