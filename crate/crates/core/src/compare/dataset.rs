use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};

/// Datasets smaller than this are rejected by the statistics routines.
pub const MIN_STATISTICS_RECORDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    /// Plate–plate pressure, Pa.
    Pressure,
    /// Sphere–plate force, N.
    Force,
}

impl DatasetKind {
    /// CSV header used on disk, values in mPa or pN.
    pub fn header(self) -> [&'static str; 3] {
        match self {
            DatasetKind::Pressure => ["z_nm", "value_mPa", "sigma_mPa"],
            DatasetKind::Force => ["z_nm", "value_pN", "sigma_pN"],
        }
    }

    /// Multiplier from the on-disk unit to SI.
    pub fn unit_to_si(self) -> f64 {
        match self {
            DatasetKind::Pressure => 1e-3,
            DatasetKind::Force => 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Record {
    /// Separation, m.
    pub z: f64,
    /// Pa or N.
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    kind: DatasetKind,
    records: Vec<Record>,
    label: String,
}

impl Dataset {
    /// Sorts by z and validates. Zero sigma is accepted here so that
    /// noiseless synthetic data can be represented; files must carry σ > 0.
    pub fn new(kind: DatasetKind, mut records: Vec<Record>, label: impl Into<String>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if !(r.z > 0.0) || !r.z.is_finite() {
                return Err(Error::Dataset {
                    row: i + 1,
                    reason: format!("separation must be positive, got {}", r.z),
                });
            }
            if !r.value.is_finite() {
                return Err(Error::Dataset {
                    row: i + 1,
                    reason: "value is not finite".into(),
                });
            }
            if !(r.sigma >= 0.0) || !r.sigma.is_finite() {
                return Err(Error::Dataset {
                    row: i + 1,
                    reason: format!("sigma must be non-negative, got {}", r.sigma),
                });
            }
        }
        records.sort_by(|a, b| a.z.total_cmp(&b.z));
        if let Some(i) = records.windows(2).position(|w| w[0].z == w[1].z) {
            return Err(Error::Dataset {
                row: i + 2,
                reason: format!("duplicate separation {} m", records[i].z),
            });
        }
        Ok(Dataset {
            kind,
            records,
            label: label.into(),
        })
    }

    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn require_statistics(&self) -> Result<()> {
        if self.records.len() < MIN_STATISTICS_RECORDS {
            return Err(Error::invalid(
                "dataset",
                format!(
                    "statistics need at least {MIN_STATISTICS_RECORDS} records, got {}",
                    self.records.len()
                ),
            ));
        }
        Ok(())
    }

    pub(crate) fn relabelled(&self, records: Vec<Record>, label: String) -> Result<Self> {
        Dataset::new(self.kind, records, label)
    }
}

/// Reads `z_nm,value_mPa,sigma_mPa` (pressure) or `z_nm,value_pN,sigma_pN`
/// (force) CSV into SI units. Row numbers in errors count file lines.
pub fn load_dataset<R: Read>(source: R, kind: DatasetKind, label: impl Into<String>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(source);
    let expected = kind.header();
    let header = reader.headers().map_err(|e| Error::Dataset {
        row: 1,
        reason: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Dataset {
            row: 1,
            reason: format!(
                "expected header `{}`, got `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let scale = kind.unit_to_si();
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Dataset {
            row: e.position().map_or(0, |p| p.line() as usize),
            reason: format!("malformed row: {e}"),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Dataset {
                    row: line,
                    reason: format!("malformed row: bad `{}`", expected[i]),
                })
        };
        if row.len() != 3 {
            return Err(Error::Dataset {
                row: line,
                reason: format!("malformed row: expected 3 fields, got {}", row.len()),
            });
        }
        let (z_nm, value, sigma) = (field(0)?, field(1)?, field(2)?);
        if !(z_nm > 0.0) {
            return Err(Error::Dataset {
                row: line,
                reason: format!("z_nm must be positive, got {z_nm}"),
            });
        }
        if !(sigma > 0.0) {
            return Err(Error::Dataset {
                row: line,
                reason: format!("sigma must be positive, got {sigma}"),
            });
        }
        records.push(Record {
            z: z_nm / 1e9,
            value: value * scale,
            sigma: sigma * scale,
        });
        lines.push(line);
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].z.total_cmp(&records[b].z));
    if let Some(w) = order.windows(2).find(|w| records[w[0]].z == records[w[1]].z) {
        let row = lines[w[0]].max(lines[w[1]]);
        return Err(Error::Dataset {
            row,
            reason: format!("duplicate z_nm {}", records[w[0]].z * 1e9),
        });
    }
    Dataset::new(kind, records, label)
}

/// Separation in nm, rounded to 1e-6 nm so grid points print cleanly.
pub fn nm(z: f64) -> f64 {
    (z * 1e15).round() / 1e6
}

/// Writes the dataset in the on-disk schema of `load_dataset`.
pub fn write_dataset<W: Write>(ds: &Dataset, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let scale = ds.kind.unit_to_si();
    let table_err = |e: csv::Error| Error::Dataset {
        row: 0,
        reason: e.to_string(),
    };
    w.write_record(ds.kind.header()).map_err(table_err)?;
    for r in &ds.records {
        w.write_record([
            format!("{}", nm(r.z)),
            format!("{}", r.value / scale),
            format!("{}", r.sigma / scale),
        ])
        .map_err(table_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_row(text: &str) -> (usize, String) {
        match load_dataset(text.as_bytes(), DatasetKind::Pressure, "t").unwrap_err() {
            Error::Dataset { row, reason } => (row, reason),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn loads_in_si_units_sorted() {
        let text = "z_nm,value_mPa,sigma_mPa\n300,1.5,0.2\n# note\n260, 2.0 ,0.3\n400,0.5,0.1\n";
        let ds = load_dataset(text.as_bytes(), DatasetKind::Pressure, "t").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.records()[0].z, 260e-9);
        assert!((ds.records()[0].value - 2.0e-3).abs() < 1e-18);
        assert!(ds.require_statistics().is_err());
        let force = load_dataset(
            "z_nm,value_pN,sigma_pN\n200,-1.0,0.5\n".as_bytes(),
            DatasetKind::Force,
            "f",
        )
        .unwrap();
        assert!((force.records()[0].value + 1e-12).abs() < 1e-27);
    }

    #[test]
    fn row_errors() {
        let (row, reason) = err_row("z_nm,value_mPa,sigma_mPa\n300,1.5,0.2\n310,1.0,0\n");
        assert_eq!(row, 3);
        assert!(reason.contains("sigma"));
        let (row, reason) = err_row("z_nm,value_mPa,sigma_mPa\n300,1.5,0.2\n310,abc,1\n");
        assert_eq!(row, 3);
        assert!(reason.contains("malformed"));
        let (row, reason) = err_row("z_nm,value_mPa,sigma_mPa\n300,1.5,0.2\n310,1,1\n300,2,1\n");
        assert_eq!(row, 4);
        assert!(reason.contains("duplicate"));
        let (row, _) = err_row("z_nm,value_mPa,sigma_mPa\n300,1.5\n");
        assert_eq!(row, 2);
        let (row, reason) = err_row("z_nm,value_pN,sigma_pN\n300,1.5,1\n");
        assert_eq!(row, 1);
        assert!(reason.contains("header"));
    }

    #[test]
    fn write_then_load_round_trip() {
        let recs: Vec<Record> = (0..12)
            .map(|i| Record {
                z: (200.0 + 10.0 * i as f64) * 1e-9,
                value: -1e-3 / (i + 1) as f64,
                sigma: 2e-4,
            })
            .collect();
        let ds = Dataset::new(DatasetKind::Pressure, recs, "rt").unwrap();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        let back = load_dataset(buf.as_slice(), DatasetKind::Pressure, "rt").unwrap();
        for (a, b) in ds.records().iter().zip(back.records()) {
            assert!((a.z - b.z).abs() < 1e-20 && (a.value - b.value).abs() < 1e-17);
        }
    }

    #[test]
    fn zero_sigma_only_in_memory() {
        let r = vec![Record {
            z: 1e-7,
            value: 1.0,
            sigma: 0.0,
        }];
        assert!(Dataset::new(DatasetKind::Pressure, r, "").is_ok());
        let r = vec![Record {
            z: -1e-7,
            value: 1.0,
            sigma: 0.0,
        }];
        assert!(Dataset::new(DatasetKind::Pressure, r, "").is_err());
    }
}
