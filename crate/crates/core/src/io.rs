//! Returns files: a CSV with a `date` column (ISO-8601, strictly increasing)
//! followed by one column per instrument holding daily closes or daily
//! percentage returns.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::fmt17;
use crate::series::Series;

/// What the instrument columns hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IngestMode {
    /// Closing prices; converted to `100·(P_t/P_{t−1} − 1)`.
    Prices,
    /// Percentage returns, used as-is.
    Returns,
}

impl FromStr for IngestMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prices" => Ok(IngestMode::Prices),
            "returns" => Ok(IngestMode::Returns),
            _ => Err(Error::param("mode", format!("expected 'prices' or 'returns', got '{s}'"))),
        }
    }
}

impl fmt::Display for IngestMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IngestMode::Prices => "prices",
            IngestMode::Returns => "returns",
        })
    }
}

/// One instrument's return series with its date axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub returns: Series,
}

impl Instrument {
    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

const DATE_FORMAT: &str = "%Y-%m-%d";

fn data_err(row: usize, column: &str, reason: impl Into<String>) -> Error {
    Error::Data {
        row,
        column: column.to_string(),
        reason: reason.into(),
    }
}

/// Reads a returns file. Rows are numbered from 1 at the first data line.
pub fn read_returns<R: Read>(reader: R, mode: IngestMode) -> Result<Vec<Instrument>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    if header.is_empty() || header.get(0).map(str::trim) != Some("date") {
        return Err(data_err(0, header.get(0).unwrap_or(""), "first column must be 'date'"));
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(data_err(0, &format!("#{}", i + 2), "empty instrument name"));
        }
        if names[..i].contains(n) {
            return Err(data_err(0, n, "duplicate instrument name"));
        }
    }
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| data_err(row, "", e.to_string()))?;
        if rec.len() != names.len() + 1 {
            return Err(data_err(
                row,
                "",
                format!("expected {} fields, found {}", names.len() + 1, rec.len()),
            ));
        }
        let raw = rec[0].trim();
        let date = NaiveDate::parse_from_str(raw, DATE_FORMAT)
            .map_err(|e| data_err(row, "date", format!("'{raw}' is not an ISO-8601 date: {e}")))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(data_err(row, "date", format!("{date} does not follow {prev}")));
            }
        }
        dates.push(date);
        for (j, name) in names.iter().enumerate() {
            let cell = rec[j + 1].trim();
            if cell.is_empty() {
                return Err(data_err(row, name, "missing value"));
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| data_err(row, name, format!("'{cell}' is not a number")))?;
            if !v.is_finite() {
                return Err(data_err(row, name, format!("'{cell}' is not finite")));
            }
            if mode == IngestMode::Prices && v <= 0.0 {
                return Err(data_err(row, name, format!("price {v} is not positive")));
            }
            cols[j].push(v);
        }
    }
    let mut out = Vec::with_capacity(names.len());
    for (name, col) in names.into_iter().zip(cols) {
        let (d, r) = match mode {
            IngestMode::Returns => (dates.clone(), col),
            IngestMode::Prices => (
                dates.iter().skip(1).copied().collect(),
                col.windows(2).map(|w| 100.0 * (w[1] / w[0] - 1.0)).collect(),
            ),
        };
        let returns = Series::new(r).map_err(|e| match e {
            Error::EmptySeries => data_err(0, &name, "no observations"),
            other => other,
        })?;
        out.push(Instrument { name, dates: d, returns });
    }
    Ok(out)
}

/// [`read_returns`] on a file path.
pub fn ingest_returns(path: &Path, mode: IngestMode) -> Result<Vec<Instrument>> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_returns(std::io::BufReader::new(f), mode)
}

/// Writes instruments sharing one date axis as a returns file, values at 17
/// significant digits so that re-reading reproduces them exactly.
pub fn write_returns<W: Write>(out: W, instruments: &[Instrument]) -> Result<()> {
    let Some(first) = instruments.first() else {
        return Err(Error::param("instruments", "nothing to write"));
    };
    for inst in instruments {
        if inst.dates != first.dates || inst.len() != inst.dates.len() {
            return Err(Error::param(
                "instruments",
                format!("'{}' does not share the common date axis", inst.name),
            ));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["date".to_string()];
    header.extend(instruments.iter().map(|i| i.name.clone()));
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for (t, d) in first.dates.iter().enumerate() {
        let mut rec = vec![d.format(DATE_FORMAT).to_string()];
        rec.extend(instruments.iter().map(|i| fmt17(i.returns.values()[t])));
        w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_returns_file(path: &Path, instruments: &[Instrument]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_returns(std::io::BufWriter::new(f), instruments)
}

/// Consecutive calendar dates starting at 2000-01-01, for simulated series.
pub fn synthetic_dates(len: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    start.iter_days().take(len).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str, mode: IngestMode) -> Result<Vec<Instrument>> {
        read_returns(s.as_bytes(), mode)
    }

    #[test]
    fn prices_to_percentage_returns() {
        let v = read("date,A\n2020-01-01,100\n2020-01-02,101\n2020-01-03,99.99\n", IngestMode::Prices).unwrap();
        let r = v[0].returns.values();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-9 && (r[1] + 1.0).abs() < 1e-9);
        assert_eq!(v[0].dates[0], NaiveDate::from_ymd_opt(2020, 1, 2).unwrap());
    }

    #[test]
    fn returns_pass_through() {
        let v = read("date,A,B\n2020-01-01,0.5,-1\n2020-01-02,-0.25,2\n", IngestMode::Returns).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].returns.values(), &[0.5, -0.25]);
        assert_eq!(v[1].name, "B");
    }

    #[test]
    fn missing_cell_names_row_and_column() {
        let e = read("date,A,B\n2020-01-01,1,2\n2020-01-02,,3\n", IngestMode::Returns).unwrap_err();
        match e {
            Error::Data { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "A");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            read("date,A\n2020-01-01,1\n2020-01-02,nan\n", IngestMode::Returns).unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn schema_violations() {
        assert!(read("day,A\n2020-01-01,1\n", IngestMode::Returns).is_err());
        assert!(read("date,A\n2020-01-02,1\n2020-01-01,1\n", IngestMode::Returns).is_err());
        assert!(read("date,A\n2020-01-01,1\n2020-01-01,1\n", IngestMode::Returns).is_err());
        assert!(read("date,A\n01/02/2020,1\n", IngestMode::Returns).is_err());
        assert!(read("date,A\n2020-01-01,1,2\n", IngestMode::Returns).is_err());
        assert!(read("date,A\n2020-01-01,0\n2020-01-02,1\n", IngestMode::Prices).is_err());
        assert!(read("date,A,A\n2020-01-01,1,1\n", IngestMode::Returns).is_err());
        assert!(read("date,A\n2020-01-01,1\n", IngestMode::Prices).is_err());
    }

    #[test]
    fn empty_instrument_list() {
        assert!(read("date\n2020-01-01\n", IngestMode::Returns).unwrap().is_empty());
    }

    #[test]
    fn round_trip_is_exact() {
        let dates = synthetic_dates(50);
        let mut rng = crate::rng::stream(1, 0);
        use rand::Rng;
        let insts: Vec<Instrument> = ["x", "y"]
            .iter()
            .map(|n| Instrument {
                name: n.to_string(),
                dates: dates.clone(),
                returns: Series::new((0..50).map(|_| rng.random::<f64>() * 1e3 - 500.0).collect()).unwrap(),
            })
            .collect();
        let mut buf = Vec::new();
        write_returns(&mut buf, &insts).unwrap();
        let back = read_returns(buf.as_slice(), IngestMode::Returns).unwrap();
        assert_eq!(back, insts);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("prices".parse::<IngestMode>().unwrap(), IngestMode::Prices);
        assert!("levels".parse::<IngestMode>().is_err());
    }
}
