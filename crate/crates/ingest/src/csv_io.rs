//! Annual series in CSV: `long` files hold one series (`year,value`), `wide`
//! files hold several (`year,name1,name2,...`). A header row is mandatory
//! and years must increase by exactly one per row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use vecmkit_core::series::{Dataset, Series};

use crate::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsvMode {
    Long,
    #[default]
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvLayout {
    pub mode: CsvMode,
    pub delimiter: u8,
}

impl Default for CsvLayout {
    fn default() -> Self {
        CsvLayout {
            mode: CsvMode::Wide,
            delimiter: b',',
        }
    }
}

impl CsvLayout {
    pub fn long() -> Self {
        CsvLayout {
            mode: CsvMode::Long,
            ..Default::default()
        }
    }

    pub fn wide() -> Self {
        CsvLayout::default()
    }
}

pub fn read_csv(path: &Path, layout: &CsvLayout) -> Result<Dataset, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_csv_from(file, layout)
}

pub fn read_csv_str(text: &str, layout: &CsvLayout) -> Result<Dataset, IngestError> {
    read_csv_from(text.as_bytes(), layout)
}

fn csv_error(e: csv::Error) -> IngestError {
    let (line, column) = e
        .position()
        .map(|p| (p.line(), 0))
        .unwrap_or((0, 0));
    IngestError::ParseError {
        line,
        column,
        message: e.to_string(),
    }
}

fn read_csv_from<R: Read>(input: R, layout: &CsvLayout) -> Result<Dataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(layout.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.len() < 2 {
        return Err(IngestError::ParseError {
            line: 1,
            column: header.len() + 1,
            message: "header needs a year column and at least one value column".into(),
        });
    }
    if layout.mode == CsvMode::Long && header.len() != 2 {
        return Err(IngestError::ParseError {
            line: 1,
            column: 3,
            message: format!("long layout expects `year,value`, found {} columns", header.len()),
        });
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut years: Vec<i32> = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let year_text = record.get(0).unwrap_or("");
        let year: i32 = year_text.parse().map_err(|_| IngestError::ParseError {
            line,
            column: 1,
            message: format!("`{year_text}` is not a year"),
        })?;
        if let Some(&prev) = years.last() {
            if year <= prev {
                return Err(IngestError::ParseError {
                    line,
                    column: 1,
                    message: format!("year {year} does not follow {prev}; years must increase"),
                });
            }
            if year != prev + 1 {
                return Err(IngestError::GapInYears(prev + 1));
            }
        }
        years.push(year);
        for (j, col) in columns.iter_mut().enumerate() {
            let cell = record.get(j + 1).unwrap_or("");
            let value: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| IngestError::NonNumeric {
                line,
                column: j + 2,
                value: cell.to_string(),
            })?;
            col.push(value);
        }
    }
    let start = *years.first().ok_or_else(|| IngestError::ParseError {
        line: 2,
        column: 1,
        message: "no data rows".into(),
    })?;
    let series = names
        .into_iter()
        .zip(columns)
        .map(|(name, values)| Series::new(name, start, values))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset::new(series)?)
}

/// Writes a dataset; shortest round-trip formatting keeps values bit-exact.
pub fn write_csv(d: &Dataset, path: &Path, layout: &CsvLayout) -> Result<(), IngestError> {
    let mut file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_csv_to(d, &mut file, layout)?;
    file.flush().map_err(|e| IngestError::io(path, e))
}

pub fn write_csv_to<W: Write>(d: &Dataset, out: W, layout: &CsvLayout) -> Result<(), IngestError> {
    if layout.mode == CsvMode::Long && d.dimension() != 1 {
        return Err(IngestError::ParseError {
            line: 0,
            column: 0,
            message: format!("long layout holds one series, dataset has {}", d.dimension()),
        });
    }
    let mut w = csv::WriterBuilder::new().delimiter(layout.delimiter).from_writer(out);
    let mut header = vec!["year".to_string()];
    header.extend(d.names().iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(csv_error)?;
    for i in 0..d.len() {
        let mut row = vec![(d.start_year() + i as i32).to_string()];
        row.extend(d.series().iter().map(|s| format!("{:?}", s.values()[i])));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| IngestError::io("<csv writer>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_file() {
        let d = read_csv_str("year,a,b\n2004,1.5,2\n2005,1.25,3\n2006,1,4\n", &CsvLayout::wide()).unwrap();
        assert_eq!(d.dimension(), 2);
        assert_eq!(d.start_year(), 2004);
        assert_eq!(d.get("b").unwrap().values(), &[2.0, 3.0, 4.0]);
    }

    #[test]
    fn long_file() {
        let d = read_csv_str("year,gdp\n2010,5\n2011,6\n", &CsvLayout::long()).unwrap();
        assert_eq!(d.names(), vec!["gdp"]);
        assert!(read_csv_str("year,a,b\n2010,1,2\n", &CsvLayout::long()).is_err());
    }

    #[test]
    fn gap_in_years() {
        let err = read_csv_str("year,a\n2008,1\n2009,2\n2011,3\n", &CsvLayout::wide()).unwrap_err();
        assert!(matches!(err, IngestError::GapInYears(2010)), "{err}");
    }

    #[test]
    fn non_numeric_cell_reports_location() {
        let err = read_csv_str("year,a,b\n2008,1,2\n2009,n/a,3\n", &CsvLayout::wide()).unwrap_err();
        match err {
            IngestError::NonNumeric { line, column, value } => {
                assert_eq!((line, column, value.as_str()), (3, 2, "n/a"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn decreasing_years_rejected() {
        assert!(matches!(
            read_csv_str("year,a\n2009,1\n2008,2\n", &CsvLayout::wide()),
            Err(IngestError::ParseError { line: 3, .. })
        ));
    }

    #[test]
    fn header_only_is_an_error() {
        assert!(read_csv_str("year,a\n", &CsvLayout::wide()).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let d = read_csv_str(
            "year,x,y\n2000,0.1,117615220590\n2001,0.30000000000000004,1e-300\n",
            &CsvLayout::wide(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv_to(&d, &mut buf, &CsvLayout::wide()).unwrap();
        let back = read_csv_str(std::str::from_utf8(&buf).unwrap(), &CsvLayout::wide()).unwrap();
        assert_eq!(d, back);
    }
}
