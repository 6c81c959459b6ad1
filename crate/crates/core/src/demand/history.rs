//! Demand-history CSV: a `day` column followed by one column per product,
//! one row per day, non-negative integer demands.

use std::io::Read;
use std::path::Path;

use crate::{Error, Result};

/// Daily demand history of one product.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductHistory {
    pub id: String,
    pub demands: Vec<u64>,
}

pub fn read_history(path: &Path) -> Result<Vec<ProductHistory>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_history(file, path)
}

pub fn parse_history<R: Read>(reader: R, path: &Path) -> Result<Vec<ProductHistory>> {
    let csv_err = |row: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = match rdr.headers() {
        Ok(h) if !h.is_empty() && !(h.len() == 1 && h[0].is_empty()) => h.clone(),
        Ok(_) => return Err(Error::NoObservations),
        Err(e) => return Err(csv_err(1, e.to_string())),
    };
    if !headers[0].eq_ignore_ascii_case("day") {
        return Err(csv_err(1, "first column must be `day`".into()));
    }
    if headers.len() < 2 {
        return Err(csv_err(1, "no product columns".into()));
    }

    let mut products: Vec<ProductHistory> = headers
        .iter()
        .skip(1)
        .map(|id| ProductHistory {
            id: id.to_string(),
            demands: Vec::new(),
        })
        .collect();

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            csv_err(row, e.to_string())
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != headers.len() {
            return Err(csv_err(
                row,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (product, field) in products.iter_mut().zip(record.iter().skip(1)) {
            let value: i64 = field
                .parse()
                .map_err(|_| csv_err(row, format!("`{field}` is not an integer demand")))?;
            if value < 0 {
                return Err(csv_err(row, format!("negative demand {value}")));
            }
            product.demands.push(value as u64);
        }
    }

    if products[0].demands.is_empty() {
        return Err(Error::NoObservations);
    }
    Ok(products)
}

/// Writes histories in the same layout [`read_history`] accepts.
pub fn write_history<W: std::io::Write>(writer: W, products: &[ProductHistory]) -> Result<()> {
    let days = products.first().map_or(0, |p| p.demands.len());
    if products.iter().any(|p| p.demands.len() != days) {
        return Err(Error::invalid("histories must have equal length"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| Error::invalid(e.to_string());
    let mut header = vec!["day".to_string()];
    header.extend(products.iter().map(|p| p.id.clone()));
    w.write_record(&header).map_err(to_err)?;
    for day in 0..days {
        let mut row = vec![(day + 1).to_string()];
        row.extend(products.iter().map(|p| p.demands[day].to_string()));
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::invalid(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<ProductHistory>> {
        parse_history(s.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn parses_columns() {
        let h = parse("day,A,B\n1,3,0\n2,0,5\n").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h[0].id, "A");
        assert_eq!(h[0].demands, vec![3, 0]);
        assert_eq!(h[1].demands, vec![0, 5]);
    }

    #[test]
    fn empty_input_has_no_observations() {
        assert!(matches!(parse(""), Err(Error::NoObservations)));
        assert!(matches!(parse("day,A\n"), Err(Error::NoObservations)));
    }

    #[test]
    fn negative_demand_reports_row() {
        match parse("day,A\n1,3\n2,-4\n") {
            Err(Error::Csv { row, message, .. }) => {
                assert_eq!(row, 3);
                assert!(message.contains("negative"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_row() {
        assert!(matches!(parse("day,A\n1,3\n2,x\n"), Err(Error::Csv { row: 3, .. })));
        assert!(matches!(parse("day,A,B\n1,3,4\n2,1\n"), Err(Error::Csv { row: 3, .. })));
    }

    #[test]
    fn write_then_read() {
        let products = vec![
            ProductHistory { id: "A".into(), demands: vec![1, 0, 7] },
            ProductHistory { id: "B".into(), demands: vec![0, 0, 2] },
        ];
        let mut buf = Vec::new();
        write_history(&mut buf, &products).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), products);
    }
}
