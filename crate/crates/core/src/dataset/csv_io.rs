use std::io::{self, Read, Write};

use super::{Dataset, DatasetError, FeatureSchema, Record, LABEL_COLUMN, NUM_FEATURES};

/// Reads a dataset CSV. Columns may appear in any order; they are mapped
/// onto schema order. Cells must be the literal characters `0` or `1`.
pub fn load_csv<R: Read>(source: R) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    // slot i of `columns` is the file position of schema column i (8 = label)
    let headers = reader.headers()?.clone();
    let mut columns = [usize::MAX; NUM_FEATURES + 1];
    for (pos, name) in headers.iter().enumerate() {
        let slot = if name == LABEL_COLUMN {
            NUM_FEATURES
        } else {
            FeatureSchema::position(name).ok_or_else(|| DatasetError::UnexpectedColumn(name.to_string()))?
        };
        if columns[slot] != usize::MAX {
            return Err(DatasetError::DuplicateColumn(name.to_string()));
        }
        columns[slot] = pos;
    }
    if let Some(missing) = columns.iter().position(|&c| c == usize::MAX) {
        let name = FeatureSchema::NAMES.get(missing).copied().unwrap_or(LABEL_COLUMN);
        return Err(DatasetError::MissingColumn(name.to_string()));
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != headers.len() {
            return Err(DatasetError::RowLength {
                line,
                found: row.len(),
                expected: headers.len(),
            });
        }
        let mut bits = [false; NUM_FEATURES + 1];
        for (slot, &pos) in columns.iter().enumerate() {
            bits[slot] = match &row[pos] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(DatasetError::NonBinary {
                        column: headers[pos].to_string(),
                        value: other.to_string(),
                        line,
                    })
                }
            };
        }
        let mut features = [false; NUM_FEATURES];
        features.copy_from_slice(&bits[..NUM_FEATURES]);
        records.push(Record::new(features, bits[NUM_FEATURES]));
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyBody);
    }
    Ok(Dataset::new(records, "csv"))
}

/// Writes the canonical dataset CSV: schema-ordered header, `0`/`1` cells,
/// LF line endings.
pub fn write_csv<W: Write>(ds: &Dataset, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    out.write_all(FeatureSchema::NAMES.join(",").as_bytes())?;
    out.write_all(b",label\n")?;
    let mut line = [0u8; 2 * (NUM_FEATURES + 1)];
    for r in ds.records() {
        for (i, &b) in r.features.iter().chain(std::iter::once(&r.label)).enumerate() {
            line[2 * i] = if b { b'1' } else { b'0' };
            line[2 * i + 1] = b',';
        }
        line[line.len() - 1] = b'\n';
        out.write_all(&line)?;
    }
    out.flush()
}
