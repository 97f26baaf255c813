use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use crate::CliError;

/// Reads observations from `path` ("-" for stdin).
///
/// Without `column`, the file holds one value per line; blank lines and
/// anything after `#` are ignored. With `column`, the file is CSV with a
/// header row and the named column is read.
pub fn read_observations(path: &Path, column: Option<&str>) -> Result<Vec<f64>, CliError> {
    let reader: Box<dyn Read> = if path == Path::new("-") {
        Box::new(io::stdin())
    } else {
        Box::new(
            File::open(path).map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?,
        )
    };
    match column {
        None => read_lines(BufReader::new(reader), path),
        Some(name) => read_column(reader, name, path),
    }
}

fn parse_value(text: &str, path: &Path, line: usize) -> Result<f64, CliError> {
    let x: f64 = text
        .parse()
        .map_err(|_| CliError::input(format!("{}:{line}: not a number: {text:?}", path.display())))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::input(format!("{}:{line}: observations must be finite", path.display())))
    }
}

fn read_lines<R: BufRead>(reader: R, path: &Path) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let text = line.split('#').next().unwrap_or("").trim();
        if !text.is_empty() {
            out.push(parse_value(text, path, i + 1)?);
        }
    }
    Ok(out)
}

fn read_column<R: Read>(reader: R, name: &str, path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        .clone();
    let idx = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::input(format!("{}: no column named {name:?}", path.display())))?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        match record.get(idx) {
            Some(text) if !text.is_empty() => out.push(parse_value(text, path, line)?),
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_skip_comments_and_blanks() {
        let text = "# header\n1.5\n\n  2 # trailing\n-3e-1\n";
        let got = read_lines(text.as_bytes(), Path::new("x")).unwrap();
        assert_eq!(got, vec![1.5, 2.0, -0.3]);
    }

    #[test]
    fn bad_lines_are_input_errors() {
        let e = read_lines("1\nabc\n".as_bytes(), Path::new("x")).unwrap_err();
        assert_eq!(e.code, 2);
        assert!(e.message.contains("x:2"));
        assert!(read_lines("inf\n".as_bytes(), Path::new("x")).is_err());
    }

    #[test]
    fn csv_column() {
        let text = "id,value\n# note\na,1.0\nb,2.5\nc,\n";
        let got = read_column(text.as_bytes(), "value", Path::new("x")).unwrap();
        assert_eq!(got, vec![1.0, 2.5]);
        assert!(read_column(text.as_bytes(), "missing", Path::new("x")).is_err());
    }
}
