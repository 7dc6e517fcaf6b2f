//! Text formats for point clouds, images and distance matrices.
//!
//! Parse errors carry 1-based line and column numbers. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::filtration::{DistanceMatrix, Grid};

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - line.as_ptr() as usize + 1, tok))
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, column: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_error(line, column, format!("cannot parse '{tok}' as a number")))
}

/// One point per line, comma-separated coordinates.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in content_lines(text) {
        let mut point = Vec::new();
        let mut offset = 0;
        for field in line.split(',') {
            let lead = field.len() - field.trim_start().len();
            let column = offset + lead + 1;
            let tok = field.trim();
            if tok.is_empty() {
                return Err(parse_error(lineno, column, "empty coordinate"));
            }
            let x: f64 = number(tok, lineno, column)?;
            if !x.is_finite() {
                return Err(parse_error(lineno, column, format!("coordinate '{tok}' is not finite")));
            }
            point.push(x);
            offset += field.len() + 1;
        }
        if let Some(first) = points.first() {
            if first.len() != point.len() {
                return Err(parse_error(
                    lineno,
                    1,
                    format!("point has {} coordinates, expected {}", point.len(), first.len()),
                ));
            }
        }
        points.push(point);
    }
    Ok(points)
}

pub fn write_points(points: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for p in points {
        let row: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", row.join(",")).expect("writing to a string");
    }
    out
}

/// Header `rows cols [depth]`, then values in row-major order.
pub fn parse_image(text: &str) -> Result<Grid> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return Err(parse_error(1, 1, "missing image header"));
    };
    let mut shape = Vec::new();
    for (column, tok) in tokens(header) {
        let n: usize = number(tok, hline, column)?;
        if n == 0 {
            return Err(parse_error(hline, column, "image extents must be positive"));
        }
        shape.push(n);
    }
    if !(2..=3).contains(&shape.len()) {
        return Err(parse_error(hline, 1, "header must be 'rows cols [depth]'"));
    }
    let expected: usize = shape.iter().product();
    let mut values = Vec::with_capacity(expected);
    let mut last = (hline, 1);
    for (lineno, line) in lines {
        for (column, tok) in tokens(line) {
            if values.len() == expected {
                return Err(parse_error(lineno, column, format!("more than {expected} values")));
            }
            let v: f64 = number(tok, lineno, column)?;
            if !v.is_finite() {
                return Err(parse_error(lineno, column, format!("pixel value '{tok}' is not finite")));
            }
            values.push(v);
            last = (lineno, column);
        }
    }
    if values.len() != expected {
        return Err(parse_error(
            last.0,
            last.1,
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    Grid::new(shape, values)
}

pub fn write_image(grid: &Grid) -> String {
    let mut out = String::new();
    let header: Vec<String> = grid.shape().iter().map(usize::to_string).collect();
    writeln!(out, "{}", header.join(" ")).expect("writing to a string");
    let width = *grid.shape().last().expect("grids have an axis");
    for row in grid.values().chunks(width) {
        let row: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        writeln!(out, "{}", row.join(" ")).expect("writing to a string");
    }
    out
}

/// A square matrix, one row per line.
pub fn parse_distance_matrix(text: &str) -> Result<DistanceMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in content_lines(text) {
        let mut row = Vec::new();
        for (column, tok) in tokens(line) {
            let d: f64 = number(tok, lineno, column)?;
            if !d.is_finite() || d < 0.0 {
                return Err(parse_error(lineno, column, format!("distance '{tok}' must be non-negative")));
            }
            row.push(d);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    lineno,
                    1,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    DistanceMatrix::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn location(e: Error) -> (usize, usize) {
        match e {
            Error::Parse { line, column, .. } => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn points_round_trip() {
        let pts = vec![vec![0.1, -2.5], vec![1e-17, 3.0]];
        assert_eq!(parse_points(&write_points(&pts)).unwrap(), pts);
        assert_eq!(parse_points("# header\n\n1, 2\n3,4\n").unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn point_errors_are_located() {
        assert_eq!(location(parse_points("1,2\n3,x\n").unwrap_err()), (2, 3));
        assert_eq!(location(parse_points("1,2\n3, 4,5\n").unwrap_err()), (2, 1));
        assert_eq!(location(parse_points("1,,2\n").unwrap_err()), (1, 3));
        assert_eq!(location(parse_points("1, nan\n").unwrap_err()), (1, 4));
    }

    #[test]
    fn image_round_trip() {
        let g = Grid::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.5, 5.0, -6.0]).unwrap();
        assert_eq!(parse_image(&write_image(&g)).unwrap(), g);
        let cube = Grid::new(vec![2, 2, 2], (0..8).map(f64::from).collect()).unwrap();
        assert_eq!(parse_image(&write_image(&cube)).unwrap(), cube);
    }

    #[test]
    fn image_errors_are_located() {
        assert_eq!(location(parse_image("2 2\n1 2\n3 oops\n").unwrap_err()), (3, 3));
        assert_eq!(location(parse_image("2 2\n1 2\n3\n").unwrap_err()), (3, 1));
        assert_eq!(location(parse_image("2 2\n1 2 3 4 5\n").unwrap_err()), (2, 9));
        assert_eq!(location(parse_image("2\n1 2\n").unwrap_err()), (1, 1));
        assert_eq!(location(parse_image("").unwrap_err()), (1, 1));
    }

    #[test]
    fn distance_matrices() {
        let d = parse_distance_matrix("0 1\n1 0\n").unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        assert_eq!(location(parse_distance_matrix("0 -1\n-1 0\n").unwrap_err()), (1, 3));
        assert_eq!(location(parse_distance_matrix("0 1\n1\n").unwrap_err()), (2, 1));
        assert!(matches!(parse_distance_matrix("0 1\n2 0\n"), Err(Error::Input(_))));
    }
}
