//! Serialization of [`DecompositionSet`] so updates can span processes.
//!
//! The binary container starts with the magic `PHWS` and a little-endian
//! `u32` version; every integer after that is little-endian with a fixed
//! width. The text container starts with `phwarm-state <version>` and holds
//! the same field sequence as whitespace-separated decimal tokens. Floats
//! are stored by bit pattern in both, so round trips are exact.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};
use crate::filtration::{Cell, CellKey, ComplexBuilder, ComplexKind, FilteredComplex};
use crate::persistence::{DecompositionSet, PersistenceOptions};
use crate::reduction::{Mode, OperationCounters, RUDecomposition};
use crate::sparse::{ColumnMatrix, SparseColumn};

const MAGIC: &[u8; 4] = b"PHWS";
const TEXT_MAGIC: &str = "phwarm-state";
const VERSION: u32 = 1;

/// Free-form key/value strings stored next to the decompositions, such
/// as how the complex was built.
pub type Metadata = BTreeMap<String, String>;

/// Container encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFormat {
    Binary,
    Text,
}

trait Sink {
    fn put(&mut self, value: u64, width: usize) -> std::io::Result<()>;
}

trait Source {
    fn take(&mut self, width: usize) -> Result<u64>;
}

struct BinarySink<W: Write>(W);

impl<W: Write> Sink for BinarySink<W> {
    fn put(&mut self, value: u64, width: usize) -> std::io::Result<()> {
        self.0.write_all(&value.to_le_bytes()[..width])
    }
}

struct TextSink<W: Write> {
    out: W,
    on_line: usize,
}

impl<W: Write> Sink for TextSink<W> {
    fn put(&mut self, value: u64, _width: usize) -> std::io::Result<()> {
        self.on_line += 1;
        if self.on_line == 16 {
            self.on_line = 0;
            writeln!(self.out, "{value}")
        } else {
            write!(self.out, "{value} ")
        }
    }
}

struct BinarySource<R: Read>(R);

impl<R: Read> Source for BinarySource<R> {
    fn take(&mut self, width: usize) -> Result<u64> {
        let mut buf = [0u8; 8];
        self.0
            .read_exact(&mut buf[..width])
            .map_err(|e| Error::Input(format!("truncated state: {e}")))?;
        Ok(u64::from_le_bytes(buf))
    }
}

struct TextSource {
    tokens: std::vec::IntoIter<String>,
}

impl Source for TextSource {
    fn take(&mut self, width: usize) -> Result<u64> {
        let tok = self
            .tokens
            .next()
            .ok_or_else(|| Error::Input("truncated state".into()))?;
        let v: u64 = tok
            .parse()
            .map_err(|_| Error::Input(format!("bad state token '{tok}'")))?;
        if width < 8 && v >> (8 * width) != 0 {
            return Err(Error::Input(format!("state token {v} exceeds {width} bytes")));
        }
        Ok(v)
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Input(format!("cannot write state: {e}"))
}

struct Writer<'a>(&'a mut dyn Sink);

impl Writer<'_> {
    fn u8(&mut self, v: u8) -> Result<()> {
        self.0.put(v as u64, 1).map_err(io)
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        self.0.put(v as u64, 4).map_err(io)
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        self.0.put(v, 8).map_err(io)
    }
    fn usize(&mut self, v: usize) -> Result<()> {
        self.u64(v as u64)
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        self.u64(v.to_bits())
    }

    fn matrix(&mut self, m: &ColumnMatrix) -> Result<()> {
        self.usize(m.nrows())?;
        self.usize(m.ncols())?;
        for c in m.columns() {
            self.usize(c.len())?;
            for (i, v) in c.iter() {
                self.usize(i)?;
                self.u32(v as u32)?;
            }
        }
        Ok(())
    }

    fn string(&mut self, text: &str) -> Result<()> {
        self.usize(text.len())?;
        for &b in text.as_bytes() {
            self.u8(b)?;
        }
        Ok(())
    }

    fn metadata(&mut self, meta: &Metadata) -> Result<()> {
        self.usize(meta.len())?;
        for (k, v) in meta {
            self.string(k)?;
            self.string(v)?;
        }
        Ok(())
    }

    fn set(&mut self, set: &DecompositionSet) -> Result<()> {
        let o = &set.options;
        self.u8(match o.mode {
            Mode::Homology => 0,
            Mode::Cohomology => 1,
        })?;
        self.u8(o.use_clearing as u8)?;
        self.u8(o.keep_basis as u8)?;
        self.u32(o.field.modulus())?;

        let c = &set.complex;
        self.u8(match c.kind() {
            ComplexKind::Simplicial => 0,
            ComplexKind::Cubical => 1,
        })?;
        self.usize(c.max_dim())?;
        self.usize(c.top_dim())?;
        for cells in c.dims() {
            self.usize(cells.len())?;
            for i in 0..cells.len() {
                let key = cells.key(i);
                self.usize(key.len())?;
                for &k in key {
                    self.u32(k)?;
                }
                self.f64(cells.value(i))?;
                let b = cells.boundary(i);
                self.usize(b.len())?;
                for &(f, s) in b {
                    self.usize(f)?;
                    self.u8(s as u8)?;
                }
            }
        }

        self.usize(set.decompositions.len())?;
        for d in &set.decompositions {
            self.u8(d.reduced as u8)?;
            self.matrix(&d.r)?;
            match &d.v {
                Some(v) => {
                    self.u8(1)?;
                    self.matrix(v)?;
                }
                None => self.u8(0)?,
            }
        }
        let k = &set.counters;
        for v in [k.column_additions, k.pivot_eliminations, k.swaps, k.field_operations] {
            self.u64(v)?;
        }
        Ok(())
    }
}

struct Reader<'a>(&'a mut dyn Source);

impl Reader<'_> {
    fn u8(&mut self) -> Result<u8> {
        Ok(self.0.take(1)? as u8)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(self.0.take(4)? as u32)
    }
    fn u64(&mut self) -> Result<u64> {
        self.0.take(8)
    }
    /// A count or index, bounded to catch corrupted lengths early.
    fn usize(&mut self, bound: usize, what: &str) -> Result<usize> {
        let v = self.u64()?;
        if v > bound as u64 {
            return Err(Error::Input(format!("state {what} {v} exceeds {bound}")));
        }
        Ok(v as usize)
    }
    fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(Error::Input(format!("state flag {v} is not 0 or 1"))),
        }
    }

    fn string(&mut self) -> Result<String> {
        let len = self.usize(1 << 16, "string length")?;
        let bytes = (0..len).map(|_| self.u8()).collect::<Result<Vec<u8>>>()?;
        String::from_utf8(bytes).map_err(|_| Error::Input("state string is not UTF-8".into()))
    }

    fn metadata(&mut self) -> Result<Metadata> {
        let count = self.usize(1 << 16, "metadata count")?;
        (0..count)
            .map(|_| Ok((self.string()?, self.string()?)))
            .collect()
    }

    fn matrix(&mut self, field: Field) -> Result<ColumnMatrix> {
        const LIMIT: usize = 1 << 40;
        let nrows = self.usize(LIMIT, "row count")?;
        let ncols = self.usize(LIMIT, "column count")?;
        let mut cols = Vec::with_capacity(ncols.min(1 << 20));
        for _ in 0..ncols {
            let len = self.usize(nrows, "column length")?;
            let mut entries: Vec<(usize, Coeff)> = Vec::with_capacity(len);
            for _ in 0..len {
                let i = self.usize(nrows.saturating_sub(1), "row index")?;
                let v = self.u32()?;
                if v == 0 || v >= field.modulus() || entries.last().is_some_and(|e| e.0 >= i) {
                    return Err(Error::Input("state column is not a sorted nonzero list".into()));
                }
                entries.push((i, v as Coeff));
            }
            cols.push(SparseColumn::from_sorted(entries));
        }
        ColumnMatrix::from_columns(nrows, cols, field)
    }

    fn set(&mut self) -> Result<DecompositionSet> {
        let mode = match self.u8()? {
            0 => Mode::Homology,
            1 => Mode::Cohomology,
            v => return Err(Error::Input(format!("unknown mode tag {v}"))),
        };
        let use_clearing = self.flag()?;
        let keep_basis = self.flag()?;
        let field = Field::new(self.u32()?)?;
        let options = PersistenceOptions {
            mode,
            use_clearing,
            keep_basis,
            field,
        };

        let kind = match self.u8()? {
            0 => ComplexKind::Simplicial,
            1 => ComplexKind::Cubical,
            v => return Err(Error::Input(format!("unknown complex tag {v}"))),
        };
        let max_dim = self.usize(64, "dimension")?;
        let top_dim = self.usize(64, "dimension")?;
        let mut builder = ComplexBuilder::new(kind, top_dim, max_dim);
        let mut previous: Vec<CellKey> = Vec::new();
        for dim in 0..=top_dim {
            let count = self.usize(1 << 40, "cell count")?;
            let mut keys = Vec::with_capacity(count.min(1 << 20));
            for _ in 0..count {
                let len = self.usize(64, "key length")?;
                let key: CellKey = (0..len).map(|_| self.u32()).collect::<Result<_>>()?;
                let value = f64::from_bits(self.u64()?);
                let blen = self.usize(128, "boundary length")?;
                let mut boundary = Vec::with_capacity(blen);
                for _ in 0..blen {
                    let f = self.usize(previous.len().saturating_sub(1), "face index")?;
                    let face = previous
                        .get(f)
                        .ok_or_else(|| Error::Input("face index without faces".into()))?;
                    boundary.push((face.clone(), self.u8()? as i8));
                }
                builder.push(Cell {
                    dim,
                    key: key.clone(),
                    value,
                    boundary,
                })?;
                keys.push(key);
            }
            previous = keys;
        }
        let complex = builder.build()?;

        let count = self.usize(64, "matrix count")?;
        let mut decompositions = Vec::with_capacity(count);
        for _ in 0..count {
            let reduced = self.flag()?;
            let r = self.matrix(field)?;
            let v = if self.flag()? { Some(self.matrix(field)?) } else { None };
            decompositions.push(RUDecomposition { r, v, reduced });
        }
        let counters = OperationCounters {
            column_additions: self.u64()?,
            pivot_eliminations: self.u64()?,
            swaps: self.u64()?,
            field_operations: self.u64()?,
        };
        check_shapes(&complex, &decompositions, mode)?;
        Ok(DecompositionSet {
            options,
            complex,
            decompositions,
            counters,
        })
    }
}

fn check_shapes(complex: &FilteredComplex, decs: &[RUDecomposition], mode: Mode) -> Result<()> {
    let counts = complex.cell_counts();
    if decs.len() != counts.len() {
        return Err(Error::Input(format!(
            "state holds {} decompositions for {} dimensions",
            decs.len(),
            counts.len()
        )));
    }
    for (q, d) in decs.iter().enumerate() {
        let (rows, cols) = match mode {
            Mode::Homology => (if q == 0 { 0 } else { counts[q - 1] }, counts[q]),
            Mode::Cohomology => (counts.get(q + 1).copied().unwrap_or(0), counts[q]),
        };
        let v_ok = d.v.as_ref().is_none_or(|v| v.nrows() == cols && v.ncols() == cols);
        if d.r.nrows() != rows || d.r.ncols() != cols || !v_ok {
            return Err(Error::Input(format!("decomposition {q} does not match the complex")));
        }
    }
    Ok(())
}

/// Writes `set` and `meta` in the chosen container.
pub fn write_state(
    set: &DecompositionSet,
    meta: &Metadata,
    format: StateFormat,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        StateFormat::Binary => {
            out.write_all(MAGIC).map_err(io)?;
            out.write_all(&VERSION.to_le_bytes()).map_err(io)?;
            let mut sink = BinarySink(&mut *out);
            let mut w = Writer(&mut sink);
            w.metadata(meta)?;
            w.set(set)?;
        }
        StateFormat::Text => {
            writeln!(out, "{TEXT_MAGIC} {VERSION}").map_err(io)?;
            let mut sink = TextSink {
                out: &mut *out,
                on_line: 0,
            };
            let mut w = Writer(&mut sink);
            w.metadata(meta)?;
            w.set(set)?;
            writeln!(out).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Reads a state in either container, detected from its first bytes.
pub fn read_state(input: &mut dyn BufRead) -> Result<(DecompositionSet, Metadata)> {
    let head = input
        .fill_buf()
        .map_err(|e| Error::Input(format!("cannot read state: {e}")))?;
    if head.starts_with(MAGIC) {
        let mut src = BinarySource(input);
        let mut magic = [0u8; 4];
        src.0
            .read_exact(&mut magic)
            .map_err(|e| Error::Input(format!("cannot read state: {e}")))?;
        let version = src.take(4)? as u32;
        if version != VERSION {
            return Err(Error::Input(format!("unsupported state version {version}")));
        }
        let mut r = Reader(&mut src);
        let meta = r.metadata()?;
        Ok((r.set()?, meta))
    } else if head.starts_with(TEXT_MAGIC.as_bytes()) {
        let mut text = String::new();
        input
            .read_to_string(&mut text)
            .map_err(|e| Error::Input(format!("cannot read state: {e}")))?;
        let mut words = text.split_whitespace().map(str::to_owned);
        words.next();
        let version = words.next().unwrap_or_default();
        if version != VERSION.to_string() {
            return Err(Error::Input(format!("unsupported state version '{version}'")));
        }
        let mut src = TextSource {
            tokens: words.collect::<Vec<_>>().into_iter(),
        };
        let mut r = Reader(&mut src);
        let meta = r.metadata()?;
        Ok((r.set()?, meta))
    } else {
        Err(Error::Input("not a state file".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{rips_filtration, DistanceMatrix, RipsThreshold};
    use crate::persistence::{compute_persistence, update_persistence};

    fn sample(mode: Mode) -> DecompositionSet {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![(i as f64).cos(), (i as f64 * 0.3).sin()]).collect();
        let d = DistanceMatrix::from_points(&pts).unwrap();
        let c = rips_filtration(&d, RipsThreshold::Infinite, 1).unwrap();
        let opts = PersistenceOptions {
            mode,
            use_clearing: true,
            keep_basis: true,
            field: Field::new(3).unwrap(),
        };
        compute_persistence(c, opts).unwrap().0
    }

    #[test]
    fn round_trips_exactly() {
        for mode in [Mode::Homology, Mode::Cohomology] {
            let set = sample(mode);
            for format in [StateFormat::Binary, StateFormat::Text] {
                let mut buf = Vec::new();
                let meta = Metadata::from([("complex".to_owned(), "rips é".to_owned())]);
                write_state(&set, &meta, format, &mut buf).unwrap();
                let back = read_state(&mut buf.as_slice()).unwrap();
                assert_eq!(back, (set.clone(), meta));
            }
        }
    }

    #[test]
    fn restored_state_updates() {
        let set = sample(Mode::Homology);
        let mut buf = Vec::new();
        write_state(&set, &Metadata::new(), StateFormat::Binary, &mut buf).unwrap();
        let (mut back, _) = read_state(&mut buf.as_slice()).unwrap();
        let d = DistanceMatrix::from_points(&[vec![0.0, 0.0]]).unwrap();
        let other = rips_filtration(&d, RipsThreshold::Infinite, 1).unwrap();
        let report = update_persistence(&mut back, other.clone()).unwrap();
        assert_eq!(report.barcode, compute_persistence(other, set.options).unwrap().1);
    }

    #[test]
    fn rejects_corruption() {
        let set = sample(Mode::Homology);
        let mut buf = Vec::new();
        write_state(&set, &Metadata::new(), StateFormat::Binary, &mut buf).unwrap();
        assert!(read_state(&mut &buf[..buf.len() - 3]).is_err());
        assert!(read_state(&mut &b"nonsense"[..]).is_err());
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(read_state(&mut bad.as_slice()).is_err());
    }
}
