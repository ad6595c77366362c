//! Text file plumbing shared by every on-disk format: transparent gzip by
//! extension and atomic writes (temp file in the target directory, then
//! rename).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

pub fn open_text(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if is_gzip(path) {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Writes `path` atomically. Nothing is left behind if `fill` fails.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let handle = tmp.as_file().try_clone().map_err(|e| Error::io(path, e))?;
        let mut buf = BufWriter::new(handle);
        let res = if is_gzip(path) {
            let mut gz = GzEncoder::new(&mut buf, Compression::default());
            fill(&mut gz).and_then(|_| gz.finish().map(|_| ()))
        } else {
            fill(&mut buf)
        };
        res.and_then(|_| buf.flush()).map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Formats a float so that parsing it back yields the same bits; `inf` for
/// positive infinity.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

pub fn parse_f64(tok: &str) -> Option<f64> {
    match tok {
        "inf" | "+inf" | "Inf" | "infinity" => Some(f64::INFINITY),
        _ => tok.parse::<f64>().ok().filter(|x| !x.is_nan()),
    }
}

/// `#!` lines carry metadata that readers may use; ordinary `#` lines are
/// comments.
pub(crate) fn directive(line: &str) -> Option<(&str, &str)> {
    let rest = line.strip_prefix("#!")?.trim_start();
    match rest.split_once(char::is_whitespace) {
        Some((k, v)) => Some((k, v.trim())),
        None => Some((rest, "")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trip() {
        for x in [0.0, 1.0, 1.0 / 3.0, 1e-300, 12345.678, f64::INFINITY, -2.5] {
            assert_eq!(parse_f64(&fmt_f64(x)).unwrap().to_bits(), x.to_bits());
        }
        assert!(parse_f64("nan").is_none());
        assert!(parse_f64("x").is_none());
    }

    #[test]
    fn gzip_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt.gz");
        write_atomic(&p, |w| writeln!(w, "hello")).unwrap();
        let mut s = String::new();
        open_text(&p).unwrap().read_line(&mut s).unwrap();
        assert_eq!(s, "hello\n");
    }

    #[test]
    fn failed_write_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        let r = write_atomic(&p, |_| Err(std::io::Error::other("boom")));
        assert!(r.is_err());
        assert!(!p.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn directives() {
        assert_eq!(directive("#! vertices a b"), Some(("vertices", "a b")));
        assert_eq!(directive("# plain"), None);
    }
}
