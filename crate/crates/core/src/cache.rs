//! On-disk ideal table cache.
//!
//! One JSON-lines file per (polynomial, limit) pair: a header line carrying
//! the format version, the polynomial, the limit and the prime-ideal list,
//! followed by one record per ideal in canonical table order. Writes go
//! through a temp file and an atomic rename so a crashed run never leaves a
//! half-written cache behind.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ideals::{FactoredIdeal, IdealTable, PrimeIdealRec};

pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct HeaderPrime {
    id: u32,
    p: u64,
    e: u32,
    f: u32,
}

#[derive(Serialize, Deserialize)]
struct Header {
    version: u32,
    poly: Vec<i64>,
    limit: u64,
    primes: Vec<HeaderPrime>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    n: u64,
    fs: Vec<(u32, u32)>,
}

/// File name for a table: coefficients joined by '_' with '-' spelled 'm'
/// (file systems dislike leading dashes), then the limit.
pub fn cache_file_name(poly: &[i64], limit: u64) -> String {
    let coeffs: Vec<String> = poly
        .iter()
        .map(|c| {
            if *c < 0 {
                format!("m{}", -c)
            } else {
                c.to_string()
            }
        })
        .collect();
    format!("ideals-{}-q{}.jsonl", coeffs.join("_"), limit)
}

pub fn cache_path(dir: &Path, poly: &[i64], limit: u64) -> PathBuf {
    dir.join(cache_file_name(poly, limit))
}

pub fn write_table(dir: &Path, table: &IdealTable) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let final_path = cache_path(dir, &table.poly, table.limit);
    let tmp_path = final_path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let file = fs::File::create(&tmp_path)?;
        let mut w = BufWriter::new(file);
        let header = Header {
            version: CACHE_VERSION,
            poly: table.poly.clone(),
            limit: table.limit,
            primes: table
                .primes
                .iter()
                .map(|r| HeaderPrime {
                    id: r.id,
                    p: r.p,
                    e: r.e,
                    f: r.f,
                })
                .collect(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for ideal in &table.ideals {
            let rec = Record {
                n: ideal.norm,
                fs: ideal.factors.iter().copied().collect(),
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    fs::rename(&tmp_path, &final_path)?;
    Ok(final_path)
}

/// Load a cached table. Missing file maps to `MissingCache`; any version or
/// polynomial disagreement maps to `CacheMismatch`.
pub fn read_table(dir: &Path, poly: &[i64], limit: u64) -> Result<IdealTable> {
    let path = cache_path(dir, poly, limit);
    let file = match fs::File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingCache),
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(file).lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::CacheMismatch("empty cache file".into()))??;
    let header: Header = serde_json::from_str(&header_line)?;
    if header.version != CACHE_VERSION {
        return Err(Error::CacheMismatch(format!(
            "cache version {} but this build reads {}",
            header.version, CACHE_VERSION
        )));
    }
    if header.poly != poly {
        return Err(Error::CacheMismatch(format!(
            "cache holds polynomial {:?}, requested {:?}",
            header.poly, poly
        )));
    }
    if header.limit != limit {
        return Err(Error::CacheMismatch(format!(
            "cache limit {} but {} requested",
            header.limit, limit
        )));
    }
    let mut primes = Vec::with_capacity(header.primes.len());
    for (i, hp) in header.primes.iter().enumerate() {
        if hp.id as usize != i {
            return Err(Error::CacheMismatch("prime ids out of order".into()));
        }
        let norm = hp
            .p
            .checked_pow(hp.f)
            .ok_or_else(|| Error::CacheMismatch("prime norm overflow".into()))?;
        primes.push(PrimeIdealRec {
            id: hp.id,
            p: hp.p,
            e: hp.e,
            f: hp.f,
            norm,
        });
    }
    let mut ideals = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line)?;
        let mut factors: SmallVec<[(u32, u32); 5]> = SmallVec::new();
        for &(id, e) in &rec.fs {
            if id as usize >= primes.len() || e == 0 {
                return Err(Error::CacheMismatch("record cites unknown prime".into()));
            }
            factors.push((id, e));
        }
        ideals.push(FactoredIdeal {
            norm: rec.n,
            factors,
        });
    }
    let table = IdealTable {
        poly: poly.to_vec(),
        limit,
        primes,
        ideals,
    };
    Ok(table)
}
