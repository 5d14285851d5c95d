//! Text cache of canonical counts.
//!
//! ```text
//! curvecount-cache v1
//! 3 1 2,2,2,2 2
//! 3 1 3,3 1
//! ```

use std::fs;
use std::io::{BufWriter, ErrorKind, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use curvecount::{CountValue, MemoKey, MemoStore};
use num_traits::Signed;

pub const HEADER: &str = "curvecount-cache v1";

/// Reads a cache file; a missing file yields an empty store.
pub fn load(path: &Path) -> Result<MemoStore> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(MemoStore::new()),
        Err(e) => return Err(e).with_context(|| format!("reading cache {}", path.display())),
    };
    parse(&text).with_context(|| format!("loading cache {}", path.display()))
}

pub fn parse(text: &str) -> Result<MemoStore> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        Some((_, h)) => bail!("line 1: expected header {HEADER:?}, found {h:?}"),
        None => bail!("line 1: missing header"),
    }
    let store = MemoStore::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) =
            parse_record(line).with_context(|| format!("line {lineno}: bad record {line:?}"))?;
        if store.get(&key).is_some() {
            bail!("line {lineno}: duplicate key {line:?}");
        }
        store
            .insert(key, value)
            .with_context(|| format!("line {lineno}"))?;
    }
    Ok(store)
}

fn parse_record(line: &str) -> Result<(MemoKey, CountValue)> {
    let fields: Vec<&str> = line.split(' ').collect();
    let [n, d, conds, value] = fields[..] else {
        bail!("expected 4 space-separated fields, found {}", fields.len());
    };
    let conds = conds
        .split(',')
        .map(str::parse)
        .collect::<Result<Vec<u32>, _>>()
        .context("conditions")?;
    let key = MemoKey {
        n: n.parse().context("n")?,
        d: d.parse().context("d")?,
        conds,
    };
    key.validate()?;
    let value: CountValue = value.parse().context("value is not an integer")?;
    if value.is_negative() {
        bail!("negative value {value}");
    }
    Ok((key, value))
}

pub fn render(store: &MemoStore) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for (key, value) in store.entries() {
        let conds: Vec<String> = key.conds.iter().map(u32::to_string).collect();
        out.push_str(&format!(
            "{} {} {} {}\n",
            key.n,
            key.d,
            conds.join(","),
            value
        ));
    }
    out
}

/// Writes the store, replacing the file atomically.
pub fn save(path: &Path, store: &MemoStore) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let file = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        let mut w = BufWriter::new(file);
        w.write_all(render(store).as_bytes())?;
        w.flush()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}
