//! On-disk form of a sealed index: four TSV files and a JSON manifest
//! carrying their sha256 digests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{HypergraphIndex, IndexError, Manifest, MoleculeRecord, Reject, ScaffoldClass};
use crate::molgraph::CanonicalSmiles;
use crate::scaffold::Scaffold;

pub const FORMAT_VERSION: u32 = 1;

const MOLECULES: &str = "molecules.tsv";
const SCAFFOLDS: &str = "scaffolds.tsv";
const EDGES: &str = "edges.tsv";
const REJECTS: &str = "rejects.tsv";
const MANIFEST: &str = "manifest.json";

fn io_err(path: &Path, source: std::io::Error) -> IndexError {
    IndexError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `idx` under `dir`, creating it if needed. Returns the manifest as
/// written, checksums included.
pub fn save_index(idx: &HypergraphIndex, dir: &Path) -> Result<Manifest, IndexError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let mut molecules = String::new();
    for m in idx.molecules() {
        let _ = writeln!(
            molecules,
            "{}\t{}\t{}\t{}",
            m.id,
            m.canonical,
            m.scaffold_id,
            m.source_tag.as_deref().unwrap_or("")
        );
    }
    let mut scaffolds = String::new();
    for c in idx.classes() {
        let _ = writeln!(
            scaffolds,
            "{}\t{}\t{}\t{}\t{}",
            c.scaffold_id,
            c.scaffold.key,
            c.scaffold.ring_count,
            u8::from(c.scaffold.is_virtual),
            c.members.len()
        );
    }
    let mut edges = String::new();
    for (p, s) in idx.edges() {
        let _ = writeln!(edges, "{p}\t{s}");
    }
    let mut rejects = String::new();
    for r in idx.rejects() {
        let raw = r.raw.replace(['\n', '\r'], " ");
        let _ = writeln!(rejects, "{}\t{}\t{}", r.line_no, r.reason, raw);
    }

    let mut manifest = idx.manifest().clone();
    manifest.checksums.clear();
    for (name, body) in [
        (MOLECULES, &molecules),
        (SCAFFOLDS, &scaffolds),
        (EDGES, &edges),
        (REJECTS, &rejects),
    ] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        manifest.checksums.insert(name.to_string(), sha256_hex(body.as_bytes()));
    }
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    let path = dir.join(MANIFEST);
    fs::write(&path, json).map_err(|e| io_err(&path, e))?;
    Ok(manifest)
}

fn read_checked(dir: &Path, name: &str, manifest: &Manifest) -> Result<String, IndexError> {
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(|e| io_err(&path, e))?;
    match manifest.checksums.get(name) {
        Some(sum) if *sum == sha256_hex(&bytes) => {}
        _ => return Err(IndexError::ChecksumMismatch(name.to_string())),
    }
    String::from_utf8(bytes).map_err(|_| IndexError::Corrupt(format!("{name} is not UTF-8")))
}

fn field<T: std::str::FromStr>(value: Option<&str>, file: &str, line: usize) -> Result<T, IndexError> {
    value
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| IndexError::Corrupt(format!("{file} line {}", line + 1)))
}

/// Read an index written by [`save_index`], verifying format version and
/// checksums.
pub fn load_index(dir: &Path) -> Result<HypergraphIndex, IndexError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let version: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| IndexError::Corrupt(format!("{MANIFEST}: {e}")))?;
    let found = version["format_version"].as_u64().unwrap_or(0) as u32;
    if found != FORMAT_VERSION {
        return Err(IndexError::FormatVersionMismatch {
            found,
            expected: FORMAT_VERSION,
        });
    }
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| IndexError::Corrupt(format!("{MANIFEST}: {e}")))?;

    let mut classes = Vec::new();
    let mut member_counts = Vec::new();
    for (i, line) in read_checked(dir, SCAFFOLDS, &manifest)?.lines().enumerate() {
        let mut cols = line.split('\t');
        let id: u32 = field(cols.next(), SCAFFOLDS, i)?;
        let key = cols.next().unwrap_or_default().to_string();
        let ring_count: u32 = field(cols.next(), SCAFFOLDS, i)?;
        let is_virtual: u8 = field(cols.next(), SCAFFOLDS, i)?;
        let members: usize = field(cols.next(), SCAFFOLDS, i)?;
        if id as usize != classes.len() {
            return Err(IndexError::Corrupt(format!("{SCAFFOLDS} ids out of order at line {}", i + 1)));
        }
        classes.push(ScaffoldClass {
            scaffold: Scaffold {
                key: CanonicalSmiles::from_trusted(key),
                ring_count,
                is_virtual: is_virtual == 1,
            },
            scaffold_id: id,
            members: Vec::new(),
        });
        member_counts.push(members);
    }

    let mut molecules = Vec::new();
    for (i, line) in read_checked(dir, MOLECULES, &manifest)?.lines().enumerate() {
        let mut cols = line.splitn(4, '\t');
        let id: u32 = field(cols.next(), MOLECULES, i)?;
        let canonical = cols.next().unwrap_or_default().to_string();
        let scaffold_id: u32 = field(cols.next(), MOLECULES, i)?;
        let tag = cols.next().filter(|t| !t.is_empty()).map(str::to_string);
        let class = classes
            .get_mut(scaffold_id as usize)
            .ok_or_else(|| IndexError::Corrupt(format!("{MOLECULES} line {}", i + 1)))?;
        if id as usize != molecules.len() {
            return Err(IndexError::Corrupt(format!("{MOLECULES} ids out of order at line {}", i + 1)));
        }
        class.members.push(id);
        molecules.push(MoleculeRecord {
            id,
            canonical: CanonicalSmiles::from_trusted(canonical),
            scaffold_id,
            source_tag: tag,
        });
    }
    for (c, &n) in classes.iter().zip(&member_counts) {
        if c.members.len() != n {
            return Err(IndexError::Corrupt(format!("scaffold {} member count", c.scaffold_id)));
        }
    }

    let mut edges = Vec::new();
    for (i, line) in read_checked(dir, EDGES, &manifest)?.lines().enumerate() {
        let mut cols = line.split('\t');
        let p: u32 = field(cols.next(), EDGES, i)?;
        let s: u32 = field(cols.next(), EDGES, i)?;
        edges.push((p, s));
    }

    let mut rejects = Vec::new();
    for (i, line) in read_checked(dir, REJECTS, &manifest)?.lines().enumerate() {
        let mut cols = line.splitn(3, '\t');
        let line_no: u64 = field(cols.next(), REJECTS, i)?;
        let reason = cols.next().unwrap_or_default().to_string();
        let raw = cols.next().unwrap_or_default().to_string();
        rejects.push(Reject { line_no, reason, raw });
    }

    let checksums = manifest.checksums.clone();
    let mut idx = HypergraphIndex::assemble(
        molecules,
        classes,
        edges,
        rejects,
        manifest.build.clone(),
        manifest.budget_flagged.clone(),
    );
    if idx.manifest().counts != manifest.counts {
        return Err(IndexError::Corrupt("counts disagree with manifest".into()));
    }
    idx.validate()?;
    idx.manifest_mut().checksums = checksums;
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{BuildParams, IndexBuilder};

    fn sample() -> HypergraphIndex {
        let mut b = IndexBuilder::new(BuildParams::default());
        for s in ["Cc1ccccc1", "CCc1ccccc1", "c1ccc(COc2ccccc2)cc1", "CCO", "C1CC", "O=S(=O)(c1ccccc1)N1CCCCCC1"] {
            b.insert_molecule(s, Some("tag"));
        }
        b.build()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let idx = sample();
        let manifest = save_index(&idx, dir.path()).unwrap();
        let back = load_index(dir.path()).unwrap();
        assert_eq!(back.molecules(), idx.molecules());
        assert_eq!(back.classes(), idx.classes());
        assert_eq!(back.edges(), idx.edges());
        assert_eq!(back.rejects(), idx.rejects());
        assert_eq!(back.manifest(), &manifest);
        let again = tempfile::tempdir().unwrap();
        save_index(&back, again.path()).unwrap();
        for name in [MOLECULES, SCAFFOLDS, EDGES, REJECTS, MANIFEST] {
            assert_eq!(
                fs::read(dir.path().join(name)).unwrap(),
                fs::read(again.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn truncated_file_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        save_index(&sample(), dir.path()).unwrap();
        let path = dir.path().join(EDGES);
        let body = fs::read(&path).unwrap();
        fs::write(&path, &body[..body.len() - 2]).unwrap();
        assert!(matches!(load_index(dir.path()), Err(IndexError::ChecksumMismatch(f)) if f == EDGES));
    }

    #[test]
    fn version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        save_index(&sample(), dir.path()).unwrap();
        let path = dir.path().join(MANIFEST);
        let text = fs::read_to_string(&path).unwrap().replace("\"format_version\": 1", "\"format_version\": 9");
        fs::write(&path, text).unwrap();
        assert!(matches!(
            load_index(dir.path()),
            Err(IndexError::FormatVersionMismatch { found: 9, expected: 1 })
        ));
    }

    #[test]
    fn s0_is_first_with_empty_key() {
        let dir = tempfile::tempdir().unwrap();
        save_index(&sample(), dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join(SCAFFOLDS)).unwrap();
        assert!(text.starts_with("0\t\t0\t0\t1\n"));
    }
}
