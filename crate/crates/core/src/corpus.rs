//! Fixture catalogs on disk, named `<name>.<dialect>.json`.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::schema::{parse_catalog_as, Dialect, SchemaError, ToolCatalog};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: file name must look like <name>.<dialect>.json")]
    BadName { path: PathBuf },
    #[error("{path}: {source}")]
    Schema {
        path: PathBuf,
        #[source]
        source: SchemaError,
    },
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub dialect: Dialect,
    pub path: PathBuf,
    pub catalog: ToolCatalog,
}

/// The fixtures shipped with this crate.
pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Loads one fixture; the dialect comes from the file name.
pub fn load_fixture(path: &Path) -> Result<Fixture, CorpusError> {
    let bad = || CorpusError::BadName {
        path: path.to_path_buf(),
    };
    let file = path.file_name().and_then(|f| f.to_str()).ok_or_else(bad)?;
    let stem = file.strip_suffix(".json").ok_or_else(bad)?;
    let (name, dialect) = stem.rsplit_once('.').ok_or_else(bad)?;
    let dialect: Dialect = dialect.parse().map_err(|_| bad())?;
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let catalog = parse_catalog_as(&bytes, dialect).map_err(|source| CorpusError::Schema {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Fixture {
        name: name.to_string(),
        dialect,
        path: path.to_path_buf(),
        catalog,
    })
}

/// Every `*.json` fixture in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Fixture>, CorpusError> {
    let io = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths.iter().map(|p| load_fixture(p)).collect()
}

pub fn shipped_fixtures() -> Result<Vec<Fixture>, CorpusError> {
    load_dir(&fixtures_dir())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_corpus_loads() {
        let all = shipped_fixtures().unwrap();
        assert!(all.len() >= 20);
        let fig2 = all.iter().find(|f| f.name == "fig2_search_files").unwrap();
        assert_eq!(fig2.dialect, Dialect::OpenAiFc);
        assert_eq!(fig2.catalog.len(), 1);
        let sizes: Vec<usize> = ["synthetic_16", "synthetic_43", "synthetic_100"]
            .iter()
            .map(|n| all.iter().find(|f| f.name == *n).unwrap().catalog.len())
            .collect();
        assert_eq!(sizes, [16, 43, 100]);
    }

    #[test]
    fn names_must_carry_a_dialect() {
        assert!(matches!(
            load_fixture(Path::new("x.json")),
            Err(CorpusError::BadName { .. })
        ));
        assert!(matches!(
            load_fixture(Path::new("x.yaml.json")),
            Err(CorpusError::BadName { .. })
        ));
    }
}
