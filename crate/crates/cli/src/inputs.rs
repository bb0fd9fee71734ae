use std::fs;
use std::path::{Path, PathBuf};

use solvgeo_core::lie::catalog::{self, parse_algebra};
use solvgeo_core::metric::MetricFile;
use solvgeo_core::{Error, LieAlgebra, MetricTensor};

pub const CATALOG_ENV: &str = "SOLVGEO_CATALOG";

/// Where algebra names are looked up: `--catalog`, then `SOLVGEO_CATALOG`,
/// then the catalog compiled into the binary.
#[derive(Debug, Clone)]
pub enum CatalogSource {
    Directory(PathBuf),
    Bundled,
}

impl CatalogSource {
    pub fn resolve(flag: Option<PathBuf>) -> Self {
        flag.or_else(|| std::env::var_os(CATALOG_ENV).map(PathBuf::from))
            .map(CatalogSource::Directory)
            .unwrap_or(CatalogSource::Bundled)
    }

    /// `(file name, contents)` of every entry.
    pub fn entries(&self) -> Result<Vec<(String, String)>, Error> {
        match self {
            CatalogSource::Bundled => Ok(catalog::BUNDLED
                .iter()
                .map(|(n, s)| (n.to_string(), s.to_string()))
                .collect()),
            CatalogSource::Directory(dir) => {
                let mut out = Vec::new();
                for entry in fs::read_dir(dir)? {
                    let path = entry?.path();
                    if path.extension().is_some_and(|e| e == "alg") {
                        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
                        out.push((name, fs::read_to_string(&path)?));
                    }
                }
                out.sort();
                Ok(out)
            }
        }
    }

    fn lookup(&self, name: &str) -> Result<String, Error> {
        let file = format!("{name}.alg");
        match self {
            CatalogSource::Bundled => catalog::BUNDLED
                .iter()
                .find(|(n, _)| *n == file)
                .map(|(_, s)| s.to_string())
                .ok_or_else(|| Error::Parse(format!("no bundled algebra named `{name}`"))),
            CatalogSource::Directory(dir) => {
                let path = dir.join(&file);
                if path.is_file() {
                    Ok(fs::read_to_string(path)?)
                } else {
                    Err(Error::Parse(format!("no algebra `{name}` in catalog {}", dir.display())))
                }
            }
        }
    }
}

/// An algebra given as a file path or a catalog name, with its source text.
pub fn load_algebra(arg: &str, source: &CatalogSource) -> Result<(LieAlgebra, String), Error> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        fs::read_to_string(path)?
    } else {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| arg.to_string());
        source.lookup(&name)?
    };
    Ok((parse_algebra(&text)?, text))
}

/// The `--metric` file, or the identity when absent.
pub fn load_metric(path: Option<&Path>, dim: usize) -> Result<(MetricTensor, String), Error> {
    let Some(path) = path else {
        return Ok((MetricTensor::identity(dim), String::new()));
    };
    let text = fs::read_to_string(path)?;
    let h = MetricFile::parse(&text)?.to_metric()?;
    if h.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: h.dim(),
        });
    }
    Ok((h, text))
}
