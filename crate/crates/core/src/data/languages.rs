//! Per-language text corpora.
//!
//! Layout: the root holds one entry per language. A subdirectory is named
//! after its language and every file below it contributes lines; a plain file
//! contributes its lines under its file stem (`french.txt` → `french`).
//! Each non-blank line is one sample. Hidden entries are ignored.

use std::path::{Path, PathBuf};

use super::{read_file, DatasetBundle, SourceFile};
use crate::encoders::{preprocess_text, Features};
use crate::error::{Error, Result};

fn visible_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if !hidden {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if path.is_dir() {
        for child in visible_entries(path)? {
            collect_files(&child, out)?;
        }
    } else {
        out.push(path.to_path_buf());
    }
    Ok(())
}

fn language_name(path: &Path) -> String {
    let name = if path.is_dir() {
        path.file_name()
    } else {
        path.file_stem()
    };
    name.map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn ingest_languages(root: &Path) -> Result<DatasetBundle> {
    if !root.is_dir() {
        return Err(Error::Format {
            path: root.to_path_buf(),
            message: "expected a directory with one entry per language".into(),
        });
    }
    let mut features = Vec::new();
    let mut names = Vec::new();
    let mut provenance = Vec::new();
    for entry in visible_entries(root)? {
        let language = language_name(&entry);
        let mut files = Vec::new();
        collect_files(&entry, &mut files)?;
        let before = features.len();
        for file in files {
            let bytes = read_file(&file)?;
            provenance.push(SourceFile::from_bytes(&file, &bytes));
            let text = String::from_utf8(bytes).map_err(|e| Error::Format {
                path: file.clone(),
                message: format!("not UTF-8: {e}"),
            })?;
            for line in text.lines() {
                let clean = preprocess_text(line);
                if !clean.is_empty() {
                    features.push(Features::Text(clean));
                    names.push(language.clone());
                }
            }
        }
        if features.len() == before {
            return Err(Error::Format {
                path: entry,
                message: format!("language `{language}` has an empty corpus"),
            });
        }
    }
    if features.is_empty() {
        return Err(Error::Format {
            path: root.to_path_buf(),
            message: "no languages found".into(),
        });
    }
    DatasetBundle::from_named("languages", features, &names, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_and_subdirectories() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("english.txt"), "Hello  World\n\nthe cat\n").unwrap();
        let fin = dir.path().join("finnish");
        std::fs::create_dir(&fin).unwrap();
        std::fs::write(fin.join("a.txt"), format!("{}\n", "x".repeat(500))).unwrap();
        std::fs::write(dir.path().join(".DS_Store"), "junk").unwrap();
        let b = ingest_languages(dir.path()).unwrap();
        assert_eq!(b.label_names, vec!["english", "finnish"]);
        assert_eq!(b.features[0], Features::Text("hello world".into()));
        assert_eq!(b.labels, vec![0, 0, 1]);
        match &b.features[2] {
            Features::Text(t) => assert_eq!(t.len(), 128),
            other => panic!("{other:?}"),
        }
        assert_eq!(b.provenance.len(), 2);
    }

    #[test]
    fn empty_language_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("english.txt"), "hi there\n").unwrap();
        std::fs::write(dir.path().join("latin.txt"), "  \n\n").unwrap();
        let err = ingest_languages(dir.path()).unwrap_err().to_string();
        assert!(err.contains("latin"), "{err}");
        assert!(ingest_languages(&dir.path().join("english.txt")).is_err());
    }
}
