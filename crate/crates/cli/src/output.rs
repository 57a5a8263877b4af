use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Schema comment that opens every CSV file.
pub fn csv_schema_line() -> String {
    format!("# schema: {}\n", harness::SCHEMA)
}

/// `{"schema": ..., "kind": ..., <fields of value>}`; non-object values go under `"result"`.
pub fn document(kind: &str, value: &impl Serialize) -> Result<Value, CliError> {
    let mut obj = Map::new();
    obj.insert("schema".into(), harness::SCHEMA.into());
    obj.insert("kind".into(), kind.into());
    match serde_json::to_value(value)? {
        Value::Object(fields) => obj.extend(fields),
        other => {
            obj.insert("result".into(), other);
        }
    }
    Ok(Value::Object(obj))
}

/// Writes files below an optional output directory; without one, writes are dropped.
#[derive(Debug, Clone)]
pub struct OutDir {
    dir: Option<PathBuf>,
}

impl OutDir {
    pub fn new(dir: Option<&Path>) -> Result<Self, CliError> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::Resource(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(OutDir { dir: dir.map(Path::to_path_buf) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn write(&self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        if let Some(d) = &self.dir {
            let p = d.join(name);
            std::fs::write(&p, contents).map_err(|e| CliError::Resource(format!("cannot write {}: {e}", p.display())))?;
        }
        Ok(())
    }

    pub fn write_json(&self, name: &str, kind: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&document(kind, value)?)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}
