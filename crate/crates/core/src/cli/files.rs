//! Program and query files.
//!
//! A program file has optional `inputs:` and `randoms:` header lines with
//! comma-separated names, followed by the program text.  A query file has
//! a `field: p k` line and lines `P1: <file>`, `P2: <file>`, `Q1: <file>`,
//! `Q2: <file>`; paths are relative to the query file and `-` stands for
//! the empty program.  `#` starts a comment in both.

use std::fs;
use std::path::{Path, PathBuf};

use crate::ff::FieldCtx;
use crate::progequiv::{parse_arith_program, parse_program, ArithProgram, EquivQuery, Program};

#[derive(Debug, thiserror::Error)]
#[error("{path}: {msg}")]
pub struct FileError {
    pub path: String,
    pub msg: String,
}

fn err(path: &Path, msg: impl Into<String>) -> FileError {
    FileError {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

pub(crate) fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| err(path, e.to_string()))
}

fn strip_comment(l: &str) -> &str {
    l.split('#').next().unwrap_or("")
}

fn name_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|n| !n.is_empty()).map(String::from).collect()
}

struct ProgramText {
    inputs: Vec<String>,
    randoms: Vec<String>,
    text: String,
}

fn split_program(src: &str) -> ProgramText {
    let mut inputs = Vec::new();
    let mut randoms = Vec::new();
    let mut text = String::new();
    for line in src.lines() {
        let l = strip_comment(line);
        let t = l.trim();
        if let Some(rest) = t.strip_prefix("inputs:") {
            inputs.extend(name_list(rest));
        } else if let Some(rest) = t.strip_prefix("randoms:") {
            randoms.extend(name_list(rest));
        } else {
            text.push_str(l);
            text.push('\n');
        }
    }
    ProgramText { inputs, randoms, text }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

pub fn parse_program_file(ctx: &FieldCtx, src: &str) -> Result<Program, String> {
    let p = split_program(src);
    parse_program(ctx, &strs(&p.inputs), &strs(&p.randoms), &p.text).map_err(|e| e.to_string())
}

pub fn parse_arith_file(ctx: &FieldCtx, src: &str) -> Result<ArithProgram, String> {
    let p = split_program(src);
    parse_arith_program(ctx, &strs(&p.inputs), &strs(&p.randoms), &p.text).map_err(|e| e.to_string())
}

/// Loads a query file and the four program files it names.
pub fn load_query(path: &Path) -> Result<EquivQuery, FileError> {
    let src = read(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut field = None;
    let mut files: [Option<String>; 4] = Default::default();
    for (i, line) in src.lines().enumerate() {
        let l = strip_comment(line).trim();
        if l.is_empty() {
            continue;
        }
        let Some((key, value)) = l.split_once(':') else {
            return Err(err(path, format!("line {}: expected `key: value`", i + 1)));
        };
        let value = value.trim();
        let slot = match key.trim() {
            "field" => {
                let nums: Vec<u64> = value
                    .split_whitespace()
                    .map(|t| t.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(path, format!("line {}: field must be `p k`", i + 1)))?;
                let [p, k] = nums[..] else {
                    return Err(err(path, format!("line {}: field must be `p k`", i + 1)));
                };
                field = Some(FieldCtx::new(p, k as u32).map_err(|e| err(path, e.to_string()))?);
                continue;
            }
            "P1" => 0,
            "P2" => 1,
            "Q1" => 2,
            "Q2" => 3,
            other => return Err(err(path, format!("line {}: unknown key `{other}`", i + 1))),
        };
        files[slot] = Some(value.to_string());
    }
    let ctx = field.ok_or_else(|| err(path, "missing `field:` line"))?;
    let keys = ["P1", "P2", "Q1", "Q2"];
    let mut texts = Vec::new();
    for (slot, f) in files.iter().enumerate() {
        let f = f.as_ref().ok_or_else(|| err(path, format!("missing `{}:` line", keys[slot])))?;
        if f == "-" {
            texts.push((PathBuf::from("-"), String::new()));
        } else {
            let p = base.join(f);
            let t = read(&p)?;
            texts.push((p, t));
        }
    }
    let prog = |i: usize| parse_program_file(&ctx, &texts[i].1).map_err(|m| err(&texts[i].0, m));
    let arith = |i: usize| parse_arith_file(&ctx, &texts[i].1).map_err(|m| err(&texts[i].0, m));
    EquivQuery::new(prog(0)?, arith(1)?, prog(2)?, arith(3)?).map_err(|e| err(path, e.to_string()))
}
