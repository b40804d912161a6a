//! Consistent renaming of variables by declaration.

use std::collections::{BTreeMap, HashSet};

use super::ast::*;
use super::visit::apply_names;
use super::LangError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// A per-declaration renaming together with the names it replaces, so it can
/// be undone. Targets that would collide inside one function are made
/// unique with a `_N` suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    original: Vec<String>,
    renamed: Vec<String>,
    /// Declarations whose target name had to be disambiguated.
    disambiguated: Vec<DeclId>,
}

impl Renaming {
    /// `targets[d]` is the new name of declaration `d`.
    pub fn new(program: &Program, targets: &[String]) -> Result<Self, LangError> {
        if targets.len() != program.vars.len() {
            return Err(LangError::IncompleteMapping(format!(
                "mapping covers {} of {} variables",
                targets.len(),
                program.vars.len()
            )));
        }
        let original: Vec<String> = program.vars.iter().map(|v| v.name.clone()).collect();
        let mut renamed = targets.to_vec();
        let mut disambiguated = Vec::new();
        for fi in 0..program.functions.len() {
            let decls: Vec<DeclId> = (0..program.vars.len()).filter(|&d| program.vars[d].function == fi).collect();
            let mut used: HashSet<String> = HashSet::new();
            let wanted: HashSet<&str> = decls.iter().map(|&d| targets[d].as_str()).collect();
            for &d in &decls {
                if used.insert(renamed[d].clone()) {
                    continue;
                }
                let base = renamed[d].clone();
                let mut k = 1;
                let fresh = loop {
                    let candidate = format!("{base}_{k}");
                    if !used.contains(&candidate) && !wanted.contains(candidate.as_str()) {
                        break candidate;
                    }
                    k += 1;
                };
                used.insert(fresh.clone());
                renamed[d] = fresh;
                disambiguated.push(d);
            }
        }
        Ok(Renaming {
            original,
            renamed,
            disambiguated,
        })
    }

    /// Builds a renaming from a map keyed by [`Program::var_key`].
    pub fn from_keys(program: &Program, map: &BTreeMap<String, String>) -> Result<Self, LangError> {
        let targets = program
            .var_keys()
            .into_iter()
            .map(|k| {
                map.get(&k)
                    .cloned()
                    .ok_or_else(|| LangError::IncompleteMapping(format!("no target for `{k}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Renaming::new(program, &targets)
    }

    pub fn identity(program: &Program) -> Self {
        let names: Vec<String> = program.vars.iter().map(|v| v.name.clone()).collect();
        Renaming {
            original: names.clone(),
            renamed: names,
            disambiguated: Vec::new(),
        }
    }

    pub fn renamed_names(&self) -> &[String] {
        &self.renamed
    }

    pub fn original_names(&self) -> &[String] {
        &self.original
    }

    pub fn disambiguated(&self) -> &[DeclId] {
        &self.disambiguated
    }
}

/// Renames every occurrence of each variable. `Reverse` expects a program
/// with the same declarations as the forward result (statements may have
/// been added, removed or edited, declarations not).
pub fn rename_variables(program: &Program, renaming: &Renaming, direction: Direction) -> Result<Program, LangError> {
    if program.vars.len() != renaming.original.len() {
        return Err(LangError::IncompleteMapping(format!(
            "renaming built for {} variables, program has {}",
            renaming.original.len(),
            program.vars.len()
        )));
    }
    let names = match direction {
        Direction::Forward => &renaming.renamed,
        Direction::Reverse => &renaming.original,
    };
    let mut out = program.clone();
    apply_names(&mut out, names);
    out.resolve()?;
    Ok(out)
}
