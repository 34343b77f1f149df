use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::ConceptId;
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub name: String,
    pub distinct: usize,
    pub nulls: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableProfile {
    pub table: String,
    pub rows: usize,
    pub columns: Vec<ColumnProfile>,
    /// Occurrences of each source prefix across the id columns.
    pub source_prefixes: BTreeMap<String, usize>,
}

fn is_id_column(name: &str) -> bool {
    name.ends_with("_id")
}

pub fn profile_table(table: &Table) -> TableProfile {
    let mut source_prefixes = BTreeMap::new();
    let columns = table
        .header
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let cells = table.rows.iter().map(|r| r[i].as_str());
            let nulls = cells.clone().filter(|c| c.is_empty()).count();
            let distinct = cells.clone().collect::<BTreeSet<_>>().len();
            if is_id_column(name) {
                for cell in cells {
                    if let Ok(id) = ConceptId::parse(cell) {
                        *source_prefixes.entry(id.source().to_owned()).or_insert(0) += 1;
                    }
                }
            }
            ColumnProfile {
                name: name.clone(),
                distinct,
                nulls,
            }
        })
        .collect();
    TableProfile {
        table: table.name.clone(),
        rows: table.len(),
        columns,
        source_prefixes,
    }
}

/// Profiles every table, in the order given.
pub fn profile_tables<'a, I>(tables: I) -> Vec<TableProfile>
where
    I: IntoIterator<Item = &'a Table>,
{
    tables.into_iter().map(profile_table).collect()
}
