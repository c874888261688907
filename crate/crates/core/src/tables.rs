//! Recomputes the published reference tables and compares them entry by
//! entry with the printed values in `data/`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hierarchy::table1_row;
use crate::optimizer::{alpha_upper_bound, f, BlockCount};
use crate::calculus::alpha_opt;

const TABLE1: &str = include_str!("../data/table1.csv");
const TABLE2: &str = include_str!("../data/table2.csv");
const TABLE3: &str = include_str!("../data/table3.csv");

/// Accepted absolute deviation from a printed value.
pub const TABLE1_TOL: f64 = 1e-5;
pub const TABLE2_TOL: f64 = 1e-5;
pub const TABLE2_LIMIT_TOL: f64 = 1e-6;
pub const TABLE3_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    Table1,
    Table2,
    Table3,
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::Table1, TableId::Table2, TableId::Table3];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown table {s:?} (expected table1, table2 or table3)")))
    }
}

/// One recomputed number next to its printed counterpart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub row: String,
    pub column: String,
    pub computed: f64,
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
}

impl TableEntry {
    fn new(row: String, column: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            row,
            column: column.to_string(),
            computed,
            reference,
            deviation: (computed - reference).abs(),
            tolerance,
        }
    }

    pub fn passes(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: TableId,
    pub entries: Vec<TableEntry>,
}

impl TableReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(TableEntry::passes)
    }

    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }
}

/// Header and rows of an embedded CSV, comment lines dropped.
fn records(text: &str) -> (Vec<&str>, Vec<Vec<&str>>) {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().map(|h| h.split(',').collect()).unwrap_or_default();
    let rows = lines.map(|l| l.split(',').map(str::trim).collect()).collect();
    (header, rows)
}

fn num(field: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Domain(format!("bad number {field:?} in reference table")))
}

fn int(field: &str) -> Result<u64> {
    field
        .parse()
        .map_err(|_| Error::Domain(format!("bad integer {field:?} in reference table")))
}

pub fn reproduce(table: TableId) -> Result<TableReport> {
    let entries = match table {
        TableId::Table1 => table1()?,
        TableId::Table2 => table2()?,
        TableId::Table3 => table3()?,
    };
    Ok(TableReport { table, entries })
}

fn table1() -> Result<Vec<TableEntry>> {
    let (header, rows) = records(TABLE1);
    let mut out = Vec::new();
    for r in rows {
        let (k1, k2) = (int(r[0])?, int(r[1])?);
        let row = table1_row::<f64>(k1, k2)?;
        let label = format!("K={k1},K~={k2}");
        for (i, computed) in [(2, row.s), (3, row.t), (4, row.gap)] {
            out.push(TableEntry::new(label.clone(), header[i], computed, num(r[i])?, TABLE1_TOL));
        }
    }
    Ok(out)
}

fn table2() -> Result<Vec<TableEntry>> {
    let (header, rows) = records(TABLE2);
    let mut out = Vec::new();
    for r in rows {
        let (k, tol) = if r[0] == "inf" {
            (BlockCount::Infinite, TABLE2_LIMIT_TOL)
        } else {
            (BlockCount::Finite(num(r[0])?), TABLE2_TOL)
        };
        let computed = alpha_upper_bound(k)?;
        out.push(TableEntry::new(format!("K={}", r[0]), header[1], computed, num(r[1])?, tol));
    }
    Ok(out)
}

fn table3() -> Result<Vec<TableEntry>> {
    let (header, rows) = records(TABLE3);
    let mut out = Vec::new();
    for r in rows {
        let k = num(r[0])?;
        let upper = alpha_upper_bound(BlockCount::Finite(k))?;
        let at = [0.0, alpha_opt(k)?.min(upper), upper];
        let label = format!("K={}", r[0]);
        for (i, &a) in at.iter().enumerate() {
            out.push(TableEntry::new(label.clone(), header[i + 1], f(a, k)?, num(r[i + 1])?, TABLE3_TOL));
        }
    }
    // The K = 2 entries also have a closed form.
    let closed = std::f64::consts::FRAC_PI_4 * (1.0 - std::f64::consts::SQRT_2);
    let a2 = alpha_upper_bound(BlockCount::Finite(2.0))?;
    out.push(TableEntry::new("K=2".into(), "f_opt_closed_form", f(a2, 2.0)?, closed, 1e-12));
    Ok(out)
}
