//! Symbol-effect tables regenerated from the code table, with the published
//! transcripts kept alongside for comparison.
//!
//! The generator is authoritative; the transcripts only exist so that a
//! disagreement in either direction is reported cell by cell.

use std::fmt::Write as _;

use serde::Serialize;

use crate::noise::{
    tabulate_effects, ChangedBits, EffectTabulation, InterOutcome, CELLS_PER_SYMBOL,
};
use crate::phy::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TableId {
    /// Resulting symbol per data symbol and changed bit positions.
    SymbolEffects,
    /// Outcome counts and percentages.
    ErrorPercentages,
    /// Data-bit error pattern per data symbol and changed bit positions.
    DataErrorPatterns,
    /// Frequency of each data error pattern.
    PatternFrequency,
}

impl TableId {
    pub const ALL: [TableId; 4] = [
        TableId::SymbolEffects,
        TableId::ErrorPercentages,
        TableId::DataErrorPatterns,
        TableId::PatternFrequency,
    ];

    /// Number used on the command line (2 to 5).
    pub fn number(self) -> u8 {
        match self {
            TableId::SymbolEffects => 2,
            TableId::ErrorPercentages => 3,
            TableId::DataErrorPatterns => 4,
            TableId::PatternFrequency => 5,
        }
    }

    pub fn from_number(n: u8) -> Option<TableId> {
        TableId::ALL.into_iter().find(|t| t.number() == n)
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::SymbolEffects => "Effect of Noise on a Data Symbol",
            TableId::ErrorPercentages => "Percentage of Data Symbol Errors",
            TableId::DataErrorPatterns => "Data Error Patterns",
            TableId::PatternFrequency => "Frequency of Data Error Patterns",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RenderedTable {
    pub id: TableId,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RenderedTable {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Table {}: {}\n", self.id.number(), self.id.title());
        let _ = writeln!(out, "| {} |", self.header.join(" | "));
        let _ = writeln!(
            out,
            "|{}",
            self.header.iter().map(|_| "---|").collect::<String>()
        );
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let quote = |s: &str| {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line.iter().map(|c| quote(c)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

fn percent(count: u32, denom: u32) -> String {
    format!("{:.2}%", 100.0 * count as f64 / denom as f64)
}

fn whole_percent(count: u32, denom: u32) -> String {
    format!("{:.0}%", 100.0 * count as f64 / denom as f64)
}

fn column_headers(first: &[&str]) -> Vec<String> {
    first
        .iter()
        .map(|s| s.to_string())
        .chain(ChangedBits::ALL.iter().map(|c| c.label().to_string()))
        .collect()
}

pub fn generate(id: TableId, t: &EffectTabulation) -> RenderedTable {
    let intra_denom = 16 * CELLS_PER_SYMBOL;
    let inter_denom = 256 * CELLS_PER_SYMBOL;
    let (header, rows) = match id {
        TableId::SymbolEffects => (
            column_headers(&["Symbol", "Data-Bits", "Code-Bits"]),
            (0..16u8)
                .map(|v| {
                    let mut row = vec![
                        format!("{v:X}"),
                        format!("{v:04b}"),
                        Symbol::Data(v).code_group().to_string(),
                    ];
                    row.extend(t.effects[v as usize].iter().map(|s| s.label()));
                    row
                })
                .collect(),
        ),
        TableId::DataErrorPatterns => (
            column_headers(&["Symbol"]),
            (0..16u8)
                .map(|v| {
                    let mut row = vec![format!("{v:X}")];
                    row.extend(t.data_patterns[v as usize].iter().map(|p| match p {
                        Some(bits) => format!("{bits:04b}"),
                        None => "-".to_string(),
                    }));
                    row
                })
                .collect(),
        ),
        TableId::ErrorPercentages => {
            let mut rows = vec![vec!["Intrasymbol errors:".into(), String::new(), String::new()]];
            for (o, c) in &t.intrasymbol {
                rows.push(vec![o.label().into(), c.to_string(), percent(*c, intra_denom)]);
            }
            let intra_total: u32 = t.intrasymbol.iter().map(|(_, c)| c).sum();
            rows.push(vec![
                "Subtotal".into(),
                intra_total.to_string(),
                whole_percent(intra_total, intra_denom),
            ]);
            rows.push(vec!["Intersymbol errors:".into(), String::new(), String::new()]);
            for (o, c) in &t.intersymbol {
                if *o == InterOutcome::Other && *c == 0 {
                    continue;
                }
                rows.push(vec![o.label().into(), c.to_string(), percent(*c, inter_denom)]);
            }
            let inter_total: u32 = t.intersymbol.iter().map(|(_, c)| c).sum();
            rows.push(vec![
                "Subtotal".into(),
                inter_total.to_string(),
                whole_percent(inter_total, inter_denom),
            ]);
            let total_share = intra_total as f64 / intra_denom as f64
                + inter_total as f64 / inter_denom as f64;
            rows.push(vec!["Total".into(), String::new(), format!("{:.2}%", 100.0 * total_share)]);
            (vec!["Resulting Symbol".into(), "Count".into(), "Percent".into()], rows)
        }
        TableId::PatternFrequency => {
            let mut rows: Vec<Vec<String>> = t
                .pattern_counts
                .iter()
                .map(|(p, c)| {
                    let denom = if p.symbols() == 1 { intra_denom } else { inter_denom };
                    vec![p.to_string(), c.to_string(), percent(*c, denom)]
                })
                .collect();
            let total: f64 = t.pattern_counts.iter().map(|(p, _)| t.pattern_fraction(*p)).sum();
            rows.push(vec!["Total".into(), String::new(), format!("{:.2}%", 100.0 * total)]);
            (vec!["Error Pattern".into(), "Count".into(), "Percent".into()], rows)
        }
    };
    RenderedTable { id, header, rows }
}

const GOLDEN_EFFECTS: [&str; 16] = [
    "0 0000 11110 6 V 8 J F I",
    "1 0001 01001 S K V 7 4 VH",
    "2 0010 10100 H V J 8 B 3",
    "3 0011 10101 V T S 9 A 2",
    "4 0100 01010 C 8 V V 1 5",
    "5 0101 01011 D 9 R T VH 4",
    "6 0110 01110 0 A VH VH T 7",
    "7 0111 01111 I B V 1 V 6",
    "8 1000 10010 VH 4 0 2 K 9",
    "9 1001 10011 V 5 I 3 VH 8",
    "A 1010 10110 V 6 C VH 3 B",
    "B 1011 10111 R 7 D K 2 A",
    "C 1100 11010 4 VH A E S D",
    "D 1101 11011 5 V B F J C",
    "E 1110 11100 V H VH C I F",
    "F 1111 11101 T V K D 0 E",
];

const GOLDEN_PATTERNS: [&str; 16] = [
    "0 0110 - 1000 - 1111 -",
    "1 - - - 0110 0101 -",
    "2 - - - 1010 1001 0001",
    "3 - - - 1010 1001 0001",
    "4 1000 1100 - - 0101 0001",
    "5 1000 1100 - - - 0001",
    "6 0110 1100 - - - 0001",
    "7 - 1100 - 0110 - 0001",
    "8 - 1100 1000 1010 - 0001",
    "9 - 1100 - 1010 - 0001",
    "A - 1100 0110 - 1001 0001",
    "B - 1100 0110 - 1001 0001",
    "C 1000 - 0110 0010 - 0001",
    "D 1000 - 0110 0010 - 0001",
    "E - - - 0010 - 0001",
    "F - - - 0010 1111 0001",
];

const GOLDEN_PERCENTAGES: [(&str, &str, &str); 17] = [
    ("Intrasymbol errors:", "", ""),
    ("Data", "32", "40.00%"),
    ("J", "3", "3.75%"),
    ("K", "4", "5.00%"),
    ("R", "1", "1.25%"),
    ("S", "2", "2.50%"),
    ("T", "3", "3.75%"),
    ("H, I, V, VH", "19", "23.75%"),
    ("Subtotal", "64", "80%"),
    ("Intersymbol errors:", "", ""),
    ("Data-data", "84", "6.56%"),
    ("Data-T", "14", "1.09%"),
    ("Data-R", "14", "1.09%"),
    ("Data-S", "14", "1.09%"),
    ("At least one H, I, V, VH", "130", "10.16%"),
    ("Subtotal", "256", "20%"),
    ("Total", "", "100.00%"),
];

const GOLDEN_FREQUENCY: [(&str, &str, &str); 11] = [
    ("0010", "4", "5.00%"),
    ("0101", "2", "2.50%"),
    ("0110", "6", "7.50%"),
    ("1000", "2", "2.50%"),
    ("1001", "4", "5.00%"),
    ("1010", "4", "5.00%"),
    ("1100", "8", "10.00%"),
    ("1111", "2", "2.50%"),
    ("0001-0110", "28", "2.19%"),
    ("0001-1000", "56", "4.38%"),
    ("Total", "", "46.56%"),
];

/// Transcript of the published table, in the same layout as [`generate`].
pub fn golden(id: TableId) -> RenderedTable {
    let words = |rows: &[&str]| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.split(' ').map(str::to_string).collect())
            .collect()
    };
    let triples = |rows: &[(&str, &str, &str)]| -> Vec<Vec<String>> {
        rows.iter()
            .map(|(a, b, c)| vec![a.to_string(), b.to_string(), c.to_string()])
            .collect()
    };
    let generated_header = generate(id, &tabulate_effects()).header;
    let rows = match id {
        TableId::SymbolEffects => words(&GOLDEN_EFFECTS),
        TableId::DataErrorPatterns => words(&GOLDEN_PATTERNS),
        TableId::ErrorPercentages => triples(&GOLDEN_PERCENTAGES),
        TableId::PatternFrequency => triples(&GOLDEN_FREQUENCY),
    };
    RenderedTable { id, header: generated_header, rows }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellMismatch {
    pub row: usize,
    pub column: usize,
    pub generated: String,
    pub golden: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableComparison {
    pub id: TableId,
    pub cells_compared: usize,
    pub mismatches: Vec<CellMismatch>,
}

impl TableComparison {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn compare(generated: &RenderedTable, golden: &RenderedTable) -> TableComparison {
    let mut mismatches = vec![];
    let mut cells = 0;
    let rows = generated.rows.len().max(golden.rows.len());
    for r in 0..rows {
        let g = generated.rows.get(r).map(Vec::as_slice).unwrap_or(&[]);
        let t = golden.rows.get(r).map(Vec::as_slice).unwrap_or(&[]);
        for c in 0..g.len().max(t.len()) {
            cells += 1;
            let gv = g.get(c).cloned().unwrap_or_default();
            let tv = t.get(c).cloned().unwrap_or_default();
            if gv != tv {
                mismatches.push(CellMismatch { row: r, column: c, generated: gv, golden: tv });
            }
        }
    }
    TableComparison { id: generated.id, cells_compared: cells, mismatches }
}

pub fn verify(id: TableId) -> TableComparison {
    compare(&generate(id, &tabulate_effects()), &golden(id))
}

/// Headline shares quoted alongside the tables.
#[derive(Clone, Debug, Serialize)]
pub struct HeadlineShares {
    pub data_to_data: f64,
    pub symbol_violation: f64,
    pub control: f64,
}

pub fn headline_shares(t: &EffectTabulation) -> HeadlineShares {
    let data_to_data = t.data_to_data_fraction();
    let symbol_violation = t.symbol_violation_fraction();
    HeadlineShares {
        data_to_data,
        symbol_violation,
        control: 1.0 - data_to_data - symbol_violation,
    }
}
