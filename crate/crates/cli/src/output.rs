//! Table assembly shared by the CSV and JSON renderers.

/// A command's result rows: CSV cells plus the JSON value per row.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub results: Vec<serde_json::Value>,
    pub all_pass: bool,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Table {
        Table { header, rows: Vec::new(), results: Vec::new(), all_pass: true }
    }

    pub fn push_row(&mut self, cells: Vec<String>, json: serde_json::Value) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
        self.results.push(json);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|c| escape(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn escape(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// 15 significant digits, the CSV rendering contract.
pub fn sig15(x: f64) -> String {
    format!("{x:.14e}")
}
