use serde::{Deserialize, Serialize, Serializer};

use crate::error::Result;
use crate::series::ColumnSeries;

/// How a row joined a bicluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowFlag {
    /// Strictly increasing along the series.
    Exact,
    /// Strictly increasing along the reversed series.
    Negative,
    /// Increasing along the series up to a bounded number of violations.
    Approximate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bicluster {
    /// Ascending row indices.
    pub rows: Vec<usize>,
    pub series: ColumnSeries,
    pub fitness: f64,
    /// One flag per entry of `rows`.
    pub flags: Vec<RowFlag>,
}

impl Bicluster {
    pub fn exact(rows: Vec<usize>, series: ColumnSeries, fitness: f64) -> Self {
        let flags = vec![RowFlag::Exact; rows.len()];
        Self {
            rows,
            series,
            fitness,
            flags,
        }
    }

    pub fn count(&self, flag: RowFlag) -> usize {
        self.flags.iter().filter(|&&f| f == flag).count()
    }

    pub fn to_record(&self) -> BiclusterRecord {
        BiclusterRecord {
            fitness: self.fitness,
            columns: self.series.cols().to_vec(),
            rows: self.rows.clone(),
            row_flags: self.flags.clone(),
        }
    }
}

/// On-disk form of a found bicluster. Columns keep the series order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiclusterRecord {
    #[serde(serialize_with = "six_decimals")]
    pub fitness: f64,
    pub columns: Vec<usize>,
    pub rows: Vec<usize>,
    pub row_flags: Vec<RowFlag>,
}

/// Ground-truth (or any found) bicluster reduced to its index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBicluster {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
}

impl From<&Bicluster> for IndexBicluster {
    fn from(b: &Bicluster) -> Self {
        Self {
            rows: b.rows.clone(),
            columns: b.series.cols().to_vec(),
        }
    }
}

pub(crate) fn six_decimals<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format!("{x:.6}"))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// Serialises biclusters sorted by descending fitness, one JSON array.
pub fn biclusters_to_json(biclusters: &[Bicluster]) -> Result<String> {
    let mut records: Vec<BiclusterRecord> = biclusters.iter().map(Bicluster::to_record).collect();
    records.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
    Ok(serde_json::to_string_pretty(&records)?)
}

/// Reads any JSON array of objects with `rows` and `columns` fields (extra
/// fields are ignored), i.e. both ground truth and found bicluster files.
pub fn read_index_biclusters(text: &str) -> Result<Vec<IndexBicluster>> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let b = Bicluster {
            rows: vec![0, 3],
            series: ColumnSeries::new(vec![4, 1]).unwrap(),
            fitness: 1.0 / 3.0,
            flags: vec![RowFlag::Exact, RowFlag::Negative],
        };
        let json = biclusters_to_json(&[b]).unwrap();
        assert!(json.contains("\"fitness\": 0.333333"), "{json}");
        assert!(json.contains("\"negative\""));
        let back: Vec<BiclusterRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0].columns, vec![4, 1]);
        let idx = read_index_biclusters(&json).unwrap();
        assert_eq!(idx[0].rows, vec![0, 3]);
    }
}
