//! Landmark dataset ingestion.
//!
//! The on-disk format is tab-separated text, one landmark per row:
//!
//! ```text
//! group<TAB>specimen_id<TAB>landmark_index<TAB>x<TAB>y[<TAB>z]
//! ```
//!
//! Blank lines, `#` comment lines, and one canonical header row are
//! skipped. Landmark indices must form a consecutive run of integers
//! per specimen (any base, so both 0- and 1-based files load), and
//! every specimen must supply the same number of landmarks in the same
//! dimension. Groups and specimens keep their order of first
//! appearance, which fixes the specimen order used by likelihood
//! reductions.

use crate::error::Error;
use crate::Result;
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

/// One specimen: an `N x K` matrix of landmark coordinates (rows in
/// landmark-index order).
#[derive(Debug, Clone)]
pub struct Specimen {
    /// Identifier unique within its group.
    pub id: String,
    /// Landmark coordinates, `N x K`.
    pub config: DMatrix<f64>,
}

/// A parsed landmark file: groups in order of first appearance, each
/// holding its specimens in order of first appearance.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Landmarks per specimen (`N`).
    pub n_landmarks: usize,
    /// Coordinate dimension (`K`, 2 or 3).
    pub dim: usize,
    groups: Vec<(String, Vec<Specimen>)>,
}

impl Dataset {
    /// All groups, in order of first appearance.
    pub fn groups(&self) -> &[(String, Vec<Specimen>)] {
        &self.groups
    }

    /// Group labels in file order.
    pub fn group_labels(&self) -> Vec<&str> {
        self.groups.iter().map(|(g, _)| g.as_str()).collect()
    }

    /// Specimens of one group.
    pub fn group(&self, label: &str) -> Option<&[Specimen]> {
        self.groups
            .iter()
            .find(|(g, _)| g == label)
            .map(|(_, s)| s.as_slice())
    }

    /// Total specimen count across groups.
    pub fn total_specimens(&self) -> usize {
        self.groups.iter().map(|(_, s)| s.len()).sum()
    }

    /// Parse the tab-separated landmark format from a string.
    pub fn parse_str(text: &str) -> Result<Self> {
        // (group, id) -> rows of (landmark index, coordinates)
        let mut order: Vec<(String, Vec<String>)> = Vec::new();
        type RowsById = HashMap<(String, String), Vec<(i64, Vec<f64>)>>;
        let mut rows: RowsById = HashMap::new();
        let mut dim: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            let lineno = lineno + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if line == HEADER_2D || line == HEADER_3D {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 && fields.len() != 6 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 5 or 6 tab-separated fields, found {}", fields.len()),
                });
            }
            let group = fields[0].trim();
            let id = fields[1].trim();
            if group.is_empty() || id.is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "empty group or specimen id".into(),
                });
            }
            let index: i64 = fields[2].trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("landmark index {:?} is not an integer", fields[2]),
            })?;
            let coords: Vec<f64> = fields[3..]
                .iter()
                .map(|f| {
                    f.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                        Error::Parse {
                            line: lineno,
                            msg: format!("coordinate {f:?} is not a finite number"),
                        }
                    })
                })
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(coords.len()),
                Some(d) if d != coords.len() => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("row has {} coordinates, file started with {d}", coords.len()),
                    })
                }
                _ => {}
            }
            let key = (group.to_string(), id.to_string());
            let entry = rows.entry(key.clone()).or_insert_with(|| {
                match order.iter_mut().find(|(g, _)| *g == key.0) {
                    Some((_, ids)) => ids.push(key.1.clone()),
                    None => order.push((key.0.clone(), vec![key.1.clone()])),
                }
                Vec::new()
            });
            if entry.iter().any(|(i, _)| *i == index) {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("duplicate landmark index {index} for specimen {}/{}", key.0, key.1),
                });
            }
            entry.push((index, coords));
        }
        let dim = dim.ok_or_else(|| Error::InvalidData("no landmark rows found".into()))?;
        let mut n_landmarks: Option<usize> = None;
        let mut groups: Vec<(String, Vec<Specimen>)> = Vec::new();
        for (group, ids) in order {
            let mut specimens = Vec::with_capacity(ids.len());
            for id in ids {
                let mut spec_rows = rows.remove(&(group.clone(), id.clone())).expect("recorded");
                spec_rows.sort_by_key(|(i, _)| *i);
                let count = spec_rows.len();
                match n_landmarks {
                    None => {
                        if count < 3 {
                            return Err(Error::InvalidData(format!(
                                "specimen {group}/{id} has {count} landmarks; need at least 3"
                            )));
                        }
                        n_landmarks = Some(count);
                    }
                    Some(n) if n != count => {
                        return Err(Error::InvalidData(format!(
                            "specimen {group}/{id} has {count} landmarks, others have {n}"
                        )))
                    }
                    _ => {}
                }
                let base = spec_rows[0].0;
                for (offset, (idx, _)) in spec_rows.iter().enumerate() {
                    if *idx != base + offset as i64 {
                        return Err(Error::InvalidData(format!(
                            "specimen {group}/{id} has non-consecutive landmark indices"
                        )));
                    }
                }
                let config = DMatrix::from_fn(count, dim, |i, j| spec_rows[i].1[j]);
                specimens.push(Specimen { id, config });
            }
            groups.push((group, specimens));
        }
        Ok(Self {
            n_landmarks: n_landmarks.expect("at least one specimen"),
            dim,
            groups,
        })
    }

    /// Serialize back to the tab-separated format (canonical header,
    /// 1-based landmark indices, full `f64` round-trip precision).
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(if self.dim == 3 { HEADER_3D } else { HEADER_2D });
        out.push('\n');
        for (group, specimens) in &self.groups {
            for sp in specimens {
                for i in 0..self.n_landmarks {
                    out.push_str(group);
                    out.push('\t');
                    out.push_str(&sp.id);
                    out.push('\t');
                    out.push_str(&(i + 1).to_string());
                    for j in 0..self.dim {
                        out.push('\t');
                        let x = sp.config[(i, j)];
                        out.push_str(&format!("{x:?}"));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Assemble a dataset in memory; validates shape consistency.
    pub fn from_groups(groups: Vec<(String, Vec<Specimen>)>) -> Result<Self> {
        let mut n_landmarks = None;
        let mut dim = None;
        for (group, specimens) in &groups {
            for sp in specimens {
                let (n, d) = (sp.config.nrows(), sp.config.ncols());
                if *n_landmarks.get_or_insert(n) != n || *dim.get_or_insert(d) != d {
                    return Err(Error::InvalidData(format!(
                        "specimen {group}/{} is {n}x{d}, inconsistent with the rest",
                        sp.id
                    )));
                }
            }
        }
        match (n_landmarks, dim) {
            (Some(n), Some(d)) if n >= 3 && d >= 1 => Ok(Self {
                n_landmarks: n,
                dim: d,
                groups,
            }),
            _ => Err(Error::InvalidData("empty dataset or too few landmarks".into())),
        }
    }
}

const HEADER_2D: &str = "group\tspecimen_id\tlandmark_index\tx\ty";
const HEADER_3D: &str = "group\tspecimen_id\tlandmark_index\tx\ty\tz";

/// Read a landmark file from disk.
pub fn read_landmarks(path: impl AsRef<Path>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    Dataset::parse_str(&text)
}

/// Write a dataset to disk in the tab-separated format.
pub fn write_landmarks(path: impl AsRef<Path>, dataset: &Dataset) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(dataset.to_tsv().as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SAMPLE: &str = "group\tspecimen_id\tlandmark_index\tx\ty\n\
        small\ts1\t1\t0.5\t1.25\n\
        small\ts1\t2\t-1.0\t2.0\n\
        small\ts1\t3\t3.5\t-0.75\n\
        small\ts2\t1\t0.1\t0.2\n\
        small\ts2\t2\t0.3\t0.4\n\
        small\ts2\t3\t0.5\t0.6\n\
        large\tb1\t1\t1.0\t1.0\n\
        large\tb1\t2\t2.0\t2.0\n\
        large\tb1\t3\t3.0\t1.0\n";

    #[test]
    fn parses_groups_in_first_appearance_order() {
        let ds = Dataset::parse_str(SAMPLE).unwrap();
        assert_eq!(ds.n_landmarks, 3);
        assert_eq!(ds.dim, 2);
        assert_eq!(ds.group_labels(), vec!["small", "large"]);
        assert_eq!(ds.group("small").unwrap().len(), 2);
        assert_eq!(ds.group("large").unwrap().len(), 1);
        let s1 = &ds.group("small").unwrap()[0];
        assert_eq!(s1.id, "s1");
        assert_relative_eq!(s1.config[(0, 1)], 1.25);
        assert_relative_eq!(s1.config[(2, 0)], 3.5);
    }

    #[test]
    fn roundtrips_through_tsv() {
        let ds = Dataset::parse_str(SAMPLE).unwrap();
        let again = Dataset::parse_str(&ds.to_tsv()).unwrap();
        assert_eq!(again.group_labels(), ds.group_labels());
        for (g, specimens) in again.groups() {
            for (a, b) in specimens.iter().zip(ds.group(g).unwrap()) {
                assert_eq!(a.id, b.id);
                assert_eq!(a.config, b.config);
            }
        }
    }

    #[test]
    fn accepts_zero_based_indices_and_comments() {
        let text = "# comment\n\
            g\ta\t0\t1.0\t2.0\n\
            \n\
            g\ta\t1\t3.0\t4.0\n\
            g\ta\t2\t5.0\t6.0\n";
        let ds = Dataset::parse_str(text).unwrap();
        assert_eq!(ds.n_landmarks, 3);
        assert_relative_eq!(ds.group("g").unwrap()[0].config[(2, 1)], 6.0);
    }

    #[test]
    fn rejects_malformed_rows() {
        let wrong_fields = "g\ta\t1\t1.0\n";
        assert!(matches!(
            Dataset::parse_str(wrong_fields),
            Err(Error::Parse { line: 1, .. })
        ));
        let bad_number = "g\ta\t1\t1.0\tNaN\n";
        assert!(matches!(
            Dataset::parse_str(bad_number),
            Err(Error::Parse { line: 1, .. })
        ));
        let bad_index = "g\ta\tx\t1.0\t2.0\n";
        assert!(matches!(
            Dataset::parse_str(bad_index),
            Err(Error::Parse { line: 1, .. })
        ));
        let dup = "g\ta\t1\t1.0\t2.0\ng\ta\t1\t1.0\t2.0\n";
        assert!(matches!(Dataset::parse_str(dup), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            Dataset::parse_str(""),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn rejects_inconsistent_specimens() {
        let gap = "g\ta\t1\t1.0\t2.0\ng\ta\t3\t1.0\t2.0\ng\ta\t4\t0.0\t1.0\n";
        assert!(matches!(Dataset::parse_str(gap), Err(Error::InvalidData(_))));
        let mixed_dim = "g\ta\t1\t1.0\t2.0\ng\ta\t2\t1.0\t2.0\t3.0\n";
        assert!(matches!(
            Dataset::parse_str(mixed_dim),
            Err(Error::Parse { line: 2, .. })
        ));
        let uneven = "g\ta\t1\t1.0\t2.0\ng\ta\t2\t2.0\t1.0\ng\ta\t3\t0.5\t0.25\n\
                      g\tb\t1\t1.0\t2.0\ng\tb\t2\t2.0\t1.0\n";
        assert!(matches!(
            Dataset::parse_str(uneven),
            Err(Error::InvalidData(_))
        ));
    }
}
