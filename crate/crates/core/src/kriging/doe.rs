use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Default minimum Euclidean distance between two DOE points.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-8;

/// Input points and the observed performance values at them.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOfExperiments {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    min_separation: f64,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl DesignOfExperiments {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        Self::with_min_separation(points, values, DEFAULT_MIN_SEPARATION)
    }

    pub fn with_min_separation(
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        min_separation: f64,
    ) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::input(
                "kriging",
                format!("{} points but {} values", points.len(), values.len()),
            ));
        }
        if points.len() < 2 {
            return Err(Error::input("kriging", "a DOE needs at least 2 points"));
        }
        if !(min_separation >= 0.0) {
            return Err(Error::config("kriging", "minimum separation must be >= 0"));
        }
        let n = points[0].len();
        if n == 0 {
            return Err(Error::input("kriging", "points must have dimension >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    module: "kriging",
                    expected: n,
                    got: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::input("kriging", format!("point {i} is not finite")));
            }
            if !values[i].is_finite() {
                return Err(Error::input("kriging", format!("value {i} is not finite")));
            }
            for (j, q) in points[..i].iter().enumerate() {
                if distance(p, q) < min_separation {
                    return Err(Error::input(
                        "kriging",
                        format!("points {j} and {i} are closer than {min_separation:e}"),
                    ));
                }
            }
        }
        Ok(Self {
            points,
            values,
            min_separation,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    /// Per-coordinate range `max - min`.
    pub fn ranges(&self) -> Vec<f64> {
        (0..self.dimension())
            .map(|k| {
                let (lo, hi) = self
                    .points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[k]), hi.max(p[k]))
                    });
                hi - lo
            })
            .collect()
    }

    /// Whether `x` keeps at least the minimum separation from every point.
    pub fn admits(&self, x: &[f64]) -> bool {
        self.points
            .iter()
            .all(|p| distance(p, x) >= self.min_separation)
    }

    /// Appends the candidates that respect the separation rule (against the
    /// DOE and against previously accepted candidates). Returns the indices
    /// of the dropped candidates.
    pub fn extend(&mut self, points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Vec<usize>> {
        if points.len() != values.len() {
            return Err(Error::input(
                "kriging",
                format!("{} points but {} values", points.len(), values.len()),
            ));
        }
        let n = self.dimension();
        let mut dropped = Vec::new();
        for (i, (p, v)) in points.into_iter().zip(values).enumerate() {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    module: "kriging",
                    expected: n,
                    got: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) || !v.is_finite() {
                return Err(Error::input(
                    "kriging",
                    format!("candidate {i} is not finite"),
                ));
            }
            if self.admits(&p) {
                self.points.push(p);
                self.values.push(v);
            } else {
                dropped.push(i);
            }
        }
        Ok(dropped)
    }

    /// Writes `x1,…,xn,y` with a header row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.dimension()).map(|k| format!("x{k}")).collect();
        header.push("y".to_owned());
        csv.write_record(&header)?;
        for (p, v) in self.points.iter().zip(&self.values) {
            let mut row: Vec<String> = p.iter().map(|c| format!("{c:?}")).collect();
            row.push(format!("{v:?}"));
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Reads the format written by [`DesignOfExperiments::write_csv`]: any
    /// header row, then `n` input columns followed by one value column.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let width = csv.headers()?.len();
        if width < 2 {
            return Err(Error::input("kriging", "DOE CSV needs at least 2 columns"));
        }
        let mut points = Vec::new();
        let mut values = Vec::new();
        for record in csv.records() {
            let record = record?;
            let row: Vec<f64> = record
                .iter()
                .map(|field| {
                    field
                        .trim()
                        .parse::<f64>()
                        .map_err(|e| Error::input("kriging", format!("bad number `{field}`: {e}")))
                })
                .collect::<Result<_>>()?;
            values.push(row[width - 1]);
            points.push(row[..width - 1].to_vec());
        }
        Self::new(points, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_close_points_and_bad_values() {
        assert!(DesignOfExperiments::new(vec![vec![0.0]], vec![1.0]).is_err());
        assert!(DesignOfExperiments::new(vec![vec![0.0], vec![0.0]], vec![1.0, 2.0]).is_err());
        assert!(DesignOfExperiments::new(vec![vec![0.0], vec![1.0]], vec![1.0, f64::NAN]).is_err());
        assert!(DesignOfExperiments::new(vec![vec![0.0], vec![1.0, 2.0]], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn extend_drops_duplicates() {
        let mut doe =
            DesignOfExperiments::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![1.0, 2.0]).unwrap();
        let dropped = doe
            .extend(
                vec![vec![0.0, 0.0], vec![3.0, 3.0], vec![3.0, 3.0 + 1e-12]],
                vec![5.0, 6.0, 7.0],
            )
            .unwrap();
        assert_eq!(dropped, vec![0, 2]);
        assert_eq!(doe.len(), 3);
    }

    #[test]
    fn csv_round_trip() {
        let doe = DesignOfExperiments::new(
            vec![vec![0.1, -2.5], vec![1.0 / 3.0, 7.0]],
            vec![0.5, -1e-7],
        )
        .unwrap();
        let mut buf = Vec::new();
        doe.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,y\n"));
        assert_eq!(DesignOfExperiments::read_csv(buf.as_slice()).unwrap(), doe);
    }
}
