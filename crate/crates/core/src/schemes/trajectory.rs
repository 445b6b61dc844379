//! Logged runs and their CSV / JSON-lines exports.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, SpaceModel};

/// Which residual column to read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Residual {
    /// `d(x_n, x_{n−1})`.
    Prev,
    /// `d(T(x_n), x_n)`.
    T,
    /// `d(U(x_n), x_n)`.
    U,
}

/// An ordered run `x_0, x_1, …, x_len−1`.
///
/// Residuals are kept for every index; iterates only every `stride`-th
/// index (plus the last one).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub stream: String,
    pub space: SpaceModel,
    stride: usize,
    stored: Vec<Point>,
    last: Point,
    len: usize,
    d_prev: Vec<f64>,
    d_t: Option<Vec<f64>>,
    d_u: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    stream: &'a str,
    n: usize,
    x: &'a Point,
    d_prev: Option<f64>,
    d_t: Option<f64>,
    d_u: Option<f64>,
}

impl Trajectory {
    pub(crate) fn start(stream: &str, space: &SpaceModel, x0: Point, stride: usize, with_t: bool, with_u: bool) -> Self {
        Trajectory {
            stream: stream.to_string(),
            space: space.clone(),
            stride: stride.max(1),
            stored: vec![x0.clone()],
            last: x0,
            len: 1,
            d_prev: vec![f64::NAN],
            d_t: with_t.then(Vec::new),
            d_u: with_u.then(Vec::new),
        }
    }

    /// Records the residuals of the most recent iterate.
    pub(crate) fn set_residuals(&mut self, d_t: Option<f64>, d_u: Option<f64>) {
        if let (Some(v), Some(d)) = (self.d_t.as_mut(), d_t) {
            v.push(d);
        }
        if let (Some(v), Some(d)) = (self.d_u.as_mut(), d_u) {
            v.push(d);
        }
    }

    pub(crate) fn push(&mut self, x: Point, d_prev: f64) {
        if self.len.is_multiple_of(self.stride) {
            self.stored.push(x.clone());
        }
        self.d_prev.push(d_prev);
        self.last = x;
        self.len += 1;
    }

    /// Number of iterates, i.e. steps + 1.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn last(&self) -> &Point {
        &self.last
    }

    /// `x_n`, if it was stored.
    pub fn get(&self, n: usize) -> Option<&Point> {
        if n + 1 == self.len {
            Some(&self.last)
        } else if n.is_multiple_of(self.stride) {
            self.stored.get(n / self.stride)
        } else {
            None
        }
    }

    /// Stored iterates with their indices.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Point)> + '_ {
        let tail = (self.len > 1 && !(self.len - 1).is_multiple_of(self.stride)).then_some((self.len - 1, &self.last));
        self.stored.iter().enumerate().map(move |(i, p)| (i * self.stride, p)).chain(tail)
    }

    /// All stored iterates, requiring a dense trajectory.
    pub fn points(&self) -> Result<&[Point]> {
        if self.stride != 1 {
            return Err(Error::usage("trajectory was thinned; dense iterates unavailable"));
        }
        Ok(&self.stored)
    }

    /// The residual column; index 0 of `Prev` is NaN.
    pub fn residual(&self, which: Residual) -> Option<&[f64]> {
        match which {
            Residual::Prev => Some(&self.d_prev),
            Residual::T => self.d_t.as_deref(),
            Residual::U => self.d_u.as_deref(),
        }
    }

    /// `max_n d(x_n, p)` over the stored iterates.
    pub fn max_dist_to(&self, p: &Point) -> Result<f64> {
        use crate::geometry::GeodesicSpace;
        self.iter().try_fold(0.0f64, |m, (_, x)| Ok(m.max(self.space.dist(x, p)?)))
    }

    /// The iterates `x_0, x_k, x_{2k}, …` as a new dense trajectory
    /// (residuals other than `d_prev` are dropped).
    pub fn subsequence(&self, k: usize, offset: usize, stream: &str) -> Result<Trajectory> {
        use crate::geometry::GeodesicSpace;
        let pts = self.points()?;
        let mut it = pts.iter().skip(offset).step_by(k.max(1));
        let first = it.next().ok_or_else(|| Error::usage("empty subsequence"))?.clone();
        let mut out = Trajectory::start(stream, &self.space, first, 1, false, false);
        for p in it {
            let d = self.space.dist(out.last(), p)?;
            out.push(p.clone(), d);
        }
        Ok(out)
    }

    fn coord_names(&self) -> Vec<String> {
        match &self.space {
            SpaceModel::Euclidean { dim } => (0..*dim).map(|i| format!("x{i}")).collect(),
            SpaceModel::Hyperboloid => vec!["x0".into(), "x1".into(), "x2".into()],
            SpaceModel::Tree { .. } => vec!["leg".into(), "t".into()],
        }
    }

    fn at(col: Option<&Vec<f64>>, n: usize) -> Option<f64> {
        col.and_then(|c| c.get(n)).copied().filter(|v| !v.is_nan())
    }

    /// CSV with columns `n, coords…, d_prev, d_T, d_U`; missing values are
    /// left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["n".to_string()];
        header.extend(self.coord_names());
        header.extend(["d_prev", "d_T", "d_U"].map(String::from));
        out.write_record(&header).map_err(Error::io)?;
        let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for (n, x) in self.iter() {
            let mut row = vec![n.to_string()];
            row.extend(x.flat_coords().iter().map(|c| c.to_string()));
            row.push(fmt(Self::at(Some(&self.d_prev), n)));
            row.push(fmt(Self::at(self.d_t.as_ref(), n)));
            row.push(fmt(Self::at(self.d_u.as_ref(), n)));
            out.write_record(&row).map_err(Error::io)?;
        }
        out.flush().map_err(Error::io)?;
        Ok(())
    }

    /// One JSON object per stored iterate.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (n, x) in self.iter() {
            let rec = JsonRecord {
                stream: &self.stream,
                n,
                x,
                d_prev: Self::at(Some(&self.d_prev), n),
                d_t: Self::at(self.d_t.as_ref(), n),
                d_u: Self::at(self.d_u.as_ref(), n),
            };
            serde_json::to_writer(&mut w, &rec).map_err(Error::io)?;
            writeln!(w).map_err(Error::io)?;
        }
        Ok(())
    }
}
