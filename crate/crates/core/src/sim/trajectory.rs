//! Dense simulation records and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

/// Independent variable of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Spatial,
    Temporal,
}

/// One vehicle's state, input and derived errors at a grid point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub a: f64,
    pub u: f64,
    pub w: f64,
    pub delta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub e1: f64,
    pub e2: f64,
    pub y: f64,
}

macro_rules! series_struct {
    ($($field:ident),*) => {
        /// Column-oriented time series of [`Sample`]s for one vehicle.
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct VehicleSeries {
            $(pub $field: Vec<f64>,)*
        }

        impl VehicleSeries {
            pub fn with_capacity(n: usize) -> Self {
                Self { $($field: Vec::with_capacity(n),)* }
            }

            pub fn push(&mut self, x: &Sample) {
                $(self.$field.push(x.$field);)*
            }

            pub fn get(&self, k: usize) -> Sample {
                Sample { $($field: self.$field[k],)* }
            }

            pub fn len(&self) -> usize {
                self.t.len()
            }

            pub fn is_empty(&self) -> bool {
                self.t.is_empty()
            }

            /// Keep samples whose index satisfies `keep`.
            pub fn filter_indices(&self, keep: impl Fn(usize) -> bool) -> Self {
                Self { $($field: self.$field.iter().enumerate().filter(|(k, _)| keep(*k)).map(|(_, x)| *x).collect(),)* }
            }
        }
    };
}

series_struct!(t, s, v, a, u, w, delta, delta0, delta1, delta2, e1, e2, y);

/// Header of `trajectory.csv`.
pub const CSV_HEADER: &str = "s_or_t,vehicle,t,s,v,a,u,w,Delta,Delta0,delta1,delta2,e1,e2,y";

/// Records of a platoon run over a strictly increasing grid. Vehicle 0 is the leader.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub domain: Domain,
    pub grid: Vec<f64>,
    pub vehicles: Vec<VehicleSeries>,
}

impl Trajectory {
    pub fn new(domain: Domain, n_vehicles: usize, capacity: usize) -> Self {
        Self {
            domain,
            grid: Vec::with_capacity(capacity),
            vehicles: (0..n_vehicles)
                .map(|_| VehicleSeries::with_capacity(capacity))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn push(&mut self, grid_value: f64, samples: &[Sample]) {
        debug_assert_eq!(samples.len(), self.vehicles.len());
        self.grid.push(grid_value);
        for (series, x) in self.vehicles.iter_mut().zip(samples) {
            series.push(x);
        }
    }

    /// Sub-trajectory restricted to grid values in `[lo, hi]`.
    pub fn segment(&self, lo: f64, hi: f64) -> Self {
        let keep = |k: usize| self.grid[k] >= lo && self.grid[k] <= hi;
        Self {
            domain: self.domain,
            grid: self
                .grid
                .iter()
                .copied()
                .filter(|g| *g >= lo && *g <= hi)
                .collect(),
            vehicles: self
                .vehicles
                .iter()
                .map(|v| v.filter_indices(keep))
                .collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(CSV_HEADER.split(','))?;
        let mut row: Vec<String> = Vec::with_capacity(15);
        for (k, g) in self.grid.iter().enumerate() {
            for (i, series) in self.vehicles.iter().enumerate() {
                let x = series.get(k);
                row.clear();
                row.push(format_sig(*g));
                row.push(i.to_string());
                for value in [
                    x.t, x.s, x.v, x.a, x.u, x.w, x.delta, x.delta0, x.delta1, x.delta2, x.e1,
                    x.e2, x.y,
                ] {
                    row.push(format_sig(value));
                }
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Parse a file produced by [`Trajectory::write_csv`].
    pub fn read_csv<R: Read>(input: R, domain: Domain) -> Result<Self, CsvParseError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
        if header != CSV_HEADER {
            return Err(CsvParseError::Header(header));
        }
        let mut traj = Trajectory::new(domain, 0, 0);
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let num = |j: usize| -> Result<f64, CsvParseError> {
                rec.get(j)
                    .and_then(|f| f.parse::<f64>().ok())
                    .ok_or(CsvParseError::Field {
                        line: line + 2,
                        column: j,
                    })
            };
            let g = num(0)?;
            let vehicle: usize =
                rec.get(1)
                    .and_then(|f| f.parse().ok())
                    .ok_or(CsvParseError::Field {
                        line: line + 2,
                        column: 1,
                    })?;
            if vehicle == 0 {
                traj.grid.push(g);
            }
            if vehicle == traj.vehicles.len() {
                traj.vehicles.push(VehicleSeries::default());
            }
            let series = traj.vehicles.get_mut(vehicle).ok_or(CsvParseError::Field {
                line: line + 2,
                column: 1,
            })?;
            series.push(&Sample {
                t: num(2)?,
                s: num(3)?,
                v: num(4)?,
                a: num(5)?,
                u: num(6)?,
                w: num(7)?,
                delta: num(8)?,
                delta0: num(9)?,
                delta1: num(10)?,
                delta2: num(11)?,
                e1: num(12)?,
                e2: num(13)?,
                y: num(14)?,
            });
        }
        Ok(traj)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CsvParseError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header `{0}`")]
    Header(String),
    #[error("bad value at line {line}, column {column}")]
    Field { line: usize, column: usize },
}

/// Decimal (non-exponent) rendering with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (DIGITS - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}
