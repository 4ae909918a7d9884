use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;

use super::inverse::{coefficient_index, fiber_coefficients, fiber_grid};
use super::transform::FourierSection;
use super::SyzError;

/// One sampled value of a section.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub value: Complex64,
}

/// Section values on `base points × uniform fiber grid`, with free-form
/// metadata carried as `# key=value` comment lines in CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSamples {
    pub dim: usize,
    pub grid: usize,
    pub rows: Vec<SampleRow>,
    pub metadata: Vec<(String, String)>,
}

impl FiberSamples {
    /// Samples `s` (in its attached frame when `in_frame`) on the uniform
    /// fiber grid above each base point.
    pub fn from_section(s: &FourierSection, base_points: &[Vec<f64>], grid: usize, in_frame: bool) -> Self {
        let ys = fiber_grid(s.dim(), grid);
        let rows = base_points
            .iter()
            .flat_map(|xi| {
                ys.iter().map(move |y| SampleRow {
                    xi: xi.clone(),
                    y: y.clone(),
                    value: if in_frame {
                        s.eval_in_frame(xi, y)
                    } else {
                        s.eval(xi, y)
                    },
                })
            })
            .collect();
        Self {
            dim: s.dim(),
            grid,
            rows,
            metadata: vec![
                (
                    "frame".into(),
                    if in_frame {
                        s.frame_name().into()
                    } else {
                        "unitary".into()
                    },
                ),
                ("truncation_radius".into(), s.radius().to_string()),
                ("truncation_bound".into(), format!("{:e}", s.truncation_bound())),
                ("grid".into(), grid.to_string()),
            ],
        }
    }

    pub fn push_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), SyzError> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}").map_err(|e| SyzError::Io(e.to_string()))?;
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("xi{j}")).collect();
        header.extend((1..=self.dim).map(|j| format!("y{j}")));
        header.push("re".into());
        header.push("im".into());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.xi.iter().chain(&r.y).map(|x| format!("{x:.17e}")).collect();
            rec.push(format!("{:.17e}", r.value.re));
            rec.push(format!("{:.17e}", r.value.im));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| SyzError::Io(e.to_string()))?;
        Ok(())
    }

    /// Reads the format written by [`FiberSamples::write_csv`]; the grid size
    /// is taken from the `grid` metadata entry.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, SyzError> {
        let mut metadata = Vec::new();
        let mut body = String::new();
        for line in BufReader::new(input).lines() {
            let line = line.map_err(|e| SyzError::Io(e.to_string()))?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    metadata.push((k.to_string(), v.to_string()));
                }
            } else {
                body.push_str(&line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let cols = r.headers()?.len();
        if cols < 4 || cols % 2 != 0 {
            return Err(SyzError::MalformedSamples(format!("{cols} columns")));
        }
        let dim = (cols - 2) / 2;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| SyzError::MalformedSamples(e.to_string()))?;
            rows.push(SampleRow {
                xi: nums[..dim].to_vec(),
                y: nums[dim..2 * dim].to_vec(),
                value: Complex64::new(nums[2 * dim], nums[2 * dim + 1]),
            });
        }
        let grid = metadata
            .iter()
            .find(|(k, _)| k == "grid")
            .and_then(|(_, v)| v.parse().ok())
            .ok_or_else(|| SyzError::MalformedSamples("missing grid metadata".into()))?;
        Ok(Self {
            dim,
            grid,
            rows,
            metadata,
        })
    }

    /// Fiber Fourier coefficients above each sampled base point, for modes
    /// `|m|∞ ≤ radius`.
    pub fn coefficients(&self, radius: i64) -> Result<Vec<(Vec<f64>, Vec<(Vec<i64>, Complex64)>)>, SyzError> {
        if 2 * radius >= self.grid as i64 {
            return Err(SyzError::NyquistViolated {
                radius,
                grid: self.grid,
            });
        }
        let block = self.grid.pow(self.dim as u32);
        if !self.rows.len().is_multiple_of(block) {
            return Err(SyzError::MalformedSamples("incomplete fiber grid".into()));
        }
        let modes = crate::numerics::integer_box(self.dim, radius);
        Ok(self
            .rows
            .chunks(block)
            .map(|chunk| {
                let values: Vec<Complex64> = chunk.iter().map(|r| r.value).collect();
                let c = fiber_coefficients(&values, self.dim, self.grid);
                let list = modes
                    .iter()
                    .map(|m| (m.clone(), c[coefficient_index(m, self.grid)]))
                    .collect();
                (chunk[0].xi.clone(), list)
            })
            .collect())
    }
}
