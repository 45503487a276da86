//! JSON schemas for functions, sample sets, realizations and measures.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows of
//! pairs. Output of [`to_json`] parses back to the same value and
//! re-serializes to the same bytes.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herglotz::{Atom, DensityCell, HerglotzMeasure};
use crate::kernel::{CaratheodoryFunction, RationalFunction, SampleSet, SampleTable};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::operator::DualityTag;
use crate::realization::Realization;

pub type Pair = [f64; 2];
pub type MatrixRows = Vec<Vec<Pair>>;

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn matrix_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<ComplexMatrix> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("matrix rows have different lengths".into()));
    }
    let m = ComplexMatrix::from_fn(rows.len(), cols, |i, j| complex(rows[i][j]));
    crate::linalg::ensure_finite(&m)?;
    Ok(m)
}

fn matrix_from_rows_shaped(rows: &MatrixRows, r: usize, c: usize, field: &str) -> Result<ComplexMatrix> {
    let m = matrix_from_rows(rows).map_err(|e| Error::Format(format!("field `{field}`: {e}")))?;
    if (m.nrows(), m.ncols()) != (r, c) && !(r == 0 || c == 0) {
        return Err(Error::Format(format!("field `{field}` is {}x{}, expected {r}x{c}", m.nrows(), m.ncols())));
    }
    if (r == 0 || c == 0) && !rows.is_empty() && rows.iter().any(|row| !row.is_empty()) {
        return Err(Error::Format(format!("field `{field}` should be empty")));
    }
    Ok(if r == 0 || c == 0 { ComplexMatrix::zeros(r, c) } else { m })
}

/// `serde(with)` adapter for `Vec<Complex64>`.
pub mod complex_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|z| pair(*z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<Pair>::deserialize(d)?.into_iter().map(complex).collect())
    }
}

/// `serde(with)` adapter for `Option<Vec<ComplexVector>>`.
pub mod opt_vector_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<ComplexVector>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|vs| vs.iter().map(|x| x.iter().map(|z| pair(*z)).collect::<Vec<_>>()).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<ComplexVector>>, D::Error> {
        let raw = Option::<Vec<Vec<Pair>>>::deserialize(d)?;
        Ok(raw.map(|vs| {
            vs.into_iter()
                .map(|x| ComplexVector::from_iterator(x.len(), x.into_iter().map(complex)))
                .collect()
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationFile {
    /// State dimension.
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "V")]
    pub v: MatrixRows,
    #[serde(rename = "C")]
    pub c: MatrixRows,
    #[serde(rename = "D")]
    pub d_matrix: MatrixRows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<DualityTag>,
}

impl RealizationFile {
    pub fn from_realization(r: &Realization) -> Self {
        Self {
            d: r.state_dim(),
            n: Some(r.dim()),
            v: matrix_rows(r.v()),
            c: matrix_rows(r.c()),
            d_matrix: matrix_rows(r.d()),
            tag: Some(r.tag()),
        }
    }

    pub fn to_realization(&self) -> Result<Realization> {
        let dm = matrix_from_rows(&self.d_matrix).map_err(|e| Error::Format(format!("field `D`: {e}")))?;
        let n = self.n.unwrap_or(dm.nrows());
        if dm.nrows() != n || dm.ncols() != n {
            return Err(Error::Format(format!("field `D` is {}x{}, expected {n}x{n}", dm.nrows(), dm.ncols())));
        }
        let v = matrix_from_rows_shaped(&self.v, self.d, self.d, "V")?;
        let c = matrix_from_rows_shaped(&self.c, self.d, n, "C")?;
        Realization::new(v, c, dm, self.tag.unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomFile {
    pub t: f64,
    pub mass: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellFile {
    pub t0: f64,
    pub t1: f64,
    pub m: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub dim: usize,
    #[serde(default)]
    pub atoms: Vec<AtomFile>,
    #[serde(default)]
    pub density: Vec<CellFile>,
    #[serde(rename = "D")]
    pub d: MatrixRows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<DualityTag>,
}

impl MeasureFile {
    pub fn from_measure(mu: &HerglotzMeasure) -> Self {
        Self {
            dim: mu.dim(),
            atoms: mu.atoms().iter().map(|a| AtomFile { t: a.t, mass: matrix_rows(&a.mass) }).collect(),
            density: mu.density().iter().map(|c| CellFile { t0: c.t0, t1: c.t1, m: matrix_rows(&c.m) }).collect(),
            d: matrix_rows(mu.d()),
            tag: Some(mu.tag()),
        }
    }

    pub fn to_measure(&self) -> Result<HerglotzMeasure> {
        let n = self.dim;
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .map(|(k, a)| Ok(Atom { t: a.t, mass: matrix_from_rows_shaped(&a.mass, n, n, &format!("atoms[{k}].mass"))? }))
            .collect::<Result<Vec<_>>>()?;
        let density = self
            .density
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Ok(DensityCell { t0: c.t0, t1: c.t1, m: matrix_from_rows_shaped(&c.m, n, n, &format!("density[{k}].m"))? })
            })
            .collect::<Result<Vec<_>>>()?;
        let d = matrix_from_rows_shaped(&self.d, n, n, "D")?;
        HerglotzMeasure::new(n, atoms, density, d, self.tag.unwrap_or_default())
    }
}

/// A function spec: `{"kind": ...}` plus the fields of that kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionFile {
    Constant {
        value: MatrixRows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<DualityTag>,
    },
    RationalMatrix {
        numerator: Vec<MatrixRows>,
        denominator: Vec<MatrixRows>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<DualityTag>,
    },
    Realization(RealizationFile),
    Measure(MeasureFile),
    Table {
        dim: usize,
        points: Vec<Pair>,
        values: Vec<MatrixRows>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<DualityTag>,
    },
}

impl FunctionFile {
    pub fn to_function(&self) -> Result<CaratheodoryFunction> {
        match self {
            FunctionFile::Constant { value, tag } => {
                let m = matrix_from_rows(value).map_err(|e| Error::Format(format!("field `value`: {e}")))?;
                crate::linalg::ensure_square(&m).map_err(|e| Error::Format(format!("field `value`: {e}")))?;
                let f = CaratheodoryFunction::constant(m)?;
                Ok(match f {
                    CaratheodoryFunction::Rational { function, .. } => {
                        CaratheodoryFunction::Rational { function, tag: tag.unwrap_or_default() }
                    }
                    other => other,
                })
            }
            FunctionFile::RationalMatrix { numerator, denominator, tag } => {
                let conv = |ms: &[MatrixRows], field: &str| -> Result<Vec<ComplexMatrix>> {
                    ms.iter()
                        .enumerate()
                        .map(|(k, m)| matrix_from_rows(m).map_err(|e| Error::Format(format!("field `{field}[{k}]`: {e}"))))
                        .collect()
                };
                let function = RationalFunction::new(conv(numerator, "numerator")?, conv(denominator, "denominator")?)
                    .map_err(|e| Error::Format(e.to_string()))?;
                Ok(CaratheodoryFunction::Rational { function, tag: tag.unwrap_or_default() })
            }
            FunctionFile::Realization(r) => Ok(CaratheodoryFunction::Realization(r.to_realization()?)),
            FunctionFile::Measure(m) => Ok(CaratheodoryFunction::Measure(m.to_measure()?)),
            FunctionFile::Table { dim, points, values, tag } => {
                let vals = values
                    .iter()
                    .enumerate()
                    .map(|(k, m)| matrix_from_rows_shaped(m, *dim, *dim, &format!("values[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                let table = SampleTable::new(*dim, points.iter().map(|p| complex(*p)).collect(), vals)?;
                Ok(CaratheodoryFunction::Table { table, tag: tag.unwrap_or_default() })
            }
        }
    }

    pub fn from_function(f: &CaratheodoryFunction) -> Self {
        match f {
            CaratheodoryFunction::Rational { function, tag } => FunctionFile::RationalMatrix {
                numerator: function.numerator.iter().map(matrix_rows).collect(),
                denominator: function.denominator.iter().map(matrix_rows).collect(),
                tag: Some(*tag),
            },
            CaratheodoryFunction::Realization(r) => FunctionFile::Realization(RealizationFile::from_realization(r)),
            CaratheodoryFunction::Measure(m) => FunctionFile::Measure(MeasureFile::from_measure(m)),
            CaratheodoryFunction::Table { table, tag } => FunctionFile::Table {
                dim: table.dim,
                points: table.points.iter().map(|z| pair(*z)).collect(),
                values: table.values.iter().map(matrix_rows).collect(),
                tag: Some(*tag),
            },
        }
    }
}

/// Sample points, optionally with direction vectors and with values `φ(w_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesFile {
    pub points: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<Pair>>>,
    #[serde(default)]
    pub include_origin: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<MatrixRows>>,
}

impl SamplesFile {
    pub fn points(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| complex(*p)).collect()
    }

    pub fn sample_set(&self) -> Result<SampleSet> {
        let set = SampleSet {
            points: self.points(),
            vectors: self
                .vectors
                .as_ref()
                .map(|vs| vs.iter().map(|v| ComplexVector::from_iterator(v.len(), v.iter().map(|p| complex(*p)))).collect()),
            include_origin: self.include_origin,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn values(&self) -> Result<Vec<ComplexMatrix>> {
        let vals = self.values.as_ref().ok_or_else(|| Error::Format("field `values` is required here".into()))?;
        if vals.len() != self.points.len() {
            return Err(Error::Format(format!("{} points but {} values", self.points.len(), vals.len())));
        }
        vals.iter()
            .enumerate()
            .map(|(k, m)| matrix_from_rows(m).map_err(|e| Error::Format(format!("field `values[{k}]`: {e}"))))
            .collect()
    }

    pub fn from_values(points: &[Complex64], values: &[ComplexMatrix]) -> Self {
        Self {
            points: points.iter().map(|z| pair(*z)).collect(),
            vectors: None,
            include_origin: points.iter().any(|p| p.norm() == 0.0),
            values: Some(values.iter().map(matrix_rows).collect()),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses JSON, reporting line and column on failure.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn realization_to_json(r: &Realization) -> Result<String> {
    to_json(&RealizationFile::from_realization(r))
}

pub fn realization_from_json(text: &str) -> Result<Realization> {
    from_json::<RealizationFile>(text)?.to_realization()
}

pub fn measure_to_json(mu: &HerglotzMeasure) -> Result<String> {
    to_json(&MeasureFile::from_measure(mu))
}

pub fn measure_from_json(text: &str) -> Result<HerglotzMeasure> {
    from_json::<MeasureFile>(text)?.to_measure()
}

pub fn function_from_json(text: &str) -> Result<CaratheodoryFunction> {
    from_json::<FunctionFile>(text)?.to_function()
}

pub fn function_to_json(f: &CaratheodoryFunction) -> Result<String> {
    to_json(&FunctionFile::from_function(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};
    use crate::random;

    #[test]
    fn realization_round_trip_is_byte_identical() {
        let mut rng = random::rng(1);
        let r = random::colligation(&mut rng, 2, 3);
        let a = realization_to_json(&r).unwrap();
        let back = realization_from_json(&a).unwrap();
        assert_eq!(back, r);
        assert_eq!(realization_to_json(&back).unwrap(), a);
    }

    #[test]
    fn measure_round_trip_is_byte_identical() {
        let mut rng = random::rng(2);
        let mu = random::measure(&mut rng, 2, 3, 16);
        let a = measure_to_json(&mu).unwrap();
        let back = measure_from_json(&a).unwrap();
        assert_eq!(back, mu);
        assert_eq!(measure_to_json(&back).unwrap(), a);
    }

    #[test]
    fn function_specs_parse() {
        let f = function_from_json(r#"{"kind":"constant","value":[[[1,0]]]}"#).unwrap();
        assert_eq!(f.eval(c(0.2, 0.1)).unwrap()[(0, 0)], re(1.0));
        let g = function_from_json(r#"{"kind":"rational_matrix","numerator":[[[[1,0]]],[[[1,0]]]],"denominator":[[[[1,0]]],[[[-1,0]]]]}"#)
            .unwrap();
        assert!((g.eval(re(0.5)).unwrap()[(0, 0)] - re(3.0)).norm() < 1e-15);
        let t = function_from_json(r#"{"kind":"table","dim":1,"points":[[0,0],[0.5,0]],"values":[[[[1,0]]],[[[0,0]]]]}"#).unwrap();
        assert!(!t.is_analytic());
        let back = function_from_json(&function_to_json(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn malformed_input_reports_position() {
        let e = function_from_json("{\n  \"kind\": \"constant\",\n  \"value\": [[[1,0]]\n").unwrap_err();
        assert!(matches!(e, Error::Format(ref m) if m.contains("line")), "{e}");
        let e = function_from_json(r#"{"kind":"constant","valu":[[[1,0]]]}"#).unwrap_err();
        assert!(e.to_string().contains("valu"));
        assert!(realization_from_json(r#"{"d":1,"V":[[[2,0]]],"C":[[[1,0]]],"D":[[[0,0]]]}"#).is_err());
    }

    #[test]
    fn samples_file_round_trip() {
        let s = SamplesFile::from_values(&[re(0.0), c(0.1, 0.2)], &vec![crate::linalg::scalar_matrix(re(1.0)); 2]);
        let text = to_json(&s).unwrap();
        let back: SamplesFile = from_json(&text).unwrap();
        assert_eq!(back, s);
        assert!(back.sample_set().unwrap().include_origin);
    }
}
