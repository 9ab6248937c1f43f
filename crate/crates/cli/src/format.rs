//! JSON documents for states, assemblages, measurement sets and covariance
//! matrices. One schema, discriminated by `kind`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use steerkit_core::criteria::GaussianCovariance;
use steerkit_core::linalg::{c, CMat};
use steerkit_core::{Assemblage, DensityMatrix, MeasurementSet, Povm};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Row-major rows of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Body {
    State {
        dims: [usize; 2],
        matrix: JsonMatrix,
    },
    Assemblage {
        dim: usize,
        settings: usize,
        outcomes: usize,
        /// `members[x][a]`.
        members: Vec<Vec<JsonMatrix>>,
    },
    Measurements {
        dim: usize,
        /// `povms[x][a]`.
        povms: Vec<Vec<JsonMatrix>>,
    },
    Covariance {
        modes: [usize; 2],
        matrix: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: u32,
    #[serde(flatten)]
    pub body: Body,
}

impl Document {
    pub fn new(body: Body) -> Self {
        Self {
            version: FORMAT_VERSION,
            body,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("bad document: {e}")))?;
        if doc.version != FORMAT_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported document version {} (expected {FORMAT_VERSION})",
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn read(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            Body::State { .. } => "state",
            Body::Assemblage { .. } => "assemblage",
            Body::Measurements { .. } => "measurements",
            Body::Covariance { .. } => "covariance",
        }
    }

    pub fn from_state(rho: &DensityMatrix, dims: (usize, usize)) -> Self {
        Self::new(Body::State {
            dims: [dims.0, dims.1],
            matrix: matrix_to_json(rho.matrix()),
        })
    }

    pub fn from_assemblage(asm: &Assemblage) -> Self {
        Self::new(Body::Assemblage {
            dim: asm.dim(),
            settings: asm.settings(),
            outcomes: asm.outcomes(),
            members: asm
                .member_matrices()
                .iter()
                .map(|row| row.iter().map(matrix_to_json).collect())
                .collect(),
        })
    }

    pub fn from_measurements(ms: &MeasurementSet) -> Self {
        Self::new(Body::Measurements {
            dim: ms.dim(),
            povms: ms
                .effect_matrices()
                .iter()
                .map(|row| row.iter().map(matrix_to_json).collect())
                .collect(),
        })
    }

    pub fn from_covariance(gc: &GaussianCovariance) -> Self {
        let m = gc.matrix();
        let (na, nb) = gc.modes();
        Self::new(Body::Covariance {
            modes: [na, nb],
            matrix: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
        })
    }

    fn wrong_kind<T>(&self, want: &str) -> Result<T, CliError> {
        Err(CliError::Invalid(format!("expected a {want} document, got {}", self.kind())))
    }

    pub fn to_state(&self) -> Result<(DensityMatrix, (usize, usize)), CliError> {
        let Body::State { dims, matrix } = &self.body else {
            return self.wrong_kind("state");
        };
        let m = matrix_from_json(matrix)?;
        if dims[0] * dims[1] != m.nrows() {
            return Err(CliError::Invalid(format!(
                "dims {}x{} do not match a {}x{} matrix",
                dims[0],
                dims[1],
                m.nrows(),
                m.ncols()
            )));
        }
        Ok((DensityMatrix::new(m)?, (dims[0], dims[1])))
    }

    pub fn to_assemblage(&self) -> Result<Assemblage, CliError> {
        let Body::Assemblage {
            dim,
            settings,
            outcomes,
            members,
        } = &self.body
        else {
            return self.wrong_kind("assemblage");
        };
        if members.len() != *settings || members.iter().any(|r| r.len() != *outcomes) {
            return Err(CliError::Invalid("member table does not match settings x outcomes".into()));
        }
        let mats = nested(members)?;
        if mats.iter().flatten().any(|m| m.nrows() != *dim) {
            return Err(CliError::Invalid(format!("members must be {dim}x{dim}")));
        }
        Ok(Assemblage::new(mats)?)
    }

    pub fn to_measurements(&self) -> Result<MeasurementSet, CliError> {
        let Body::Measurements { dim, povms } = &self.body else {
            return self.wrong_kind("measurements");
        };
        let mats = nested(povms)?;
        if mats.iter().flatten().any(|m| m.nrows() != *dim) {
            return Err(CliError::Invalid(format!("effects must be {dim}x{dim}")));
        }
        let povms = mats.into_iter().map(Povm::from_matrices).collect::<Result<Vec<_>, _>>()?;
        Ok(MeasurementSet::new(povms)?)
    }

    pub fn to_covariance(&self) -> Result<GaussianCovariance, CliError> {
        let Body::Covariance { modes, matrix } = &self.body else {
            return self.wrong_kind("covariance");
        };
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(CliError::Invalid("covariance matrix must be square".into()));
        }
        let v = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
        Ok(GaussianCovariance::new(modes[0], modes[1], v)?)
    }
}

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMat, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Invalid("matrix must be square and nonempty".into()));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Invalid("matrix entries must be finite".into()));
    }
    Ok(CMat::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn nested(rows: &[Vec<JsonMatrix>]) -> Result<Vec<Vec<CMat>>, CliError> {
    rows.iter()
        .map(|row| row.iter().map(matrix_from_json).collect())
        .collect()
}
