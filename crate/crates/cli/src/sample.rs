//! Grid sampling of director fields and the CSV / JSON exports.

use crate::error::{CliError, CliResult};
use crate::format::{sci, ser_sci, Sci};
use crate::profile_spec::ProfileSpec;
use disclination_core::ansatz::{eval_curvature_k_form, theorem_solution, SignBranch, R_MIN};
use disclination_core::nfield::{Construction, DirectorField};
use disclination_core::{Error, ProfileFunction, Vec3};
use serde::Serialize;
use std::io::Write;

pub const CSV_HEADER: &str = "x1,x2,x3,n1,n2,n3,curv_residual,proj_len";

/// Largest allowed `||n| - 1|` in an exported record.
pub const UNIT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Section {
    #[serde(rename = "x2zero")]
    PlaneX2Zero,
    #[serde(rename = "x3zero")]
    PlaneX3Zero,
    #[serde(rename = "volume")]
    Volume,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleGridSpec {
    pub section: Section,
    #[serde(serialize_with = "ser_sci")]
    pub extent: f64,
    pub resolution: usize,
    #[serde(serialize_with = "ser_sci")]
    pub exclusion_radius: f64,
}

impl Default for SampleGridSpec {
    fn default() -> Self {
        Self {
            section: Section::PlaneX2Zero,
            extent: 3.0,
            resolution: 21,
            exclusion_radius: 0.05,
        }
    }
}

impl SampleGridSpec {
    pub fn new(section: Section, extent: f64, resolution: usize, exclusion_radius: f64) -> CliResult<Self> {
        if resolution < 2 {
            return Err(CliError::Usage(format!(
                "resolution must be at least 2, got {resolution}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(CliError::Usage(format!(
                "extent must be positive and finite, got {extent}"
            )));
        }
        if !(exclusion_radius >= R_MIN && exclusion_radius.is_finite()) {
            return Err(CliError::Usage(format!(
                "exclusion radius must be at least {R_MIN:e}, got {exclusion_radius}"
            )));
        }
        Ok(Self {
            section,
            extent,
            resolution,
            exclusion_radius,
        })
    }

    /// Coordinate of grid index `i` along one axis. The numerator is an exact
    /// integer so the centre of an odd grid is exactly zero.
    fn coord(&self, i: usize) -> f64 {
        let m = (self.resolution - 1) as f64;
        self.extent * ((2 * i) as f64 - m) / m
    }

    /// All grid points in row-major order: the lower-numbered in-plane axis
    /// varies fastest (`x1`, then `x2` or `x3`; for volumes `x1`, `x2`, `x3`).
    pub fn points(&self) -> Vec<Vec3> {
        let n = self.resolution;
        let c = |i| self.coord(i);
        match self.section {
            Section::PlaneX2Zero => (0..n)
                .flat_map(|j| (0..n).map(move |i| (i, j)))
                .map(|(i, j)| Vec3::new(c(i), 0.0, c(j)))
                .collect(),
            Section::PlaneX3Zero => (0..n)
                .flat_map(|j| (0..n).map(move |i| (i, j)))
                .map(|(i, j)| Vec3::new(c(i), c(j), 0.0))
                .collect(),
            Section::Volume => (0..n)
                .flat_map(|k| (0..n).flat_map(move |j| (0..n).map(move |i| (i, j, k))))
                .map(|(i, j, k)| Vec3::new(c(i), c(j), c(k)))
                .collect(),
        }
    }

    /// Length of the projection of `n` onto the sampled plane; 1 for volumes.
    pub fn projection_length(&self, n: &Vec3) -> f64 {
        match self.section {
            Section::PlaneX2Zero => n.x.hypot(n.z),
            Section::PlaneX3Zero => n.x.hypot(n.y),
            Section::Volume => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRecord {
    pub x: Vec3,
    pub n: Vec3,
    /// Largest curvature component of the profile's flat connection at `x`.
    pub curv_residual: f64,
    pub proj_len: f64,
}

#[derive(Serialize)]
struct RecordJson {
    x1: Sci,
    x2: Sci,
    x3: Sci,
    n1: Sci,
    n2: Sci,
    n3: Sci,
    curv_residual: Sci,
    proj_len: Sci,
}

impl From<&FieldRecord> for RecordJson {
    fn from(r: &FieldRecord) -> Self {
        Self {
            x1: Sci(r.x.x),
            x2: Sci(r.x.y),
            x3: Sci(r.x.z),
            n1: Sci(r.n.x),
            n2: Sci(r.n.y),
            n3: Sci(r.n.z),
            curv_residual: Sci(r.curv_residual),
            proj_len: Sci(r.proj_len),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstructionName {
    #[serde(rename = "spher-sym")]
    SpherSym,
    #[serde(rename = "hedgehog")]
    Hedgehog,
}

impl From<Construction> for ConstructionName {
    fn from(c: Construction) -> Self {
        match c {
            Construction::SpherSym => ConstructionName::SpherSym,
            Construction::Hedgehog => ConstructionName::Hedgehog,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FieldSampleSet {
    pub profile: ProfileSpec,
    pub grid: SampleGridSpec,
    pub construction: Construction,
    pub records: Vec<FieldRecord>,
    /// Grid points dropped by the origin ball or the hedgehog axis cut.
    pub skipped: usize,
}

#[derive(Serialize)]
struct SampleJson<'a> {
    version: &'static str,
    profile: &'a ProfileSpec,
    grid: &'a SampleGridSpec,
    construction: ConstructionName,
    records: Vec<RecordJson>,
}

pub fn sample_field(
    spec: &ProfileSpec,
    profile: &ProfileFunction,
    grid: &SampleGridSpec,
    construction: Construction,
) -> CliResult<FieldSampleSet> {
    let field = match construction {
        Construction::SpherSym => DirectorField::spherical(profile.clone(), Vec3::z()),
        Construction::Hedgehog => DirectorField::hedgehog(profile.clone()),
    };
    let kvu = theorem_solution(profile, SignBranch::Upper);
    let mut records = Vec::new();
    let mut skipped = 0;
    for x in grid.points() {
        if x.norm() < grid.exclusion_radius {
            skipped += 1;
            continue;
        }
        let n = match field.eval(&x) {
            Ok(n) => n,
            Err(Error::AxisExclusion { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let curv_residual = eval_curvature_k_form(&kvu, &x)?.max_abs();
        records.push(FieldRecord {
            x,
            n,
            curv_residual,
            proj_len: grid.projection_length(&n),
        });
    }
    Ok(FieldSampleSet {
        profile: spec.clone(),
        grid: *grid,
        construction,
        records,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FieldSampleSet {
    /// Largest `||n| - 1|` over the records.
    pub fn max_norm_defect(&self) -> f64 {
        self.records
            .iter()
            .map(|r| (r.n.norm() - 1.0).abs())
            .fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
    }

    fn check_unit_norm(&self) -> CliResult<()> {
        let defect = self.max_norm_defect();
        if !(defect <= UNIT_NORM_TOL) {
            return Err(CliError::CheckFailed(format!(
                "refusing to write: record with ||n| - 1| = {defect:e} exceeds {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> CliResult<()> {
        self.check_unit_norm()?;
        let io = |e| CliError::io("writing CSV", e);
        writeln!(w, "{CSV_HEADER}").map_err(io)?;
        for r in &self.records {
            let v = [r.x.x, r.x.y, r.x.z, r.n.x, r.n.y, r.n.z, r.curv_residual, r.proj_len];
            let line: Vec<String> = v.iter().map(|&c| sci(c)).collect();
            writeln!(w, "{}", line.join(",")).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> CliResult<()> {
        self.check_unit_norm()?;
        let doc = SampleJson {
            version: env!("CARGO_PKG_VERSION"),
            profile: &self.profile,
            grid: &self.grid,
            construction: self.construction.into(),
            records: self.records.iter().map(RecordJson::from).collect(),
        };
        let io = |e| CliError::io("writing JSON", e);
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| io(e.into()))?;
        writeln!(w).map_err(io)?;
        w.flush().map_err(io)
    }

    pub fn write<W: Write>(&self, w: W, format: OutputFormat) -> CliResult<()> {
        match format {
            OutputFormat::Csv => self.write_csv(w),
            OutputFormat::Json => self.write_json(w),
        }
    }

    /// Renders in memory before touching `path`, so a failed unit-norm check
    /// leaves no file behind.
    pub fn write_file(&self, path: &std::path::Path, format: OutputFormat) -> CliResult<()> {
        self.check_unit_norm()?;
        let mut buf = Vec::new();
        self.write(&mut buf, format)?;
        std::fs::write(path, buf).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(SampleGridSpec::new(Section::Volume, 1.0, 1, 0.05).is_err());
        assert!(SampleGridSpec::new(Section::Volume, 0.0, 5, 0.05).is_err());
        assert!(SampleGridSpec::new(Section::Volume, 1.0, 5, 1e-9).is_err());
        assert!(SampleGridSpec::new(Section::Volume, 1.0, 2, R_MIN).is_ok());
    }

    #[test]
    fn row_major_order() {
        let g = SampleGridSpec::new(Section::PlaneX2Zero, 1.0, 3, 0.05).unwrap();
        let p = g.points();
        assert_eq!(p.len(), 9);
        assert_eq!(p[0], Vec3::new(-1.0, 0.0, -1.0));
        assert_eq!(p[1], Vec3::new(0.0, 0.0, -1.0));
        assert_eq!(p[3], Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(p[4], Vec3::zeros());
        let v = SampleGridSpec::new(Section::Volume, 2.0, 2, 0.05).unwrap().points();
        assert_eq!(v[1], Vec3::new(2.0, -2.0, -2.0));
        assert_eq!(v[2], Vec3::new(-2.0, 2.0, -2.0));
        assert_eq!(v[4], Vec3::new(-2.0, -2.0, 2.0));
    }

    #[test]
    fn odd_grid_contains_exact_zero() {
        let g = SampleGridSpec::default();
        assert_eq!(g.coord(10), 0.0);
        assert_eq!(g.coord(0), -3.0);
        assert_eq!(g.coord(20), 3.0);
    }

    #[test]
    fn unit_norm_violation_blocks_output() {
        let spec = ProfileSpec::new(crate::profile_spec::ProfileKind::Zero);
        let f = spec.build().unwrap();
        let g = SampleGridSpec::new(Section::PlaneX3Zero, 1.0, 3, 0.05).unwrap();
        let mut set = sample_field(&spec, &f, &g, Construction::SpherSym).unwrap();
        set.records[0].n *= 1.0 + 1e-9;
        let mut out = Vec::new();
        let err = set.write_csv(&mut out).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_CHECK);
        assert!(out.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        assert!(set.write_file(&path, OutputFormat::Csv).is_err());
        assert!(!path.exists());
    }
}
