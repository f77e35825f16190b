//! Built-in scenarios addressed as `name:arg,arg`.

use conecalc::lattice::GridSpec;
use conecalc::nulldist::{TimeFunction, TimeKind};
use conecalc::spacetime::{validate, ConformalFactor, StructureDesc, VALIDATION_TOL};
use conecalc::{BoxRegion, SpacetimeStructure};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub structure: StructureDesc,
    pub default_grid: GridSpec,
    pub default_time: TimeKind,
    /// Demo scenarios whose structure is deliberately not a valid spacetime.
    pub expect_invalid: bool,
}

pub struct Template {
    pub syntax: &'static str,
    pub summary: &'static str,
    /// Argument list used when the scenario is listed.
    pub example: &'static str,
}

pub const TEMPLATES: &[Template] = &[
    Template { syntax: "flat:n,nu", summary: "flat ℝ^(n−ν,ν) with the coordinate frame", example: "flat:3,2" },
    Template { syntax: "minkowski:m", summary: "Lorentzian product ℝ × ℝ^m", example: "minkowski:1" },
    Template { syntax: "punctured:m", summary: "ℝ × (ℝ^m ∖ {0})", example: "punctured:2" },
    Template { syntax: "notgh_base", summary: "ℝ^{1,1} ∖ J⁺(0)", example: "notgh_base" },
    Template { syntax: "notgh[:eps]", summary: "ℝ × (ℝ^{1,1} ∖ J⁺(0)) with frame ∂x, ∂t − ε∂x", example: "notgh" },
    Template { syntax: "torus:n,nu", summary: "flat ℝ^(n−ν,ν) on a periodic box", example: "torus:2,1" },
    Template { syntax: "frame_demo", summary: "metric built from the frame (1, ½) on Euclidean ℝ²", example: "frame_demo" },
    Template {
        syntax: "conformal_flat:n,nu",
        summary: "flat ℝ^(n−ν,ν) scaled by Ω² with Ω = 1 + ½ sin(p¹)",
        example: "conformal_flat:2,1",
    },
    Template {
        syntax: "spacelike_frame",
        summary: "flat ℝ^{1,1} with a spacelike frame (invalid on purpose)",
        example: "spacelike_frame",
    },
];

fn ints(args: &[&str], count: usize, name: &str) -> Result<Vec<usize>, String> {
    if args.len() != count {
        return Err(format!("scenario {name} takes {count} integer argument(s), got {}", args.len()));
    }
    args.iter()
        .map(|a| a.trim().parse::<usize>().map_err(|_| format!("bad integer {a:?} in scenario {name}")))
        .collect()
}

fn flat_desc(n: usize, nu: usize) -> Result<StructureDesc, String> {
    if nu == 0 || nu > n || n > conecalc::spacetime::MAX_DIM {
        return Err(format!("flat needs 1 ≤ nu ≤ n ≤ {}, got n={n}, nu={nu}", conecalc::spacetime::MAX_DIM));
    }
    Ok(StructureDesc::Flat { n, nu })
}

fn cube_grid(n: usize, half: f64, h: f64) -> GridSpec {
    GridSpec::new(BoxRegion::cube(n, -half, half), h, 2)
}

/// Parses `name` or `name:arg,arg`.
pub fn parse(spec: &str) -> Result<Scenario, String> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let args: Vec<&str> = rest.map(|r| r.split(',').collect()).unwrap_or_default();
    let no_args = |name: &str| {
        if args.is_empty() {
            Ok(())
        } else {
            Err(format!("scenario {name} takes no arguments"))
        }
    };
    let scenario = |structure, default_grid, default_time, expect_invalid| Scenario {
        name: spec.to_string(),
        structure,
        default_grid,
        default_time,
        expect_invalid,
    };
    match name {
        "flat" => {
            let v = ints(&args, 2, name)?;
            Ok(scenario(flat_desc(v[0], v[1])?, cube_grid(v[0], 1.0, 0.25), TimeKind::CanonicalT { nu: v[1] }, false))
        }
        "minkowski" => {
            let m = ints(&args, 1, name)?[0];
            Ok(scenario(flat_desc(m + 1, 1)?, cube_grid(m + 1, 2.0, 0.25), TimeKind::CanonicalT { nu: 1 }, false))
        }
        "punctured" => {
            let m = ints(&args, 1, name)?[0];
            let structure = StructureDesc::Punctured {
                base: Box::new(flat_desc(m + 1, 1)?),
                axes: (1..=m).collect(),
            };
            Ok(scenario(structure, cube_grid(m + 1, 2.0, 0.25), TimeKind::CanonicalT { nu: 1 }, false))
        }
        "notgh_base" => {
            no_args(name)?;
            let structure = StructureDesc::ExcludeFuture {
                base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
                apex: vec![0.0, 0.0],
            };
            Ok(scenario(structure, cube_grid(2, 2.0, 0.25), TimeKind::CanonicalT { nu: 1 }, false))
        }
        "notgh" => {
            let eps = match args.as_slice() {
                [] => 0.0,
                [e] => e.trim().parse::<f64>().map_err(|_| format!("bad eps {e:?}"))?,
                _ => return Err("scenario notgh takes at most one argument".into()),
            };
            if !eps.is_finite() {
                return Err("eps must be finite".into());
            }
            let structure = StructureDesc::ExtendNegative {
                base: Box::new(StructureDesc::ExcludeFuture {
                    base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
                    apex: vec![0.0, 0.0],
                }),
                eps,
            };
            let grid = GridSpec::new(
                BoxRegion::new(vec![-2.0, -1.0, -3.0], vec![2.0, 1.0, 2.0]).map_err(|e| e.to_string())?,
                0.25,
                2,
            );
            let time = TimeKind::CompositeSum {
                base: Box::new(TimeKind::CanonicalT { nu: 1 }),
            };
            Ok(scenario(structure, grid, time, false))
        }
        "torus" => {
            let v = ints(&args, 2, name)?;
            let grid = GridSpec::new(BoxRegion::cube(v[0], 0.0, 2.0), 0.5, 1).torus();
            Ok(scenario(flat_desc(v[0], v[1])?, grid, TimeKind::CanonicalT { nu: v[1] }, false))
        }
        "frame_demo" => {
            no_args(name)?;
            let structure = StructureDesc::FrameDerived {
                frame: vec![vec![1.0, 0.5]],
            };
            Ok(scenario(structure, cube_grid(2, 1.0, 0.25), TimeKind::CanonicalT { nu: 1 }, false))
        }
        "conformal_flat" => {
            let v = ints(&args, 2, name)?;
            let structure = StructureDesc::Conformal {
                base: Box::new(flat_desc(v[0], v[1])?),
                omega: ConformalFactor::OnePlusHalfSin { axis: 0 },
            };
            Ok(scenario(structure, cube_grid(v[0], 1.0, 0.25), TimeKind::CanonicalT { nu: v[1] }, false))
        }
        "spacelike_frame" => {
            no_args(name)?;
            let structure = StructureDesc::WithFrame {
                base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
                frame: vec![vec![0.0, 1.0]],
            };
            Ok(scenario(structure, cube_grid(2, 1.0, 0.25), TimeKind::CanonicalT { nu: 1 }, true))
        }
        other => Err(format!(
            "unknown scenario {other:?}; known: {}",
            TEMPLATES.iter().map(|t| t.syntax).collect::<Vec<_>>().join(", ")
        )),
    }
}

impl Scenario {
    pub fn build(&self) -> conecalc::Result<SpacetimeStructure> {
        self.structure.build()
    }

    pub fn time(&self) -> conecalc::Result<TimeFunction> {
        TimeFunction::from_kind(&self.default_time)
    }

    /// Validates the structure at lattice-free probes inside the default box.
    pub fn check(&self) -> conecalc::Result<bool> {
        let s = self.build()?;
        let probes: Vec<_> = self
            .default_grid
            .bounds
            .uniform_points(64, 7)
            .into_iter()
            .filter(|p| s.contains(p.as_slice()))
            .collect();
        Ok(validate(&s, &probes, VALIDATION_TOL).pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_template_parses_and_validates_as_declared() {
        for t in TEMPLATES {
            let s = parse(t.example).unwrap_or_else(|e| panic!("{}: {e}", t.example));
            assert_eq!(s.check().unwrap(), !s.expect_invalid, "{}", t.example);
            s.time().unwrap();
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse("flat:2").is_err());
        assert!(parse("flat:2,3").is_err());
        assert!(parse("flat:a,1").is_err());
        assert!(parse("nowhere").is_err());
        assert!(parse("frame_demo:1").is_err());
        assert!(parse("notgh:x").is_err());
    }

    #[test]
    fn notgh_eps_argument() {
        let s = parse("notgh:0.5").unwrap();
        match s.structure {
            StructureDesc::ExtendNegative { eps, .. } => assert_eq!(eps, 0.5),
            other => panic!("{other:?}"),
        }
    }
}
