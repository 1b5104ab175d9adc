//! Embeddedness and knot type of centerlines.

pub mod curve;
pub mod diagram;
pub mod double_points;
pub mod laurent;
pub mod linking;
pub mod table;
pub mod torus;

use serde::{Deserialize, Serialize};

pub use curve::{ClosedCurve, FnCurve, Pushoff};
pub use diagram::{alexander, knot_determinant, project, Crossing, Direction, GaussEntry, KnotDiagram, Projector, Strand};
pub use double_points::{detect_singular_u, find_base_double_points, DoublePoint, DoublePointKind, SingularValue};
pub use laurent::LaurentPoly;
pub use linking::{linking, linking_number, LinkingReport};
pub use table::{KnotTable, TableEntry};
pub use torus::{identify_torus, torus_alexander, TorusMatch};

use crate::critical::{family_point, singular_u, FamilyParams};
use crate::error::{Error, Result};
use crate::framed::{closure_report, FramedCurve, HopfSeries};
use crate::quat::QuatPath;

/// Family members closer than this to the singular value are refused.
pub const SINGULAR_EXCLUSION: f64 = 1e-3;

/// Diagram of the centerline of `q`, which must be closed and embedded.
pub fn diagram_of_path(q: &QuatPath, direction: Direction) -> Result<KnotDiagram> {
    let report = closure_report(q);
    if !report.is_closed(1e-10) {
        return Err(Error::NotClosed {
            equinorm: report.equinorm_residual,
            orthogonality: report.orthogonality_residual,
        });
    }
    match find_base_double_points(q) {
        Err(Error::ContinuumCoincidence) => return Err(Error::NotEmbedded("base curve is multiply covered".into())),
        Err(e) => return Err(e),
        Ok(dps) if !dps.is_empty() => {
            return Err(Error::NotEmbedded(format!("double point at t = {} and t = {}", dps[0].t0, dps[0].t1)))
        }
        Ok(_) => {}
    }
    let hs = HopfSeries::new(q);
    project(&[&hs], direction, false)
}

/// Diagram of the centerline of a framed curve.
pub fn diagram(fc: &FramedCurve, direction: Direction) -> Result<KnotDiagram> {
    diagram_of_path(fc.source(), direction)
}

/// Diagram of a family member away from the singular value.
pub fn family_diagram(fp: &FamilyParams, direction: Direction) -> Result<KnotDiagram> {
    fp.validate()?;
    let us = singular_u(fp.h, fp.k);
    if (fp.u - us).abs() < SINGULAR_EXCLUSION {
        return Err(Error::NotEmbedded(format!("u = {} is within {SINGULAR_EXCLUSION} of the singular value {us}", fp.u)));
    }
    let q = family_point(fp)?;
    diagram_of_path(q.q(), direction)
}

/// Desk-scale knot identification: Alexander polynomial, determinant and
/// crossing count, compared with torus knots and the bundled table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub alexander: LaurentPoly,
    pub determinant: u64,
    pub crossings: usize,
    pub writhe: i64,
    pub torus: Option<TorusMatch>,
    pub table_matches: Vec<String>,
    pub label: String,
    pub chirality: String,
    pub projection_direction: [f64; 3],
    pub pd_code: Vec<[usize; 4]>,
}

impl Classification {
    pub fn is_unknot(&self) -> bool {
        self.alexander == LaurentPoly::one()
    }
}

pub fn classify_diagram(dg: &KnotDiagram, table: &KnotTable) -> Result<Classification> {
    dg.validate()?;
    let alexander = alexander(dg)?;
    let determinant = alexander.eval_int(-1)?.unsigned_abs() as u64;
    let torus = identify_torus(&alexander);
    let table_matches: Vec<String> = table.matches(&alexander).iter().map(|e| e.name.clone()).collect();
    let label = if alexander == LaurentPoly::one() {
        "unknot [consistent]".to_string()
    } else if let Some(t) = torus {
        format!("torus({},{}) [consistent]", t.p, t.q)
    } else if !table_matches.is_empty() {
        format!("{} [consistent]", table_matches.join(" | "))
    } else {
        "unidentified".to_string()
    };
    Ok(Classification {
        alexander,
        determinant,
        crossings: dg.crossing_count(),
        writhe: dg.writhe(),
        torus,
        table_matches,
        label,
        chirality: "undetermined".into(),
        projection_direction: dg.projection_direction,
        pd_code: dg.pd_code()?,
    })
}

pub fn classify_path(q: &QuatPath, direction: Direction) -> Result<Classification> {
    classify_diagram(&diagram_of_path(q, direction)?, &KnotTable::builtin())
}

pub fn classify_family(fp: &FamilyParams, direction: Direction) -> Result<Classification> {
    classify_diagram(&family_diagram(fp, direction)?, &KnotTable::builtin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::predicted_knot;

    #[test]
    fn family_trefoil_and_unknot() {
        let c = classify_family(&FamilyParams::new(2, 1, 0.2), Direction::default()).unwrap();
        assert_eq!(c.alexander, LaurentPoly::from_pairs([(-1, 1), (0, -1), (1, 1)]));
        assert_eq!(c.determinant, 3);
        assert_eq!(c.torus.map(|t| (t.p, t.q)), Some((2, 3)));
        assert!(c.table_matches.contains(&"3_1".to_string()));
        let c = classify_family(&FamilyParams::new(2, 1, 0.9), Direction::default()).unwrap();
        assert!(c.is_unknot());
    }

    #[test]
    fn concordance_with_prediction() {
        for fp in [FamilyParams::new(2, -5, 0.5), FamilyParams::new(2, -5, 0.95), FamilyParams::new(3, 2, 0.3)] {
            let c = classify_family(&fp, Direction::default()).unwrap();
            let p = predicted_knot(&fp).unwrap();
            assert_eq!(c.torus.map(|t| (t.p, t.q)), p.canonical(), "{fp:?}");
        }
    }

    #[test]
    fn singular_neighbourhood_is_refused() {
        let us = singular_u(2, 1);
        let r = family_diagram(&FamilyParams::new(2, 1, us + 5e-4), Direction::default());
        assert!(matches!(r, Err(Error::NotEmbedded(_))));
        let r = family_diagram(&FamilyParams::new(2, 1, 0.0), Direction::default());
        assert!(matches!(r, Err(Error::NotEmbedded(_))));
    }
}
