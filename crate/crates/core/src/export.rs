//! Text exports: framed-curve and invariant CSV, flow trajectories, OBJ tube
//! meshes and PD codes.

use std::io::{self, Write};

use crate::framed::{invariants_at, FramedCurve, InvariantTrace, Vec3};
use crate::knot::KnotDiagram;
use crate::variational::FlowSample;

/// Segments around the tube.
pub const TUBE_SEGMENTS: usize = 64;

/// Default tube radius as a fraction of the speed, i.e. of the inflatable
/// rod radius.
pub const DEFAULT_TUBE_SCALE: f64 = 0.05;

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Columns `t, gx, gy, gz, vx, vy, vz, speed, kappa1, kappa2, tw, st`.
pub fn write_framed_csv<W: Write>(w: W, fc: &FramedCurve) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["t", "gx", "gy", "gz", "vx", "vy", "vz", "speed", "kappa1", "kappa2", "tw", "st"]).map_err(to_io)?;
    let q = fc.source();
    let dq = q.derivative();
    for i in 0..fc.len() {
        let (g, v) = (fc.gamma[i], fc.frame[i]);
        let [k1, k2, tw, st] = invariants_at(q, &dq, fc.t[i]);
        let row = [fc.t[i], g.x, g.y, g.z, v.x, v.y, v.z, fc.speed[i], k1, k2, tw, st];
        out.write_record(row.iter().map(|&x| float(x))).map_err(to_io)?;
    }
    out.flush()
}

/// Columns `t, kappa1, kappa2, tw, st, kappa`.
pub fn write_invariants_csv<W: Write>(w: W, tr: &InvariantTrace) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["t", "kappa1", "kappa2", "tw", "st", "kappa"]).map_err(to_io)?;
    for (i, kappa) in tr.kappa().into_iter().enumerate() {
        let row = [tr.t[i], tr.kappa1[i], tr.kappa2[i], tr.tw[i], tr.st[i], kappa];
        out.write_record(row.iter().map(|&x| float(x))).map_err(to_io)?;
    }
    out.flush()
}

/// Columns `iteration, energy, residual, step`.
pub fn write_trajectory_csv<W: Write>(w: W, samples: &[FlowSample]) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["iteration", "energy", "residual", "step"]).map_err(to_io)?;
    for s in samples {
        out.write_record([s.iteration.to_string(), float(s.energy), float(s.residual), float(s.step)]).map_err(to_io)?;
    }
    out.flush()
}

/// A triangle mesh with per-vertex normals; faces are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeMesh {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

/// Tube of radius `scale · speed(t)` around the centerline. The cross-section
/// is spanned by the curve's own frame `V` and `T × V`, so frame twist is
/// visible in the mesh. Closed framed curves are stitched end to end.
pub fn tube_mesh(fc: &FramedCurve, scale: f64) -> TubeMesh {
    let closed = fc.exact.closure_gap().norm() < 1e-10 && (fc.frame[0] - fc.frame[fc.len() - 1]).norm() < 1e-10;
    // the endpoint-inclusive grid repeats the first sample when closed
    let rings = if closed { fc.len() - 1 } else { fc.len() };
    let m = TUBE_SEGMENTS;
    let mut vertices = Vec::with_capacity(rings * m);
    let mut normals = Vec::with_capacity(rings * m);
    for i in 0..rings {
        let t = fc.exact.tangent_at(fc.t[i]).normalize();
        let v = fc.frame[i];
        let b = t.cross(&v);
        let r = scale * fc.speed[i];
        for j in 0..m {
            let th = std::f64::consts::TAU * j as f64 / m as f64;
            let n = v * th.cos() + b * th.sin();
            vertices.push(fc.gamma[i] + n * r);
            normals.push(n);
        }
    }
    let mut faces = Vec::with_capacity(2 * rings * m);
    let spans = if closed { rings } else { rings - 1 };
    for i in 0..spans {
        let i1 = (i + 1) % rings;
        for j in 0..m {
            let j1 = (j + 1) % m;
            let (a, b, c, d) = (i * m + j, i * m + j1, i1 * m + j1, i1 * m + j);
            faces.push([a, d, c]);
            faces.push([a, c, b]);
        }
    }
    TubeMesh { vertices, normals, faces }
}

fn y_up(p: &Vec3) -> Vec3 {
    Vec3::new(p.x, p.z, -p.y)
}

/// Wavefront OBJ with `v`, `vn` and `f v//vn` records, converted to Y-up.
pub fn write_obj<W: Write>(mut w: W, mesh: &TubeMesh) -> io::Result<()> {
    for p in &mesh.vertices {
        let p = y_up(p);
        writeln!(w, "v {} {} {}", float(p.x), float(p.y), float(p.z))?;
    }
    for n in &mesh.normals {
        let n = y_up(n);
        writeln!(w, "vn {} {} {}", float(n.x), float(n.y), float(n.z))?;
    }
    for f in &mesh.faces {
        let [a, b, c] = f.map(|i| i + 1);
        writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
    }
    w.flush()
}

/// PD code, one `X(a,b,c,d)` per line.
pub fn write_pd<W: Write>(mut w: W, dg: &KnotDiagram) -> io::Result<()> {
    let text = dg.pd_text().map_err(io::Error::other)?;
    w.write_all(text.as_bytes())?;
    w.flush()
}
