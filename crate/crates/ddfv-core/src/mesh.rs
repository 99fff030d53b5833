//! Finite-volume meshes: 1-D layered intervals and 2-D structured rectangles.
//!
//! Cells are vertex-centered Voronoi boxes of tensor-product nodes, so the
//! two-point flux between neighboring nodes is consistent (faces are orthogonal
//! to the connecting segment). Region tags partition the cells; boundary faces
//! are tagged as Dirichlet parts or Neumann. Nodes on a Dirichlet part carry
//! the boundary data directly: their Voronoi boxes touch the boundary with the
//! node sitting on it, which pins the values there instead of coupling to a
//! ghost state.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("layer list is empty or endpoints are not increasing")]
    BadLayers,
    #[error("layers are not contiguous at x = {0}")]
    NonContiguousLayers(f64),
    #[error("target spacing {h} exceeds the thinnest layer ({min_len})")]
    SpacingTooLarge { h: f64, min_len: f64 },
    #[error("degenerate node counts ({nx} x {ny})")]
    DegenerateCounts { nx: usize, ny: usize },
    #[error("node lines must be strictly increasing and span the domain")]
    BadNodeLines,
    #[error("inner region edge {0} does not lie on a grid line")]
    RegionOffGrid(f64),
    #[error("unknown region tag `{0}`")]
    UnknownRegion(String),
}

/// A named 1-D layer with its doping value.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub name: String,
    pub x0: f64,
    pub x1: f64,
    pub doping: f64,
}

impl Layer {
    pub fn new(name: &str, x0: f64, x1: f64, doping: f64) -> Self {
        Layer { name: name.into(), x0, x1, doping }
    }
}

/// A named axis-aligned rectangle with its doping value.
#[derive(Debug, Clone, PartialEq)]
pub struct RectRegion {
    pub name: String,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub doping: f64,
}

impl RectRegion {
    pub fn new(name: &str, lo: [f64; 2], hi: [f64; 2], doping: f64) -> Self {
        RectRegion { name: name.into(), lo, hi, doping }
    }

    fn contains_open(&self, p: [f64; 2]) -> bool {
        p[0] > self.lo[0] && p[0] < self.hi[0] && p[1] > self.lo[1] && p[1] < self.hi[1]
    }
}

/// Placement of the Dirichlet contacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryLayout {
    /// Contacts `d1`/`d2` at the two interval ends (1-D) or on the x = const
    /// extreme lines (2-D); everything else Neumann.
    ContactsAtEnds,
    /// No Dirichlet part at all (used to exercise validation failures).
    AllNeumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub center: [f64; 2],
    pub volume: f64,
    pub region: usize,
}

/// Interior face between two cells; `transmissibility = area / distance`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorFace {
    pub cells: (usize, usize),
    pub area: f64,
    pub distance: f64,
    pub transmissibility: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet(usize),
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    pub cell: usize,
    pub center: [f64; 2],
    pub area: f64,
    pub kind: BoundaryKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FvMesh {
    pub dim: usize,
    pub cells: Vec<Cell>,
    pub faces: Vec<InteriorFace>,
    pub boundary_faces: Vec<BoundaryFace>,
    pub region_names: Vec<String>,
    pub dirichlet_names: Vec<String>,
    /// Tensor node coordinates (y empty in 1-D).
    pub x_lines: Vec<f64>,
    pub y_lines: Vec<f64>,
}

impl FvMesh {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn domain_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    pub fn region_index(&self, name: &str) -> Result<usize, MeshError> {
        self.region_names
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| MeshError::UnknownRegion(name.into()))
    }

    pub fn dirichlet_index(&self, name: &str) -> Result<usize, MeshError> {
        self.dirichlet_names
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| MeshError::UnknownRegion(name.into()))
    }

    /// Total measure of a Dirichlet part.
    pub fn dirichlet_measure(&self, tag: usize) -> f64 {
        self.boundary_faces
            .iter()
            .filter(|f| f.kind == BoundaryKind::Dirichlet(tag))
            .map(|f| f.area)
            .sum()
    }

    /// Whether a cell's node lies on some Dirichlet part, and on which one.
    /// Corners shared with a Neumann part count as Dirichlet.
    pub fn dirichlet_tag_of_cell(&self, cell: usize) -> Option<usize> {
        self.boundary_faces.iter().find_map(|f| match f.kind {
            BoundaryKind::Dirichlet(t) if f.cell == cell => Some(t),
            _ => None,
        })
    }

    /// True if every cell is reachable from cell 0 through interior faces.
    pub fn is_connected(&self) -> bool {
        if self.cells.is_empty() {
            return false;
        }
        let mut adj = vec![Vec::new(); self.cells.len()];
        for f in &self.faces {
            adj[f.cells.0].push(f.cells.1);
            adj[f.cells.1].push(f.cells.0);
        }
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(k) = stack.pop() {
            for &l in &adj[k] {
                if !seen[l] {
                    seen[l] = true;
                    count += 1;
                    stack.push(l);
                }
            }
        }
        count == self.cells.len()
    }

    /// Plain-text sectioned dump, consumed by the CLI `dump-mesh` command.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "ddfv-mesh 1").unwrap();
        writeln!(s, "dim {}", self.dim).unwrap();
        writeln!(s, "regions {}", self.region_names.len()).unwrap();
        for r in &self.region_names {
            writeln!(s, "{r}").unwrap();
        }
        writeln!(s, "boundaries {}", self.dirichlet_names.len()).unwrap();
        for b in &self.dirichlet_names {
            writeln!(s, "{b}").unwrap();
        }
        writeln!(s, "nodes {}", self.cells.len()).unwrap();
        for c in &self.cells {
            if self.dim == 1 {
                writeln!(s, "{}", c.center[0]).unwrap();
            } else {
                writeln!(s, "{} {}", c.center[0], c.center[1]).unwrap();
            }
        }
        writeln!(s, "cells {}", self.cells.len()).unwrap();
        for c in &self.cells {
            writeln!(s, "{} {}", c.volume, c.region).unwrap();
        }
        writeln!(s, "faces {}", self.faces.len()).unwrap();
        for f in &self.faces {
            writeln!(s, "{} {} {} {}", f.cells.0, f.cells.1, f.area, f.distance).unwrap();
        }
        writeln!(s, "bfaces {}", self.boundary_faces.len()).unwrap();
        for f in &self.boundary_faces {
            let kind = match f.kind {
                BoundaryKind::Dirichlet(t) => format!("d{t}"),
                BoundaryKind::Neumann => "n".to_string(),
            };
            writeln!(s, "{} {} {}", f.cell, f.area, kind).unwrap();
        }
        s
    }
}

/// Sum of cell volumes carrying the named region tag.
pub fn region_measure(mesh: &FvMesh, name: &str) -> Result<f64, MeshError> {
    let idx = mesh.region_index(name)?;
    Ok(mesh.cells.iter().filter(|c| c.region == idx).map(|c| c.volume).sum())
}

/// 1-D Voronoi mesh over contiguous layers with target spacing `h`.
///
/// Each layer gets `ceil(length / h)` uniform intervals, so layer interfaces
/// always coincide with nodes; an interface node is assigned to the layer on
/// its left.
pub fn build_interval_mesh(
    layers: &[Layer],
    h: f64,
    layout: BoundaryLayout,
) -> Result<FvMesh, MeshError> {
    if layers.is_empty() || layers.iter().any(|l| l.x1 <= l.x0) {
        return Err(MeshError::BadLayers);
    }
    for pair in layers.windows(2) {
        if (pair[0].x1 - pair[1].x0).abs() > 1e-12 {
            return Err(MeshError::NonContiguousLayers(pair[1].x0));
        }
    }
    let min_len = layers.iter().map(|l| l.x1 - l.x0).fold(f64::INFINITY, f64::min);
    if h.is_nan() || h <= 0.0 || h > min_len {
        return Err(MeshError::SpacingTooLarge { h, min_len });
    }

    let mut nodes: Vec<f64> = vec![layers[0].x0];
    let mut regions: Vec<usize> = vec![0];
    for (li, layer) in layers.iter().enumerate() {
        let len = layer.x1 - layer.x0;
        let n = ((len / h - 1e-9).ceil() as usize).max(1);
        for k in 1..=n {
            nodes.push(layer.x0 + len * k as f64 / n as f64);
            regions.push(li);
        }
    }

    let n_nodes = nodes.len();
    let mut cells = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let left = if i == 0 { nodes[0] } else { 0.5 * (nodes[i - 1] + nodes[i]) };
        let right = if i + 1 == n_nodes { nodes[i] } else { 0.5 * (nodes[i] + nodes[i + 1]) };
        cells.push(Cell { center: [nodes[i], 0.0], volume: right - left, region: regions[i] });
    }
    let faces = (0..n_nodes - 1)
        .map(|i| {
            let d = nodes[i + 1] - nodes[i];
            InteriorFace { cells: (i, i + 1), area: 1.0, distance: d, transmissibility: 1.0 / d }
        })
        .collect();

    let (boundary_faces, dirichlet_names) = match layout {
        BoundaryLayout::ContactsAtEnds => (
            vec![
                BoundaryFace {
                    cell: 0,
                    center: [nodes[0], 0.0],
                    area: 1.0,
                    kind: BoundaryKind::Dirichlet(0),
                },
                BoundaryFace {
                    cell: n_nodes - 1,
                    center: [nodes[n_nodes - 1], 0.0],
                    area: 1.0,
                    kind: BoundaryKind::Dirichlet(1),
                },
            ],
            vec!["d1".to_string(), "d2".to_string()],
        ),
        BoundaryLayout::AllNeumann => (
            vec![
                BoundaryFace {
                    cell: 0,
                    center: [nodes[0], 0.0],
                    area: 1.0,
                    kind: BoundaryKind::Neumann,
                },
                BoundaryFace {
                    cell: n_nodes - 1,
                    center: [nodes[n_nodes - 1], 0.0],
                    area: 1.0,
                    kind: BoundaryKind::Neumann,
                },
            ],
            Vec::new(),
        ),
    };

    Ok(FvMesh {
        dim: 1,
        cells,
        faces,
        boundary_faces,
        region_names: layers.iter().map(|l| l.name.clone()).collect(),
        dirichlet_names,
        x_lines: nodes,
        y_lines: Vec::new(),
    })
}

/// Uniform tensor mesh with `nx` x `ny` nodes over the outer rectangle.
pub fn build_rect_mesh(
    outer: &RectRegion,
    inner: &[RectRegion],
    nx: usize,
    ny: usize,
    layout: BoundaryLayout,
) -> Result<FvMesh, MeshError> {
    if nx < 2 || ny < 2 {
        return Err(MeshError::DegenerateCounts { nx, ny });
    }
    let xs: Vec<f64> = (0..nx)
        .map(|i| outer.lo[0] + (outer.hi[0] - outer.lo[0]) * i as f64 / (nx - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..ny)
        .map(|j| outer.lo[1] + (outer.hi[1] - outer.lo[1]) * j as f64 / (ny - 1) as f64)
        .collect();
    build_rect_mesh_from_lines(outer, inner, &xs, &ys, layout)
}

/// Tensor mesh from explicit node lines (graded layouts).
pub fn build_rect_mesh_from_lines(
    outer: &RectRegion,
    inner: &[RectRegion],
    x_lines: &[f64],
    y_lines: &[f64],
    layout: BoundaryLayout,
) -> Result<FvMesh, MeshError> {
    if x_lines.len() < 2 || y_lines.len() < 2 {
        return Err(MeshError::DegenerateCounts { nx: x_lines.len(), ny: y_lines.len() });
    }
    for lines in [x_lines, y_lines] {
        if lines.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MeshError::BadNodeLines);
        }
    }
    let on_line = |lines: &[f64], v: f64| lines.iter().any(|&x| (x - v).abs() < 1e-12);
    for r in inner {
        for v in [r.lo[0], r.hi[0]] {
            if !on_line(x_lines, v) {
                return Err(MeshError::RegionOffGrid(v));
            }
        }
        for v in [r.lo[1], r.hi[1]] {
            if !on_line(y_lines, v) {
                return Err(MeshError::RegionOffGrid(v));
            }
        }
    }

    let nx = x_lines.len();
    let ny = y_lines.len();
    let widths = |lines: &[f64]| -> Vec<f64> {
        let n = lines.len();
        (0..n)
            .map(|i| {
                let left = if i == 0 { lines[0] } else { 0.5 * (lines[i - 1] + lines[i]) };
                let right = if i + 1 == n { lines[i] } else { 0.5 * (lines[i] + lines[i + 1]) };
                right - left
            })
            .collect()
    };
    let wx = widths(x_lines);
    let wy = widths(y_lines);

    // y runs fastest so the band width of the assembled system scales with ny
    let idx = |ix: usize, iy: usize| iy + ny * ix;
    let mut cells = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        for iy in 0..ny {
            let p = [x_lines[ix], y_lines[iy]];
            // interface nodes belong to the enclosing (outer) region
            let region = inner.iter().position(|r| r.contains_open(p)).map(|k| k + 1).unwrap_or(0);
            cells.push(Cell { center: p, volume: wx[ix] * wy[iy], region });
        }
    }

    let mut faces = Vec::new();
    for ix in 0..nx {
        for iy in 0..ny {
            if iy + 1 < ny {
                let d = y_lines[iy + 1] - y_lines[iy];
                faces.push(InteriorFace {
                    cells: (idx(ix, iy), idx(ix, iy + 1)),
                    area: wx[ix],
                    distance: d,
                    transmissibility: wx[ix] / d,
                });
            }
            if ix + 1 < nx {
                let d = x_lines[ix + 1] - x_lines[ix];
                faces.push(InteriorFace {
                    cells: (idx(ix, iy), idx(ix + 1, iy)),
                    area: wy[iy],
                    distance: d,
                    transmissibility: wy[iy] / d,
                });
            }
        }
    }

    let mut boundary_faces = Vec::new();
    let dirichlet_names;
    match layout {
        BoundaryLayout::ContactsAtEnds => {
            dirichlet_names = vec!["d1".to_string(), "d2".to_string()];
            for iy in 0..ny {
                boundary_faces.push(BoundaryFace {
                    cell: idx(0, iy),
                    center: [x_lines[0], y_lines[iy]],
                    area: wy[iy],
                    kind: BoundaryKind::Dirichlet(0),
                });
                boundary_faces.push(BoundaryFace {
                    cell: idx(nx - 1, iy),
                    center: [x_lines[nx - 1], y_lines[iy]],
                    area: wy[iy],
                    kind: BoundaryKind::Dirichlet(1),
                });
            }
            for ix in 0..nx {
                for iy in [0, ny - 1] {
                    boundary_faces.push(BoundaryFace {
                        cell: idx(ix, iy),
                        center: [x_lines[ix], y_lines[iy]],
                        area: wx[ix],
                        kind: BoundaryKind::Neumann,
                    });
                }
            }
        }
        BoundaryLayout::AllNeumann => {
            dirichlet_names = Vec::new();
            for iy in 0..ny {
                for ix in [0, nx - 1] {
                    boundary_faces.push(BoundaryFace {
                        cell: idx(ix, iy),
                        center: [x_lines[ix], y_lines[iy]],
                        area: wy[iy],
                        kind: BoundaryKind::Neumann,
                    });
                }
            }
            for ix in 0..nx {
                for iy in [0, ny - 1] {
                    boundary_faces.push(BoundaryFace {
                        cell: idx(ix, iy),
                        center: [x_lines[ix], y_lines[iy]],
                        area: wx[ix],
                        kind: BoundaryKind::Neumann,
                    });
                }
            }
        }
    }

    let mut region_names = vec![outer.name.clone()];
    region_names.extend(inner.iter().map(|r| r.name.clone()));

    Ok(FvMesh {
        dim: 2,
        cells,
        faces,
        boundary_faces,
        region_names,
        dirichlet_names,
        x_lines: x_lines.to_vec(),
        y_lines: y_lines.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psc_layers() -> Vec<Layer> {
        vec![
            Layer::new("etl", 0.0, 1.0, 10.0),
            Layer::new("pvk", 1.0, 5.0, 0.0),
            Layer::new("htl", 5.0, 7.0, -10.0),
        ]
    }

    #[test]
    fn psc_mesh_has_558_nodes() {
        let m = build_interval_mesh(&psc_layers(), 1.26e-2, BoundaryLayout::ContactsAtEnds)
            .unwrap();
        assert_eq!(m.n_cells(), 558);
        assert!((m.domain_measure() - 7.0).abs() < 7.0 * 1e-12);
        assert!(m.is_connected());
        // layer interfaces coincide with nodes
        for v in [1.0, 5.0] {
            assert!(m.x_lines.iter().any(|&x| (x - v).abs() < 1e-12));
        }
    }

    #[test]
    fn single_layer_voronoi_volumes() {
        let m = build_interval_mesh(
            &[Layer::new("a", 0.0, 1.0, 0.0)],
            0.5,
            BoundaryLayout::ContactsAtEnds,
        )
        .unwrap();
        assert_eq!(m.n_cells(), 3);
        let vols: Vec<f64> = m.cells.iter().map(|c| c.volume).collect();
        assert_eq!(vols, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn shared_interface_node() {
        let layers = vec![Layer::new("a", 0.0, 1.0, 0.0), Layer::new("b", 1.0, 2.0, 0.0)];
        let m = build_interval_mesh(&layers, 1.0, BoundaryLayout::ContactsAtEnds).unwrap();
        assert_eq!(m.n_cells(), 3);
        assert_eq!(m.x_lines, vec![0.0, 1.0, 2.0]);
        // interface node assigned to the left layer
        assert_eq!(m.cells[1].region, 0);
    }

    #[test]
    fn spacing_larger_than_thinnest_layer_rejected() {
        let err = build_interval_mesh(&psc_layers(), 1.5, BoundaryLayout::ContactsAtEnds);
        assert!(matches!(err, Err(MeshError::SpacingTooLarge { .. })));
    }

    #[test]
    fn psc_region_measures() {
        let m = build_interval_mesh(&psc_layers(), 1.26e-2, BoundaryLayout::ContactsAtEnds)
            .unwrap();
        let h = 1.26e-2;
        assert!((region_measure(&m, "pvk").unwrap() - 4.0).abs() <= h);
        let total: f64 =
            ["etl", "pvk", "htl"].iter().map(|r| region_measure(&m, r).unwrap()).sum();
        assert!((total - m.domain_measure()).abs() < 1e-10);
        assert!(region_measure(&m, "nope").is_err());
    }

    #[test]
    fn unit_square_four_cells() {
        let outer = RectRegion::new("all", [0.0, 0.0], [1.0, 1.0], 0.0);
        let m = build_rect_mesh(&outer, &[], 2, 2, BoundaryLayout::ContactsAtEnds).unwrap();
        assert_eq!(m.n_cells(), 4);
        for c in &m.cells {
            assert!((c.volume - 0.25).abs() < 1e-15);
        }
        assert!((region_measure(&m, "all").unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_lbic_domain_counts() {
        let outer = RectRegion::new("n", [0.0, 0.0], [8.0, 4.0], 10.0);
        let inner = [RectRegion::new("p", [2.0, 1.0], [6.0, 3.0], -10.0)];
        let m = build_rect_mesh(&outer, &inner, 81, 41, BoundaryLayout::ContactsAtEnds).unwrap();
        assert_eq!(m.n_cells(), 3321);
        assert!((m.domain_measure() - 32.0).abs() < 32.0 * 1e-12);
        assert!(m.is_connected());
        // all interior volumes equal
        let v0 = 0.1 * 0.1;
        let interior = m.cells.iter().filter(|c| {
            let [x, y] = c.center;
            x > 0.0 && x < 8.0 && y > 0.0 && y < 4.0
        });
        for c in interior {
            assert!((c.volume - v0).abs() < 1e-14);
        }
        // region tag by node membership; interface nodes go to the outer region
        let p_idx = m.region_index("p").unwrap();
        for c in &m.cells {
            let inside = c.center[0] > 2.0
                && c.center[0] < 6.0
                && c.center[1] > 1.0
                && c.center[1] < 3.0;
            assert_eq!(c.region == p_idx, inside, "at {:?}", c.center);
        }
    }

    #[test]
    fn boundary_tagging_matches_contacts() {
        let outer = RectRegion::new("n", [0.0, 0.0], [8.0, 4.0], 10.0);
        let m = build_rect_mesh(&outer, &[], 9, 5, BoundaryLayout::ContactsAtEnds).unwrap();
        let d1: f64 = m.dirichlet_measure(0);
        let d2: f64 = m.dirichlet_measure(1);
        assert!((d1 - 4.0).abs() < 1e-12);
        assert!((d2 - 4.0).abs() < 1e-12);
        let neumann: f64 = m
            .boundary_faces
            .iter()
            .filter(|f| f.kind == BoundaryKind::Neumann)
            .map(|f| f.area)
            .sum();
        assert!((neumann - 16.0).abs() < 1e-12);
    }

    #[test]
    fn region_off_grid_rejected() {
        let outer = RectRegion::new("n", [0.0, 0.0], [8.0, 4.0], 10.0);
        let inner = [RectRegion::new("p", [2.05, 1.0], [6.0, 3.0], -10.0)];
        let err = build_rect_mesh(&outer, &inner, 81, 41, BoundaryLayout::ContactsAtEnds);
        assert!(matches!(err, Err(MeshError::RegionOffGrid(_))));
    }

    #[test]
    fn refinement_quadruples_interior_cells() {
        let outer = RectRegion::new("n", [0.0, 0.0], [2.0, 1.0], 0.0);
        let coarse = build_rect_mesh(&outer, &[], 21, 11, BoundaryLayout::ContactsAtEnds).unwrap();
        let fine = build_rect_mesh(&outer, &[], 41, 21, BoundaryLayout::ContactsAtEnds).unwrap();
        let count_interior = |m: &FvMesh| {
            m.cells
                .iter()
                .filter(|c| {
                    let [x, y] = c.center;
                    x > 0.0 && x < 2.0 && y > 0.0 && y < 1.0
                })
                .count() as i64
        };
        let c = count_interior(&coarse);
        let f = count_interior(&fine);
        assert!((f - 4 * c).abs() <= 8 * (21 + 11), "coarse {c}, fine {f}");
    }

    #[test]
    fn gauss_identity_quadratic_form() {
        // sum_f T_f (u_K - u_L)^2 equals u^T A u for the assembled stiffness A
        let outer = RectRegion::new("n", [0.0, 0.0], [2.0, 1.0], 0.0);
        let m = build_rect_mesh(&outer, &[], 7, 5, BoundaryLayout::ContactsAtEnds).unwrap();
        let n = m.n_cells();
        let mut a = vec![0.0; n * n];
        for f in &m.faces {
            let (k, l) = f.cells;
            let t = f.transmissibility;
            a[k * n + k] += t;
            a[l * n + l] += t;
            a[k * n + l] -= t;
            a[l * n + k] -= t;
        }
        let mut seed = 7u64;
        let mut rng = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..5 {
            let u: Vec<f64> = (0..n).map(|_| rng()).collect();
            let direct: f64 = m
                .faces
                .iter()
                .map(|f| {
                    let d = u[f.cells.0] - u[f.cells.1];
                    f.transmissibility * d * d
                })
                .sum();
            let mut quad = 0.0;
            for i in 0..n {
                for j in 0..n {
                    quad += u[i] * a[i * n + j] * u[j];
                }
            }
            assert!((direct - quad).abs() < 1e-10 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn dump_round_trips_header() {
        let m = build_interval_mesh(
            &[Layer::new("a", 0.0, 1.0, 0.0)],
            0.5,
            BoundaryLayout::ContactsAtEnds,
        )
        .unwrap();
        let d = m.dump();
        assert!(d.starts_with("ddfv-mesh 1\ndim 1\n"));
        assert!(d.contains("nodes 3"));
        assert!(d.contains("faces 2"));
    }
}
