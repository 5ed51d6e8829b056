//! Isoparametric element mappings and the per-element geometric data used by
//! the residual assembly.

use super::reference::{face_point, QuadTables, ReferenceElement, N_FACES};
use super::MeshError;
use super::Mesh;

pub type Mat2 = [[f64; 2]; 2];

/// Jacobian `J[i][j] = dx_i / dxi_j`, its inverse and determinant.
pub fn jacobian(x: &[[f64; 2]], dphi: &[[f64; 2]]) -> (Mat2, Mat2, f64) {
    let mut j = [[0.0; 2]; 2];
    for (xn, d) in x.iter().zip(dphi) {
        for a in 0..2 {
            for b in 0..2 {
                j[a][b] += xn[a] * d[b];
            }
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let inv = [
        [j[1][1] / det, -j[0][1] / det],
        [-j[1][0] / det, j[0][0] / det],
    ];
    (j, inv, det)
}

/// Maps a reference point through the degree-`k` nodal geometry of element
/// `e`: physical point, Jacobian and determinant.
pub fn map_element(
    mesh: &Mesh,
    re: &ReferenceElement,
    e: usize,
    xi: [f64; 2],
) -> Result<([f64; 2], Mat2, f64), MeshError> {
    let x = mesh.element_coords(e);
    let phi = re.shape(xi);
    let dphi = re.shape_gradient(xi);
    let mut p = [0.0; 2];
    for (xn, &n) in x.iter().zip(&phi) {
        p[0] += xn[0] * n;
        p[1] += xn[1] * n;
    }
    let (j, _, det) = jacobian(&x, &dphi);
    if !(det > 0.0) {
        return Err(MeshError::InvertedElement { element: e, det });
    }
    Ok((p, j, det))
}

#[derive(Debug, Clone)]
pub struct FaceGeometry {
    pub x: Vec<[f64; 2]>,
    /// Outward unit normal.
    pub normal: Vec<[f64; 2]>,
    /// Quadrature weight times the line element.
    pub w: Vec<f64>,
}

/// Geometric data of one element on a set of quadrature tables.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub x: Vec<[f64; 2]>,
    /// Quadrature weight times `det J`.
    pub w: Vec<f64>,
    /// Physical gradients of the shape functions, `grad[q][i]`.
    pub grad: Vec<Vec<[f64; 2]>>,
    pub faces: [FaceGeometry; N_FACES],
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, tables: &QuadTables, e: usize) -> Self {
        let xs = mesh.element_coords(e);
        Self::from_coords(&xs, tables)
    }

    pub fn from_coords(xs: &[[f64; 2]], tables: &QuadTables) -> Self {
        let nq = tables.volume.len();
        let mut x = Vec::with_capacity(nq);
        let mut w = Vec::with_capacity(nq);
        let mut grad = Vec::with_capacity(nq);
        for q in 0..nq {
            let phi = &tables.vol.phi[q];
            let dphi = &tables.vol.dphi[q];
            let (_, inv, det) = jacobian(xs, dphi);
            x.push(interp(xs, phi));
            w.push(tables.volume.weights[q] * det);
            grad.push(
                dphi.iter()
                    .map(|d| {
                        [
                            d[0] * inv[0][0] + d[1] * inv[1][0],
                            d[0] * inv[0][1] + d[1] * inv[1][1],
                        ]
                    })
                    .collect(),
            );
        }
        let faces = std::array::from_fn(|f| {
            let tab = &tables.faces.element[f];
            let dt = face_tangent(f);
            let mut fx = Vec::new();
            let mut normal = Vec::new();
            let mut fw = Vec::new();
            for q in 0..tables.face.len() {
                let (j, _, _) = jacobian(xs, &tab.dphi[q]);
                let tx = j[0][0] * dt[0] + j[0][1] * dt[1];
                let ty = j[1][0] * dt[0] + j[1][1] * dt[1];
                let len = (tx * tx + ty * ty).sqrt();
                fx.push(interp(xs, &tab.phi[q]));
                // counter-clockwise elements: outward normal is the tangent
                // rotated clockwise
                normal.push([ty / len, -tx / len]);
                fw.push(tables.face.weights[q] * len);
            }
            FaceGeometry {
                x: fx,
                normal,
                w: fw,
            }
        });
        Self { x, w, grad, faces }
    }

    pub fn area(&self) -> f64 {
        self.w.iter().sum()
    }
}

fn face_tangent(f: usize) -> [f64; 2] {
    let a = face_point(f, 0.0);
    let b = face_point(f, 1.0);
    [b[0] - a[0], b[1] - a[1]]
}

pub fn interp(xs: &[[f64; 2]], phi: &[f64]) -> [f64; 2] {
    let mut p = [0.0; 2];
    for (xn, &n) in xs.iter().zip(phi) {
        p[0] += xn[0] * n;
        p[1] += xn[1] * n;
    }
    p
}
