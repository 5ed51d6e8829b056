//! Nodal reference triangle of degree `k`: warp-and-blend nodes, the
//! orthonormal (Dubiner) modal basis, the Vandermonde matrix and the
//! Lagrange shape functions tabulated on quadrature rules.
//!
//! Reference triangle: vertices `(0,0), (1,0), (0,1)`. Local face `f` runs
//! from vertex `f` to vertex `(f + 1) % 3`.
//!
//! Node ordering: the three corners, then the `k - 1` interior nodes of each
//! face in face order and face direction, then the interior nodes in
//! lexicographic order of their lattice indices `(j, i)` (row `j` from the
//! bottom, position `i` within the row).

use nalgebra::DMatrix;

use super::quadrature::{gauss_lobatto, grad_jacobi_p, jacobi_p, segment_rule, triangle_rule, Rule};

pub const N_FACES: usize = 3;

/// Number of nodes of a degree-`k` triangle.
pub fn triangle_nodes(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Reference-triangle point on local face `f` at face parameter `t in [0, 1]`.
pub fn face_point(f: usize, t: f64) -> [f64; 2] {
    match f {
        0 => [t, 0.0],
        1 => [1.0 - t, t],
        2 => [0.0, 1.0 - t],
        _ => panic!("triangle has three faces, got {f}"),
    }
}

/// Lattice indices `(i, j)` (x index, y index) in node order.
pub fn lattice(k: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0), (k, 0), (0, k)];
    for i in 1..k {
        out.push((i, 0));
    }
    for i in 1..k {
        out.push((k - i, i));
    }
    for i in 1..k {
        out.push((0, k - i));
    }
    for j in 1..k {
        for i in 1..k - j {
            out.push((i, j));
        }
    }
    out
}

const ALPHA_OPT: [f64; 15] = [
    0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959,
    1.5743, 1.5770, 1.6223, 1.6258,
];

/// 1D warp function mapping equispaced to Lobatto points, divided by the
/// blending denominator.
fn warp_factor(k: usize, r: f64) -> f64 {
    let lgl = gauss_lobatto(k + 1);
    let req: Vec<f64> = (0..=k).map(|i| -1.0 + 2.0 * i as f64 / k as f64).collect();
    let mut warp = 0.0;
    for i in 0..=k {
        let mut li = 1.0;
        for j in 0..=k {
            if j != i {
                li *= (r - req[j]) / (req[i] - req[j]);
            }
        }
        warp += (lgl[i] - req[i]) * li;
    }
    if r.abs() < 1.0 - 1e-10 {
        warp / (1.0 - r * r)
    } else {
        0.0
    }
}

/// Warp-and-blend nodes on the unit triangle, in node order.
pub fn nodes(k: usize) -> Vec<[f64; 2]> {
    assert!(k >= 1);
    let alpha = if k < 16 { ALPHA_OPT[k - 1] } else { 5.0 / 3.0 };
    let sqrt3 = 3f64.sqrt();
    lattice(k)
        .into_iter()
        .map(|(i, j)| {
            // barycentrics of vertices (0,0), (1,0), (0,1)
            let b1 = i as f64 / k as f64;
            let b2 = j as f64 / k as f64;
            let b0 = 1.0 - b1 - b2;
            // equilateral-triangle construction with L2 <-> vertex 0,
            // L3 <-> vertex 1, L1 <-> vertex 2
            let (l1, l2, l3) = (b2, b0, b1);
            let mut x = -l2 + l3;
            let mut y = (-l2 - l3 + 2.0 * l1) / sqrt3;
            let blend1 = 4.0 * l2 * l3;
            let blend2 = 4.0 * l1 * l3;
            let blend3 = 4.0 * l1 * l2;
            let w1 = blend1 * warp_factor(k, l3 - l2) * (1.0 + (alpha * l1).powi(2));
            let w2 = blend2 * warp_factor(k, l1 - l3) * (1.0 + (alpha * l2).powi(2));
            let w3 = blend3 * warp_factor(k, l2 - l1) * (1.0 + (alpha * l3).powi(2));
            let (c2, s2) = ((2.0 * std::f64::consts::PI / 3.0).cos(), (2.0 * std::f64::consts::PI / 3.0).sin());
            let (c4, s4) = ((4.0 * std::f64::consts::PI / 3.0).cos(), (4.0 * std::f64::consts::PI / 3.0).sin());
            x += w1 + c2 * w2 + c4 * w3;
            y += s2 * w2 + s4 * w3;
            // back to barycentrics
            let l1 = (sqrt3 * y + 1.0) / 3.0;
            let l2 = (-3.0 * x - sqrt3 * y + 2.0) / 6.0;
            let l3 = (3.0 * x - sqrt3 * y + 2.0) / 6.0;
            let _ = l2;
            let mut p = [l3, l1];
            // snap round-off on the faces
            for c in p.iter_mut() {
                if c.abs() < 1e-14 {
                    *c = 0.0;
                }
            }
            if i + j == k {
                let s = p[0] + p[1];
                p[0] /= s;
                p[1] /= s;
            }
            p
        })
        .collect()
}

/// Orthonormal modal basis functions on the unit triangle, ordered by total
/// degree then by the first index. Returns `(i, j)` index pairs.
pub fn modal_indices(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(triangle_nodes(k));
    for d in 0..=k {
        for i in (0..=d).rev() {
            out.push((i, d - i));
        }
    }
    out
}

fn collapsed(x: [f64; 2]) -> (f64, f64) {
    let r = 2.0 * x[0] - 1.0;
    let s = 2.0 * x[1] - 1.0;
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    (a, s)
}

/// Value of the orthonormal mode `(i, j)` at `x`.
pub fn modal_value(i: usize, j: usize, x: [f64; 2]) -> f64 {
    let (a, b) = collapsed(x);
    let h1 = jacobi_p(a, 0.0, 0.0, i);
    let h2 = jacobi_p(b, 2.0 * i as f64 + 1.0, 0.0, j);
    // sqrt(2) normalises on the (-1,1) triangle; the extra 2 accounts for
    // the unit triangle having a quarter of its area
    2.0 * 2f64.sqrt() * h1 * h2 * (1.0 - b).powi(i as i32)
}

/// Gradient of the orthonormal mode `(i, j)` with respect to the unit
/// triangle coordinates.
pub fn modal_gradient(i: usize, j: usize, x: [f64; 2]) -> [f64; 2] {
    let (a, b) = collapsed(x);
    let fa = jacobi_p(a, 0.0, 0.0, i);
    let dfa = grad_jacobi_p(a, 0.0, 0.0, i);
    let gb = jacobi_p(b, 2.0 * i as f64 + 1.0, 0.0, j);
    let dgb = grad_jacobi_p(b, 2.0 * i as f64 + 1.0, 0.0, j);
    let hb = 0.5 * (1.0 - b);
    let mut dr = dfa * gb;
    if i > 0 {
        dr *= hb.powi(i as i32 - 1);
    }
    let mut ds = dfa * (gb * (0.5 * (1.0 + a)));
    if i > 0 {
        ds *= hb.powi(i as i32 - 1);
    }
    let mut tmp = dgb * hb.powi(i as i32);
    if i > 0 {
        tmp -= 0.5 * i as f64 * gb * hb.powi(i as i32 - 1);
    }
    ds += fa * tmp;
    let scale = 2f64.powf(i as f64 + 0.5) * 2.0;
    // d/dx = 2 d/dr on the unit triangle
    [2.0 * scale * dr, 2.0 * scale * ds]
}

/// Shape functions and derivatives tabulated at the points of a rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    /// `phi[q][i]`
    pub phi: Vec<Vec<f64>>,
    /// `dphi[q][i] = [d/dx, d/dy]` in reference coordinates
    pub dphi: Vec<Vec<[f64; 2]>>,
}

/// Quadrature and basis data of a face of the reference triangle.
#[derive(Debug, Clone)]
pub struct FaceTable {
    /// Element shape functions at the face quadrature points (element face
    /// direction), one table per local face.
    pub element: [Tabulation; N_FACES],
    /// Trace (1D Lagrange on Lobatto points) functions at the face quadrature
    /// points: `trace[q][j]` in face direction, `trace_rev[q][j]` when the
    /// canonical face direction opposes the element's.
    pub trace: Vec<Vec<f64>>,
    pub trace_rev: Vec<Vec<f64>>,
}

/// Quadrature rules plus tabulated bases, at one integration order.
#[derive(Debug, Clone)]
pub struct QuadTables {
    pub degree: usize,
    pub volume: Rule<2>,
    pub vol: Tabulation,
    pub face: Rule<1>,
    pub faces: FaceTable,
}

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub k: usize,
    pub nodes: Vec<[f64; 2]>,
    /// Trace nodes on `[0, 1]` (Lobatto).
    pub face_nodes: Vec<f64>,
    /// `V[i][j] = psi_j(x_i)`, nodal values of the orthonormal modes.
    pub vandermonde: DMatrix<f64>,
    pub inv_vandermonde: DMatrix<f64>,
    /// Element nodes lying on each local face, in face direction.
    pub face_node_ids: [Vec<usize>; N_FACES],
    /// Tables for the residual quadrature, exact to degree `2k + 1`.
    pub quad: QuadTables,
}

impl ReferenceElement {
    pub fn new(k: usize) -> Self {
        Self::with_quadrature(k, 2 * k + 1)
    }

    pub fn with_quadrature(k: usize, degree: usize) -> Self {
        assert!(k >= 1, "polynomial degree must be at least 1");
        let nodes = nodes(k);
        let modes = modal_indices(k);
        let n = nodes.len();
        let vandermonde = DMatrix::from_fn(n, n, |r, c| {
            let (i, j) = modes[c];
            modal_value(i, j, nodes[r])
        });
        let inv_vandermonde = vandermonde
            .clone()
            .try_inverse()
            .expect("Vandermonde matrix of warp-and-blend nodes is invertible");
        let face_nodes: Vec<f64> = gauss_lobatto(k + 1).iter().map(|x| 0.5 * (x + 1.0)).collect();
        let face_node_ids = std::array::from_fn(|f| {
            let mut ids = vec![f, (f + 1) % 3];
            ids.splice(1..1, (0..k - 1).map(|i| 3 + f * (k - 1) + i));
            ids
        });
        let mut re = Self {
            k,
            nodes,
            face_nodes,
            vandermonde,
            inv_vandermonde,
            face_node_ids,
            quad: QuadTables {
                degree: 0,
                volume: Rule {
                    points: vec![],
                    weights: vec![],
                },
                vol: Tabulation {
                    phi: vec![],
                    dphi: vec![],
                },
                face: Rule {
                    points: vec![],
                    weights: vec![],
                },
                faces: FaceTable {
                    element: std::array::from_fn(|_| Tabulation {
                        phi: vec![],
                        dphi: vec![],
                    }),
                    trace: vec![],
                    trace_rev: vec![],
                },
            },
        };
        re.quad = re.tables(degree);
        re
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_face_nodes(&self) -> usize {
        self.k + 1
    }

    /// Lagrange shape function values at an arbitrary reference point.
    pub fn shape(&self, x: [f64; 2]) -> Vec<f64> {
        let modes = modal_indices(self.k);
        let psi: Vec<f64> = modes.iter().map(|&(i, j)| modal_value(i, j, x)).collect();
        (0..self.n_nodes())
            .map(|i| (0..psi.len()).map(|m| psi[m] * self.inv_vandermonde[(m, i)]).sum())
            .collect()
    }

    /// Lagrange shape function gradients (reference coordinates).
    pub fn shape_gradient(&self, x: [f64; 2]) -> Vec<[f64; 2]> {
        let modes = modal_indices(self.k);
        let dpsi: Vec<[f64; 2]> = modes.iter().map(|&(i, j)| modal_gradient(i, j, x)).collect();
        (0..self.n_nodes())
            .map(|i| {
                let mut g = [0.0; 2];
                for (m, d) in dpsi.iter().enumerate() {
                    let c = self.inv_vandermonde[(m, i)];
                    g[0] += d[0] * c;
                    g[1] += d[1] * c;
                }
                g
            })
            .collect()
    }

    /// 1D trace Lagrange functions at `t in [0, 1]`.
    pub fn trace_shape(&self, t: f64) -> Vec<f64> {
        lagrange_1d(&self.face_nodes, t)
    }

    pub fn tabulate(&self, points: &[[f64; 2]]) -> Tabulation {
        Tabulation {
            phi: points.iter().map(|&x| self.shape(x)).collect(),
            dphi: points.iter().map(|&x| self.shape_gradient(x)).collect(),
        }
    }

    /// Quadrature tables exact to polynomial degree `degree`.
    pub fn tables(&self, degree: usize) -> QuadTables {
        let volume = triangle_rule(degree);
        let vol = self.tabulate(&volume.points);
        let face = segment_rule(degree);
        let element = std::array::from_fn(|f| {
            let pts: Vec<[f64; 2]> = face.points.iter().map(|t| face_point(f, t[0])).collect();
            self.tabulate(&pts)
        });
        let trace = face.points.iter().map(|t| self.trace_shape(t[0])).collect();
        let trace_rev = face.points.iter().map(|t| self.trace_shape(1.0 - t[0])).collect();
        QuadTables {
            degree,
            volume,
            vol,
            face,
            faces: FaceTable {
                element,
                trace,
                trace_rev,
            },
        }
    }

    /// Modal (orthonormal) coefficients of nodal values.
    pub fn to_modal(&self, nodal: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(nodal);
        (&self.inv_vandermonde * v).iter().copied().collect()
    }

    /// Number of modes of degree at most `k - 1` and exactly `k`.
    pub fn modal_split(&self) -> (usize, usize) {
        modal_split(self.k)
    }

    /// Projection onto the top-degree modes, `diag(0, .., 0, 1, .., 1)`.
    pub fn top_mode_projection(&self) -> DMatrix<f64> {
        top_mode_projection(self.k)
    }
}

/// `(lower, top)`: modes of total degree `<= k - 1` and exactly `k`.
pub fn modal_split(k: usize) -> (usize, usize) {
    (k * (k + 1) / 2, k + 1)
}

/// `(V, P)`: Vandermonde of the degree-`k` nodes and the projection onto the
/// top-degree modes.
pub fn modal_projection_matrices(k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let re = ReferenceElement::with_quadrature(k, 1);
    (re.vandermonde, top_mode_projection(k))
}

pub fn top_mode_projection(k: usize) -> DMatrix<f64> {
    let (lower, top) = modal_split(k);
    let n = lower + top;
    DMatrix::from_fn(n, n, |i, j| if i == j && i >= lower { 1.0 } else { 0.0 })
}

pub fn lagrange_1d(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|i| {
            let mut l = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if j != i {
                    l *= (t - xj) / (nodes[i] - xj);
                }
            }
            l
        })
        .collect()
}
