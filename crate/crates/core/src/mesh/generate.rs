//! Structured triangulations and promotion of straight-sided meshes to
//! degree `k`.

use std::collections::HashMap;

use super::reference::{lattice, nodes as reference_nodes};
use super::{Mesh, MeshError};

/// Promotes a linear triangulation to degree `k`. Edge nodes are shared
/// between neighbours; `map` (if any) is applied to every node, which
/// allows curved geometry.
pub fn from_linear_mapped(
    k: usize,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: &[(usize, usize, String)],
    map: Option<&dyn Fn([f64; 2]) -> [f64; 2]>,
) -> Result<Mesh, MeshError> {
    if k == 0 {
        return Err(MeshError::ZeroDegree);
    }
    let ref_nodes = reference_nodes(k);
    let lat = lattice(k);
    let mut nodes = vertices.clone();
    let mut edge_nodes: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut elements = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let c: Vec<[f64; 2]> = tri.iter().map(|&i| vertices[i]).collect();
        let affine = |xi: [f64; 2]| {
            [
                c[0][0] + (c[1][0] - c[0][0]) * xi[0] + (c[2][0] - c[0][0]) * xi[1],
                c[0][1] + (c[1][1] - c[0][1]) * xi[0] + (c[2][1] - c[0][1]) * xi[1],
            ]
        };
        let mut el = vec![tri[0], tri[1], tri[2]];
        for f in 0..3 {
            let a = tri[f];
            let b = tri[(f + 1) % 3];
            let key = (a.min(b), a.max(b));
            // reference nodes of this face in face direction
            let local: Vec<usize> = (0..k.saturating_sub(1)).map(|i| 3 + f * (k - 1) + i).collect();
            let ids = edge_nodes
                .entry(key)
                .or_insert_with(|| {
                    let mut ids = Vec::with_capacity(local.len());
                    for &ln in &local {
                        ids.push(nodes.len());
                        nodes.push(affine(ref_nodes[ln]));
                    }
                    // stored in direction min -> max
                    if a > b {
                        ids.reverse();
                    }
                    ids
                })
                .clone();
            if a < b {
                el.extend(ids);
            } else {
                el.extend(ids.into_iter().rev());
            }
        }
        for ln in 3 * k..lat.len() {
            el.push(nodes.len());
            nodes.push(affine(ref_nodes[ln]));
        }
        elements.push(el);
    }
    if let Some(m) = map {
        for x in nodes.iter_mut() {
            *x = m(*x);
        }
    }
    Mesh::new(k, nodes, elements, boundary)
}

pub fn from_linear(
    k: usize,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: &[(usize, usize, String)],
) -> Result<Mesh, MeshError> {
    from_linear_mapped(k, vertices, triangles, boundary, None)
}

/// Linear triangulation of `[0,1]^2` with `n x n` cells, each split along
/// its `(0,0)-(1,1)` diagonal. Boundary tags: `bottom`, `right`, `top`, `left`.
pub fn unit_square_linear(n: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>, Vec<(usize, usize, String)>) {
    rectangle_linear(n, n, [0.0, 1.0], [0.0, 1.0])
}

/// Linear triangulation of a rectangle with `nx x ny` cells.
pub fn rectangle_linear(
    nx: usize,
    ny: usize,
    xr: [f64; 2],
    yr: [f64; 2],
) -> (Vec<[f64; 2]>, Vec<[usize; 3]>, Vec<(usize, usize, String)>) {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([
                xr[0] + (xr[1] - xr[0]) * i as f64 / nx as f64,
                yr[0] + (yr[1] - yr[0]) * j as f64 / ny as f64,
            ]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    let mut boundary = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // lower-right triangle: faces bottom (0), right (1), diagonal (2)
            let lower = triangles.len();
            triangles.push([a, b, c]);
            // upper-left triangle: diagonal (0), top (1), left (2)
            let upper = triangles.len();
            triangles.push([a, c, d]);
            if j == 0 {
                boundary.push((lower, 0, "bottom".to_string()));
            }
            if i == nx - 1 {
                boundary.push((lower, 1, "right".to_string()));
            }
            if j == ny - 1 {
                boundary.push((upper, 1, "top".to_string()));
            }
            if i == 0 {
                boundary.push((upper, 2, "left".to_string()));
            }
        }
    }
    (vertices, triangles, boundary)
}

/// Degree-`k` uniform mesh of the unit square with `n x n` cells.
pub fn unit_square(n: usize, k: usize) -> Result<Mesh, MeshError> {
    let (v, t, b) = unit_square_linear(n);
    from_linear(k, v, t, &b)
}

/// Nested refinement level `level >= 1` of the unit square: `2^level` cells
/// per side.
pub fn unit_square_level(level: usize, k: usize) -> Result<Mesh, MeshError> {
    unit_square(1 << level, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_count_matches_euler_formula() {
        for level in 1..4 {
            let mesh = unit_square_level(level, 2).unwrap();
            let n_boundary = mesh.faces.iter().filter(|f| f.is_boundary()).count();
            assert_eq!(mesh.n_faces(), (3 * mesh.n_elements() + n_boundary) / 2);
            assert_eq!(n_boundary, 4 << level);
        }
    }

    #[test]
    fn shared_edge_nodes_are_consistent() {
        let k = 4;
        let mesh = unit_square(3, k).unwrap();
        for face in mesh.faces.iter().filter(|f| !f.is_boundary()) {
            let l = face.left;
            let r = face.right.unwrap();
            let re = super::super::ReferenceElement::new(k);
            let mut ln: Vec<usize> = re.face_node_ids[l.local_face]
                .iter()
                .map(|&i| mesh.elements[l.element][i])
                .collect();
            let rn: Vec<usize> = re.face_node_ids[r.local_face]
                .iter()
                .map(|&i| mesh.elements[r.element][i])
                .collect();
            ln.reverse();
            assert_eq!(ln, rn);
        }
    }

    #[test]
    fn refinement_halves_h() {
        let h: Vec<f64> = (1..4).map(|l| unit_square_level(l, 1).unwrap().h_max()).collect();
        assert!((h[0] / h[1] - 2.0).abs() < 1e-12);
        assert!((h[1] / h[2] - 2.0).abs() < 1e-12);
    }
}
