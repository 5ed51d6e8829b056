//! Triangular meshes of degree `k`, their skeleton (faces), and element
//! geometry.

pub mod generate;
pub mod geometry;
pub mod io;
pub mod quadrature;
pub mod reference;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

pub use geometry::{map_element, ElementGeometry, FaceGeometry};
pub use reference::{ReferenceElement, N_FACES};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeshError {
    #[error("face ({0}, {1}) is shared by more than two elements")]
    NonConforming(usize, usize),
    #[error("boundary face {local_face} of element {element} has no tag")]
    UntaggedBoundary { element: usize, local_face: usize },
    #[error("boundary tag given for interior face {local_face} of element {element}")]
    TagOnInteriorFace { element: usize, local_face: usize },
    #[error("element {element} is inverted or degenerate (det J = {det})")]
    InvertedElement { element: usize, det: f64 },
    #[error("element {element} has {got} nodes, expected {expected} for degree {k}")]
    WrongNodeCount {
        element: usize,
        got: usize,
        expected: usize,
        k: usize,
    },
    #[error("node index {index} out of range in element {element}")]
    NodeOutOfRange { element: usize, index: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported element shape {0:?}")]
    UnsupportedShape(Shape),
    #[error("polynomial degree must be at least 1")]
    ZeroDegree,
}

/// Element shapes for which the local problem size is tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Triangle,
    Tetrahedron,
    Quadrilateral,
    Hexahedron,
}

impl Shape {
    pub fn dim(self) -> usize {
        match self {
            Shape::Triangle | Shape::Quadrilateral => 2,
            Shape::Tetrahedron | Shape::Hexahedron => 3,
        }
    }

    /// Nodes of a degree-`k` element.
    pub fn nodes(self, k: usize) -> usize {
        match self {
            Shape::Triangle => (k + 1) * (k + 2) / 2,
            Shape::Tetrahedron => (k + 1) * (k + 2) * (k + 3) / 6,
            Shape::Quadrilateral => (k + 1).pow(2),
            Shape::Hexahedron => (k + 1).pow(3),
        }
    }
}

/// Unknowns of one condensed local problem: conserved variables, the
/// Voigt-stored deviatoric strain rate and the temperature gradient, per
/// element node.
pub fn local_dimension(k: usize, shape: Shape) -> Result<usize, MeshError> {
    if k == 0 {
        return Err(MeshError::ZeroDegree);
    }
    let nsd = shape.dim();
    let msd = nsd * (nsd + 1) / 2;
    Ok((nsd + 2 + msd + nsd) * shape.nodes(k))
}

/// Which side of a face an element sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceSide {
    pub element: usize,
    pub local_face: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Lower-indexed element; its traversal direction is canonical.
    pub left: FaceSide,
    pub right: Option<FaceSide>,
    /// Global vertex indices in canonical direction.
    pub vertices: [usize; 2],
    pub tag: Option<String>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub k: usize,
    pub nodes: Vec<[f64; 2]>,
    /// Node indices of each element in reference node order.
    pub elements: Vec<Vec<usize>>,
    pub faces: Vec<Face>,
    /// Global face of each local face.
    pub element_faces: Vec<[usize; N_FACES]>,
    /// True where the element traverses its face against the canonical direction.
    pub face_flipped: Vec<[bool; N_FACES]>,
}

impl Mesh {
    /// Builds the skeleton from raw element connectivity and boundary tags
    /// `(element, local_face, tag)`.
    pub fn new(
        k: usize,
        nodes: Vec<[f64; 2]>,
        elements: Vec<Vec<usize>>,
        boundary: &[(usize, usize, String)],
    ) -> Result<Self, MeshError> {
        if k == 0 {
            return Err(MeshError::ZeroDegree);
        }
        let expected = reference::triangle_nodes(k);
        for (e, el) in elements.iter().enumerate() {
            if el.len() != expected {
                return Err(MeshError::WrongNodeCount {
                    element: e,
                    got: el.len(),
                    expected,
                    k,
                });
            }
            if let Some(&bad) = el.iter().find(|&&i| i >= nodes.len()) {
                return Err(MeshError::NodeOutOfRange {
                    element: e,
                    index: bad,
                });
            }
        }
        let skeleton = build_skeleton(&elements, boundary)?;
        let mesh = Self {
            k,
            nodes,
            elements,
            faces: skeleton.faces,
            element_faces: skeleton.element_faces,
            face_flipped: skeleton.face_flipped,
        };
        mesh.check_orientation()?;
        Ok(mesh)
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_interior_faces(&self) -> usize {
        self.faces.iter().filter(|f| !f.is_boundary()).count()
    }

    pub fn element_coords(&self, e: usize) -> Vec<[f64; 2]> {
        self.elements[e].iter().map(|&i| self.nodes[i]).collect()
    }

    /// Corner coordinates of element `e`.
    pub fn corners(&self, e: usize) -> [[f64; 2]; 3] {
        let el = &self.elements[e];
        [self.nodes[el[0]], self.nodes[el[1]], self.nodes[el[2]]]
    }

    /// Number of distinct corner vertices.
    pub fn n_vertices(&self) -> usize {
        self.vertex_ids().len()
    }

    /// Sorted global indices of corner vertices.
    pub fn vertex_ids(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements.iter().flat_map(|el| el[..3].to_vec()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Longest edge over all elements (straight-sided proxy).
    pub fn h_max(&self) -> f64 {
        (0..self.n_elements())
            .map(|e| {
                let c = self.corners(e);
                (0..3)
                    .map(|i| dist(c[i], c[(i + 1) % 3]))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Diameter of the circumscribed circle of the straight-sided proxy.
    pub fn element_size(&self, e: usize) -> f64 {
        let c = self.corners(e);
        let a = dist(c[0], c[1]);
        let b = dist(c[1], c[2]);
        let d = dist(c[2], c[0]);
        let area = 0.5 * ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1])
            - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]))
            .abs();
        a * b * d / (2.0 * area)
    }

    /// Distinct boundary tags in first-appearance order.
    pub fn boundary_tags(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for f in &self.faces {
            if let Some(t) = &f.tag {
                if !out.contains(t) {
                    out.push(t.clone());
                }
            }
        }
        out
    }

    /// `(element, local_face, tag)` list of boundary faces.
    pub fn boundary_list(&self) -> Vec<(usize, usize, String)> {
        self.faces
            .iter()
            .filter_map(|f| {
                f.tag
                    .as_ref()
                    .map(|t| (f.left.element, f.left.local_face, t.clone()))
            })
            .collect()
    }

    fn check_orientation(&self) -> Result<(), MeshError> {
        let re = ReferenceElement::with_quadrature(self.k, 2 * self.k);
        for e in 0..self.n_elements() {
            let x = self.element_coords(e);
            for q in 0..re.quad.volume.len() {
                let (_, _, det) = geometry::jacobian(&x, &re.quad.vol.dphi[q]);
                if !(det > 0.0) {
                    return Err(MeshError::InvertedElement { element: e, det });
                }
            }
        }
        Ok(())
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Face list plus element-to-face incidence.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub faces: Vec<Face>,
    pub element_faces: Vec<[usize; N_FACES]>,
    pub face_flipped: Vec<[bool; N_FACES]>,
}

/// Builds the skeleton. Faces are numbered in order of first appearance
/// while visiting elements and their local faces in order, so the left side
/// of every face is its lower-indexed element.
pub fn build_skeleton(
    elements: &[Vec<usize>],
    boundary: &[(usize, usize, String)],
) -> Result<Skeleton, MeshError> {
    let mut faces: Vec<Face> = Vec::new();
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut element_faces = Vec::with_capacity(elements.len());
    let mut face_flipped = Vec::with_capacity(elements.len());
    for (e, el) in elements.iter().enumerate() {
        let mut ef = [0; N_FACES];
        let mut fl = [false; N_FACES];
        for lf in 0..N_FACES {
            let a = el[lf];
            let b = el[(lf + 1) % 3];
            let key = (a.min(b), a.max(b));
            match lookup.get(&key) {
                None => {
                    lookup.insert(key, faces.len());
                    ef[lf] = faces.len();
                    faces.push(Face {
                        left: FaceSide {
                            element: e,
                            local_face: lf,
                        },
                        right: None,
                        vertices: [a, b],
                        tag: None,
                    });
                }
                Some(&fid) => {
                    let face = &mut faces[fid];
                    if face.right.is_some() || face.left.element == e {
                        return Err(MeshError::NonConforming(key.0, key.1));
                    }
                    face.right = Some(FaceSide {
                        element: e,
                        local_face: lf,
                    });
                    ef[lf] = fid;
                    fl[lf] = face.vertices != [a, b];
                }
            }
        }
        element_faces.push(ef);
        face_flipped.push(fl);
    }
    let mut tags: BTreeMap<usize, String> = BTreeMap::new();
    for (e, lf, tag) in boundary {
        let fid = element_faces[*e][*lf];
        if faces[fid].right.is_some() {
            return Err(MeshError::TagOnInteriorFace {
                element: *e,
                local_face: *lf,
            });
        }
        tags.insert(fid, tag.clone());
    }
    for (fid, face) in faces.iter_mut().enumerate() {
        if face.right.is_none() {
            match tags.remove(&fid) {
                Some(t) => face.tag = Some(t),
                None => {
                    return Err(MeshError::UntaggedBoundary {
                        element: face.left.element,
                        local_face: face.left.local_face,
                    })
                }
            }
        }
    }
    Ok(Skeleton {
        faces,
        element_faces,
        face_flipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> (Vec<Vec<usize>>, Vec<(usize, usize, String)>) {
        // unit square split along the diagonal (0,0)-(1,1)
        let elements = vec![vec![0, 1, 2], vec![0, 2, 3]];
        let boundary = vec![
            (0, 0, "bottom".to_string()),
            (0, 1, "right".to_string()),
            (1, 1, "top".to_string()),
            (1, 2, "left".to_string()),
        ];
        (elements, boundary)
    }

    #[test]
    fn two_triangles_share_one_face() {
        let (elements, boundary) = two_triangles();
        let sk = build_skeleton(&elements, &boundary).unwrap();
        assert_eq!(sk.faces.len(), 5);
        assert_eq!(sk.faces.iter().filter(|f| f.right.is_some()).count(), 1);
        let shared = sk.element_faces[0][2];
        assert_eq!(sk.element_faces[1][0], shared);
        assert!(!sk.face_flipped[0][2]);
        assert!(sk.face_flipped[1][0]);
    }

    #[test]
    fn single_triangle_has_three_boundary_faces() {
        let elements = vec![vec![0, 1, 2]];
        let boundary: Vec<_> = (0..3).map(|f| (0, f, "wall".to_string())).collect();
        let sk = build_skeleton(&elements, &boundary).unwrap();
        assert_eq!(sk.faces.len(), 3);
        assert!(sk.faces.iter().all(|f| f.right.is_none()));
    }

    #[test]
    fn missing_tag_and_overshared_faces_are_rejected() {
        let (elements, mut boundary) = two_triangles();
        boundary.pop();
        assert_eq!(
            build_skeleton(&elements, &boundary).unwrap_err(),
            MeshError::UntaggedBoundary {
                element: 1,
                local_face: 2
            }
        );
        let elements = vec![vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]];
        assert!(matches!(
            build_skeleton(&elements, &[]),
            Err(MeshError::NonConforming(0, 1))
        ));
    }

    #[test]
    fn local_dimension_table() {
        assert_eq!(local_dimension(1, Shape::Triangle).unwrap(), 27);
        assert_eq!(local_dimension(4, Shape::Triangle).unwrap(), 135);
        assert_eq!(local_dimension(6, Shape::Triangle).unwrap(), 252);
        assert_eq!(local_dimension(2, Shape::Triangle).unwrap(), 54);
        assert!(local_dimension(0, Shape::Triangle).is_err());
    }
}
