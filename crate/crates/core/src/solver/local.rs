//! Element residuals and their exact Jacobian blocks.

use nalgebra::{DMatrix, DVector};

use super::kernels::{boundary_operator, face_flux, volume_flux, PointViscosity};
use super::{ArtificialViscosity, Discretization};
use crate::ad::Dual;
use crate::physics::{temperature, velocity, MSD, NSD, NVAR};

/// Residuals and Jacobian blocks of one element. `r_z` holds the local
/// equations; `r_hat` the element's contribution to the global equations
/// of its trace unknowns.
#[derive(Debug, Clone)]
pub struct ElementBlocks {
    pub r_z: DVector<f64>,
    pub r_hat: DVector<f64>,
    pub a_zz: DMatrix<f64>,
    pub a_zl: DMatrix<f64>,
    pub a_lz: DMatrix<f64>,
    pub a_ll: DMatrix<f64>,
}

/// Voigt mass weights `B_a : B_b`.
const VOIGT_MASS: [f64; MSD] = [1.0, 1.0, 2.0];

/// `B'_a g = (2 B_a - (2/3) tr(B_a) I) g`.
#[inline]
fn b_prime(a: usize, g: [f64; 2]) -> [f64; 2] {
    match a {
        0 => [4.0 / 3.0 * g[0], -2.0 / 3.0 * g[1]],
        1 => [-2.0 / 3.0 * g[0], 4.0 / 3.0 * g[1]],
        _ => [2.0 * g[1], 2.0 * g[0]],
    }
}

type D9 = Dual<9>;
type D13 = Dual<13>;
type D4 = Dual<4>;

/// Time-stepping data of a residual evaluation.
#[derive(Debug, Clone, Copy)]
pub struct TimeTerm<'a> {
    /// `1/dt`, zero for steady evaluations.
    pub inv_dt: f64,
    pub z_prev: Option<&'a [f64]>,
}

impl TimeTerm<'_> {
    pub const STEADY: TimeTerm<'static> = TimeTerm {
        inv_dt: 0.0,
        z_prev: None,
    };
}

impl Discretization {
    /// Residuals and exact Jacobians of element `e` at local unknowns `z`
    /// and local trace `lam`.
    pub fn element_blocks(
        &self,
        e: usize,
        z: &[f64],
        lam: &[f64],
        time: TimeTerm<'_>,
        av: &ArtificialViscosity,
    ) -> ElementBlocks {
        let n = self.n;
        let nf = self.nf;
        let nz = self.nz;
        let nl = self.nl;
        let nvar_local = if self.viscous { NVAR + MSD + NSD } else { NVAR };
        let gas = self.gas();
        let gamma = gas.gamma;
        let scheme = self.problem.scheme;
        let pr_beta = self.problem.shock.pr_beta;
        let geom = &self.geom[e];
        let quad = &self.re.quad;
        let mesh = self.mesh();

        let mut r_z = DVector::zeros(nz);
        let mut r_hat = DVector::zeros(nl);
        let mut a_zz = DMatrix::zeros(nz, nz);
        let mut a_zl = DMatrix::zeros(nz, nl);
        let mut a_lz = DMatrix::zeros(nl, nz);
        let mut a_ll = DMatrix::zeros(nl, nl);

        let interp_var = |phi: &[f64], var: usize| -> f64 {
            let base = var * n;
            phi.iter().enumerate().map(|(i, p)| p * z[base + i]).sum()
        };
        let lap = av.laplacian.get(e);
        let bulk = av.bulk.get(e);
        let at = |field: Option<&Vec<f64>>, phi: &[f64]| -> f64 {
            field.map_or(0.0, |f| phi.iter().zip(f).map(|(a, b)| a * b).sum())
        };

        // ---------------- volume terms
        for q in 0..quad.volume.len() {
            let nq = &quad.vol.phi[q];
            let gq = &geom.grad[q];
            let w = geom.w[q];
            let vals: [f64; 9] = std::array::from_fn(|m| {
                if m < nvar_local {
                    interp_var(nq, m)
                } else {
                    0.0
                }
            });
            let x = D9::seed(&vals, 0);
            let u: [D9; NVAR] = [x[0], x[1], x[2], x[3]];
            let eps: [D9; MSD] = [x[4], x[5], x[6]];
            let phi: [D9; NSD] = [x[7], x[8]];
            let pv = PointViscosity {
                beta: at(bulk, nq),
                pr_beta,
            };
            let flux = volume_flux(&u, &eps, &phi, gas, pv);
            // -(grad N_i, flux)
            for r in 0..NVAR {
                for i in 0..n {
                    let gi = gq[i];
                    r_z[r * n + i] -= w * (gi[0] * flux[r][0].re + gi[1] * flux[r][1].re);
                }
                for m in 0..nvar_local {
                    let d0 = flux[r][0].eps[m];
                    let d1 = flux[r][1].eps[m];
                    if d0 == 0.0 && d1 == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        let c = -w * (gq[i][0] * d0 + gq[i][1] * d1);
                        if c == 0.0 {
                            continue;
                        }
                        for j in 0..n {
                            a_zz[(r * n + i, m * n + j)] += c * nq[j];
                        }
                    }
                }
            }
            // pseudo-time mass term
            if time.inv_dt > 0.0 {
                if let Some(zp) = time.z_prev {
                    for r in 0..NVAR {
                        let up: f64 = nq.iter().enumerate().map(|(i, p)| p * zp[r * n + i]).sum();
                        let du = vals[r] - up;
                        for i in 0..n {
                            r_z[r * n + i] += w * nq[i] * du * time.inv_dt;
                            for j in 0..n {
                                a_zz[(r * n + i, r * n + j)] += w * nq[i] * nq[j] * time.inv_dt;
                            }
                        }
                    }
                }
            }
            // Laplacian artificial viscosity
            let eps_art = at(lap, nq);
            if eps_art != 0.0 {
                for r in 0..NVAR {
                    let mut grad_u = [0.0; 2];
                    for j in 0..n {
                        grad_u[0] += gq[j][0] * z[r * n + j];
                        grad_u[1] += gq[j][1] * z[r * n + j];
                    }
                    for i in 0..n {
                        r_z[r * n + i] += w * eps_art * (gq[i][0] * grad_u[0] + gq[i][1] * grad_u[1]);
                        for j in 0..n {
                            a_zz[(r * n + i, r * n + j)] +=
                                w * eps_art * (gq[i][0] * gq[j][0] + gq[i][1] * gq[j][1]);
                        }
                    }
                }
            }
            // source
            if let Some(s) = self.source_q[e].get(q) {
                for r in 0..NVAR {
                    for i in 0..n {
                        r_z[r * n + i] -= w * nq[i] * s[r];
                    }
                }
            }
            // mixed equations
            if self.viscous {
                let ud = D4::seed(&[vals[0], vals[1], vals[2], vals[3]], 0);
                let v = velocity(&ud);
                let t = temperature(&ud, gamma);
                for a in 0..MSD {
                    let row0 = (NVAR + a) * n;
                    for i in 0..n {
                        let bg = b_prime(a, gq[i]);
                        r_z[row0 + i] += w
                            * (nq[i] * VOIGT_MASS[a] * vals[NVAR + a] + bg[0] * v[0].re + bg[1] * v[1].re);
                        for j in 0..n {
                            a_zz[(row0 + i, row0 + j)] += w * nq[i] * VOIGT_MASS[a] * nq[j];
                        }
                        for s in 0..NVAR {
                            let c = w * (bg[0] * v[0].eps[s] + bg[1] * v[1].eps[s]);
                            if c == 0.0 {
                                continue;
                            }
                            for j in 0..n {
                                a_zz[(row0 + i, s * n + j)] += c * nq[j];
                            }
                        }
                    }
                }
                for d in 0..NSD {
                    let row0 = (NVAR + MSD + d) * n;
                    for i in 0..n {
                        r_z[row0 + i] += w * (nq[i] * vals[NVAR + MSD + d] + gq[i][d] * t.re);
                        for j in 0..n {
                            a_zz[(row0 + i, row0 + j)] += w * nq[i] * nq[j];
                        }
                        for s in 0..NVAR {
                            let c = w * gq[i][d] * t.eps[s];
                            for j in 0..n {
                                a_zz[(row0 + i, s * n + j)] += c * nq[j];
                            }
                        }
                    }
                }
            }
        }

        // ---------------- face terms
        for f in 0..3 {
            let fid = mesh.element_faces[e][f];
            let flipped = mesh.face_flipped[e][f];
            let bc = self.face_bc[fid].as_ref();
            let fg = &geom.faces[f];
            let tab = &quad.faces.element[f];
            let ltab = if flipped {
                &quad.faces.trace_rev
            } else {
                &quad.faces.trace
            };
            let l0 = f * nf * NVAR;
            let uh_node = |j: usize| -> [f64; NVAR] { std::array::from_fn(|r| lam[l0 + j * NVAR + r]) };
            // nodal trace velocity and temperature with derivatives
            let (vh_nodes, th_nodes): (Vec<[D4; 2]>, Vec<D4>) = if self.viscous {
                (0..nf)
                    .map(|j| {
                        let ud = D4::seed(&uh_node(j), 0);
                        (velocity(&ud), temperature(&ud, gamma))
                    })
                    .unzip()
            } else {
                (vec![], vec![])
            };
            for q in 0..fg.w.len() {
                let nq = &tab.phi[q];
                let lq = &ltab[q];
                let w = fg.w[q];
                let nrm = fg.normal[q];
                let mut vals = [0.0; 13];
                for (j, lj) in lq.iter().enumerate() {
                    for r in 0..NVAR {
                        vals[r] += lj * lam[l0 + j * NVAR + r];
                    }
                }
                for m in 0..nvar_local {
                    vals[NVAR + m] = interp_var(nq, m);
                }
                let x = D13::seed(&vals, 0);
                let uh: [D13; NVAR] = [x[0], x[1], x[2], x[3]];
                let ue: [D13; NVAR] = [x[4], x[5], x[6], x[7]];
                let eps: [D13; MSD] = [x[8], x[9], x[10]];
                let phi: [D13; NSD] = [x[11], x[12]];
                let pv = PointViscosity {
                    beta: at(bulk, nq),
                    pr_beta,
                };
                let fl = face_flux(scheme, &uh, &ue, &eps, &phi, nrm, gas, pv);
                // local conservation rows
                for r in 0..NVAR {
                    for i in 0..n {
                        let c = w * nq[i];
                        r_z[r * n + i] += c * fl[r].re;
                        for m in 0..nvar_local {
                            let d = fl[r].eps[NVAR + m];
                            if d != 0.0 {
                                for j in 0..n {
                                    a_zz[(r * n + i, m * n + j)] += c * d * nq[j];
                                }
                            }
                        }
                        for s in 0..NVAR {
                            let d = fl[r].eps[s];
                            if d != 0.0 {
                                for (j, lj) in lq.iter().enumerate() {
                                    a_zl[(r * n + i, l0 + j * NVAR + s)] += c * d * lj;
                                }
                            }
                        }
                    }
                }
                // global rows: transmission flux or boundary operator
                let g = match bc {
                    None => fl,
                    Some(kind) => boundary_operator(kind, &uh, &ue, &phi, nrm, fg.x[q], gas),
                };
                for (jr, ljr) in lq.iter().enumerate() {
                    let c = w * ljr;
                    for r in 0..NVAR {
                        let row = l0 + jr * NVAR + r;
                        r_hat[row] += c * g[r].re;
                        for m in 0..nvar_local {
                            let d = g[r].eps[NVAR + m];
                            if d != 0.0 {
                                for j in 0..n {
                                    a_lz[(row, m * n + j)] += c * d * nq[j];
                                }
                            }
                        }
                        for s in 0..NVAR {
                            let d = g[r].eps[s];
                            if d != 0.0 {
                                for (j, lj) in lq.iter().enumerate() {
                                    a_ll[(row, l0 + j * NVAR + s)] += c * d * lj;
                                }
                            }
                        }
                    }
                }
                // mixed-variable face terms with the trace velocity and temperature
                if self.viscous {
                    let mut vh = [0.0; 2];
                    let mut th = 0.0;
                    for (j, lj) in lq.iter().enumerate() {
                        vh[0] += lj * vh_nodes[j][0].re;
                        vh[1] += lj * vh_nodes[j][1].re;
                        th += lj * th_nodes[j].re;
                    }
                    for a in 0..MSD {
                        let bn = b_prime(a, nrm);
                        let row0 = (NVAR + a) * n;
                        for i in 0..n {
                            let c = w * nq[i];
                            r_z[row0 + i] -= c * (bn[0] * vh[0] + bn[1] * vh[1]);
                            for (j, lj) in lq.iter().enumerate() {
                                for s in 0..NVAR {
                                    let d = bn[0] * vh_nodes[j][0].eps[s] + bn[1] * vh_nodes[j][1].eps[s];
                                    a_zl[(row0 + i, l0 + j * NVAR + s)] -= c * lj * d;
                                }
                            }
                        }
                    }
                    for d in 0..NSD {
                        let row0 = (NVAR + MSD + d) * n;
                        for i in 0..n {
                            let c = w * nq[i] * nrm[d];
                            r_z[row0 + i] -= c * th;
                            for (j, lj) in lq.iter().enumerate() {
                                for s in 0..NVAR {
                                    a_zl[(row0 + i, l0 + j * NVAR + s)] -= c * lj * th_nodes[j].eps[s];
                                }
                            }
                        }
                    }
                }
            }
        }
        ElementBlocks {
            r_z,
            r_hat,
            a_zz,
            a_zl,
            a_lz,
            a_ll,
        }
    }
}
