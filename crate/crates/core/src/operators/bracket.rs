use num_complex::Complex;
use rayon::prelude::*;

use super::{dyadic_nodes, t0_nodes, translation_symbol, window_nodes, CurveOpSpec, LinearOp};
use crate::error::{Error, Result};
use crate::geometry::ParaPoint;
use crate::grid::{Fft2, Field2D, SymbolTable, TorusGrid};
use crate::scalar::Real;
use crate::symbols::SymbolA;

const CHUNK: usize = 8;

enum Kind<T> {
    /// `A` sampled on the grid: `T = A·M − M·A` with `M = Σ c_n τ_{d_n}`.
    Spectral { a: Vec<T>, m: SymbolTable<T>, m_conj: SymbolTable<T> },
    /// Closed-form `A`: brackets `A(x) − A(x − d_n)` evaluated at the literal points.
    Pointwise { brackets: Vec<Vec<T>>, phases: Vec<(Vec<Complex<T>>, Vec<Complex<T>>)>, coefs: Vec<T> },
}

/// `f ↦ Σ_n c_n [A − A(· − d_n)] · f(· − d_n)` with precomputed brackets and phases.
pub struct BracketOp<T: Real> {
    grid: TorusGrid<T>,
    nodes: Vec<(ParaPoint<T>, T)>,
    kind: Kind<T>,
}

impl<T: Real> BracketOp<T> {
    /// General node sum. Sampled symbols must live on `grid`.
    pub fn from_nodes(a: &SymbolA<T>, grid: &TorusGrid<T>, nodes: Vec<(ParaPoint<T>, T)>) -> Result<Self> {
        let kind = match a.sampled_field() {
            Some(field) => {
                if !field.grid().same_as(grid) {
                    return Err(Error::GridMismatch(format!("symbol `{}` sampled on another grid", a.name())));
                }
                let m = translation_symbol(grid, &nodes);
                let m_conj = m.conj();
                Kind::Spectral { a: field.real_part(), m, m_conj }
            }
            None => {
                let brackets: Vec<Vec<T>> = nodes.par_iter().map(|(d, _)| a.bracket_on_grid(grid, *d)).collect();
                let phases = nodes.iter().map(|(d, _)| crate::grid::shift_phases(grid, *d)).collect();
                let coefs = nodes.iter().map(|(_, c)| *c).collect();
                Kind::Pointwise { brackets, phases, coefs }
            }
        };
        Ok(Self { grid: *grid, nodes, kind })
    }

    /// Truncated commutator over the window of `spec`.
    pub fn commutator(a: &SymbolA<T>, grid: &TorusGrid<T>, spec: &CurveOpSpec<T>) -> Result<Self> {
        Self::from_nodes(a, grid, window_nodes(spec, 2)?)
    }

    /// The dyadic piece at scale `2^j`.
    pub fn dyadic(a: &SymbolA<T>, grid: &TorusGrid<T>, j: i32, spec: &CurveOpSpec<T>) -> Result<Self> {
        if spec.n_quad < 8 {
            return Err(Error::InvalidArgument("n_quad must be ≥ 8".into()));
        }
        Self::from_nodes(a, grid, dyadic_nodes(j, spec))
    }

    /// The single-scale piece on `1/2 < t < 2` (positive `t` only).
    pub fn single_scale(a: &SymbolA<T>, grid: &TorusGrid<T>, spec: &CurveOpSpec<T>) -> Result<Self> {
        if spec.n_quad < 8 {
            return Err(Error::InvalidArgument("n_quad must be ≥ 8".into()));
        }
        Self::from_nodes(a, grid, t0_nodes(spec))
    }

    pub fn nodes(&self) -> &[(ParaPoint<T>, T)] {
        &self.nodes
    }

    fn check(&self, f: &Field2D<T>) {
        assert!(self.grid.same_as(f.grid()), "field lives on a different grid");
    }
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn phase_mul<T: Real>(spec: &[Complex<T>], p: &(Vec<Complex<T>>, Vec<Complex<T>>), conj: bool, out: &mut [Complex<T>]) {
    let n2 = p.1.len();
    for (i, (row, orow)) in spec.chunks(n2).zip(out.chunks_mut(n2)).enumerate() {
        let a = if conj { p.0[i].conj() } else { p.0[i] };
        for ((z, b), o) in row.iter().zip(&p.1).zip(orow.iter_mut()) {
            let b = if conj { b.conj() } else { *b };
            *o = *z * (a * b);
        }
    }
}

impl<T: Real> LinearOp<T> for BracketOp<T> {
    fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        self.check(f);
        match &self.kind {
            Kind::Spectral { a, m, .. } => {
                let mf = m.apply(f);
                let af = Field2D::from_vec_unchecked(self.grid, f.data().iter().zip(a).map(|(z, &w)| z * w).collect());
                let maf = m.apply(&af);
                let data = mf.data().iter().zip(maf.data()).zip(a).map(|((p, q), &w)| p * w - q).collect();
                Field2D::from_vec_unchecked(self.grid, data)
            }
            Kind::Pointwise { brackets, phases, coefs } => {
                let plan = Fft2::for_grid(&self.grid);
                let mut spec = f.data().to_vec();
                plan.forward(&mut spec);
                let n = self.grid.len();
                let partial: Vec<Vec<Complex<T>>> = (0..brackets.len())
                    .collect::<Vec<_>>()
                    .par_chunks(CHUNK)
                    .map(|chunk| {
                        let mut acc = vec![zero(); n];
                        let mut buf = vec![zero(); n];
                        for &k in chunk {
                            phase_mul(&spec, &phases[k], false, &mut buf);
                            plan.inverse(&mut buf);
                            let c = coefs[k];
                            for ((o, z), &d) in acc.iter_mut().zip(&buf).zip(&brackets[k]) {
                                *o = *o + z * (c * d);
                            }
                        }
                        acc
                    })
                    .collect();
                Field2D::from_vec_unchecked(self.grid, sum_in_order(partial, n))
            }
        }
    }

    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        self.check(g);
        match &self.kind {
            Kind::Spectral { a, m_conj, .. } => {
                let ag = Field2D::from_vec_unchecked(self.grid, g.data().iter().zip(a).map(|(z, &w)| z * w).collect());
                let mag = m_conj.apply(&ag);
                let mg = m_conj.apply(g);
                let data = mag.data().iter().zip(mg.data()).zip(a).map(|((p, q), &w)| p - q * w).collect();
                Field2D::from_vec_unchecked(self.grid, data)
            }
            Kind::Pointwise { brackets, phases, coefs } => {
                let plan = Fft2::for_grid(&self.grid);
                let n = self.grid.len();
                let partial: Vec<Vec<Complex<T>>> = (0..brackets.len())
                    .collect::<Vec<_>>()
                    .par_chunks(CHUNK)
                    .map(|chunk| {
                        let mut acc = vec![zero(); n];
                        let mut buf = vec![zero(); n];
                        let mut shifted = vec![zero(); n];
                        for &k in chunk {
                            let c = coefs[k];
                            for ((b, z), &d) in buf.iter_mut().zip(g.data()).zip(&brackets[k]) {
                                *b = z * (c * d);
                            }
                            plan.forward(&mut buf);
                            phase_mul(&buf, &phases[k], true, &mut shifted);
                            for (o, z) in acc.iter_mut().zip(&shifted) {
                                *o = *o + z;
                            }
                        }
                        acc
                    })
                    .collect();
                let mut data = sum_in_order(partial, n);
                plan.inverse(&mut data);
                Field2D::from_vec_unchecked(self.grid, data)
            }
        }
    }
}

fn sum_in_order<T: Real>(parts: Vec<Vec<Complex<T>>>, n: usize) -> Vec<Complex<T>> {
    let mut out = vec![zero(); n];
    for p in parts {
        for (o, z) in out.iter_mut().zip(p) {
            *o = *o + z;
        }
    }
    out
}
