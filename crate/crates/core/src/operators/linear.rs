use crate::grid::{Field2D, SymbolTable, TorusGrid};
use crate::scalar::Real;

/// A linear map on fields over a fixed grid, with its `L²` adjoint.
pub trait LinearOp<T: Real>: Send + Sync {
    fn grid(&self) -> &TorusGrid<T>;
    fn apply(&self, f: &Field2D<T>) -> Field2D<T>;
    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T>;
}

impl<T: Real, L: LinearOp<T> + ?Sized> LinearOp<T> for &L {
    fn grid(&self) -> &TorusGrid<T> {
        (**self).grid()
    }
    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        (**self).apply(f)
    }
    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        (**self).apply_adjoint(g)
    }
}

impl<T: Real> LinearOp<T> for Box<dyn LinearOp<T>> {
    fn grid(&self) -> &TorusGrid<T> {
        (**self).grid()
    }
    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        (**self).apply(f)
    }
    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        (**self).apply_adjoint(g)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityOp<T> {
    pub grid: TorusGrid<T>,
}

impl<T: Real> LinearOp<T> for IdentityOp<T> {
    fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }
    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        f.clone()
    }
    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        g.clone()
    }
}

/// Fourier multiplier; the adjoint has the conjugate symbol.
#[derive(Debug, Clone)]
pub struct MultiplierOp<T> {
    table: SymbolTable<T>,
    conj: SymbolTable<T>,
}

impl<T: Real> MultiplierOp<T> {
    pub fn new(table: SymbolTable<T>) -> Self {
        let conj = table.conj();
        Self { table, conj }
    }

    pub fn table(&self) -> &SymbolTable<T> {
        &self.table
    }
}

impl<T: Real> LinearOp<T> for MultiplierOp<T> {
    fn grid(&self) -> &TorusGrid<T> {
        self.table.grid()
    }
    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        self.table.apply(f)
    }
    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        self.conj.apply(g)
    }
}

/// `outer ∘ inner`.
pub struct Compose<A, B> {
    pub outer: A,
    pub inner: B,
}

impl<T: Real, A: LinearOp<T>, B: LinearOp<T>> LinearOp<T> for Compose<A, B> {
    fn grid(&self) -> &TorusGrid<T> {
        self.inner.grid()
    }
    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        self.outer.apply(&self.inner.apply(f))
    }
    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        self.inner.apply_adjoint(&self.outer.apply_adjoint(g))
    }
}
