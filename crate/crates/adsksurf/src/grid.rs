//! Rectangular parameter grids shared by the surface and tensor modules.

/// A dense rectangular grid of values over `[u0, u0 + (nu-1) hu] × [v0, …]`.
///
/// Index convention: `(i, j)` addresses parameter `(u0 + i·hu, v0 + j·hv)`.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub nu: usize,
    pub nv: usize,
    pub hu: f64,
    pub hv: f64,
    pub u0: f64,
    pub v0: f64,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn from_fn(
        nu: usize,
        nv: usize,
        hu: f64,
        hv: f64,
        u0: f64,
        v0: f64,
        mut f: impl FnMut(f64, f64) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                data.push(f(u0 + i as f64 * hu, v0 + j as f64 * hv));
            }
        }
        Grid { nu, nv, hu, hv, u0, v0, data }
    }

    /// Same layout as `self`, values produced per index.
    pub fn map_indexed<U: Clone>(&self, mut f: impl FnMut(usize, usize, &T) -> U) -> Grid<U> {
        let mut data = Vec::with_capacity(self.nu * self.nv);
        for i in 0..self.nu {
            for j in 0..self.nv {
                data.push(f(i, j, self.get(i, j)));
            }
        }
        Grid {
            nu: self.nu,
            nv: self.nv,
            hu: self.hu,
            hv: self.hv,
            u0: self.u0,
            v0: self.v0,
            data,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.nv + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.nv + j]
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.hu
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.hv
    }

    /// Indices at least `margin` nodes away from every edge.
    pub fn interior(&self, margin: usize) -> impl Iterator<Item = (usize, usize)> {
        let nu = self.nu;
        let nv = self.nv;
        (margin..nu.saturating_sub(margin))
            .flat_map(move |i| (margin..nv.saturating_sub(margin)).map(move |j| (i, j)))
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}
