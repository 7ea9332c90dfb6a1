use super::{Cocycle, EvenLattice, LatticeError, LatticeVector, Polarization};

/// A lattice model `F_{L,p}`: the lattice, its cocycle, a polarization and cached frame data.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub lattice: EvenLattice,
    pub cocycle: Cocycle,
    pub pol: Polarization,
    /// `left_pair[i][k] = (α_k, e_i)_p` for the left frame.
    left_pair: Vec<Vec<f64>>,
    right_pair: Vec<Vec<f64>>,
}

impl Model {
    pub fn new(name: impl Into<String>, lattice: EvenLattice, pol: Polarization) -> Self {
        let cocycle = Cocycle::new(&lattice);
        let n = lattice.rank();
        let pair_rows = |frame: &super::Frame| -> Vec<Vec<f64>> {
            frame
                .vectors
                .iter()
                .map(|e| {
                    (0..n)
                        .map(|k| (0..n).map(|j| pol.metric()[(k, j)] * e[j]).sum())
                        .collect()
                })
                .collect()
        };
        let left_pair = pair_rows(pol.left_frame());
        let right_pair = pair_rows(pol.right_frame());
        Model { name: name.into(), lattice, cocycle, pol, left_pair, right_pair }
    }

    /// The `II_{1,1}` model at boost parameter `R`.
    pub fn ii11_boost(r: f64) -> Result<Self, LatticeError> {
        let lat = super::ii11();
        let pol = super::boost_polarization_rank2(&lat, r)?;
        Ok(Model::new(format!("II11_R{r}"), lat, pol))
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn left_dim(&self) -> usize {
        self.left_pair.len()
    }

    pub fn right_dim(&self) -> usize {
        self.right_pair.len()
    }

    pub fn left_signs(&self) -> &[f64] {
        &self.pol.left_frame().signs
    }

    pub fn right_signs(&self) -> &[f64] {
        &self.pol.right_frame().signs
    }

    /// `(α, e_i)_p` for every left frame vector.
    pub fn left_components(&self, a: &LatticeVector) -> Vec<f64> {
        components(&self.left_pair, &a.0)
    }

    /// `(α, f_j)_p` for every right frame vector.
    pub fn right_components(&self, a: &LatticeVector) -> Vec<f64> {
        components(&self.right_pair, &a.0)
    }

    /// `(h, e_i)_p` for a real vector `h`.
    pub fn left_components_real(&self, h: &[f64]) -> Vec<f64> {
        self.left_pair.iter().map(|row| row.iter().zip(h).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn right_components_real(&self, h: &[f64]) -> Vec<f64> {
        self.right_pair.iter().map(|row| row.iter().zip(h).map(|(a, b)| a * b).sum()).collect()
    }

    /// `(pα, pβ)_p`.
    pub fn pair_left(&self, a: &LatticeVector, b: &LatticeVector) -> f64 {
        let ca = self.left_components(a);
        let cb = self.left_components(b);
        signed_dot(self.left_signs(), &ca, &cb)
    }

    /// `(p̄α, p̄β)_p`.
    pub fn pair_right(&self, a: &LatticeVector, b: &LatticeVector) -> f64 {
        let ca = self.right_components(a);
        let cb = self.right_components(b);
        signed_dot(self.right_signs(), &ca, &cb)
    }

    /// `(½(pα,pα)_p, ½(p̄α,p̄α)_p)`.
    pub fn sector_weights(&self, a: &LatticeVector) -> (f64, f64) {
        (0.5 * self.pair_left(a, a), 0.5 * self.pair_right(a, a))
    }

    pub fn eps(&self, a: &LatticeVector, b: &LatticeVector) -> i32 {
        self.cocycle.sign_slices(&a.0, &b.0)
    }

    /// The frame vector `e_i` of the left space in lattice coordinates.
    pub fn left_unit(&self, i: usize) -> Vec<f64> {
        self.pol.left_frame().vectors[i].clone()
    }

    /// The frame vector `f_j` of the right space in lattice coordinates.
    pub fn right_unit(&self, j: usize) -> Vec<f64> {
        self.pol.right_frame().vectors[j].clone()
    }
}

fn components(rows: &[Vec<f64>], a: &[i64]) -> Vec<f64> {
    rows.iter().map(|row| row.iter().zip(a).map(|(x, &k)| x * k as f64).sum()).collect()
}

pub(crate) fn signed_dot(signs: &[f64], a: &[f64], b: &[f64]) -> f64 {
    signs.iter().zip(a.iter().zip(b)).map(|(s, (x, y))| s * x * y).sum()
}
