use super::gates::{Circuit, WireLayout};
use crate::error::{Error, Result};
use crate::qudit::linalg::{normalize, CMatrix, C64};

pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: WireLayout,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(layout: WireLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != layout.size() {
            return Err(Error::Shape(format!("{} amplitudes for a state of size {}", amps.len(), layout.size())));
        }
        check_normalized(&amps)?;
        Ok(PureState { layout, amps })
    }

    pub(crate) fn new_unchecked(layout: WireLayout, amps: Vec<C64>) -> Self {
        PureState { layout, amps }
    }

    /// Computational basis state with the given per-wire digits.
    pub fn basis(layout: WireLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.n_wires() || digits.iter().zip(layout.dims()).any(|(&k, &d)| k >= d) {
            return Err(Error::Shape(format!("basis digits {digits:?} do not fit {:?}", layout.dims())));
        }
        let idx: usize = digits.iter().enumerate().map(|(w, &k)| k * layout.stride(w)).sum();
        let mut amps = vec![C64::new(0.0, 0.0); layout.size()];
        amps[idx] = C64::new(1.0, 0.0);
        Ok(PureState { layout, amps })
    }

    /// Tensor product of single-wire states; each factor must be normalized.
    pub fn product(factors: &[&[C64]]) -> Result<Self> {
        let layout = WireLayout::new(factors.iter().map(|f| f.len()).collect())?;
        for f in factors {
            check_normalized(f)?;
        }
        let mut amps = vec![C64::new(1.0, 0.0)];
        for f in factors {
            amps = amps.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
        }
        Ok(PureState { layout, amps })
    }

    pub fn layout(&self) -> &WireLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn density(&self) -> DensityState {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityState { layout: self.layout.clone(), matrix: &v * v.adjoint() }
    }

    /// Applies a dense operator on `wires` (first wire most significant) by
    /// contracting only the affected axes.
    pub fn apply_operator(&mut self, wires: &[usize], op: &CMatrix) {
        apply_on_wires(&self.layout, &mut self.amps, wires, op);
    }

    /// Splits `|Φ⟩ = |a⟩_0 ⊗ |b⟩_{rest}` given the expected wire-0 factor:
    /// returns the rest-factor `⟨a|Φ⟩` (unnormalized projection).
    pub fn project_first_wire(&self, first: &[C64]) -> Vec<C64> {
        let d0 = self.layout.dims()[0];
        let rest = self.layout.size() / d0;
        (0..rest).map(|j| (0..d0).map(|i| first[i].conj() * self.amps[i * rest + j]).sum()).collect()
    }

    /// Reduced density matrix of wire 0.
    pub fn reduced_first_wire(&self) -> CMatrix {
        let d0 = self.layout.dims()[0];
        let rest = self.layout.size() / d0;
        CMatrix::from_fn(d0, d0, |i, k| {
            (0..rest).map(|j| self.amps[i * rest + j] * self.amps[k * rest + j].conj()).sum()
        })
    }
}

fn check_normalized(v: &[C64]) -> Result<()> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (n - 1.0).abs() > NORM_TOL {
        Err(Error::Normalization(n))
    } else {
        Ok(())
    }
}

/// Offsets of every digit combination of `wires` in the flat index.
fn sub_offsets(layout: &WireLayout, wires: &[usize]) -> Vec<usize> {
    let mut offs = vec![0usize];
    for &w in wires {
        let s = layout.stride(w);
        offs = offs.iter().flat_map(|&o| (0..layout.dims()[w]).map(move |k| o + k * s)).collect();
    }
    offs
}

pub(crate) fn apply_on_wires(layout: &WireLayout, amps: &mut [C64], wires: &[usize], op: &CMatrix) {
    let offs = sub_offsets(layout, wires);
    let n = offs.len();
    debug_assert_eq!(op.nrows(), n);
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for base in 0..layout.size() {
        if wires.iter().any(|&w| layout.digit(base, w) != 0) {
            continue;
        }
        for (b, &o) in buf.iter_mut().zip(&offs) {
            *b = amps[base + o];
        }
        for (i, &oi) in offs.iter().enumerate() {
            amps[base + oi] = (0..n).map(|j| op[(i, j)] * buf[j]).sum();
        }
    }
}

/// Embeds an operator on `wires` into the full space of `layout`.
pub fn embed(layout: &WireLayout, wires: &[usize], op: &CMatrix) -> CMatrix {
    let n = layout.size();
    let mut full = CMatrix::zeros(n, n);
    for col in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[col] = C64::new(1.0, 0.0);
        apply_on_wires(layout, &mut e, wires, op);
        for (row, v) in e.into_iter().enumerate() {
            full[(row, col)] = v;
        }
    }
    full
}

/// Sequential gate application on a pure state.
pub fn apply_circuit(c: &Circuit, s: &PureState) -> Result<PureState> {
    if c.layout() != s.layout() {
        return Err(Error::LayoutMismatch(format!("circuit {:?} vs state {:?}", c.layout().dims(), s.layout().dims())));
    }
    let mut out = s.clone();
    for op in c.ops() {
        let m = op.operator(c.layout())?;
        out.apply_operator(&op.wires(), &m);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    layout: WireLayout,
    matrix: CMatrix,
}

impl DensityState {
    pub fn new(layout: WireLayout, matrix: CMatrix) -> Result<Self> {
        let n = layout.size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Shape(format!("density matrix must be {n}x{n}")));
        }
        Ok(DensityState { layout, matrix })
    }

    pub fn layout(&self) -> &WireLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::qudit::linalg::hermitian_eigenvalues(&self.matrix)[0]
    }

    pub fn purity(&self) -> f64 {
        crate::qudit::linalg::hs_inner(&self.matrix, &self.matrix).re
    }

    /// `ρ ↦ O ρ O^†` for an operator on `wires`.
    pub fn conjugate(&mut self, wires: &[usize], op: &CMatrix) {
        let full = embed(&self.layout, wires, op);
        self.matrix = &full * &self.matrix * full.adjoint();
    }

    /// `ρ ↦ Σ_k K_k ρ K_k^†` for Kraus operators on `wires`.
    pub fn apply_kraus(&mut self, wires: &[usize], kraus: &[CMatrix]) {
        let n = self.layout.size();
        let mut acc = CMatrix::zeros(n, n);
        for k in kraus {
            let full = embed(&self.layout, wires, k);
            acc += &full * &self.matrix * full.adjoint();
        }
        self.matrix = acc;
    }

    /// Partial trace keeping `keep` (in increasing wire order).
    pub fn reduce(&self, keep: &[usize]) -> DensityState {
        let layout = &self.layout;
        let kdims: Vec<usize> = keep.iter().map(|&w| layout.dims()[w]).collect();
        let klayout = WireLayout::new(kdims).expect("kept wires have valid dims");
        let m = klayout.size();
        let mut out = CMatrix::zeros(m, m);
        let key =
            |idx: usize| keep.iter().enumerate().map(|(i, &w)| layout.digit(idx, w) * klayout.stride(i)).sum::<usize>();
        let traced: Vec<usize> = (0..layout.n_wires()).filter(|w| !keep.contains(w)).collect();
        for r in 0..layout.size() {
            for c in 0..layout.size() {
                if traced.iter().all(|&w| layout.digit(r, w) == layout.digit(c, w)) {
                    out[(key(r), key(c))] += self.matrix[(r, c)];
                }
            }
        }
        DensityState { layout: klayout, matrix: out }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

/// Normalized copy of `v`.
pub fn normalized(v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    normalize(&mut out);
    out
}
