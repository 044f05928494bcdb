use crate::error::{Error, Result};
use crate::qudit::linalg::{CMatrix, C64};
use crate::qudit::{fourier_matrix, phase_matrix, shift_matrix};

/// Per-wire dimensions. Wire 0 is the target, wires 1 and 2 the controls;
/// wire 0 is the most significant digit of the flat state index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireLayout {
    dims: Vec<usize>,
}

impl WireLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Wiring("layout has no wires".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(d));
        }
        Ok(WireLayout { dims })
    }

    /// Target plus two controls, all of dimension `d`.
    pub fn estimation(d: usize) -> Result<Self> {
        WireLayout::new(vec![d; 3])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_wires(&self) -> usize {
        self.dims.len()
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn stride(&self, wire: usize) -> usize {
        self.dims[wire + 1..].iter().product()
    }

    pub fn digit(&self, index: usize, wire: usize) -> usize {
        (index / self.stride(wire)) % self.dims[wire]
    }

    fn check_wire(&self, w: usize) -> Result<()> {
        if w >= self.dims.len() {
            Err(Error::Wiring(format!("wire {w} out of range for {} wires", self.dims.len())))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlledKind {
    Shift,
    Phase,
}

/// One gate of an estimation circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    /// Arbitrary single-wire unitary (the unknown `U`, state preparation, ...).
    Local {
        wire: usize,
        matrix: CMatrix,
    },
    /// `V_{tc}^{(i)} = Σ_k V_t^k ⊗ |k⊖i⟩_c⟨k⊖i|` with `V ∈ {X, Z}`; `dagger`
    /// replaces `V` by `V^†`.
    Controlled {
        kind: ControlledKind,
        target: usize,
        control: usize,
        offset: i64,
        dagger: bool,
    },
    Fourier {
        wire: usize,
    },
    InverseFourier {
        wire: usize,
    },
    Shift {
        wire: usize,
    },
    /// Block-Hadamard on a pair of control wires, see [`super::tilde_h_operator`].
    TildeH {
        first: usize,
        second: usize,
    },
    QubitH {
        wire: usize,
    },
    QubitS {
        wire: usize,
    },
}

impl GateOp {
    pub fn controlled_shift(target: usize, control: usize, offset: i64) -> Self {
        GateOp::Controlled { kind: ControlledKind::Shift, target, control, offset, dagger: false }
    }

    pub fn controlled_shift_dagger(target: usize, control: usize, offset: i64) -> Self {
        GateOp::Controlled { kind: ControlledKind::Shift, target, control, offset, dagger: true }
    }

    pub fn controlled_phase(target: usize, control: usize, offset: i64) -> Self {
        GateOp::Controlled { kind: ControlledKind::Phase, target, control, offset, dagger: false }
    }

    pub fn controlled_phase_dagger(target: usize, control: usize, offset: i64) -> Self {
        GateOp::Controlled { kind: ControlledKind::Phase, target, control, offset, dagger: true }
    }

    /// Wires the gate acts on, in the order used by [`GateOp::operator`].
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            GateOp::Local { wire, .. }
            | GateOp::Fourier { wire }
            | GateOp::InverseFourier { wire }
            | GateOp::Shift { wire }
            | GateOp::QubitH { wire }
            | GateOp::QubitS { wire } => vec![wire],
            GateOp::Controlled { target, control, .. } => vec![target, control],
            GateOp::TildeH { first, second } => vec![first, second],
        }
    }

    pub fn validate(&self, layout: &WireLayout) -> Result<()> {
        let wires = self.wires();
        for &w in &wires {
            layout.check_wire(w)?;
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::Wiring(format!("gate acts twice on wire {}", wires[0])));
        }
        match self {
            GateOp::Local { wire, matrix } => {
                let d = layout.dims()[*wire];
                if matrix.nrows() != d || matrix.ncols() != d {
                    return Err(Error::Shape(format!(
                        "local gate is {}x{}, wire has dimension {d}",
                        matrix.nrows(),
                        matrix.ncols()
                    )));
                }
            }
            GateOp::QubitH { wire } | GateOp::QubitS { wire } if layout.dims()[*wire] != 2 => {
                return Err(Error::Wiring(format!("qubit gate on wire {wire} of dimension {}", layout.dims()[*wire])));
            }
            GateOp::TildeH { first, second } if layout.dims()[*first] != layout.dims()[*second] => {
                return Err(Error::Wiring("tilde-H needs equal wire dimensions".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Dense operator on `self.wires()` (first wire most significant).
    pub fn operator(&self, layout: &WireLayout) -> Result<CMatrix> {
        self.validate(layout)?;
        let dims = layout.dims();
        Ok(match self {
            GateOp::Local { matrix, .. } => matrix.clone(),
            GateOp::Fourier { wire } => fourier_matrix(dims[*wire])?.into_matrix(),
            GateOp::InverseFourier { wire } => fourier_matrix(dims[*wire])?.adjoint().into_matrix(),
            GateOp::Shift { wire } => shift_matrix(dims[*wire], 1),
            GateOp::QubitH { .. } => hadamard(),
            GateOp::QubitS { .. } => phase_gate(),
            GateOp::Controlled { kind, target, control, offset, dagger } => {
                controlled_gate(*kind, dims[*target], dims[*control], *offset, *dagger)
            }
            GateOp::TildeH { first, .. } => super::tilde_h_operator(dims[*first])?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            GateOp::Local { wire, .. } => format!("U[{wire}]"),
            GateOp::Controlled { kind, target, control, offset, dagger } => {
                let v = match kind {
                    ControlledKind::Shift => "X",
                    ControlledKind::Phase => "Z",
                };
                let dg = if *dagger { "†" } else { "" };
                format!("{v}{dg}_{target}{control}^({offset})")
            }
            GateOp::Fourier { wire } => format!("F[{wire}]"),
            GateOp::InverseFourier { wire } => format!("F⁻¹[{wire}]"),
            GateOp::Shift { wire } => format!("X[{wire}]"),
            GateOp::TildeH { first, second } => format!("H̃[{first},{second}]"),
            GateOp::QubitH { wire } => format!("H[{wire}]"),
            GateOp::QubitS { wire } => format!("S[{wire}]"),
        }
    }
}

pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[s.into(), s.into(), s.into(), (-s).into()])
}

/// `S = |0⟩⟨0| + i|1⟩⟨1|`.
pub fn phase_gate() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]))
}

/// Two-wire operator (target most significant) of a controlled shift or phase
/// with shifted control: for control basis state `|c⟩` it applies `V^{c⊕i}`
/// (or `(V^†)^{c⊕i}`) to the target.
pub fn controlled_gate(kind: ControlledKind, d_target: usize, d_control: usize, offset: i64, dagger: bool) -> CMatrix {
    let n = d_target * d_control;
    let mut m = CMatrix::zeros(n, n);
    for c in 0..d_control {
        let k = (c as i64 + offset).rem_euclid(d_control as i64);
        let power = if dagger { -k } else { k };
        let v = match kind {
            ControlledKind::Shift => shift_matrix(d_target, power),
            ControlledKind::Phase => phase_matrix(d_target, power),
        };
        for t1 in 0..d_target {
            for t0 in 0..d_target {
                m[(t1 * d_control + c, t0 * d_control + c)] = v[(t1, t0)];
            }
        }
    }
    m
}

/// Ordered gate list on a fixed layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: WireLayout,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(layout: WireLayout) -> Self {
        Circuit { layout, ops: Vec::new() }
    }

    pub fn from_ops(layout: WireLayout, ops: Vec<GateOp>) -> Result<Self> {
        for op in &ops {
            op.validate(&layout)?;
        }
        Ok(Circuit { layout, ops })
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(&self.layout)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn layout(&self) -> &WireLayout {
        &self.layout
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}
