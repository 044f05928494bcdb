use crate::error::Result;
use crate::qudit::WHIndex;

/// Split of Z_d² into the identity index, self-conjugate ("unpaired")
/// indices and conjugate pairs. `plus[i]` and `minus[i]` are conjugates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSets {
    pub dim: usize,
    pub unpaired: Vec<WHIndex>,
    pub plus: Vec<WHIndex>,
    pub minus: Vec<WHIndex>,
}

impl PartitionSets {
    pub fn n_params(&self) -> usize {
        self.unpaired.len() + 2 * self.plus.len()
    }
}

/// `S₊` takes the lexicographically smaller member of every `{p, ⊖p}` pair.
pub fn partition_indices(d: usize) -> Result<PartitionSets> {
    crate::qudit::check_dim(d)?;
    let mut unpaired = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for p in WHIndex::all(d).filter(|p| !p.is_zero()) {
        let q = p.neg(d);
        if q == p {
            unpaired.push(p);
        } else if p < q {
            plus.push(p);
            minus.push(q);
        }
    }
    Ok(PartitionSets { dim: d, unpaired, plus, minus })
}
