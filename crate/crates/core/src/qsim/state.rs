//! Sparse real statevector over bit-packed registers.
//!
//! Every circuit simulated here uses real amplitudes (Hadamards,
//! permutations, phase flips, reflections), so amplitudes are `f64`. Basis
//! states are `u64` keys with each register occupying a contiguous bit
//! field. A `BTreeMap` keeps iteration (and so summation) order fixed.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
const PRUNE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub offset: u32,
    pub width: u32,
}

impl Field {
    pub fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            ((1u64 << self.width) - 1) << self.offset
        }
    }

    pub fn get(&self, key: u64) -> u64 {
        (key & self.mask()) >> self.offset
    }

    pub fn set(&self, key: u64, value: u64) -> u64 {
        (key & !self.mask()) | ((value << self.offset) & self.mask())
    }

    pub fn size(&self) -> u64 {
        1u64 << self.width
    }
}

/// Allocates consecutive bit fields.
#[derive(Debug, Clone, Default)]
pub struct Layout {
    next: u32,
}

impl Layout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, width: u32) -> Result<Field> {
        if self.next + width > 64 {
            return Err(Error::RegisterCap { needed: self.next + width, cap: 64 });
        }
        let f = Field { offset: self.next, width };
        self.next += width;
        Ok(f)
    }

    pub fn total_bits(&self) -> u32 {
        self.next
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    amps: BTreeMap<u64, f64>,
}

impl SparseState {
    pub fn basis(key: u64) -> Self {
        Self { amps: BTreeMap::from([(key, 1.0)]) }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.amps.iter().map(|(&k, &a)| (k, a))
    }

    pub fn amplitude(&self, key: u64) -> f64 {
        self.amps.get(&key).copied().unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a * a).sum()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.amps.iter().map(|(k, a)| a * big.amplitude(*k)).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let dev = (self.norm_sqr().sqrt() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::Numeric(format!("statevector norm drifted by {dev:.3e}")));
        }
        Ok(())
    }

    /// Applies a basis permutation. Fails if `f` is not injective on the
    /// support or reports an error for some basis state.
    pub fn permute<F>(&mut self, mut f: F) -> Result<()>
    where
        F: FnMut(u64) -> Result<u64>,
    {
        let mut out = BTreeMap::new();
        for (&k, &a) in &self.amps {
            if out.insert(f(k)?, a).is_some() {
                return Err(Error::Numeric("non-injective basis map".into()));
            }
        }
        self.amps = out;
        Ok(())
    }

    /// `H^{⊗w}` on one field.
    pub fn hadamard(&mut self, field: Field) -> Result<()> {
        let size = field.size();
        let norm = (size as f64).sqrt().recip();
        let mut out: BTreeMap<u64, f64> = BTreeMap::new();
        for (&k, &a) in &self.amps {
            let x = field.get(k);
            for y in 0..size {
                let sign = if (x & y).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                *out.entry(field.set(k, y)).or_insert(0.0) += sign * a * norm;
            }
        }
        out.retain(|_, a| a.abs() > PRUNE_TOL);
        self.amps = out;
        self.check_normalized()
    }

    /// Negates amplitudes on basis states where `pred` holds.
    pub fn phase_flip<P: Fn(u64) -> bool>(&mut self, pred: P) {
        for (k, a) in self.amps.iter_mut() {
            if pred(*k) {
                *a = -*a;
            }
        }
    }

    /// `(2|k⟩⟨k| − I)`.
    pub fn reflect_about(&mut self, key: u64) {
        let overlap = self.amplitude(key);
        for a in self.amps.values_mut() {
            *a = -*a;
        }
        // −a + 2a on the reflection axis.
        if overlap.abs() > PRUNE_TOL {
            self.amps.insert(key, overlap);
        } else {
            self.amps.remove(&key);
        }
    }

    /// Squared norm of the projection onto basis states where `pred` holds.
    pub fn probability<P: Fn(u64) -> bool>(&self, pred: P) -> f64 {
        self.amps.iter().filter(|(k, _)| pred(**k)).map(|(_, a)| a * a).sum()
    }

    /// Draws a basis state with probability `|amplitude|²`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = self.norm_sqr();
        let mut u = rng.random::<f64>() * total;
        let mut last = 0;
        for (&k, &a) in &self.amps {
            last = k;
            u -= a * a;
            if u < 0.0 {
                return k;
            }
        }
        last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_pack_and_unpack() {
        let mut l = Layout::new();
        let a = l.field(3).unwrap();
        let b = l.field(5).unwrap();
        let k = b.set(a.set(0, 5), 17);
        assert_eq!(a.get(k), 5);
        assert_eq!(b.get(k), 17);
        assert_eq!(l.total_bits(), 8);
        assert!(l.field(57).is_err());
    }

    #[test]
    fn hadamard_is_involution() {
        let mut l = Layout::new();
        let f = l.field(3).unwrap();
        let g = l.field(2).unwrap();
        let start = g.set(f.set(0, 6), 1);
        let mut s = SparseState::basis(start);
        s.hadamard(f).unwrap();
        assert_eq!(s.len(), 8);
        for (_, a) in s.iter() {
            assert!((a.abs() - 8f64.sqrt().recip()).abs() < 1e-15);
        }
        s.hadamard(f).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.amplitude(start) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_and_flip() {
        let mut l = Layout::new();
        let f = l.field(1).unwrap();
        let mut s = SparseState::basis(0);
        s.hadamard(f).unwrap();
        s.phase_flip(|k| f.get(k) == 1);
        s.reflect_about(0);
        assert!((s.amplitude(0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.amplitude(1) - 0.5f64.sqrt()).abs() < 1e-15);
        s.check_normalized().unwrap();
    }

    #[test]
    fn permutation_must_be_injective() {
        let mut l = Layout::new();
        let f = l.field(2).unwrap();
        let mut s = SparseState::basis(0);
        s.hadamard(f).unwrap();
        assert!(s.permute(|_| Ok(0)).is_err());
    }
}
