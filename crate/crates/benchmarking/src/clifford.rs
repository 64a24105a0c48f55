use std::collections::VecDeque;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use quantum_core::{dagger, identity};

/// The 24-element single-qubit Clifford group, modulo global phase, with
/// precomputed composition and inverse tables.
#[derive(Debug, Clone)]
pub struct CliffordGroup {
    elements: Vec<Array2<C64>>,
    /// `compose[a][b]` is the index of `U_a · U_b` (apply `b` first).
    compose: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

fn hadamard() -> Array2<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Array2::from_shape_vec((2, 2), vec![h.into(), h.into(), h.into(), (-h).into()]).unwrap()
}

fn phase_gate() -> Array2<C64> {
    Array2::from_shape_vec((2, 2), vec![1.0.into(), 0.0.into(), 0.0.into(), C64::i()]).unwrap()
}

/// True when `a = e^{iθ} b` for some θ.
fn same_up_to_phase(a: &Array2<C64>, b: &Array2<C64>) -> bool {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    (overlap.norm() - 2.0).abs() < 1e-9
}

impl CliffordGroup {
    /// Generate the group by breadth-first search over `H` and `S`.
    pub fn new() -> Self {
        let gens = [hadamard(), phase_gate()];
        let mut elements = vec![identity(2)];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let u = g.dot(&elements[i]);
                if !elements.iter().any(|e| same_up_to_phase(e, &u)) {
                    elements.push(u);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let find = |u: &Array2<C64>, els: &[Array2<C64>]| {
            els.iter()
                .position(|e| same_up_to_phase(e, u))
                .expect("Clifford group is closed")
        };
        let compose: Vec<Vec<usize>> = elements
            .iter()
            .map(|a| elements.iter().map(|b| find(&a.dot(b), &elements)).collect())
            .collect();
        let inverse = elements.iter().map(|a| find(&dagger(a), &elements)).collect();
        Self {
            elements,
            compose,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unitary(&self, i: usize) -> &Array2<C64> {
        &self.elements[i]
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.compose[a][b]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Index of the identity element.
    pub fn identity_index(&self) -> usize {
        0
    }

    /// Index of a unitary, if it is a Clifford.
    pub fn index_of(&self, u: &Array2<C64>) -> Option<usize> {
        self.elements.iter().position(|e| same_up_to_phase(e, u))
    }

    /// Recovery element undoing `seq` applied left to right.
    pub fn recovery(&self, seq: &[usize]) -> usize {
        let net = seq.iter().fold(0, |acc, &c| self.compose(c, acc));
        self.inverse(net)
    }
}

impl Default for CliffordGroup {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use quantum_core::{pauli, unitary_defect, Pauli};

    #[test]
    fn has_24_unitary_elements() {
        let g = CliffordGroup::new();
        assert_eq!(g.len(), 24);
        for i in 0..24 {
            assert!(unitary_defect(g.unitary(i)) < 1e-12);
        }
        assert!(same_up_to_phase(g.unitary(g.identity_index()), &identity(2)));
    }

    #[test]
    fn paulis_are_members_and_square_to_identity() {
        let g = CliffordGroup::new();
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let i = g.index_of(&pauli(p)).expect("Pauli is Clifford");
            assert_eq!(g.compose(i, i), g.identity_index());
        }
    }

    #[test]
    fn tables_are_consistent() {
        let g = CliffordGroup::new();
        for a in 0..24 {
            assert_eq!(g.compose(a, g.inverse(a)), 0);
            assert_eq!(g.compose(g.inverse(a), a), 0);
            let row: std::collections::BTreeSet<_> = (0..24).map(|b| g.compose(a, b)).collect();
            assert_eq!(row.len(), 24);
            for b in 0..24 {
                let u = g.unitary(a).dot(g.unitary(b));
                assert!(same_up_to_phase(&u, g.unitary(g.compose(a, b))));
            }
        }
    }

    #[test]
    fn t_gate_is_not_clifford() {
        let t = Array2::from_shape_vec(
            (2, 2),
            vec![1.0.into(), 0.0.into(), 0.0.into(), C64::from_polar(1.0, 0.25 * std::f64::consts::PI)],
        )
        .unwrap();
        assert!(CliffordGroup::new().index_of(&t).is_none());
    }
}
