use super::{check_widths, Reorder};
use crate::circuit::{Observable, PauliCircuit};
use crate::error::Result;
use crate::pauli::Gf2Basis;

/// A generator order reachable by swapping adjacent commuting generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reordering {
    pub circuit: PauliCircuit,
    /// `original_index[j]` is the 1-based input index of generator `j + 1`.
    pub original_index: Vec<usize>,
}

/// Greedy reordering: flagged generators bubble toward the end of the list
/// (processed first) through adjacent swaps of commuting pairs only, so the
/// circuit unitary is unchanged up to parameter relabeling.
pub fn reorder(circuit: &PauliCircuit, h: &Observable, strategy: Reorder) -> Result<Reordering> {
    check_widths(circuit, h)?;
    let gens = circuit.generators();
    let m = gens.len();
    let flags: Vec<bool> = match strategy {
        Reorder::None => vec![false; m],
        Reorder::DelayedBranching => gens
            .iter()
            .map(|g| h.terms().iter().all(|(_, p)| g.commutes_unchecked(p)))
            .collect(),
        Reorder::EarlyPruning => (0..m)
            .map(|j| {
                let mut others = Gf2Basis::new(circuit.n_qubits());
                for (k, g) in gens.iter().enumerate() {
                    if k != j {
                        others.insert(g.x_bits()).expect("generator width matches");
                    }
                }
                !others.contains(gens[j].x_bits())
            })
            .collect(),
    };
    let mut order: Vec<usize> = (0..m).collect();
    for _ in 0..2 * m {
        let mut changed = false;
        for j in 0..m.saturating_sub(1) {
            let (a, b) = (order[j], order[j + 1]);
            if flags[a] && !flags[b] && gens[a].commutes_unchecked(&gens[b]) {
                order.swap(j, j + 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let reordered = order.iter().map(|&k| gens[k].clone()).collect();
    Ok(Reordering {
        circuit: PauliCircuit::new(circuit.n_qubits(), reordered)?,
        original_index: order.iter().map(|k| k + 1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_random_nonlocal;
    use crate::expansion::{expand, ExpansionOptions};
    use crate::pauli::PauliOperator;

    /// Qubits `0..a` form block A, qubit `a` is B. Observable `Z…Z`;
    /// `P_i = X_i X_B` commute with it, `P'_j = X_j` do not.
    fn delayed_branching_instance(a: usize) -> (PauliCircuit, Observable) {
        let n = a + 1;
        let mut gens = Vec::new();
        for i in 0..a {
            let mut s = vec!['I'; n];
            s[i] = 'X';
            s[a] = 'X';
            gens.push(PauliOperator::parse(&s.iter().collect::<String>(), None).unwrap());
        }
        for j in 0..a {
            gens.push(PauliOperator::single(n, j, 'X').unwrap());
        }
        let h = PauliOperator::parse(&"Z".repeat(n), None).unwrap();
        (
            PauliCircuit::new(n, gens).unwrap(),
            Observable::from_pauli(h),
        )
    }

    #[test]
    fn none_is_identity() {
        let (c, h) = build_random_nonlocal(5, 8, 0).unwrap();
        let r = reorder(&c, &h, Reorder::None).unwrap();
        assert_eq!(r.circuit, c);
        assert_eq!(r.original_index, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn delayed_branching_moves_commuting_block() {
        let (c, h) = delayed_branching_instance(5);
        let r = reorder(&c, &h, Reorder::DelayedBranching).unwrap();
        assert_eq!(r.original_index, vec![6, 7, 8, 9, 10, 1, 2, 3, 4, 5]);
        let (s0, r0) = expand(&c, &h, &ExpansionOptions::default()).unwrap();
        let opts = ExpansionOptions {
            reorder: Reorder::DelayedBranching,
            ..Default::default()
        };
        let (s1, r1) = expand(&c, &h, &opts).unwrap();
        assert_eq!(s0, s1);
        assert_eq!(r0.nodes_visited, 16);
        assert_eq!(r1.nodes_visited, 1);
    }

    #[test]
    fn swaps_only_commuting_neighbours() {
        for seed in 0..30 {
            let (c, h) = build_random_nonlocal(4, 10, seed).unwrap();
            for strategy in Reorder::ALL {
                let r = reorder(&c, &h, strategy).unwrap();
                let mut order = r.original_index.clone();
                // undo with bubble sort; every swap must be of a commuting pair
                for i in 0..order.len() {
                    for j in 0..order.len() - 1 - i {
                        if order[j] > order[j + 1] {
                            let (a, b) = (order[j], order[j + 1]);
                            assert!(c.generator(a).commutes(c.generator(b)).unwrap());
                            order.swap(j, j + 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reordered_series_is_identical() {
        for seed in 0..20 {
            let (c, h) = build_random_nonlocal(6, 12, seed).unwrap();
            let (base, _) = expand(&c, &h, &ExpansionOptions::default()).unwrap();
            for strategy in Reorder::ALL {
                let opts = ExpansionOptions {
                    reorder: strategy,
                    ..Default::default()
                };
                assert_eq!(expand(&c, &h, &opts).unwrap().0, base);
            }
        }
    }
}
