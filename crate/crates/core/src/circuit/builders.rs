use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CliffordGate, Graph, MixedCircuit, Observable, PauliCircuit, PauliForm};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// `m` full-support random generators and a full-support random observable.
pub fn build_random_nonlocal(n: usize, m: usize, seed: u64) -> Result<(PauliCircuit, Observable)> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("random circuit needs n ≥ 1 and m ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generators = (0..m)
        .map(|_| PauliOperator::random_full_support(n, &mut rng))
        .collect();
    let h = PauliOperator::random_full_support(n, &mut rng);
    Ok((PauliCircuit::new(n, generators)?, Observable::from_pauli(h)))
}

/// `m` generators, each with uniformly random non-identity letters on
/// `weight` distinct uniformly chosen qubits.
pub fn build_random_local(n: usize, m: usize, weight: usize, seed: u64) -> Result<PauliCircuit> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("random circuit needs n ≥ 1 and m ≥ 1"));
    }
    if weight == 0 || weight > n {
        return Err(Error::invalid(format!("weight {weight} outside 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generators = Vec::with_capacity(m);
    for _ in 0..m {
        let mut letters = vec!['I'; n];
        for q in sample(&mut rng, n, weight).into_iter() {
            letters[q] = ['X', 'Y', 'Z'][rng.gen_range(0..3)];
        }
        let s: String = letters.into_iter().collect();
        generators.push(PauliOperator::parse(&s, None)?);
    }
    PauliCircuit::new(n, generators)
}

fn two_letter(n: usize, a: usize, b: usize, c: char) -> PauliOperator {
    let mut s = vec!['I'; n];
    s[a] = c;
    s[b] = c;
    PauliOperator::parse(&s.into_iter().collect::<String>(), None).expect("valid letters")
}

/// QAOA as a mixed circuit: a Hadamard layer preparing `|+…+⟩`, then `p`
/// layers of one `ZZ` rotation per edge (lexicographic) followed by one `X`
/// rotation per qubit. Every rotation has its own parameter.
pub fn qaoa_mixed_circuit(graph: &Graph, p: usize) -> Result<MixedCircuit> {
    if p == 0 {
        return Err(Error::invalid("QAOA needs p ≥ 1 layers"));
    }
    let n = graph.n_vertices();
    if n == 0 {
        return Err(Error::invalid("QAOA graph has no vertices"));
    }
    let mut mc = MixedCircuit::new(n);
    for q in 0..n {
        mc.push_gate(CliffordGate::H(q))?;
    }
    for _ in 0..p {
        for &(u, v) in graph.edges() {
            mc.push_rotation(two_letter(n, u, v, 'Z'))?;
        }
        for q in 0..n {
            mc.push_rotation(PauliOperator::single(n, q, 'X')?)?;
        }
    }
    Ok(mc)
}

/// Pauli form of [`qaoa_mixed_circuit`] together with the edge observables
/// `Z_u Z_v` carried into the same frame. `M = p·(|E| + n)`.
pub fn build_qaoa(graph: &Graph, p: usize) -> Result<(PauliCircuit, Vec<Observable>)> {
    let form = qaoa_mixed_circuit(graph, p)?.to_pauli_form()?;
    let n = graph.n_vertices();
    let observables = graph
        .edges()
        .iter()
        .map(|&(u, v)| form.observable(&Observable::from_pauli(two_letter(n, u, v, 'Z'))))
        .collect::<Result<Vec<_>>>()?;
    Ok((form.circuit, observables))
}

/// Reverse light-cone size `2((d−1)^{p+1} − 1)/(d − 2)` of a depth-`p` QAOA
/// on a `d`-regular graph; `d = 2` (a chain) gives the limit `2(p + 1)`.
pub fn light_cone_size(d: u64, p: u32) -> Result<u64> {
    if p == 0 {
        return Err(Error::invalid("light cone needs p ≥ 1"));
    }
    match d {
        0 | 1 => Err(Error::invalid(format!(
            "light cone undefined for degree {d}"
        ))),
        2 => Ok(2 * (p as u64 + 1)),
        _ => {
            let pow = (d - 1)
                .checked_pow(p + 1)
                .ok_or_else(|| Error::guard(format!("light cone overflows for d={d}, p={p}")))?;
            Ok(2 * (pow - 1) / (d - 2))
        }
    }
}

/// Brick-wall qubit pairs: even layers start at qubit 0, odd layers at 1.
pub fn hea_block_pairs(n: usize, layers: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for layer in 0..layers {
        let mut a = layer % 2;
        while a + 1 < n {
            pairs.push((a, a + 1));
            a += 2;
        }
    }
    pairs
}

/// Hardware-efficient mixed circuit: per block a `CZ` followed by `Rx`, `Rz`
/// on each of its two qubits.
pub fn hea_mixed_circuit(n: usize, pairs: &[(usize, usize)]) -> Result<MixedCircuit> {
    if n < 2 {
        return Err(Error::invalid("hardware-efficient circuit needs n ≥ 2"));
    }
    let mut mc = MixedCircuit::new(n);
    for &(a, b) in pairs {
        mc.push_gate(CliffordGate::Cz(a, b))?;
        for q in [a, b] {
            mc.push_rotation(PauliOperator::single(n, q, 'X')?)?;
            mc.push_rotation(PauliOperator::single(n, q, 'Z')?)?;
        }
    }
    Ok(mc)
}

/// Brick-wall HEA with `layers` layers, in Pauli form (`M = 4·blocks`).
pub fn build_hea_brickwall(n: usize, layers: usize) -> Result<PauliForm> {
    if n < 2 {
        return Err(Error::invalid("hardware-efficient circuit needs n ≥ 2"));
    }
    hea_mixed_circuit(n, &hea_block_pairs(n, layers))?.to_pauli_form()
}

/// Brick-wall HEA truncated to the first `blocks` blocks in brick-wall order.
pub fn build_hea_blocks(n: usize, blocks: usize) -> Result<PauliForm> {
    if n < 2 {
        return Err(Error::invalid("hardware-efficient circuit needs n ≥ 2"));
    }
    let per_two_layers = (n / 2) + ((n - 1) / 2);
    let layers = 2 * blocks / per_two_layers + 2;
    let mut pairs = hea_block_pairs(n, layers);
    pairs.truncate(blocks);
    hea_mixed_circuit(n, &pairs)?.to_pauli_form()
}
