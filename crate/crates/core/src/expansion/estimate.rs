use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_widths, reorder, ExpansionOptions, PrefixSpans, Reorder};
use crate::circuit::{Observable, PauliCircuit};
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;

/// Monte-Carlo estimate of `nodes_visited`, summed over observable terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Estimates the number of terminal nodes [`super::expand`] would visit by
/// random root-to-terminal walks. At every split the walk picks one of the
/// admissible children uniformly and doubles its weight only when both were
/// admissible; the mean weight is an unbiased estimate of the count.
pub fn mc_estimate(
    circuit: &PauliCircuit,
    h: &Observable,
    opts: &ExpansionOptions,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_widths(circuit, h)?;
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let reordered;
    let circuit = match opts.reorder {
        Reorder::None => circuit,
        strategy => {
            reordered = reorder(circuit, h, strategy)?.circuit;
            &reordered
        }
    };
    let spans = opts.prune_by_expectation.then(|| PrefixSpans::new(circuit));
    let walker = Walker {
        generators: circuit.generators(),
        spans: spans.as_ref(),
        max_level: opts.max_level,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean, mut var) = (0.0, 0.0);
    for (_, p) in h.terms() {
        let weights: Vec<f64> = (0..samples).map(|_| walker.walk(p, &mut rng)).collect();
        let m = weights.iter().sum::<f64>() / samples as f64;
        mean += m;
        if samples > 1 {
            let s2 = weights.iter().map(|w| (w - m).powi(2)).sum::<f64>() / (samples - 1) as f64;
            var += s2 / samples as f64;
        }
    }
    Ok(McEstimate {
        mean,
        std_error: var.sqrt(),
        samples,
    })
}

struct Walker<'a> {
    generators: &'a [PauliOperator],
    spans: Option<&'a PrefixSpans>,
    max_level: Option<usize>,
}

impl Walker<'_> {
    fn admits(&self, depth: usize, p: &PauliOperator) -> bool {
        self.spans.is_none_or(|s| s.admits(depth, p.x_bits()))
    }

    fn walk<R: Rng>(&self, root: &PauliOperator, rng: &mut R) -> f64 {
        let mut depth = self.generators.len();
        if !self.admits(depth, root) {
            return 0.0;
        }
        let mut obs = root.clone();
        let mut level = 0usize;
        let mut weight = 1.0;
        while depth > 0 {
            let g = &self.generators[depth - 1];
            depth -= 1;
            if g.commutes_unchecked(&obs) {
                if !self.admits(depth, &obs) {
                    break;
                }
                continue;
            }
            let sin_obs = g.multiply_unchecked(&obs);
            let cos_ok = self.admits(depth, &obs);
            let sin_ok = self.admits(depth, &sin_obs);
            level += 1;
            let both = cos_ok && sin_ok;
            if self.max_level.is_some_and(|cap| level > cap) {
                if both {
                    weight *= 2.0;
                }
                break;
            }
            let take_sin = match (cos_ok, sin_ok) {
                (true, true) => {
                    weight *= 2.0;
                    rng.gen_bool(0.5)
                }
                (true, false) => false,
                (false, true) => true,
                (false, false) => break,
            };
            if take_sin {
                obs = sin_obs;
            }
        }
        weight
    }
}
