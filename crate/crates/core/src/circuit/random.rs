//! Seeded random circuit generators used by tests, the acceptance suite and
//! benchmarks.

use rand::seq::index::sample;
use rand::Rng;

use super::{Circuit, Gate};
use crate::numfield::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct RandomCircuitShape {
    pub n_inputs: usize,
    /// Non-input gates to generate.
    pub gates: usize,
    pub outputs: usize,
    pub max_depth: usize,
    /// Probability that a generated gate is a multiplication.
    pub mul_fraction: f64,
}

impl RandomCircuitShape {
    pub fn linear(n_inputs: usize, gates: usize, outputs: usize, max_depth: usize) -> Self {
        RandomCircuitShape {
            n_inputs,
            gates,
            outputs,
            max_depth,
            mul_fraction: 0.0,
        }
    }
}

pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| random_scalar(rng)).collect()
}

/// Draws a valid circuit of the given shape. Sources favour recent gates so
/// that depth actually builds up; no gate exceeds `max_depth`. Outputs are
/// distinct gates.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, shape: &RandomCircuitShape) -> Circuit {
    assert!(shape.n_inputs > 0 && shape.max_depth > 0);
    let mut gates: Vec<Gate> = (0..shape.n_inputs).map(Gate::Input).collect();
    let mut depth = vec![0usize; shape.n_inputs];
    let mut eligible: Vec<usize> = (0..shape.n_inputs).collect();
    for _ in 0..shape.gates {
        let pick = |rng: &mut R| {
            let k = eligible.len();
            if rng.gen_bool(0.6) {
                let window = k.min(2 * shape.n_inputs.max(4));
                eligible[k - 1 - rng.gen_range(0..window)]
            } else {
                eligible[rng.gen_range(0..k)]
            }
        };
        let (a, b) = (pick(rng), pick(rng));
        let gate = if rng.gen_bool(shape.mul_fraction) {
            Gate::Mul(a, b)
        } else {
            Gate::LinComb {
                alpha: random_scalar(rng),
                src1: a,
                beta: random_scalar(rng),
                src2: b,
            }
        };
        let d = 1 + depth[a].max(depth[b]);
        let id = gates.len();
        gates.push(gate);
        depth.push(d);
        if d < shape.max_depth {
            eligible.push(id);
        }
    }
    let total = gates.len();
    let m = shape.outputs.clamp(1, total);
    let mut outputs: Vec<usize> = sample(rng, total, m).into_vec();
    // keep the deepest gate observable so depth is exercised
    let deepest = (0..total).max_by_key(|&i| (depth[i], i)).unwrap();
    if !outputs.contains(&deepest) {
        outputs[0] = deepest;
    }
    Circuit::from_parts(shape.n_inputs, gates, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let shape = RandomCircuitShape {
                n_inputs: 6,
                gates: 80,
                outputs: 5,
                max_depth: 7,
                mul_fraction: 0.3,
            };
            let c = random_circuit(&mut rng, &shape);
            c.validate().unwrap();
            assert_eq!(c.size(), 80);
            assert_eq!(c.n_outputs(), 5);
            assert!(c.depth() <= 7);
            let mut outs = c.outputs().to_vec();
            outs.sort_unstable();
            outs.dedup();
            assert_eq!(outs.len(), 5);
        }
    }

    #[test]
    fn linear_shape_has_no_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_circuit(&mut rng, &RandomCircuitShape::linear(4, 30, 4, 5));
        assert!(c.is_linear());
    }
}
