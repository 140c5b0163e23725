use crate::matched::EncodedSegment;
use crate::numeric;
use crate::{Error, Result};

/// Rotation angles of the loader tree, root level first.
///
/// Level `l` holds `2^l` angles; node `i` of level `l` splits the probability
/// block `[i·w, (i+1)·w)` (`w = n / 2^l`) into its lower and upper halves.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTree {
    levels: Vec<Vec<f64>>,
}

impl AngleTree {
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if let Some(index) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter(format!("probability at {index} is not a finite nonnegative value")));
        }
        let depth = n.trailing_zeros() as usize;
        let levels = (0..depth)
            .map(|level| {
                let width = n >> level;
                probs
                    .chunks(width)
                    .map(|block| {
                        let (left, right) = block.split_at(width / 2);
                        let pl = numeric::sum(left.iter().copied());
                        let pr = numeric::sum(right.iter().copied());
                        if pl + pr > 0.0 {
                            2.0 * pr.sqrt().atan2(pl.sqrt())
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { levels })
    }

    /// Number of levels, log2 of the vector length.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn len(&self) -> usize {
        1 << self.depth()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Angle of node `index` in heap order (root 0, children `2i+1`, `2i+2`).
    pub fn heap_angle(&self, index: usize) -> f64 {
        let level = (usize::BITS - 1 - (index + 1).leading_zeros()) as usize;
        self.levels[level][index + 1 - (1 << level)]
    }

    /// Product of `cos(θ/2)` / `sin(θ/2)` factors along the root-to-leaf path
    /// of basis state `index`.
    pub fn amplitude(&self, index: usize) -> f64 {
        let depth = self.depth();
        self.levels
            .iter()
            .enumerate()
            .map(|(level, angles)| {
                let node = index >> (depth - level);
                let bit = (index >> (depth - level - 1)) & 1;
                let half = angles[node] / 2.0;
                if bit == 0 {
                    half.cos()
                } else {
                    half.sin()
                }
            })
            .product()
    }
}

pub fn angle_tree(seg: &EncodedSegment) -> Result<AngleTree> {
    AngleTree::from_probs(seg.probs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matched::preprocess;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn basis_state_has_zero_angles() {
        let t = AngleTree::from_probs(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.levels(), &[vec![0.0], vec![0.0, 0.0]]);
        assert_eq!(t.node_count(), 3);
    }

    #[test]
    fn uniform_gives_right_angles() {
        let t = AngleTree::from_probs(&[0.25; 4]).unwrap();
        for a in t.levels().iter().flatten() {
            assert!((a - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn two_point_template() {
        let seg = preprocess(&[2.0, -1.0], 0.1).unwrap();
        let t = angle_tree(&seg).unwrap();
        let theta = t.levels()[0][0];
        let expected = 2.0 * (0.1f64 / 3.2).sqrt().atan2((3.1f64 / 3.2).sqrt());
        assert!((theta - expected).abs() < 1e-15);
        assert!(((theta / 2.0).cos().powi(2) - 3.1 / 3.2).abs() < 1e-15);
    }

    #[test]
    fn zero_subtree_gets_zero_angle() {
        let t = AngleTree::from_probs(&[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(t.levels()[1][1], 0.0);
    }

    #[test]
    fn heap_order_lookup() {
        let t = AngleTree::from_probs(&[0.1, 0.2, 0.3, 0.15, 0.05, 0.05, 0.1, 0.05]).unwrap();
        assert_eq!(t.heap_angle(0), t.levels()[0][0]);
        assert_eq!(t.heap_angle(2), t.levels()[1][1]);
        assert_eq!(t.heap_angle(6), t.levels()[2][3]);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(AngleTree::from_probs(&[0.5, 0.25, 0.25]), Err(Error::NotPowerOfTwo(3)));
        assert_eq!(AngleTree::from_probs(&[1.0]), Err(Error::NotPowerOfTwo(1)));
    }

    proptest! {
        #[test]
        fn paths_reproduce_sqrt_probs(raw in prop::collection::vec(0.0f64..1.0, 2..=32), pow in 1u32..=5) {
            let n = 1usize << pow;
            let mut p: Vec<f64> = raw.iter().cycle().take(n).copied().collect();
            let total: f64 = p.iter().sum();
            prop_assume!(total > 0.0);
            p.iter_mut().for_each(|v| *v /= total);
            let t = AngleTree::from_probs(&p).unwrap();
            prop_assert_eq!(t.node_count(), n - 1);
            for a in t.levels().iter().flatten() {
                prop_assert!((0.0..=std::f64::consts::PI).contains(a));
            }
            for (i, pi) in p.iter().enumerate() {
                prop_assert!((t.amplitude(i) - pi.sqrt()).abs() < 1e-12);
            }
        }
    }
}
