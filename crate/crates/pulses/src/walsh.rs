use crate::PulseError;

pub const SUPPORTED_ORDERS: [u32; 5] = [0, 1, 3, 7, 15];

/// Walsh phase pattern: `signs[i] = (−1)^{popcount(i & order)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSequence {
    pub order: u32,
    pub signs: Vec<i8>,
}

impl WalshSequence {
    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// `Σᵢ sᵢ·iᵏ`, exact in integer arithmetic.
    pub fn moment(&self, k: u32) -> i128 {
        self.signs
            .iter()
            .enumerate()
            .map(|(i, &s)| s as i128 * (i as i128).pow(k))
            .sum()
    }

    /// Highest polynomial degree whose moment this order cancels
    /// (`None` for the trivial single pulse).
    pub fn cancelled_degree(&self) -> Option<u32> {
        match self.order {
            0 => None,
            o => Some(o.count_ones() - 1),
        }
    }
}

pub fn walsh_signs(order: u32) -> Result<WalshSequence, PulseError> {
    if !SUPPORTED_ORDERS.contains(&order) {
        return Err(PulseError::InvalidOrder(order));
    }
    let len = (order + 1).next_power_of_two() as usize;
    let signs = (0..len)
        .map(|i| {
            if (i as u32 & order).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(WalshSequence { order, signs })
}
