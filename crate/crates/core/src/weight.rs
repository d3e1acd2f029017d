use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};

/// Scalar used for plausibility ranks and trust distances.
///
/// Thresholds are scanned over the naturals, so only unsigned integers
/// qualify.
pub trait Weight:
    PrimInt + Unsigned + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Converts a small count (Hamming distance, level number) into the weight type.
    fn from_count(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("count exceeds weight type")
    }
}

impl<T> Weight for T where
    T: PrimInt + Unsigned + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
}
