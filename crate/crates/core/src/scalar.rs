//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{self, Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};

/// Floating point type the model is evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or tolerance into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sign of a quantity, with an explicit zero band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    /// Sign of `x`; anything with `|x| <= band` is `Zero`.
    pub fn of<T: Scalar>(x: T, band: T) -> Sign {
        if x > band {
            Sign::Pos
        } else if x < -band {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    /// Sign of `x` with no dead band (exact zero only).
    pub fn strict<T: Scalar>(x: T) -> Sign {
        Sign::of(x, T::zero())
    }

    pub fn is_strict(self) -> bool {
        self != Sign::Zero
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }
}

impl Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Formats a sign triple as `(+,-,+)`.
pub fn fmt_signs(signs: &[Sign]) -> String {
    let inner: Vec<String> = signs.iter().map(|s| s.to_string()).collect();
    format!("({})", inner.join(","))
}
