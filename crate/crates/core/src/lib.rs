//! Nakada alpha-continued fractions: exact digit expansions, synchronization
//! intervals, the word calculus behind them, and certified computation of the
//! natural-extension domains, their invariant measure and the entropy.

pub mod error;
pub mod exact;
pub mod hiprec;
pub mod words;
pub mod dynamics;
pub mod automaton;
pub mod density;
pub mod natext;
pub mod simulation;
pub mod export;

pub use error::{Error, Result};
pub use exact::{ExactNumber, Mobius, Rect};
pub use words::{Letter, Word};
