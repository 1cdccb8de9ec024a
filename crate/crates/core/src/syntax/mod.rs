//! Object formulas, the sorted modal language, and first-order formulas over frames.

pub mod fo;
pub mod formula;
pub mod modal;
pub mod translate;

pub use fo::{parse_fo, Fo};
pub use formula::{parse_formula, parse_sequent, Formula, ParseError, Sequent};
pub use modal::{Modal, Polarity, SortError};
pub use translate::{bullet, circ, modal_name, translate, ImpMode};
