//! Function tables on finite groups and rational windows, finite differences,
//! and the elimination machinery for product- and sum-form functional equations.

pub mod equation;
pub mod ops;
pub mod table;

pub use equation::{
    extract_character, extract_characters, lemma1_check, CharacterVerdict, Combine, Equation,
    Factor, Lemma1Report, Probe,
};
pub use ops::{
    bernstein_check, bernstein_defect, character_defect, character_of, diff, is_character,
    is_polynomial, polynomial_defect, polynomial_degree, Probing,
};
pub use table::{Domain, DualMap, FunctionTable, Scaling, Window};
