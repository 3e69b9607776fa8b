//! The group G, its generators, and the seven step laws built on them.

mod distribution;
mod group;

pub use distribution::{
    bad_moves, good_moves, hc_moves, is_symmetric, loyd_moves, nl_legal, nl_moves, nl_representative,
    or_form, ChainTag, MoveDistribution, OrForm, OrHolding, DEFAULT_OR_CAP,
};
pub use group::{
    classify_move, classify_move_on, evaluate, evaluate_all, evaluate_checked, evaluate_by_product, evaluate_sym, translation_as_label_swap,
    translation_move, GroupElement, MoveClass, MoveString, SymElement, SymGen,
};
