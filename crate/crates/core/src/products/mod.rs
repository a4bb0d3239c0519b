//! Product-closure criteria and the Toeplitz/Hankel intertwining
//! dictionary.

mod criteria;
mod dictionary;

pub use criteria::{
    atho_atto_product_test, atho_product_tto_test, atto_product_test, hankel_toeplitz_conjugated_test, mixed_product_test,
    rank_one_product_identities, regime_factors, sedlock_product_closure, tho_product_symbol_forms, tho_product_tto_test,
    witness_asymmetry, ClosureReport, Order, ProductVerdict, RankOneProductReport, RegimeForms, SymbolForms, Witness,
};
pub use dictionary::{
    clark_conjugation_checks, dee_identity_checks, equivalence_transforms, hankel_product_chain, toeplitz_product_chain, transports,
    ChainReport, ClassTransportReport, IdentityCheck, IdentityReport, TransportCheck,
};
