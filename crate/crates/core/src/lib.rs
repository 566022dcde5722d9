//! Diameters of finite groups and their direct powers: Cayley-table groups,
//! word lengths, minimal generating sets, Schreier decompositions and
//! closed-form bounds for solvable groups.

pub mod bounds;
pub mod catalog;
pub mod gensets;
pub mod group;
pub mod report;
pub mod schreier;
pub mod table_file;
pub mod wordlen;

pub use bounds::{verify_report, BoundReport, BoundsError, GroupProfile, Verdict, VerifyOptions};
pub use catalog::{builtin_group, catalog, resolve_group, CatalogEntry, CatalogError, GroupSpec};
pub use gensets::{max_diameters, rank, DiameterCertificate, GensetError, SearchOptions, Strategy};
pub use group::{
    closure, derived_series, quotient, ElemId, FiniteGroup, GroupError, Subgroup,
    DEFAULT_MAX_ELEMENTS, IDENTITY,
};
pub use report::{emit_report, emit_reports, Format};
pub use schreier::{decompose, SchreierError, SchreierLevel, SeriesDecomposer};
pub use table_file::{emit_cayley_table, parse_cayley_table, TableFileError};
pub use wordlen::{diameter, length_table, LengthTable, Token, Word};
