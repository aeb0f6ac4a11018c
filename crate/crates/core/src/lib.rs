//! Same-context interprocedural data-flow analysis (IFDS) engine.
//!
//! The engine answers on-demand reachability queries over the exploded
//! supergraph of an IFDS instance, restricted to same-context valid paths
//! (every procedure call returns to its matching return site). Preprocessing
//! exploits the low treewidth of flow graphs: each procedure is decomposed
//! into a balanced binary tree of bags, and reachability between a vertex
//! and its bag ancestors/descendants is packed into bit strings. After
//! preprocessing, pair queries cost a handful of word operations and
//! single-source queries cost time proportional to the output size.
//!
//! Pipeline:
//! 1. [`instance`] parses and validates the instance file.
//! 2. [`flow`] builds the exploded supergraph from succinct flow relations.
//! 3. [`summary`] computes summary edges and reduces same-context
//!    reachability to plain reachability in the graph `GHat`.
//! 4. [`tree`] decomposes each flow graph and balances the decompositions.
//! 5. [`reach`] computes local, ancestor and descendant reachability
//!    indices with bit-packed representations.
//! 6. [`query`] answers pair and single-source queries, sequentially or in
//!    parallel, from the immutable [`query::QueryIndex`].
//!
//! [`baselines`] contains the comparison algorithms (no preprocessing,
//! complete preprocessing, on-demand memoization) and [`index_io`] the
//! binary on-disk format for a preprocessed index.

pub mod baselines;
pub mod bits;
pub mod flow;
pub mod index_io;
pub mod instance;
pub mod query;
pub mod reach;
pub mod summary;
pub mod tree;
