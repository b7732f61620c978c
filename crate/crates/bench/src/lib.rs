//! Criterion benchmarks for index construction and queries; see `benches/`.
