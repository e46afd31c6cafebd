//! Empty library target; this package exists for its benchmarks.
