//! Holds the `acceptance` test target, which prints one PASS/FAIL line per
//! acceptance criterion. Kept in its own package so that cargo runs it after
//! the unit and integration tests of the other crates.
