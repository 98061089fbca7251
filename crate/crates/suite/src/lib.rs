//! Holds the `acceptance` test target; run it with
//! `cargo test -p treecorr-suite --test acceptance`.
