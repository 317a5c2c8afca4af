//! Shared benchmark inputs live in the bench targets themselves.
