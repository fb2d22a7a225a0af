#![allow(dead_code)]

pub mod relation_oracle;
pub mod timed_oracle;
