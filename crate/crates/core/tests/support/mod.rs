#![allow(dead_code)]
pub mod rational_oracle;
