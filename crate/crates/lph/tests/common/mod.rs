#![allow(dead_code)]

pub mod ptrig_oracle;
