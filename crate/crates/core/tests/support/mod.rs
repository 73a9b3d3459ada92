#![allow(dead_code)]

pub mod erfi_series;
