#![allow(dead_code)]

pub mod closed_form;
pub mod nis_fixtures;
pub mod random_net;
