pub mod dg_check;
pub mod pair_loop;
