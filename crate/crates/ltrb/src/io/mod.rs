pub mod csv;
pub mod mesh_text;
pub mod meta;
pub mod mtx;
