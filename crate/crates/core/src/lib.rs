pub mod abelian;
pub mod hnf;
pub mod lab;
pub mod literal;
pub mod similarity;
pub mod tree;
pub mod wreath;
