pub mod cli;
pub mod csp;
pub mod domain;
pub mod lp;
pub mod oracle;
pub mod potential;
pub mod precise;
pub mod walk;
