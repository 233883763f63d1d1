pub mod context;
pub mod encode;
pub mod extract_vocab;
pub mod noise;
pub mod probe;
pub mod report;
pub mod tok_stats;
