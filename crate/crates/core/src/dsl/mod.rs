//! Metric definition files: parsing, printing and jet evaluation.

mod ast;
mod eval;
mod parser;
mod spec;

pub use ast::{BinOp, Expr};
pub use eval::{
    eval_expression, eval_value, evaluate_metric, negative_eigenvalue_count, MetricGerm, DEGENERATE_DET,
};
pub use parser::{parse_expression, Origin, Scope};
pub use spec::{parse_metric_file, MetricSpec, DEFAULT_DOMAIN, FORMAT_VERSION};
