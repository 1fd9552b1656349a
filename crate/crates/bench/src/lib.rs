//! Shared inputs for the kernel benchmarks.

use bvlab::extension::ExtensionOperator;
use bvlab::fixtures::{circle_domain, Fixture};
use bvlab::norms::FieldFn;
use bvlab::space::{build_domain, Discretization, DomainSpec, Shape};

/// Unit square at mesh `h` with its extension operator.
pub fn square(h: f64) -> (Discretization, ExtensionOperator) {
    let d = build_domain(&DomainSpec::new(Shape::UnitSquare, h)).expect("unit square builds");
    let op = ExtensionOperator::new(&d).expect("cover builds");
    (d, op)
}

/// Circle with `m` boundary samples and the arc indicator on it.
pub fn circle_arc(m: usize) -> (Discretization, FieldFn) {
    let d = circle_domain(m).expect("circle builds");
    let f = Fixture::parse("arc").and_then(|fx| fx.sample(&d)).expect("arc samples");
    (d, f)
}

/// Named fixture sampled on `disc`.
pub fn fixture(name: &str, disc: &Discretization) -> FieldFn {
    Fixture::parse(name).and_then(|fx| fx.sample(disc)).expect("fixture samples")
}
