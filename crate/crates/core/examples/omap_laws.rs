// Check the O-mapping and O-equality laws for the basic transforms.

use dominance_lab::num::Q;
use dominance_lab::omap::{check_o_equality, check_o_mapping, OReport, OTransform};
use dominance_lab::properties::InstanceGen;

pub fn run_example() -> Vec<OReport> {
    let gen = InstanceGen { trials: 40, ..InstanceGen::default() };
    let a = Q::new(3, 2);
    let mut out = vec![];
    for t in [OTransform::Translate(a.clone()), OTransform::ScaleBy(a.clone()), OTransform::PowerBy(a.clone())] {
        out.push(check_o_mapping(&t, &gen).unwrap());
    }
    out.push(check_o_equality(&OTransform::ScaleBy(a.clone()), &OTransform::ScaleBy(a.recip()), &gen).unwrap());
    out.push(check_o_equality(&OTransform::PowerBy(a.clone()), &OTransform::PowerBy(a.recip()), &gen).unwrap());
    for r in &out {
        println!("{} {}: {:?}", r.transform, r.law, r.status);
    }
    match check_o_equality(&OTransform::Translate(a.clone()), &OTransform::untranslate(a), &gen) {
        Err(e) => println!("translate has no right inverse: {e}"),
        Ok(r) => println!("unexpected: {:?}", r.status),
    }
    out
}

#[allow(dead_code)]
fn main() {
    run_example();
}
