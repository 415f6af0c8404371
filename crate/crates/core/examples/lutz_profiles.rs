//! Build the default twist profiles and print the case-wise minima of `L`.

use vcontact::lutz::{case_minima, global_analytic_bound, LutzData, RadialProfile, Twist};

fn main() {
    let data = LutzData::defaults();
    println!("delta = {}, eps = {}, C = {:.7}", data.delta, data.eps, data.c);
    println!("slopes: s_L = {:.6}, s_R = {:.6}", data.slope_left, data.slope_right);
    println!("r* = {:.9}", data.r_star);
    println!("f2'(eps/2) = {:.9}", data.f2.derivative(data.eps / 2.0));
    println!("h on outer ring from {:.6} to 1", data.h.v0);
    println!("{:>16} {:>12} {:>14} {:>12}", "region", "argmin", "min L", "bound");
    for m in case_minima(&data, 10_000) {
        println!(
            "{:>16} {:>12.6} {:>14.7} {:>12.7}",
            m.region.name(),
            m.argmin,
            m.value,
            m.bound
        );
    }
    println!("global analytic bound = {:.7}", global_analytic_bound(&data));
    println!("L(delta/2) = {:.7}", data.bound_l(data.delta / 2.0).unwrap());
}
