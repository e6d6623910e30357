use ymss::exact::rat_int;
use num_traits::Zero;

fn main() {
    for d in (11..=35).step_by(2) {
        let table = ymss::derive_system(d).unwrap();
        let ex = ymss::extract_pm(&ymss::residual_condition(&table).unwrap()).unwrap();
        let n = ex.pm.sturm_count(&ymss::BigRational::zero(), &rat_int(1));
        let roots = ymss::roots::closed_form_roots(d).unwrap();
        let div = ex.pm.divide_exact(&roots.quad_factor).is_ok();
        println!("d={d} m={} deg={:?} N={} div_exact={} lead={}", (d-5)/2, ex.pm.degree(), n, div, ex.pm.leading().unwrap());
    }
}
