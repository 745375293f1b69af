use pslip_core::action_angle::WellGeometry;
use pslip_core::instanton;
use pslip_core::params::{Occupation, OscParams};

fn main() {
    let ds: Vec<f64> = (0..30).map(|k| -0.95 + 1.8 * k as f64 / 29.0).collect();
    for &d in &ds {
        let p = OscParams::new(d, 0.5, 1.0, 0.01, 1.0, Occupation::Bose(0.0)).unwrap();
        let geo = WellGeometry::build(&p).unwrap();
        match instanton::fragility_action(&geo) {
            Ok(Some(i_f)) => {
                let e_f = geo.energy_of_action(i_f).unwrap() / geo.e_min().abs();
                let i_d = geo.i_d().map(|x| x / geo.i_top()).unwrap_or(f64::NAN);
                println!("d={d:+.4} i_f/i_top={:.6} e_f={e_f:+.6} i_d/i_top={i_d:.4}", i_f / geo.i_top());
            }
            Ok(None) => println!("d={d:+.4} no fragility"),
            Err(e) => println!("d={d:+.4} ERR {e}"),
        }
    }
}
