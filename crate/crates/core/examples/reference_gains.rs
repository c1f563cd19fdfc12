//! Step-response metrics and ITAE of a few gain pairs on the default plant.
//!
//! `cargo run -p yawtune --example reference_gains [kp ki]...`

use yawtune::metrics::DEFAULT_BAND;
use yawtune::{
    default_yaw_plant, error_index, simulate_pi_loop, transient_metrics, IndexKind, PIGains,
    SimConfig,
};

fn main() {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric gain"))
        .collect();
    let pairs: Vec<(f64, f64)> = if args.is_empty() {
        vec![(260.0, 70.0), (296.0, 81.0), (230.0, 90.0)]
    } else {
        args.chunks(2).map(|c| (c[0], c[1])).collect()
    };
    let plant = default_yaw_plant();
    let cfg = SimConfig::default();
    for (kp, ki) in pairs {
        let gains = PIGains::new(kp, ki).expect("valid gains");
        let trace = simulate_pi_loop(&plant, gains, &cfg).expect("simulation");
        let m = transient_metrics(&trace, DEFAULT_BAND).expect("metrics");
        let itae = error_index(&trace, IndexKind::Itae).value;
        println!(
            "kp={kp:<7} ki={ki:<7} peak={:?} os={:.4}% settle={:?} rise={:?} ss={:.6} itae={itae:.17}",
            m.peak_time, m.percent_overshoot, m.settling_time, m.rise_time_10_90, m.steady_state_value
        );
    }
}
