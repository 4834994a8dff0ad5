// With depolarizing noise after every CX of the transpiled circuit, compare
// the signal-only router with and without the correction stage.

use qroute::correction::ChannelParams;
use qroute::experiment::{run_point, DeviceNoise, PointConfig, RouterSpec, Variant};
use qroute::transpiler::CouplingMap;

pub fn run_example() -> qroute::Result<(f64, f64)> {
    let noise = DeviceNoise {
        depolarizing_per_cx: 0.01,
        ..DeviceNoise::default()
    };
    let mean_f = |ec: bool| -> qroute::Result<f64> {
        let config = PointConfig {
            spec: RouterSpec::new(ChannelParams::new(0.6, 0.5)?, Variant::SignalOnly, ec)?,
            shots_per_setting: 4000,
            base_seed: 3,
            noise,
            mitigation: false,
            coupling_map: Some(CouplingMap::jakarta()),
        };
        let reps = 3;
        let total: f64 = (0..reps)
            .map(|r| run_point(&config, r).map(|x| x.fidelity))
            .sum::<qroute::Result<f64>>()?;
        Ok(total / reps as f64)
    };
    let (with_ec, without_ec) = (mean_f(true)?, mean_f(false)?);
    println!("gamma 0.6, signal only: F with correction {with_ec:.4}, without {without_ec:.4}");
    Ok((with_ec, without_ec))
}

fn main() -> qroute::Result<()> {
    run_example().map(|_| ())
}
