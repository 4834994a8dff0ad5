// Send the signal through the post-selected damping channel, repair it with
// the ancilla correction tuned for γ_g = 0.5, and compare sampled success
// rates with the closed forms.

use qroute::circuit::{Circuit, Clbit};
use qroute::correction::{
    analytic_p1, analytic_p2, channel_subcircuit, choose_theta, correction_subcircuit,
};
use qroute::experiment::RouterInputs;
use qroute::simulator::{sample_shots, NoiseSpec};

pub fn run_example() -> qroute::Result<Vec<(f64, f64, f64)>> {
    let signal = RouterInputs::standard().signal;
    let theta = choose_theta(0.5)?;
    let shots = 50_000;
    let mut rows = Vec::new();
    println!("gamma   p1(theory)  p1(sampled)  p2(theory)  p2(sampled)");
    for k in 0..=10 {
        let gamma = k as f64 / 10.0;
        // q0 signal, q1 environment, q2 ancilla
        let mut c = Circuit::new(3)?;
        c.add_register("c1", 2)?;
        c.h(0)?.t(0)?;
        c.append_all(channel_subcircuit(gamma, 0, 1, Some(Clbit::new("c1", 0)))?)?;
        c.append_all(correction_subcircuit(
            theta,
            0,
            2,
            Some(Clbit::new("c1", 1)),
        )?)?;
        let record = sample_shots(&c, shots, &NoiseSpec::ideal(7 + k))?;
        let p1 = record.postselect_survivors[0] as f64 / shots as f64;
        let p2 = record.shots_kept as f64 / record.postselect_survivors[0] as f64;
        let (t1, t2) = (
            analytic_p1(&signal, gamma),
            analytic_p2(&signal, gamma, theta)?,
        );
        println!("{gamma:.1}     {t1:.4}      {p1:.4}       {t2:.4}      {p2:.4}");
        rows.push((gamma, p2, t2));
    }
    Ok(rows)
}

fn main() -> qroute::Result<()> {
    run_example().map(|_| ())
}
