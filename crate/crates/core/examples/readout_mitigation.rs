// Measure the router output with 2% readout confusion and undo it with the
// inverse of a sampled calibration matrix.

use qroute::experiment::ideal_density;
use qroute::experiment::{
    build_router_circuit, RouterInputs, RouterSpec, OUTPUT, TOMOGRAPHY_REGISTER,
};
use qroute::simulator::{sample_shots, NoiseSpec, ReadoutError};
use qroute::tomography::{
    build_calibration, exact_setting_probs, mitigate, total_variation, CalibrationMode,
    SettingData, TomographySetting,
};

pub fn run_example() -> qroute::Result<(f64, f64)> {
    let error = ReadoutError::symmetric(0.02);
    let setting = TomographySetting::parse("ZZZ")?;
    let circuit =
        build_router_circuit(&RouterSpec::ideal(RouterInputs::standard()), Some(&setting))?;
    let noise = NoiseSpec::ideal(5).with_readout(circuit.n_qubits(), error);
    let record = sample_shots(&circuit, 100_000, &noise)?;
    let observed =
        SettingData::from_counts(setting.clone(), record.counts(TOMOGRAPHY_REGISTER).unwrap())?;

    let cal = build_calibration(
        &[error; OUTPUT.len()],
        CalibrationMode::Measured {
            shots: 100_000,
            seed: 6,
        },
    )?;
    let corrected = mitigate(&observed.probs, &cal)?;
    let ideal = exact_setting_probs(ideal_density(&RouterInputs::standard()).matrix(), &setting)?;

    let raw_tv = total_variation(&observed.probs, &ideal);
    let mitigated_tv = total_variation(&corrected, &ideal);
    println!("condition number {:.3}", cal.condition_number());
    println!("TV distance raw {raw_tv:.5}, mitigated {mitigated_tv:.5}");
    Ok((raw_tv, mitigated_tv))
}

fn main() -> qroute::Result<()> {
    run_example().map(|_| ())
}
