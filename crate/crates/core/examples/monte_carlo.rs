use bellspace::montecarlo::{convergence_report, sample_tally, Estimate, RNG_ALGORITHM};
use bellspace::quantum::{singlet_table, AngleSettings, Convention};
use bellspace::space::{SampleSpace, SettingDistribution};

fn main() {
    let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
    let space = SampleSpace::build(SettingDistribution::uniform(), table).unwrap();
    println!("rng: {RNG_ALGORITHM}");

    let est = Estimate::from_tally(sample_tally(&space, 1_000_000, 7, 8)).unwrap();
    println!(
        "n = {}, S_cond = {:.5}, S_abs = {:.5}",
        est.n,
        est.s_cond().unwrap(),
        est.correlations.s_abs()
    );

    for p in convergence_report(&space, &[1_000, 10_000, 100_000, 1_000_000], 7).unwrap() {
        println!("n = {:>9}  max atom deviation {:.2e}", p.n, p.max_deviation);
    }
}
