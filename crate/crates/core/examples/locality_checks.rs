use bellspace::locality::{
    check_conditional_marginal_consistency, check_detection_factorizations, check_lig, check_liog,
};
use bellspace::quantum::{singlet_table, AngleSettings, Convention};
use bellspace::space::{ConditionalTable, SampleSpace, SettingDistribution};

fn report(name: &str, space: &SampleSpace) {
    let lig = check_lig(space);
    let liog = check_liog(space);
    let fact = check_detection_factorizations(space);
    println!("{name}");
    println!("  LIG  {} (deviation {:.1e})", lig.holds, lig.max_deviation);
    println!("  LIOG {} (deviation {:.1e})", liog.holds, liog.max_deviation);
    println!("  factorizations pass: {}", fact.all_pass());
    match check_conditional_marginal_consistency(space) {
        Ok(c) => println!(
            "  conditional marginals consistent: {} (signaling {:.1e})",
            c.holds, c.signaling
        ),
        Err(e) => println!("  conditional marginals: {e}"),
    }
}

fn main() {
    let quantum = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
    let product = SettingDistribution::product([0.3, 0.7], [0.6, 0.4]).unwrap();
    report(
        "quantum table, product settings",
        &SampleSpace::build(product, quantum).unwrap(),
    );

    let correlated = SettingDistribution::new([[0.5, 0.0], [0.0, 0.5]]).unwrap();
    report(
        "quantum table, correlated settings",
        &SampleSpace::build(correlated, quantum).unwrap(),
    );

    // A's outcome on setting 2 depends on B's setting
    let signaling =
        ConditionalTable::from_entries([[[0.25; 4], [0.25; 4]], [[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]]]).unwrap();
    report(
        "signaling table, uniform settings",
        &SampleSpace::build(SettingDistribution::uniform(), signaling).unwrap(),
    );
}
