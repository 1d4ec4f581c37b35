use bellspace::quantum::{singlet_table, AngleSettings, Convention};
use bellspace::queries::{counterfactual_mass, prob, Event};
use bellspace::space::{ObservableId, SampleSpace, SettingDistribution};

fn main() {
    let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
    let space = SampleSpace::build(SettingDistribution::uniform(), table).unwrap();

    // A1 and A2 are both defined on every atom, but never both nonzero
    for x in [-1, 1] {
        for y in [-1, 1] {
            let e = Event::observable(ObservableId::A1, x).meet(&Event::observable(ObservableId::A2, y));
            println!("p(A1={x:+}, A2={y:+}) = {}", prob(&space, &e));
        }
    }
    println!("total counterfactual mass: {}", counterfactual_mass(&space));
}
