use bellspace::chsh::{chsh_criterion, fine_feasibility, FineOptions, FineVerdict};
use bellspace::quantum::{singlet_table, AngleSettings, Convention};
use bellspace::space::{ConditionalTable, Outcome};

fn show(name: &str, table: &ConditionalTable) {
    for opts in [FineOptions::default(), FineOptions::exact()] {
        match fine_feasibility(table, &opts).unwrap() {
            FineVerdict::Feasible { witness } => {
                let p = witness.get([Outcome::Plus, Outcome::Plus], [Outcome::Plus, Outcome::Plus]);
                println!(
                    "{name} [{:?}]: feasible, p(A1=A2=B1=B2=+) = {p:.4}, marginal error {:e}",
                    opts.arithmetic,
                    witness.max_marginal_error(table)
                );
            }
            FineVerdict::Infeasible { violated, value, .. } => {
                println!(
                    "{name} [{:?}]: infeasible, {violated} reaches {value:.6}",
                    opts.arithmetic
                )
            }
        }
    }
    println!("  CHSH criterion: {:?}", chsh_criterion(table, 1e-9));
}

fn main() {
    show(
        "canonical",
        &singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon),
    );
    let boundary = AngleSettings::from_degrees([0.0, 45.0], [0.0, 0.0]).unwrap();
    show("aligned", &singlet_table(&boundary, Convention::Photon));
    let pr = ConditionalTable::from_entries([
        [[0.5, 0.0, 0.0, 0.5], [0.5, 0.0, 0.0, 0.5]],
        [[0.5, 0.0, 0.0, 0.5], [0.0, 0.5, 0.5, 0.0]],
    ])
    .unwrap();
    show("PR box", &pr);
}
