use bellspace::chsh::weighted_chsh_curve;
use bellspace::quantum::{singlet_table, AngleSettings, Convention};
use bellspace::space::SettingDistribution;

fn main() {
    let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
    let weights: Vec<SettingDistribution> = [0.1, 0.3, 0.5, 0.7, 0.9]
        .iter()
        .map(|&p| SettingDistribution::product([p, 1.0 - p], [0.5, 0.5]).unwrap())
        .collect();

    println!("p(a=1)   S_abs      S_cond");
    for point in weighted_chsh_curve(&table, &weights).unwrap() {
        let pa1 = point.weights[0][0] + point.weights[0][1];
        println!("{pa1:.1}      {:+.6}  {:+.6}", point.s_abs, point.s_cond.unwrap());
        if let Some(b) = point.implied_bounds {
            println!(
                "         implied bounds on S_cond: {:.3} / {:.3}",
                b.from_classical, b.from_strong
            );
        }
    }
}
