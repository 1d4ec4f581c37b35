use bellspace::chsh::chsh_report;
use bellspace::quantum::{singlet_table, AngleSettings, Convention};
use bellspace::space::{SampleSpace, Setting, SettingDistribution};

fn main() {
    let table = singlet_table(&AngleSettings::canonical_chsh(), Convention::Photon);
    let space = SampleSpace::build(SettingDistribution::uniform(), table).unwrap();
    let r = chsh_report(&space);

    for a in Setting::ALL {
        for b in Setting::ALL {
            println!(
                "({a},{b})  C = {:+.6}  Q = {:+.6}",
                r.correlations.c(a, b),
                r.correlations.q(a, b).unwrap()
            );
        }
    }
    println!("S_abs  = {:.6}  (|S_abs| <= 1 holds: {})", r.s_abs, r.abs_strong.holds);
    let s = r.s_cond.unwrap();
    println!(
        "S_cond = {s:.6}  (|S_cond| <= 2 holds: {})",
        r.cond_classical.unwrap().holds
    );
}
