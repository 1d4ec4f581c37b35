use bellspace::cli::{analyze_experiment, ingest_records, load_config, read_records, write_records};
use bellspace::montecarlo::sample_trials;
use bellspace::space::SampleSpace;

fn main() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/canonical.toml");
    let exp = load_config(&path, None).unwrap();
    let space = SampleSpace::build(exp.settings, exp.table).unwrap();

    let mut csv = Vec::new();
    write_records(&mut csv, &sample_trials(&space, 20_000, 1)).unwrap();
    println!("{}", String::from_utf8_lossy(&csv[..csv.len().min(120)]));

    let records = read_records(csv.as_slice()).unwrap();
    let empirical = ingest_records(&records, "memory", None, false).unwrap();
    let exact = analyze_experiment(&exp, "config", false, None).unwrap();
    println!(
        "S_cond exact {:.6}, empirical {:.6}",
        exact.chsh.s_cond.unwrap(),
        empirical.chsh.s_cond.unwrap()
    );
}
