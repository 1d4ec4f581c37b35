use bellspace::queries::{cond_prob, nondetection_identities, prob, Event, LineStatus};
use bellspace::space::{ConditionalTable, ObservableId, OutcomeBlock, SampleSpace, Setting, SettingDistribution, Side};

fn main() {
    let settings = SettingDistribution::product([0.3, 0.7], [0.6, 0.4]).unwrap();
    let table = ConditionalTable::uniform_blocks(OutcomeBlock::product(0.35, 0.6).unwrap());
    let space = SampleSpace::build(settings, table).unwrap();

    // nondetection of A1 happens exactly when a != 1
    let a1_off = Event::observable(ObservableId::A1, 0);
    println!("p(A1=0) = {}", prob(&space, &a1_off));
    println!(
        "p(a!=1) = {}",
        prob(&space, &Event::generator_not(Side::A, Setting::One))
    );
    let given = Event::generator(Side::A, Setting::One);
    println!(
        "p(A1=+1 | a=1) = {}",
        cond_prob(&space, &Event::observable(ObservableId::A1, 1), &given).unwrap()
    );

    let report = nondetection_identities(&space);
    for line in &report.lines {
        let mark = match line.status {
            LineStatus::Pass => "ok ",
            LineStatus::Fail => "BAD",
            LineStatus::NotApplicable => "n/a",
        };
        println!("{mark} {:5} {}", line.relation, line.statement);
    }
    println!(
        "{} lines, max deviation {:e}",
        report.lines.len(),
        report.max_deviation()
    );
}
