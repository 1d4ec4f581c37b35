use bellspace::quantum::{tsirelson_scan, AngleGrid, Convention, TSIRELSON_BOUND};

fn main() {
    for resolution in [5, 9, 17, 33] {
        let scan = tsirelson_scan(&AngleGrid::half_turn(resolution), Convention::Photon).unwrap();
        let deg = |x: [f64; 2]| x.map(f64::to_degrees);
        println!(
            "{resolution:>3} per dial, {:>8} points: max |S| = {:.12} at a = {:?}, b = {:?}",
            scan.points,
            scan.max_abs_chsh,
            deg(scan.argmax.a),
            deg(scan.argmax.b)
        );
    }
    println!("2 sqrt 2 = {TSIRELSON_BOUND:.12}");
}
