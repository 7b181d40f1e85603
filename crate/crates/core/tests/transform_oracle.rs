use tomobridge::hilbert::PaperState;
use tomobridge::verification::{GridSpec, StateSpec, TransformId};
use tomobridge::verification::verify_transform;

#[test]
fn transforms_match_oracle_on_reference_states() {
    let grid = GridSpec::default_profile();
    for id in TransformId::ALL {
        let states: Vec<StateSpec> = if id.is_spin() {
            PaperState::ALL.iter().map(|&w| StateSpec::Paper { which: w }).collect()
        } else {
            vec![StateSpec::Fock { n: 0 }, StateSpec::Fock { n: 1 }]
        };
        for s in states {
            let t = std::time::Instant::now();
            let r = verify_transform(id, &s, &grid, id.default_tolerance());
            println!("{} {} pass={} abs={:e} err={:?} ({:.2?})", r.transform, r.state, r.pass, r.max_abs_error, r.error, t.elapsed());
        }
    }
}
