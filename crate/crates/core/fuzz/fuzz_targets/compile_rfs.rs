#![no_main]

use libfuzzer_sys::fuzz_target;
use relfacts::dsl::load;
use relfacts::perspective::exact_distribution;
use relfacts::scenario::Encoding;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    for encoding in [Encoding::Literal, Encoding::Computational] {
        if let Ok(scenario) = load(src, encoding) {
            for c in &scenario.contexts {
                let total = exact_distribution(c).total_probability();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }
});
