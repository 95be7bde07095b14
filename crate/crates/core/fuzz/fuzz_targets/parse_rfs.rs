#![no_main]

use libfuzzer_sys::fuzz_target;
use relfacts::dsl::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    match parse(src) {
        Ok(ast) => {
            let printed = ast.to_string();
            let again = parse(&printed).expect("pretty-printed source parses");
            assert_eq!(ast.without_spans(), again.without_spans());
        }
        Err(e) => assert!(e.line >= 1 && e.column >= 1),
    }
});
