#![no_main]
use libfuzzer_sys::fuzz_target;
use treecorr::Series;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(s) = Series::from_json(text) {
        let back = Series::from_json(&s.to_json()).expect("serialized series parses");
        assert_eq!(back, s);
    }
});
