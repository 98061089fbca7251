#![no_main]
use libfuzzer_sys::fuzz_target;
use treecorr::monomial::parse_tag_list;
use treecorr::Monomial;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = text.parse::<Monomial>() {
        // canonical text must parse back to the same monomial
        let again: Monomial = m.to_string().parse().expect("display output parses");
        assert_eq!(again, m);
    }
    let _ = parse_tag_list(text);
});
