#![no_main]
use libfuzzer_sys::fuzz_target;
use treecorr::{compute_indices, parse_tree};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(tree) = parse_tree(text) {
        let encoded = tree.encode();
        assert_eq!(encoded, text, "encoding differs from accepted input");
        assert_eq!(parse_tree(&encoded).unwrap(), tree);
        if tree.size() <= 2000 {
            let b = compute_indices(&tree);
            assert_eq!(b.n, tree.size());
        }
    }
});
