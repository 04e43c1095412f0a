#![no_main]
use ergodic_jacobi::io::{read_measure, write_measure};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(measure) = read_measure(data) {
        let mut buf = Vec::new();
        write_measure(&mut buf, &measure).unwrap();
        assert_eq!(read_measure(buf.as_slice()).unwrap(), measure);
    }
});
