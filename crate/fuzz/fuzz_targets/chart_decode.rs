#![no_main]

use libfuzzer_sys::fuzz_target;
use pwshape::geometry::{angle_count, matrix_from_angles, shape_from_v};

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let q = 2 + (data[0] % 5) as usize;
    let k = 2 + (data[1] % 2) as usize;
    let m = angle_count(q, k);
    let mut angles = Vec::with_capacity(m);
    for chunk in data[2..].chunks_exact(8).take(m) {
        angles.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    if angles.len() != m {
        return;
    }
    let Ok(v) = matrix_from_angles(&angles, q, k) else {
        return;
    };
    if let Ok(shape) = shape_from_v(&v, k) {
        // Accepted charts must decode to well-defined coordinates.
        assert!(!shape.r.is_nan());
        assert!(!shape.log_jacobian.is_nan());
        assert_eq!(shape.u.len(), m);
    }
});
