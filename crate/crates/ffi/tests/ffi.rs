use std::ffi::CStr;
use std::ptr;

use cubmp_ffi::*;

fn last_error() -> String {
    let p = cubmp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn bars(d: *const CubmpDiagram, dim: u32) -> Vec<(f64, f64)> {
    let mut n = 0;
    assert_eq!(cubmp_diagram_len(d, dim, &mut n), CubmpStatus::Ok);
    let (mut b, mut e) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(
        cubmp_diagram_pairs(d, dim, b.as_mut_ptr(), e.as_mut_ptr(), n),
        CubmpStatus::Ok
    );
    let mut v: Vec<(f64, f64)> = b.into_iter().zip(e).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

#[test]
fn ring_diagram_and_distances() {
    let ring = [0.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0];
    let flat = [0.0; 9];
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            cubmp_compute_pd(ring.as_ptr(), 3, 3, CUBMP_DIMS_BOTH, &mut a),
            CubmpStatus::Ok
        );
        assert_eq!(
            cubmp_compute_pd(flat.as_ptr(), 3, 3, CUBMP_DIMS_BOTH, &mut b),
            CubmpStatus::Ok
        );
        assert_eq!(bars(a, 0), vec![(0.0, f64::INFINITY)]);
        assert_eq!(bars(a, 1), vec![(0.0, 5.0)]);
        let mut d = 0.0;
        assert_eq!(
            cubmp_wasserstein(a, b, 1, f64::INFINITY, 0, 0.0, &mut d),
            CubmpStatus::Ok
        );
        assert_eq!(d, 2.5);
        assert_eq!(cubmp_wasserstein(a, b, 0, 1.0, 1, 10.0, &mut d), CubmpStatus::Ok);
        assert_eq!(d, 0.0);
        let mut small = [0.0; 0];
        assert_eq!(
            cubmp_diagram_pairs(a, 1, small.as_mut_ptr(), small.as_mut_ptr(), 0),
            CubmpStatus::BufferTooSmall
        );
        cubmp_diagram_free(a);
        cubmp_diagram_free(b);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(
            cubmp_compute_pd(ptr::null(), 2, 2, CUBMP_DIMS_BOTH, &mut d),
            CubmpStatus::NullPointer
        );
        assert!(last_error().contains("null"));
        let v = [1.0, f64::NAN];
        assert_eq!(
            cubmp_compute_pd(v.as_ptr(), 1, 2, CUBMP_DIMS_BOTH, &mut d),
            CubmpStatus::InvalidArgument
        );
        assert!(last_error().contains("non-finite"));
        assert_eq!(
            cubmp_compute_pd(v.as_ptr(), 0, 2, CUBMP_DIMS_BOTH, &mut d),
            CubmpStatus::ShapeMismatch
        );
        assert_eq!(
            cubmp_compute_pd(v.as_ptr(), 1, 1, 7, &mut d),
            CubmpStatus::InvalidArgument
        );
        let mut n = 0;
        assert_eq!(cubmp_diagram_len(ptr::null(), 0, &mut n), CubmpStatus::NullPointer);
        cubmp_diagram_free(ptr::null_mut());
        assert!(!cubmp_version().is_null());
    }
}

#[test]
fn sliced_vectorization() {
    // two slices of a 2x2 grid with levels in 0..=3; slice 1 is never above slice 0
    let levels: [u32; 8] = [1, 3, 3, 2, 0, 3, 2, 1];
    unsafe {
        let mut sliced = ptr::null_mut();
        assert_eq!(
            cubmp_slice_compact(levels.as_ptr(), 2, 2, 2, 3, &mut sliced),
            CubmpStatus::Ok
        );
        let mut m = 0;
        assert_eq!(cubmp_sliced_num_slices(sliced, &mut m), CubmpStatus::Ok);
        assert_eq!(m, 2);
        let mut d = ptr::null_mut();
        assert_eq!(cubmp_sliced_diagram(sliced, 1, &mut d), CubmpStatus::Ok);
        assert_eq!(bars(d, 0).len(), 2);
        cubmp_diagram_free(d);
        assert_eq!(cubmp_sliced_diagram(sliced, 2, &mut d), CubmpStatus::InvalidArgument);

        let samples = [0.0, 1.0, 2.0, 3.0];
        let mut v = ptr::null_mut();
        assert_eq!(
            cubmp_psi_mp(sliced, samples.as_ptr(), 4, 1.0, CUBMP_AGGREGATE_FLATTEN, &mut v),
            CubmpStatus::Ok
        );
        let mut shape = [0usize; 3];
        assert_eq!(cubmp_vectorization_shape(v, shape.as_mut_ptr()), CubmpStatus::Ok);
        assert_eq!(shape, [2, 2, 4]);
        let mut len = 0;
        let mut buf = vec![0.0; 16];
        assert_eq!(
            cubmp_vectorization_values(v, buf.as_mut_ptr(), 3, &mut len),
            CubmpStatus::BufferTooSmall
        );
        assert_eq!(len, 16);
        assert_eq!(
            cubmp_vectorization_values(v, buf.as_mut_ptr(), 16, &mut len),
            CubmpStatus::Ok
        );
        let mut agg = vec![0.0; 16];
        assert_eq!(
            cubmp_vectorization_aggregate(v, agg.as_mut_ptr(), 16, &mut len),
            CubmpStatus::Ok
        );
        assert_eq!(buf, agg);
        cubmp_vectorization_free(v);
        cubmp_sliced_free(sliced);

        let bad: [u32; 2] = [0, 1];
        assert_eq!(
            cubmp_slice_compact(bad.as_ptr(), 2, 1, 1, 3, &mut sliced),
            CubmpStatus::NotMonotone
        );
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/cubmp.h")).unwrap();
    for name in [
        "cubmp_compute_pd",
        "cubmp_wasserstein",
        "cubmp_slice_compact",
        "cubmp_psi_mp",
        "cubmp_last_error",
        "CUBMP_STATUS_OK",
        "CUBMP_DIMS_BOTH",
        "typedef struct CubmpDiagram CubmpDiagram",
    ] {
        assert!(header.contains(name), "{name} missing");
    }
}
