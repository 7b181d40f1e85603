use tomobridge::oracle::KernelFamily;
use tomobridge::verification::verify_kernel_family;

#[test]
fn kernels_match_defining_traces() {
    for family in KernelFamily::ALL {
        let r = verify_kernel_family(family, 11, 20, 1e-6, 1e-8);
        println!("{} pass={} abs={:e} rel={:e} err={:?} worst={:?}", r.transform, r.pass, r.max_abs_error, r.max_rel_error, r.error, r.worst.first());
        assert!(r.pass, "{}", r.transform);
    }
}
