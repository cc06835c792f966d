//! Numerical certification of the smoothing bounds.
//!
//! Each check measures one side of an inequality and reports it with a
//! standard error; a check passes when `measured ≤ bound + 3·std_error`.

mod checks;
mod report;

pub use checks::{
    check_bregman_sandwich, check_generic_smoothing, check_gradient_fd, check_hessian_experts_bound,
    check_hessian_l2_bound, check_max_gaussian, check_overestimation_telescope, estimate_certificate,
    experts_certificates, group, max_eigenvalue, probe_points, CertificateEstimate, SmoothingCertificate,
    CLOSED_FORM_FD_TOLERANCE,
};
pub use report::CheckReport;
