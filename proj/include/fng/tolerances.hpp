#pragma once

namespace fng {

// Central numeric tolerances. Every module pulls its thresholds from here so
// that precision policy lives in one place.
struct Tol {
    // special functions
    static constexpr double elliptic_iter   = 1e-15; // AGM / Carlson duplication stop
    static constexpr double am_invert       = 1e-14; // Newton stop for am(u, nu)
    // ring solver
    static constexpr double ring_residual   = 1e-11; // matching-system residual
    static constexpr double ring_bisect     = 1e-14; // bracket width in nu
    static constexpr double branch_jump_nu  = 0.05;  // nu discontinuity => branch jump
    // propagation
    static constexpr double stationary_residual = 1e-8; // GPG residual for stationary analysis
    static constexpr double imag_time_tol   = 1e-10;
    // linear (BdG) analysis
    static constexpr double zero_mode       = 1e-6;  // |eps| below which a mode counts as zero
    static constexpr double instability_im  = 1e-8;  // |Im eps| above which a mode is unstable
    // quench classification (relative density oscillation at the probe)
    static constexpr double ces_amp_lo      = 5e-4;  // below: ground state
    static constexpr double ces_amp_hi      = 2e-3;  // above: CES; in between: inconclusive
    static constexpr double ces_peak_factor = 10.0;  // periodogram peak over median floor
};

} // namespace fng
