// jcdynamics.hpp
// Exact resonant Jaynes-Cummings propagation of the atom with one selected
// cavity, in pulse-area units x = g0*tau, plus a dense matrix-exponential
// oracle used to verify the closed form.
#pragma once

#include "cavbell/qstate.hpp"

namespace cavbell {

// Dimensionless pulse area, the product of the coupling strength g0 (rad/s)
// and the effective interaction time tau (s). Physical g0 and tau live in
// the geometry and preset layer; the dynamics depend only on the product.
struct PulseArea {
    double value;

    PulseArea(double v) : value(v) {
        if (!std::isfinite(v)) throw std::invalid_argument("PulseArea must be finite");
    }
};

enum class CavitySelector { A, B };

// Raised when propagation would need Fock levels above the cutoff, i.e.
// when the excited-atom amplitude at the top level of the selected cavity
// exceeds kTruncationTol. Never clipped silently.
class CutoffError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kTruncationTol = 1e-12;

// Closed-form propagation: within each joint-excitation sector of the
// selected atom-cavity pair,
//   |e,n>   -> cos(x sqrt(n+1)) |e,n>   - i sin(x sqrt(n+1)) |g,n+1>
//   |g,n+1> -> cos(x sqrt(n+1)) |g,n+1> - i sin(x sqrt(n+1)) |e,n>
// and |g,0> is left alone. The other cavity's index is untouched.
StateVector jc_propagate(const StateVector& psi, CavitySelector cavity, PulseArea x);

// Same evolution applied to a full-space density matrix (rho -> U rho U+).
MatrixXcd jc_propagate(const MatrixXcd& rho_full, const SpaceDims& dims,
                       CavitySelector cavity, PulseArea x);

// Interaction Hamiltonian for the selected cavity in units where hbar = 1
// and g0*u = 1 (the pulse area carries the full prefactor):
// <g,n+1| H |e,n> = sqrt(n+1), Hermitian, zero elsewhere.
MatrixXcd build_hamiltonian(const SpaceDims& dims, CavitySelector cavity);

// exp(-i x H) psi via spectral decomposition of the dense Hamiltonian.
// Verification oracle for jc_propagate; same preconditions.
StateVector expm_propagate(const StateVector& psi, CavitySelector cavity, PulseArea x);

}  // namespace cavbell
