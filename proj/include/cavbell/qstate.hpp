// qstate.hpp
// Dense complex state vectors and density matrices for one two-level atom
// coupled to two truncated Fock modes, plus projective atom measurement and
// partial trace over the atom.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cavbell {

using Amplitude = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Tolerances used by the algebraic invariants (norms, traces, measurement
// completeness) and by density-matrix positivity checks. Double precision
// leaves ample headroom on the <= 50-dimensional spaces used here.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kEigenvalueTol = 1e-10;

enum class AtomOutcome { Ground = 0, Excited = 1 };

// Requested measurement branch has zero probability. Signalled explicitly
// instead of returning an unnormalizable state.
class ZeroProbabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two truncated Fock modes, levels 0..cutoff inclusive per mode.
struct CavityDims {
    int cutoff_a = 1;
    int cutoff_b = 1;

    int levels_a() const { return cutoff_a + 1; }
    int levels_b() const { return cutoff_b + 1; }
    int dim() const { return levels_a() * levels_b(); }

    // Basis index of |n_a, n_b>, n_A varying slower than n_B.
    int index(int n_a, int n_b) const;

    bool operator==(const CavityDims&) const = default;
};

// Full space: (two-level atom) x (Fock A) x (Fock B).
//
// Basis ordering is part of the public contract: the atom index varies
// slowest (ground block first, then excited), then n_A, then n_B. All
// serialization and debug dumps use this order.
struct SpaceDims {
    CavityDims cavities;

    static constexpr int atom_levels = 2;

    int dim() const { return atom_levels * cavities.dim(); }
    int index(AtomOutcome atom, int n_a, int n_b) const;
    int atom_block(AtomOutcome atom) const;  // offset of the atom's block

    bool operator==(const SpaceDims&) const = default;
};

// Pure state of atom x cavity A x cavity B.
class StateVector {
public:
    StateVector(SpaceDims dims, VectorXcd amps);

    static StateVector zero(SpaceDims dims);

    const SpaceDims& dims() const { return dims_; }
    const VectorXcd& amps() const { return amps_; }
    VectorXcd& amps() { return amps_; }

    Amplitude amp(AtomOutcome atom, int n_a, int n_b) const;

    double norm() const { return amps_.norm(); }
    StateVector normalized() const;

    // One line per basis ket, "label re im", in fixed basis order.
    std::string dump() const;

private:
    SpaceDims dims_;
    VectorXcd amps_;
};

// Pure state of the two cavity modes only (atom measured and removed).
class CavityState {
public:
    CavityState(CavityDims dims, VectorXcd amps);

    static CavityState vacuum(CavityDims dims);

    const CavityDims& dims() const { return dims_; }
    const VectorXcd& amps() const { return amps_; }
    VectorXcd& amps() { return amps_; }

    Amplitude amp(int n_a, int n_b) const;

    double norm() const { return amps_.norm(); }
    CavityState normalized() const;

    std::string dump() const;

private:
    CavityDims dims_;
    VectorXcd amps_;
};

// Mixed state of the two cavity modes.
class DensityMatrix {
public:
    DensityMatrix(CavityDims dims, MatrixXcd matrix);

    static DensityMatrix pure(const CavityState& psi);
    static DensityMatrix vacuum(CavityDims dims);

    const CavityDims& dims() const { return dims_; }
    const MatrixXcd& matrix() const { return m_; }
    MatrixXcd& matrix() { return m_; }

    double trace() const { return m_.trace().real(); }
    double purity() const { return (m_ * m_).trace().real(); }

    // Hermitian within tol_herm, unit trace within tol_herm, eigenvalues
    // above -tol_eig.
    bool is_physical(double tol_herm = kAlgebraTol,
                     double tol_eig = kEigenvalueTol) const;

private:
    CavityDims dims_;
    MatrixXcd m_;
};

// Unit basis vectors.
StateVector make_basis_state(const SpaceDims& dims, AtomOutcome atom, int n_a, int n_b);
CavityState make_cavity_basis(const CavityDims& dims, int n_a, int n_b);

// (|01> + |10>)/sqrt(2), the single-photon target state.
CavityState bell_state(const CavityDims& dims);

// <a|b>, conjugating the first argument. Both arguments must share dims.
Amplitude inner_product(const StateVector& a, const StateVector& b);
Amplitude inner_product(const CavityState& a, const CavityState& b);

// |<a|b>|^2 for normalized states.
double fidelity_pure(const StateVector& a, const StateVector& b);
double fidelity_pure(const CavityState& a, const CavityState& b);

// <target|rho|target>.
double fidelity_mixed(const DensityMatrix& rho, const CavityState& target);

// Projective measurement of the atom. Returns the branch probability and
// the renormalized post-measurement state reduced to the cavity modes
// (the atom factor is dropped; the reduction is the public contract).
// A branch of zero probability raises ZeroProbabilityError.
std::pair<double, CavityState> project_atom(const StateVector& psi, AtomOutcome outcome);

// Trace out the atom.
DensityMatrix partial_trace_atom(const StateVector& psi);
DensityMatrix partial_trace_atom(const MatrixXcd& rho_full, const SpaceDims& dims);

// |e> <e| (x) rho, embedding a cavity state under a freshly excited atom.
MatrixXcd adjoin_excited_atom(const DensityMatrix& rho);
StateVector adjoin_excited_atom(const CavityState& psi);

}  // namespace cavbell
