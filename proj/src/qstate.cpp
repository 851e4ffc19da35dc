#include "cavbell/qstate.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace cavbell {

namespace {

void check_fock(int n, int cutoff, const char* which) {
    if (n < 0 || n > cutoff) {
        throw std::out_of_range(std::string("Fock label out of range for cavity ") + which +
                                ": n=" + std::to_string(n) +
                                ", cutoff=" + std::to_string(cutoff));
    }
}

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

}  // namespace

int CavityDims::index(int n_a, int n_b) const {
    check_fock(n_a, cutoff_a, "A");
    check_fock(n_b, cutoff_b, "B");
    return n_a * levels_b() + n_b;
}

int SpaceDims::atom_block(AtomOutcome atom) const {
    return (atom == AtomOutcome::Ground ? 0 : 1) * cavities.dim();
}

int SpaceDims::index(AtomOutcome atom, int n_a, int n_b) const {
    return atom_block(atom) + cavities.index(n_a, n_b);
}

StateVector::StateVector(SpaceDims dims, VectorXcd amps)
    : dims_(dims), amps_(std::move(amps)) {
    if (amps_.size() != dims_.dim()) {
        throw std::invalid_argument("StateVector: amplitude count does not match dims");
    }
}

StateVector StateVector::zero(SpaceDims dims) {
    return StateVector(dims, VectorXcd::Zero(dims.dim()));
}

Amplitude StateVector::amp(AtomOutcome atom, int n_a, int n_b) const {
    return amps_(dims_.index(atom, n_a, n_b));
}

StateVector StateVector::normalized() const {
    double n = norm();
    if (n == 0.0) throw ZeroProbabilityError("cannot normalize the zero vector");
    return StateVector(dims_, amps_ / n);
}

std::string StateVector::dump() const {
    std::string out;
    static const char* atom_label[2] = {"g", "e"};
    for (int a = 0; a < 2; ++a) {
        for (int na = 0; na <= dims_.cavities.cutoff_a; ++na) {
            for (int nb = 0; nb <= dims_.cavities.cutoff_b; ++nb) {
                const Amplitude& c = amps_(dims_.index(static_cast<AtomOutcome>(a), na, nb));
                out += atom_label[a];
                out += ',';
                out += std::to_string(na);
                out += ',';
                out += std::to_string(nb);
                out += ' ';
                append_double(out, c.real());
                out += ' ';
                append_double(out, c.imag());
                out += '\n';
            }
        }
    }
    return out;
}

CavityState::CavityState(CavityDims dims, VectorXcd amps)
    : dims_(dims), amps_(std::move(amps)) {
    if (amps_.size() != dims_.dim()) {
        throw std::invalid_argument("CavityState: amplitude count does not match dims");
    }
}

CavityState CavityState::vacuum(CavityDims dims) {
    VectorXcd v = VectorXcd::Zero(dims.dim());
    v(0) = 1.0;
    return CavityState(dims, std::move(v));
}

Amplitude CavityState::amp(int n_a, int n_b) const {
    return amps_(dims_.index(n_a, n_b));
}

CavityState CavityState::normalized() const {
    double n = norm();
    if (n == 0.0) throw ZeroProbabilityError("cannot normalize the zero vector");
    return CavityState(dims_, amps_ / n);
}

std::string CavityState::dump() const {
    std::string out;
    for (int na = 0; na <= dims_.cutoff_a; ++na) {
        for (int nb = 0; nb <= dims_.cutoff_b; ++nb) {
            const Amplitude& c = amps_(dims_.index(na, nb));
            out += std::to_string(na);
            out += ',';
            out += std::to_string(nb);
            out += ' ';
            append_double(out, c.real());
            out += ' ';
            append_double(out, c.imag());
            out += '\n';
        }
    }
    return out;
}

DensityMatrix::DensityMatrix(CavityDims dims, MatrixXcd matrix)
    : dims_(dims), m_(std::move(matrix)) {
    if (m_.rows() != dims_.dim() || m_.cols() != dims_.dim()) {
        throw std::invalid_argument("DensityMatrix: matrix shape does not match dims");
    }
}

DensityMatrix DensityMatrix::pure(const CavityState& psi) {
    return DensityMatrix(psi.dims(), psi.amps() * psi.amps().adjoint());
}

DensityMatrix DensityMatrix::vacuum(CavityDims dims) {
    return pure(CavityState::vacuum(dims));
}

bool DensityMatrix::is_physical(double tol_herm, double tol_eig) const {
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol_herm) return false;
    if (std::abs(trace() - 1.0) > tol_herm) return false;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol_eig;
}

StateVector make_basis_state(const SpaceDims& dims, AtomOutcome atom, int n_a, int n_b) {
    StateVector psi = StateVector::zero(dims);
    psi.amps()(dims.index(atom, n_a, n_b)) = 1.0;
    return psi;
}

CavityState make_cavity_basis(const CavityDims& dims, int n_a, int n_b) {
    VectorXcd v = VectorXcd::Zero(dims.dim());
    v(dims.index(n_a, n_b)) = 1.0;
    return CavityState(dims, std::move(v));
}

CavityState bell_state(const CavityDims& dims) {
    VectorXcd v = VectorXcd::Zero(dims.dim());
    const double r = 1.0 / std::sqrt(2.0);
    v(dims.index(0, 1)) = r;
    v(dims.index(1, 0)) = r;
    return CavityState(dims, std::move(v));
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
    if (!(a.dims() == b.dims())) throw std::invalid_argument("inner_product: dims mismatch");
    return a.amps().dot(b.amps());  // Eigen's dot conjugates the first factor
}

Amplitude inner_product(const CavityState& a, const CavityState& b) {
    if (!(a.dims() == b.dims())) throw std::invalid_argument("inner_product: dims mismatch");
    return a.amps().dot(b.amps());
}

double fidelity_pure(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

double fidelity_pure(const CavityState& a, const CavityState& b) {
    return std::norm(inner_product(a, b));
}

double fidelity_mixed(const DensityMatrix& rho, const CavityState& target) {
    if (!(rho.dims() == target.dims())) throw std::invalid_argument("fidelity_mixed: dims mismatch");
    return (target.amps().adjoint() * rho.matrix() * target.amps())(0).real();
}

std::pair<double, CavityState> project_atom(const StateVector& psi, AtomOutcome outcome) {
    const int n = psi.dims().cavities.dim();
    VectorXcd block = psi.amps().segment(psi.dims().atom_block(outcome), n);
    const double prob = block.squaredNorm();
    if (prob == 0.0) {
        throw ZeroProbabilityError("project_atom: requested branch has zero probability");
    }
    return {prob, CavityState(psi.dims().cavities, block / std::sqrt(prob))};
}

DensityMatrix partial_trace_atom(const StateVector& psi) {
    const int n = psi.dims().cavities.dim();
    const VectorXcd g = psi.amps().segment(psi.dims().atom_block(AtomOutcome::Ground), n);
    const VectorXcd e = psi.amps().segment(psi.dims().atom_block(AtomOutcome::Excited), n);
    return DensityMatrix(psi.dims().cavities, g * g.adjoint() + e * e.adjoint());
}

DensityMatrix partial_trace_atom(const MatrixXcd& rho_full, const SpaceDims& dims) {
    const int n = dims.cavities.dim();
    if (rho_full.rows() != dims.dim() || rho_full.cols() != dims.dim()) {
        throw std::invalid_argument("partial_trace_atom: matrix shape does not match dims");
    }
    return DensityMatrix(dims.cavities,
                         rho_full.block(0, 0, n, n) + rho_full.block(n, n, n, n));
}

MatrixXcd adjoin_excited_atom(const DensityMatrix& rho) {
    const int n = rho.dims().dim();
    MatrixXcd full = MatrixXcd::Zero(2 * n, 2 * n);
    full.block(n, n, n, n) = rho.matrix();
    return full;
}

StateVector adjoin_excited_atom(const CavityState& psi) {
    SpaceDims dims{psi.dims()};
    StateVector full = StateVector::zero(dims);
    full.amps().segment(dims.atom_block(AtomOutcome::Excited), psi.dims().dim()) = psi.amps();
    return full;
}

}  // namespace cavbell
