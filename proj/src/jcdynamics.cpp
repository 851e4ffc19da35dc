#include "cavbell/jcdynamics.hpp"

#include <cmath>
#include <vector>

namespace cavbell {

namespace {

constexpr std::complex<double> kMinusI{0.0, -1.0};

struct SectorPair {
    int excited;  // index of |e, n>
    int ground;   // index of |g, n+1>
    double rabi;  // sqrt(n+1)
};

// Coupled (|e,n>, |g,n+1>) index pairs of the selected cavity, the other
// cavity's label held fixed.
std::vector<SectorPair> sector_pairs(const SpaceDims& dims, CavitySelector cavity) {
    std::vector<SectorPair> pairs;
    const CavityDims& cav = dims.cavities;
    if (cavity == CavitySelector::A) {
        pairs.reserve(cav.cutoff_a * cav.levels_b());
        for (int na = 0; na < cav.cutoff_a; ++na)
            for (int nb = 0; nb <= cav.cutoff_b; ++nb)
                pairs.push_back({dims.index(AtomOutcome::Excited, na, nb),
                                 dims.index(AtomOutcome::Ground, na + 1, nb),
                                 std::sqrt(na + 1.0)});
    } else {
        pairs.reserve(cav.cutoff_b * cav.levels_a());
        for (int na = 0; na <= cav.cutoff_a; ++na)
            for (int nb = 0; nb < cav.cutoff_b; ++nb)
                pairs.push_back({dims.index(AtomOutcome::Excited, na, nb),
                                 dims.index(AtomOutcome::Ground, na, nb + 1),
                                 std::sqrt(nb + 1.0)});
    }
    return pairs;
}

// Indices of |e, n_sel = cutoff>, where a+ would leave the truncated space.
std::vector<int> top_level_indices(const SpaceDims& dims, CavitySelector cavity) {
    std::vector<int> idx;
    const CavityDims& cav = dims.cavities;
    if (cavity == CavitySelector::A) {
        for (int nb = 0; nb <= cav.cutoff_b; ++nb)
            idx.push_back(dims.index(AtomOutcome::Excited, cav.cutoff_a, nb));
    } else {
        for (int na = 0; na <= cav.cutoff_a; ++na)
            idx.push_back(dims.index(AtomOutcome::Excited, na, cav.cutoff_b));
    }
    return idx;
}

void guard_truncation(const VectorXcd& amps, const SpaceDims& dims, CavitySelector cavity) {
    for (int i : top_level_indices(dims, cavity)) {
        if (std::abs(amps(i)) > kTruncationTol) {
            throw CutoffError("jc_propagate: excited-atom amplitude at the top Fock level "
                              "of the selected cavity; raise the cutoff");
        }
    }
}

void guard_truncation_density(const MatrixXcd& rho, const SpaceDims& dims, CavitySelector cavity) {
    for (int i : top_level_indices(dims, cavity)) {
        if (std::sqrt(std::max(0.0, rho(i, i).real())) > kTruncationTol) {
            throw CutoffError("jc_propagate: excited-atom population at the top Fock level "
                              "of the selected cavity; raise the cutoff");
        }
    }
}

}  // namespace

StateVector jc_propagate(const StateVector& psi, CavitySelector cavity, PulseArea x) {
    guard_truncation(psi.amps(), psi.dims(), cavity);
    VectorXcd out = psi.amps();
    for (const SectorPair& p : sector_pairs(psi.dims(), cavity)) {
        const double r = x.value * p.rabi;
        const double c = std::cos(r), s = std::sin(r);
        const Amplitude ae = out(p.excited), ag = out(p.ground);
        out(p.excited) = c * ae + kMinusI * s * ag;
        out(p.ground) = c * ag + kMinusI * s * ae;
    }
    return StateVector(psi.dims(), std::move(out));
}

MatrixXcd jc_propagate(const MatrixXcd& rho_full, const SpaceDims& dims,
                       CavitySelector cavity, PulseArea x) {
    if (rho_full.rows() != dims.dim() || rho_full.cols() != dims.dim()) {
        throw std::invalid_argument("jc_propagate: matrix shape does not match dims");
    }
    guard_truncation_density(rho_full, dims, cavity);
    MatrixXcd out = rho_full;
    const auto pairs = sector_pairs(dims, cavity);
    for (const SectorPair& p : pairs) {  // U rho
        const double r = x.value * p.rabi;
        const double c = std::cos(r), s = std::sin(r);
        Eigen::RowVectorXcd re = out.row(p.excited), rg = out.row(p.ground);
        out.row(p.excited) = c * re + kMinusI * s * rg;
        out.row(p.ground) = c * rg + kMinusI * s * re;
    }
    for (const SectorPair& p : pairs) {  // (U rho) U+
        const double r = x.value * p.rabi;
        const double c = std::cos(r), s = std::sin(r);
        const Amplitude is{0.0, s};
        VectorXcd ce = out.col(p.excited), cg = out.col(p.ground);
        out.col(p.excited) = c * ce + is * cg;
        out.col(p.ground) = c * cg + is * ce;
    }
    return out;
}

MatrixXcd build_hamiltonian(const SpaceDims& dims, CavitySelector cavity) {
    MatrixXcd h = MatrixXcd::Zero(dims.dim(), dims.dim());
    for (const SectorPair& p : sector_pairs(dims, cavity)) {
        h(p.ground, p.excited) = p.rabi;
        h(p.excited, p.ground) = p.rabi;
    }
    return h;
}

StateVector expm_propagate(const StateVector& psi, CavitySelector cavity, PulseArea x) {
    guard_truncation(psi.amps(), psi.dims(), cavity);
    const MatrixXcd h = build_hamiltonian(psi.dims(), cavity);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    VectorXcd phases(h.rows());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases(i) = std::exp(kMinusI * x.value * es.eigenvalues()(i));
    }
    VectorXcd out = es.eigenvectors() *
                    phases.cwiseProduct(es.eigenvectors().adjoint() * psi.amps());
    return StateVector(psi.dims(), std::move(out));
}

}  // namespace cavbell
