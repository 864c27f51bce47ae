#pragma once

// Brute-force small-instance ground truth: exact steady-state enumeration on
// tiny 2d tori, residual checks against a generator, marginal entropies of the
// enumerated diagonal state, and the L=2 quantum reduced-state entropy for the
// unperturbed Model-2 projector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dto/analytics.hpp"
#include "dto/lattice.hpp"

namespace dto::oracle {

// XOR masks over links for every plaquette boundary (used to read defect
// patterns straight off a packed configuration)
inline std::vector<std::uint32_t> plaquette_masks(const Torus& t) {
    if (t.n_links > 32) throw std::invalid_argument("plaquette_masks: too many links");
    std::vector<std::uint32_t> masks(t.n_plaquettes, 0);
    for (int p = 0; p < t.n_plaquettes; ++p)
        for (int32_t l : boundary_links(t, p)) masks[p] ^= (1u << l);
    return masks;
}

inline int defect_count_of(std::uint32_t config, const std::vector<std::uint32_t>& masks) {
    int d = 0;
    for (std::uint32_t m : masks) d += __builtin_popcount(config & m) & 1;
    return d;
}

// Exact steady state of the perturbed 2d model: weight(config) ~ beta^(#defects),
// which reproduces the triple-sum construction because stabilizer orbits
// exhaust the configurations at a fixed defect pattern. At h = 0 the support
// shrinks to the closed-loop configurations.
inline std::vector<double> exact_steady_state_2d(int L, double h) {
    if (L < 2 || L > 3) throw std::invalid_argument("exact_steady_state_2d: L must be 2 or 3");
    if (h < 0) throw std::invalid_argument("exact_steady_state_2d: h must be >= 0");
    Torus t = build_torus(2, {L, L});
    auto masks = plaquette_masks(t);
    const std::size_t dim = std::size_t(1) << t.n_links;
    const double beta = analytics::beta_of_h(h);
    std::vector<double> p(dim);
    long double total = 0.0L;
    for (std::size_t c = 0; c < dim; ++c) {
        int d = defect_count_of(std::uint32_t(c), masks);
        long double w = (beta == 0.0) ? (d == 0 ? 1.0L : 0.0L) : std::pow((long double)beta, d);
        p[c] = double(w);
        total += w;
    }
    for (auto& x : p) x /= double(total);
    return p;
}

// ---------------------------------------------------------------------------
// Residuals against a generator (any Eigen sparse matrix in the same basis,
// column convention: gen(r, c) = rate c -> r)

inline double steady_state_residual(const Eigen::SparseMatrix<double>& gen,
                                    const std::vector<double>& p) {
    if (gen.rows() != Eigen::Index(p.size()))
        throw std::invalid_argument("steady_state_residual: dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> v(p.data(), Eigen::Index(p.size()));
    return (gen * v).lpNorm<Eigen::Infinity>();
}

// max over stored transition pairs of |G_ab p(b) - G_ba p(a)|
inline double detailed_balance_residual(const Eigen::SparseMatrix<double>& gen,
                                        const std::vector<double>& p) {
    if (gen.rows() != Eigen::Index(p.size()))
        throw std::invalid_argument("detailed_balance_residual: dimension mismatch");
    double worst = 0.0;
    for (int col = 0; col < gen.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(gen, col); it; ++it) {
            if (it.row() == it.col()) continue;
            double flux = it.value() * p[std::size_t(col)] -
                          gen.coeff(col, it.row()) * p[std::size_t(it.row())];
            worst = std::max(worst, std::abs(flux));
        }
    return worst;
}

// ---------------------------------------------------------------------------
// Entropies

// Shannon entropy (nats) of the marginal of `p` on the given links
inline double entropy_bruteforce(const std::vector<double>& p,
                                 const std::vector<int32_t>& region_links, int n_links) {
    if (region_links.empty()) return 0.0;
    for (int32_t l : region_links)
        if (l < 0 || l >= n_links) throw std::out_of_range("entropy_bruteforce: bad link id");
    std::vector<double> marg(std::size_t(1) << region_links.size(), 0.0);
    for (std::size_t c = 0; c < p.size(); ++c) {
        std::size_t key = 0;
        for (std::size_t b = 0; b < region_links.size(); ++b)
            key |= ((c >> region_links[b]) & 1u) << b;
        marg[key] += p[c];
    }
    double s = 0.0;
    for (double q : marg)
        if (q > 0) s -= q * std::log(q);
    return s;
}

// Unperturbed Model-2 steady state on the L=2 torus (8 spins): the projected
// state (1/|G|) sum_{g,g'} g|up><up|g' is the pure toric ground state. Builds
// the reduced density matrix of `region_links` and returns its von Neumann
// entropy.
inline double model2_unperturbed_entropy(const std::vector<int32_t>& region_links) {
    Torus t = build_torus(2, {2, 2});
    if (region_links.empty()) return 0.0;
    for (int32_t l : region_links)
        if (!t.valid_link(l)) throw std::out_of_range("model2_unperturbed_entropy: bad link id");

    // stabilizer orbit of |up...up>: XOR masks of all products of vertex stars
    std::vector<std::uint32_t> star_mask(t.n_vertices, 0);
    for (int v = 0; v < t.n_vertices; ++v)
        for (int32_t l : star_links(t, v)) star_mask[v] ^= (1u << l);
    std::vector<std::uint32_t> orbit;
    for (std::uint32_t sel = 0; sel < (1u << t.n_vertices); ++sel) {
        std::uint32_t m = 0;
        for (int v = 0; v < t.n_vertices; ++v)
            if ((sel >> v) & 1) m ^= star_mask[v];
        orbit.push_back(m);
    }
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());

    std::uint32_t amask = 0;
    for (int32_t l : region_links) amask |= (1u << l);
    const double amp = 1.0 / std::sqrt(double(orbit.size()));

    // rho_A[x, x'] = sum_{configs with equal Abar bits} psi(x,e) psi(x',e)
    std::vector<std::uint32_t> keys;
    for (std::uint32_t c : orbit) keys.push_back(c & amask);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    auto key_index = [&](std::uint32_t k) {
        return std::size_t(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
    };
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(Eigen::Index(keys.size()), Eigen::Index(keys.size()));
    for (std::uint32_t c1 : orbit)
        for (std::uint32_t c2 : orbit)
            if ((c1 & ~amask) == (c2 & ~amask))
                rho(Eigen::Index(key_index(c1 & amask)), Eigen::Index(key_index(c2 & amask))) +=
                    amp * amp;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double lam = es.eigenvalues()[i];
        if (lam > 1e-14) s -= lam * std::log(lam);
    }
    return s;
}

}  // namespace dto::oracle
