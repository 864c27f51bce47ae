#pragma once

// Kinetic Monte Carlo for the classical Markov reduction of Model-1, 2d and
// 3d: single-flip Metropolis steps with the three-level flip rule, trajectory
// and ensemble runners, and the stochastic observables used by the
// experiments. Time is measured in sweeps (1 sweep = n_links attempted flips).

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dto/lattice.hpp"
#include "dto/rng.hpp"
#include "dto/spins.hpp"

namespace dto {

struct Model {
    int dim = 2;
    double h = 0.0;            // spin-flip perturbation strength
    double q1 = 1.0;           // amplitude for defect-creating flips (blocked)
    double q2 = 1.0 / std::sqrt(2.0);  // amplitude for defect-preserving flips
    double kappa_v = 1.0;      // vertex-mixing strength (exact generator only)
    double kappa_z = 1.0;      // dephasing strength (recorded; enforces diagonality)

    void validate() const {
        if (dim != 2 && dim != 3) throw std::invalid_argument("Model: dim must be 2 or 3");
        if (h < 0 || kappa_v < 0 || kappa_z < 0)
            throw std::invalid_argument("Model: strengths must be >= 0");
        if (!(q1 > 0) || !(q2 > 0)) throw std::invalid_argument("Model: q1, q2 must be > 0");
        if (!(q1 > q2)) throw std::invalid_argument("Model: loop shrinking needs q1 > q2");
    }
};

// Metropolis acceptance for a flip seen through the local field (sum of the
// incident plaquette values before the flip):
//   field > 0  (flip creates defects)  -> h / (q1^2 + h)
//   field = 0  (flip keeps the sum)    -> (q2^2 + h) / (q1^2 + h)
//   field < 0  (flip heals defects)    -> 1
inline double flip_probability(const Model& m, int field) {
    int k = m.dim == 2 ? 2 : 4;
    if (field < -k || field > k || (field & 1))
        throw std::invalid_argument("flip_probability: illegal field value");
    double denom = m.q1 * m.q1 + m.h;
    if (field > 0) return m.h / denom;
    if (field == 0) return (m.q2 * m.q2 + m.h) / denom;
    return 1.0;
}

namespace detail {
// acceptance probability indexed by the number of adjacent defect plaquettes
struct FlipTable {
    double p[5];
    FlipTable(const Model& m) {
        m.validate();
        int k = m.dim == 2 ? 2 : 4;
        for (int nd = 0; nd <= k; ++nd) p[nd] = flip_probability(m, k - 2 * nd);
    }
};
}  // namespace detail

inline bool mc_step(const Model& model, const detail::FlipTable& table, SpinConfig& cfg, Rng& rng) {
    const Torus& t = cfg.torus();
    int l = int(rng.bounded(std::uint32_t(t.n_links)));
    int nd = cfg.defects_at_link(l);
    bool accept = rng.uniform() < table.p[nd];
    if (accept) cfg.flip_link_unchecked(l);
    return accept;
}

inline bool mc_step(const Model& model, SpinConfig& cfg, Rng& rng) {
    detail::FlipTable table(model);
    return mc_step(model, table, cfg, rng);
}

inline void mc_sweep(const Model& model, const detail::FlipTable& table, SpinConfig& cfg, Rng& rng) {
    const Torus& t = cfg.torus();
    const int n = t.n_links;
    for (int i = 0; i < n; ++i) {
        int l = int(rng.bounded(std::uint32_t(n)));
        int nd = cfg.defects_at_link(l);
        if (rng.uniform() < table.p[nd]) cfg.flip_link_unchecked(l);
    }
}

// ---------------------------------------------------------------------------
// Trajectories

struct Schedule {
    long long total_sweeps = 0;
    long long measure_every = 1;  // sweeps between measurements
    long long burn_in = 0;        // sweeps before the first measurement window
    bool measure_defects = true;
    bool measure_sectors = false;
    bool measure_wrap = false;     // 3d wrapping flag
    std::vector<LoopSpec> wilson_loops;
    double stabilizer_mix_per_sweep = 0.0;  // optional A_v randomization, off by default
};

struct ObservableSeries {
    std::vector<long long> sweeps;            // strictly increasing stamps
    std::vector<std::string> channel_names;
    std::vector<std::vector<double>> channels; // channel-major, same length as sweeps
    std::uint64_t seed = 0;
    Model model;

    std::size_t n_points() const { return sweeps.size(); }
    const std::vector<double>& channel(const std::string& name) const {
        for (std::size_t i = 0; i < channel_names.size(); ++i)
            if (channel_names[i] == name) return channels[i];
        throw std::out_of_range("ObservableSeries: no channel " + name);
    }
};

inline double wilson_value(const SpinConfig& cfg, const LoopSpec& loop) {
    int par = 0;
    for (int32_t l : loop.links) par ^= cfg.spin_bit(l);
    return par ? -1.0 : 1.0;
}

inline ObservableSeries run_trajectory(const Model& model, SpinConfig cfg,
                                       const Schedule& sched, std::uint64_t seed) {
    model.validate();
    if (model.dim != cfg.torus().dim) throw std::invalid_argument("run_trajectory: dim mismatch");
    for (const auto& loop : sched.wilson_loops)
        for (int32_t l : loop.links)
            if (!cfg.torus().valid_link(l))
                throw std::invalid_argument("run_trajectory: loop/torus mismatch");

    detail::FlipTable table(model);
    Rng rng(seed);
    ObservableSeries out;
    out.seed = seed;
    out.model = model;
    if (sched.measure_defects) out.channel_names.push_back("defect_count");
    for (std::size_t i = 0; i < sched.wilson_loops.size(); ++i)
        out.channel_names.push_back("wilson_" + std::to_string(i));
    if (sched.measure_sectors)
        for (int a = 0; a < model.dim; ++a)
            out.channel_names.push_back("sector_" + std::string(1, char('x' + a)));
    if (sched.measure_wrap) out.channel_names.push_back("wrap");
    out.channels.resize(out.channel_names.size());

    auto measure = [&](long long sweep) {
        out.sweeps.push_back(sweep);
        std::size_t k = 0;
        if (sched.measure_defects) out.channels[k++].push_back(double(cfg.defect_count()));
        for (const auto& loop : sched.wilson_loops)
            out.channels[k++].push_back(wilson_value(cfg, loop));
        if (sched.measure_sectors)
            for (int a = 0; a < model.dim; ++a)
                out.channels[k++].push_back(double(sector_parity(cfg, a)));
        if (sched.measure_wrap)
            out.channels[k++].push_back(has_noncontractible_defect_loop(cfg) ? 1.0 : 0.0);
    };

    for (long long s = 0; s < sched.burn_in; ++s) mc_sweep(model, table, cfg, rng);
    for (long long s = 0; s < sched.total_sweeps; ++s) {
        mc_sweep(model, table, cfg, rng);
        if (sched.stabilizer_mix_per_sweep > 0 &&
            rng.uniform() < sched.stabilizer_mix_per_sweep)
            cfg.apply_vertex_stabilizer(int(rng.bounded(std::uint32_t(cfg.torus().n_vertices))));
        if (sched.measure_every > 0 && (s + 1) % sched.measure_every == 0) measure(s + 1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ensembles: trajectory i runs with seed mix_seed(base_seed, i); accumulation
// is slot-ordered, so results do not depend on thread count or scheduling.

struct EnsembleStats {
    std::vector<long long> sweeps;
    std::vector<std::string> channel_names;
    std::vector<std::vector<double>> mean;    // [channel][time]
    std::vector<std::vector<double>> stderr_; // [channel][time]; NaN when n_traj < 2
    int n_traj = 0;
    int bin_size = 1;  // trajectories are iid, binning over time not applied
};

template <typename Fn>
inline void parallel_for(int n, int n_threads, Fn&& fn) {
    if (n_threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(n_threads));
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

inline EnsembleStats run_ensemble(const Model& model,
                                  const std::function<SpinConfig(int)>& init_factory, int n_traj,
                                  std::uint64_t base_seed, const Schedule& sched,
                                  int n_threads = 1) {
    if (n_traj < 1) throw std::invalid_argument("run_ensemble: need n_traj >= 1");
    std::vector<ObservableSeries> slots(std::size_t(n_traj));
    parallel_for(n_traj, n_threads, [&](int i) {
        slots[std::size_t(i)] =
            run_trajectory(model, init_factory(i), sched, mix_seed(base_seed, std::uint64_t(i)));
    });

    EnsembleStats st;
    st.n_traj = n_traj;
    st.sweeps = slots[0].sweeps;
    st.channel_names = slots[0].channel_names;
    std::size_t nc = st.channel_names.size(), np = st.sweeps.size();
    st.mean.assign(nc, std::vector<double>(np, 0.0));
    st.stderr_.assign(nc, std::vector<double>(np, 0.0));
    for (const auto& s : slots) {
        if (s.sweeps != st.sweeps) throw std::logic_error("run_ensemble: ragged series");
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t p = 0; p < np; ++p) st.mean[c][p] += s.channels[c][p];
    }
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t p = 0; p < np; ++p) st.mean[c][p] /= n_traj;
    if (n_traj >= 2) {
        for (const auto& s : slots)
            for (std::size_t c = 0; c < nc; ++c)
                for (std::size_t p = 0; p < np; ++p) {
                    double d = s.channels[c][p] - st.mean[c][p];
                    st.stderr_[c][p] += d * d;
                }
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t p = 0; p < np; ++p)
                st.stderr_[c][p] = std::sqrt(st.stderr_[c][p] / (double(n_traj) * (n_traj - 1)));
    } else {
        for (auto& ch : st.stderr_)
            for (auto& v : ch) v = std::numeric_limits<double>::quiet_NaN();
    }
    return st;
}

// ---------------------------------------------------------------------------
// Binned statistics of a correlated time series: doubles the bin size until
// the standard error stabilizes (or the bin count gets too small).

struct BinnedStats {
    double mean = 0.0;
    double stderr_ = 0.0;
    int bin_size = 1;
    std::size_t n = 0;
};

inline BinnedStats binned_stats(const std::vector<double>& xs) {
    BinnedStats out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    out.mean = m;

    auto stderr_for = [&](std::size_t bin) {
        std::size_t nb = xs.size() / bin;
        if (nb < 2) return -1.0;
        double acc = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            double bm = 0.0;
            for (std::size_t i = 0; i < bin; ++i) bm += xs[b * bin + i];
            bm /= double(bin);
            acc += (bm - m) * (bm - m);
        }
        return std::sqrt(acc / (double(nb) * (nb - 1)));
    };

    std::size_t bin = 1;
    double prev = stderr_for(1);
    out.stderr_ = prev < 0 ? 0.0 : prev;
    while (true) {
        std::size_t nb2 = xs.size() / (bin * 2);
        if (nb2 < 16) break;
        double next = stderr_for(bin * 2);
        bin *= 2;
        if (next <= prev * 1.05) {  // plateau: autocorrelation resolved
            out.stderr_ = std::max(prev, next);
            break;
        }
        prev = next;
        out.stderr_ = next;
    }
    out.bin_size = int(bin);
    return out;
}

// ---------------------------------------------------------------------------
// Wilson-loop estimators

struct WilsonEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int bin_size = 1;
    std::size_t n_measure = 0;
};

struct McParams {
    long long burn_in = -1;  // < 0: default 10 L^2 sweeps
    long long measure_sweeps = 10000;
    long long measure_every = 1;
    std::uint64_t seed = 1;
};

inline long long default_burn_in(const Torus& t) {
    long long l = t.ext[0];
    return 10 * l * l;
}

// single-loop estimator: time average of the +-1 loop product after burn-in
inline WilsonEstimate estimate_wilson(const Model& model, const Torus& t, const LoopSpec& loop,
                                      const McParams& mc) {
    model.validate();
    for (int32_t l : loop.links)
        if (!t.valid_link(l)) throw std::invalid_argument("estimate_wilson: loop/torus mismatch");
    detail::FlipTable table(model);
    Rng rng(mc.seed);
    SpinConfig cfg = all_up(t);
    long long burn = mc.burn_in >= 0 ? mc.burn_in : default_burn_in(t);
    for (long long s = 0; s < burn; ++s) mc_sweep(model, table, cfg, rng);
    std::vector<double> samples;
    samples.reserve(std::size_t(mc.measure_sweeps / std::max<long long>(1, mc.measure_every)));
    for (long long s = 0; s < mc.measure_sweeps; ++s) {
        mc_sweep(model, table, cfg, rng);
        if ((s + 1) % mc.measure_every == 0) samples.push_back(wilson_value(cfg, loop));
    }
    auto bs = binned_stats(samples);
    return {bs.mean, bs.stderr_, bs.bin_size, samples.size()};
}

// translate-averaged estimator: measures every lattice translate (and in 3d
// every plane orientation) of each w x h rectangle per measurement, then bins
// the scalar series. Same expectation as estimate_wilson, far lower variance.
inline std::vector<WilsonEstimate> estimate_wilson_rectangles(
    const Model& model, const Torus& t, const std::vector<std::pair<int, int>>& sizes,
    const McParams& mc) {
    model.validate();
    detail::FlipTable table(model);
    Rng rng(mc.seed);
    SpinConfig cfg = all_up(t);
    long long burn = mc.burn_in >= 0 ? mc.burn_in : default_burn_in(t);
    for (long long s = 0; s < burn; ++s) mc_sweep(model, table, cfg, rng);

    // all plane axis pairs: {(0,1)} in 2d; {(0,1),(1,2),(2,0)} in 3d
    std::vector<std::pair<int, int>> planes;
    if (t.dim == 2) planes = {{0, 1}};
    else planes = {{0, 1}, {1, 2}, {2, 0}};
    std::vector<std::vector<LoopSpec>> loops(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k)
        for (auto [u, v] : planes)
            for (int s = 0; s < t.n_sites; ++s)
                loops[k].push_back(rectangular_loop(t, s, u, v, sizes[k].first, sizes[k].second));

    std::vector<std::vector<double>> series(sizes.size());
    for (long long s = 0; s < mc.measure_sweeps; ++s) {
        mc_sweep(model, table, cfg, rng);
        if ((s + 1) % mc.measure_every != 0) continue;
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            double acc = 0.0;
            for (const auto& loop : loops[k]) acc += wilson_value(cfg, loop);
            series[k].push_back(acc / double(loops[k].size()));
        }
    }
    std::vector<WilsonEstimate> out;
    for (auto& xs : series) {
        auto bs = binned_stats(xs);
        out.push_back({bs.mean, bs.stderr_, bs.bin_size, xs.size()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Relaxation observables

inline constexpr long long kLifetimeTimeout = -1;

// first multiple of tau0 sweeps at which no non-contractible defect loop
// remains; kLifetimeTimeout if none found within max_sweeps
inline long long measure_lifetime(const Model& model, SpinConfig cfg, long long tau0,
                                  long long max_sweeps, std::uint64_t seed) {
    model.validate();
    if (model.dim != 3 || cfg.torus().dim != 3)
        throw std::invalid_argument("measure_lifetime: 3d only");
    if (tau0 < 1) throw std::invalid_argument("measure_lifetime: tau0 must be >= 1");
    detail::FlipTable table(model);
    Rng rng(seed);
    if (!has_noncontractible_defect_loop(cfg)) return 0;
    for (long long s = tau0; s <= max_sweeps; s += tau0) {
        for (long long k = 0; k < tau0; ++k) mc_sweep(model, table, cfg, rng);
        if (!has_noncontractible_defect_loop(cfg)) return s;
    }
    return kLifetimeTimeout;
}

// series of Delta D_m(t) = (P_tot(t) - baseline) / L^3
inline ObservableSeries defect_density_series(const Model& model, SpinConfig cfg,
                                              const Schedule& sched, double p_tot_baseline,
                                              std::uint64_t seed) {
    if (model.dim != 3) throw std::invalid_argument("defect_density_series: 3d only");
    if (sched.total_sweeps < 0) throw std::invalid_argument("defect_density_series: bad schedule");
    const double vol = double(cfg.torus().n_sites);
    Schedule s = sched;
    s.measure_defects = true;
    ObservableSeries out = run_trajectory(model, std::move(cfg), s, seed);
    ObservableSeries dd;
    dd.sweeps = out.sweeps;
    dd.seed = seed;
    dd.model = model;
    dd.channel_names = {"delta_dm"};
    dd.channels.resize(1);
    for (double p : out.channel("defect_count"))
        dd.channels[0].push_back((p - p_tot_baseline) / vol);
    return dd;
}

// sweeps until the defect set is empty, starting from a patch at h = 0
inline long long shrink_time(const Model& model, SpinConfig cfg, long long max_sweeps,
                             std::uint64_t seed) {
    model.validate();
    if (model.h != 0) throw std::invalid_argument("shrink_time: defined at h = 0");
    detail::FlipTable table(model);
    Rng rng(seed);
    if (cfg.defect_count() == 0) return 0;
    for (long long s = 1; s <= max_sweeps; ++s) {
        mc_sweep(model, table, cfg, rng);
        if (cfg.defect_count() == 0) return s;
    }
    return kLifetimeTimeout;
}

// late-time plateau estimate of P_tot at the given h: independent equilibrated
// run from the clean state, averaged over the last quarter
inline double estimate_p_tot_baseline(const Model& model, const Torus& t, long long sweeps,
                                      std::uint64_t seed) {
    detail::FlipTable table(model);
    Rng rng(seed);
    SpinConfig cfg = all_up(t);
    long long tail_from = sweeps - sweeps / 4;
    double acc = 0.0;
    long long n = 0;
    for (long long s = 1; s <= sweeps; ++s) {
        mc_sweep(model, table, cfg, rng);
        if (s > tail_from) { acc += cfg.defect_count(); ++n; }
    }
    return n ? acc / double(n) : 0.0;
}

}  // namespace dto
