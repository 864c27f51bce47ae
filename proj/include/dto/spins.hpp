#pragma once

// Spin configurations in the sigma^z eigenbasis. Bit = 1 means sigma^z = -1.
// Plaquette values are cached as a defect bitmap (bit = 1 means B_p = -1) and
// updated incrementally on every flip; flips are O(plaquettes per link).

#include <cstdint>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "dto/lattice.hpp"

namespace dto {

class SpinConfig {
  public:
    explicit SpinConfig(const Torus& t)
        : torus_(&t),
          spin_(words(t.n_links), 0),
          defect_(words(t.n_plaquettes), 0),
          defect_count_(0) {}

    const Torus& torus() const { return *torus_; }

    int spin(int l) const {
        if (!torus_->valid_link(l)) throw std::out_of_range("spin: bad link id");
        return test(spin_, l) ? -1 : +1;
    }
    bool spin_bit(int l) const { return test(spin_, l); }

    int plaquette(int p) const { return test(defect_, p) ? -1 : +1; }
    bool defect_bit(int p) const { return test(defect_, p); }
    int defect_count() const { return defect_count_; }
    // 3d: each defect plaquette is one dual edge, so this is the total loop length
    int p_tot() const { return defect_count_; }

    void flip_link(int l) {
        if (!torus_->valid_link(l)) throw std::out_of_range("flip_link: bad link id");
        flip_link_unchecked(l);
    }

    void flip_link_unchecked(int l) {
        toggle(spin_, l);
        const int32_t* ps = torus_->plaqs_of_link(l);
        for (int k = 0; k < torus_->plaqs_per_link; ++k) {
            defect_count_ += test(defect_, ps[k]) ? -1 : +1;
            toggle(defect_, ps[k]);
        }
    }

    // sum of the incident plaquette values: {-2,0,2} in 2d, {-4..4} in 3d
    int local_field(int l) const {
        if (!torus_->valid_link(l)) throw std::out_of_range("local_field: bad link id");
        return local_field_unchecked(l);
    }
    int local_field_unchecked(int l) const {
        const int32_t* ps = torus_->plaqs_of_link(l);
        int nd = 0;
        for (int k = 0; k < torus_->plaqs_per_link; ++k) nd += test(defect_, ps[k]);
        return torus_->plaqs_per_link - 2 * nd;
    }
    int defects_at_link(int l) const {
        const int32_t* ps = torus_->plaqs_of_link(l);
        int nd = 0;
        for (int k = 0; k < torus_->plaqs_per_link; ++k) nd += test(defect_, ps[k]);
        return nd;
    }

    std::vector<int32_t> defect_plaquettes() const {
        std::vector<int32_t> out;
        out.reserve(defect_count_);
        for (int p = 0; p < torus_->n_plaquettes; ++p)
            if (test(defect_, p)) out.push_back(p);
        return out;
    }

    // recompute every plaquette from the spin bits (cache validation path)
    std::vector<char> plaquettes_from_scratch() const {
        std::vector<char> neg(torus_->n_plaquettes, 0);
        for (int p = 0; p < torus_->n_plaquettes; ++p) {
            const int32_t* q = torus_->links_of_plaq(p);
            int c = test(spin_, q[0]) + test(spin_, q[1]) + test(spin_, q[2]) + test(spin_, q[3]);
            neg[p] = char(c & 1);
        }
        return neg;
    }

    void apply_vertex_stabilizer(int v) {
        if (!torus_->valid_vertex(v)) throw std::out_of_range("apply_vertex_stabilizer: bad vertex");
        const int32_t* star = torus_->star_of_vertex(v);
        for (int k = 0; k < torus_->links_per_vertex; ++k) flip_link_unchecked(star[k]);
    }

    // Open string on the dual lattice: a sequence of pairwise-adjacent
    // plaquettes; flips the shared link of each consecutive pair, creating
    // defects at the two endpoint plaquettes.
    void apply_x_string(const std::vector<int32_t>& dual_path) {
        if (dual_path.size() < 2) throw std::invalid_argument("apply_x_string: need >= 2 plaquettes");
        for (std::size_t i = 0; i + 1 < dual_path.size(); ++i)
            flip_link(shared_link(dual_path[i], dual_path[i + 1]));
    }

    std::uint64_t word(std::size_t w) const { return spin_[w]; }
    std::size_t n_words() const { return spin_.size(); }

    bool operator==(const SpinConfig& o) const { return spin_ == o.spin_; }

  private:
    static std::size_t words(int bits) { return std::size_t(bits + 63) / 64; }
    static bool test(const std::vector<std::uint64_t>& v, int i) {
        return (v[std::size_t(i) >> 6] >> (i & 63)) & 1;
    }
    static void toggle(std::vector<std::uint64_t>& v, int i) {
        v[std::size_t(i) >> 6] ^= (std::uint64_t(1) << (i & 63));
    }
    int shared_link(int p1, int p2) const {
        if (!torus_->valid_plaq(p1) || !torus_->valid_plaq(p2))
            throw std::out_of_range("apply_x_string: bad plaquette id");
        const int32_t* a = torus_->links_of_plaq(p1);
        const int32_t* b = torus_->links_of_plaq(p2);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (a[i] == b[j]) return a[i];
        throw std::invalid_argument("apply_x_string: plaquettes are not adjacent");
    }

    const Torus* torus_;
    std::vector<std::uint64_t> spin_;
    std::vector<std::uint64_t> defect_;
    int defect_count_;
};

inline SpinConfig all_up(const Torus& t) { return SpinConfig(t); }

// ---------------------------------------------------------------------------
// Logical ('t Hooft) operators

enum class LogicalKind { WDualLoop, VMembrane };

// W dual loop (2d): flips the row of transverse links crossed by a straight
// non-contractible dual loop along `axis`. V membrane (3d): flips all links
// normal to the given plane in one slab; `axis` names the plane normal.
inline void apply_logical(SpinConfig& cfg, LogicalKind kind, int axis, int offset = 0) {
    const Torus& t = cfg.torus();
    if (kind == LogicalKind::WDualLoop) {
        if (t.dim != 2) throw std::invalid_argument("apply_logical: W dual loop is 2d only");
        if (axis != 0 && axis != 1) throw std::invalid_argument("apply_logical: bad axis");
        int b = 1 - axis;  // dual loop along `axis` crosses links of the other axis
        for (int i = 0; i < t.ext[axis]; ++i) {
            int s = t.shift(t.shift(0, 1 - axis, offset), axis, i);
            cfg.flip_link(t.link(b, s));
        }
    } else {
        if (t.dim != 3) throw std::invalid_argument("apply_logical: V membrane is 3d only");
        if (axis < 0 || axis >= 3) throw std::invalid_argument("apply_logical: bad plane normal");
        for (int s = 0; s < t.n_sites; ++s)
            if (t.coords(s)[axis] == (offset % t.ext[axis]))
                cfg.flip_link(t.link(axis, s));
    }
}

// Product of sigma^z along the straight line of `axis` links through the
// origin. Conserved exactly by vertex stabilizers; flips on the line toggle it.
inline int sector_parity(const SpinConfig& cfg, int axis) {
    const Torus& t = cfg.torus();
    if (axis < 0 || axis >= t.dim) throw std::invalid_argument("sector_parity: bad axis");
    int s = 0, par = 0;
    for (int i = 0; i < t.ext[axis]; ++i) {
        par ^= cfg.spin_bit(t.link(axis, s));
        s = t.shift(s, axis, 1);
    }
    return par ? -1 : +1;
}

// 3d: parity of defect plaquettes with normal `axis` in one transverse slice
// (= parity of dual-loop crossings of that slice; slice independent).
inline int winding_parity(const SpinConfig& cfg, int axis, int slice = 0) {
    const Torus& t = cfg.torus();
    if (t.dim != 3) throw std::invalid_argument("winding_parity: 3d only");
    if (axis < 0 || axis >= 3) throw std::invalid_argument("winding_parity: bad axis");
    int par = 0;
    for (int s = 0; s < t.n_sites; ++s)
        if (t.coords(s)[axis] == slice) par ^= cfg.defect_bit(t.plaq(axis, s));
    return par;
}

// 3d: true iff some connected component of the dual defect-edge graph wraps
// the torus. Detected by Z^3 lifts along a BFS tree: a non-tree edge whose
// lifted endpoints disagree by a nonzero multiple of an extent closes a
// non-contractible cycle.
inline bool has_noncontractible_defect_loop(const SpinConfig& cfg) {
    const Torus& t = cfg.torus();
    if (t.dim != 3) throw std::invalid_argument("has_noncontractible_defect_loop: 3d only");
    if (cfg.defect_count() == 0) return false;
    int minext = std::min({t.ext[0], t.ext[1], t.ext[2]});
    if (cfg.defect_count() < minext) return false;  // a wrapping loop has length >= min extent

    // adjacency: dual vertex (cube) -> incident defect edges
    struct Lift { int x, y, z; };
    std::vector<int32_t> edges = cfg.defect_plaquettes();
    std::vector<std::vector<int32_t>> inc(t.n_sites);
    for (int32_t p : edges) {
        inc[t.plaq_cube[std::size_t(p) * 2]].push_back(p);
        inc[t.plaq_cube[std::size_t(p) * 2 + 1]].push_back(p);
    }
    std::vector<char> visited(t.n_sites, 0);
    std::vector<Lift> lift(t.n_sites);

    for (int32_t e0 : edges) {
        int root = t.plaq_cube[std::size_t(e0) * 2];
        if (visited[root]) continue;
        visited[root] = 1;
        auto c = t.coords(root);
        lift[root] = {c[0], c[1], c[2]};
        std::deque<int32_t> queue{root};
        while (!queue.empty()) {
            int cube = queue.front();
            queue.pop_front();
            for (int32_t p : inc[cube]) {
                int a = t.plaq_cube[std::size_t(p) * 2 + 1];  // cube on the -normal side
                int b = t.plaq_cube[std::size_t(p) * 2];
                int w = t.plaq_normal(p);
                // edge goes from a to b in +w direction
                int from = cube, to = (cube == a) ? b : a;
                int dir = (cube == a) ? +1 : -1;
                Lift nl = lift[from];
                (w == 0 ? nl.x : w == 1 ? nl.y : nl.z) += dir;
                if (!visited[to]) {
                    visited[to] = 1;
                    lift[to] = nl;
                    queue.push_back(to);
                } else {
                    // lift mismatch is always a multiple of the extents; nonzero => wrap
                    const Lift& ol = lift[to];
                    if (nl.x != ol.x || nl.y != ol.y || nl.z != ol.z) return true;
                }
            }
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Canonical 3d initial states

// Open membrane in the given plane (normal axis `normal`): flips all links of
// axis `normal` at slab coordinate 0 whose first in-plane coordinate spans the
// full extent and whose second spans [0, width). width = extent closes the
// membrane (type-A); width < extent leaves two non-contractible boundary loops
// (type-B) of total length 2 * extent.
inline SpinConfig build_typeb_strip(const Torus& t, int normal, int width) {
    if (t.dim != 3) throw std::invalid_argument("build_typeb_strip: 3d only");
    if (normal < 0 || normal >= 3) throw std::invalid_argument("build_typeb_strip: bad plane");
    int u = (normal == 0) ? 1 : 0;       // spans full extent
    int v = (normal == 2) ? 1 : 2;       // spans [0, width)
    if (width < 1 || width > t.ext[v])
        throw std::invalid_argument("build_typeb_strip: width must be in [1, extent]");
    SpinConfig cfg(t);
    for (int j = 0; j < width; ++j)
        for (int i = 0; i < t.ext[u]; ++i) {
            int s = t.shift(t.shift(0, u, i), v, j);
            cfg.flip_link(t.link(normal, s));
        }
    return cfg;
}

// R x R open membrane patch in the xy plane: one contractible boundary loop of
// length 4R. R = 0 returns the clean configuration.
inline SpinConfig build_square_patch(const Torus& t, int r) {
    if (t.dim != 3) throw std::invalid_argument("build_square_patch: 3d only");
    if (r < 0 || r >= std::min(t.ext[0], t.ext[1]))
        throw std::invalid_argument("build_square_patch: R must fit inside extents");
    SpinConfig cfg(t);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < r; ++i)
            cfg.flip_link(t.link(2, t.site(i, j, 0)));
    return cfg;
}

// ---------------------------------------------------------------------------
// Snapshot serialization: "T<dim>:<Lx>x<Ly>[x<Lz>]:<hex>" with link bits packed
// little-endian, 4 bits per hex digit.

inline std::string to_hex(const SpinConfig& cfg) {
    const Torus& t = cfg.torus();
    std::string s = "T" + std::to_string(t.dim) + ":";
    for (int a = 0; a < t.dim; ++a) s += (a ? "x" : "") + std::to_string(t.ext[a]);
    s += ":";
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < t.n_links; i += 4) {
        int nib = 0;
        for (int b = 0; b < 4 && i + b < t.n_links; ++b)
            nib |= int(cfg.spin_bit(i + b)) << b;
        s += digits[nib];
    }
    return s;
}

inline SpinConfig from_hex(const Torus& t, const std::string& s) {
    std::string expect = "T" + std::to_string(t.dim) + ":";
    for (int a = 0; a < t.dim; ++a) expect += (a ? "x" : "") + std::to_string(t.ext[a]);
    expect += ":";
    if (s.rfind(expect, 0) != 0) throw std::invalid_argument("from_hex: header mismatch");
    std::string hex = s.substr(expect.size());
    if (int(hex.size()) != (t.n_links + 3) / 4) throw std::invalid_argument("from_hex: bad length");
    SpinConfig cfg(t);
    for (int i = 0; i < t.n_links; ++i) {
        char c = hex[std::size_t(i) / 4];
        int nib = (c >= 'a') ? c - 'a' + 10 : c - '0';
        if ((nib >> (i & 3)) & 1) cfg.flip_link(i);
    }
    return cfg;
}

}  // namespace dto
