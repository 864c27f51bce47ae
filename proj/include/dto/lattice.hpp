#pragma once

// Periodic square (2d) / cubic (3d) lattice geometry with spins on links.
//
// Index conventions (stable across runs, needed for reproducible seeds and
// golden files):
//   site    = x + Lx*(y + Ly*z)             (z = 0 in 2d)
//   link    = axis * n_sites + site          axis-link at `site` points in +axis
//   plaq 2d = site                           face spanned by (x,y) cornered at site
//   plaq 3d = normal * n_sites + site        face spanned by the two axes != normal
//   cube 3d = site                           unit cell [site, site+1]^3 (dual vertex)

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dto {

using std::int32_t;

struct Torus {
    int dim = 2;
    std::array<int, 3> ext{1, 1, 1};  // extents per axis, ext[a] = 1 for a >= dim
    int n_sites = 0;
    int n_vertices = 0;
    int n_links = 0;
    int n_plaquettes = 0;
    int plaqs_per_link = 2;   // 2 in 2d, 4 in 3d
    int links_per_vertex = 4; // 4 in 2d, 6 in 3d

    int site(int x, int y, int z = 0) const {
        return x + ext[0] * (y + ext[1] * z);
    }
    std::array<int, 3> coords(int s) const {
        return {s % ext[0], (s / ext[0]) % ext[1], s / (ext[0] * ext[1])};
    }
    int wrap(int c, int axis) const {
        int L = ext[axis];
        c %= L;
        return c < 0 ? c + L : c;
    }
    // site shifted by `delta` along `axis` (periodic)
    int shift(int s, int axis, int delta) const {
        auto c = coords(s);
        c[axis] = wrap(c[axis] + delta, axis);
        return site(c[0], c[1], c[2]);
    }

    int link(int axis, int s) const { return axis * n_sites + s; }
    int link_axis(int l) const { return l / n_sites; }
    int link_site(int l) const { return l % n_sites; }

    // 2d: orientation is always 0; 3d: `normal` is the axis orthogonal to the face.
    int plaq(int normal, int s) const { return dim == 2 ? s : normal * n_sites + s; }
    int plaq_normal(int p) const { return dim == 2 ? 2 : p / n_sites; }
    int plaq_site(int p) const { return dim == 2 ? p : p % n_sites; }

    bool valid_link(int l) const { return l >= 0 && l < n_links; }
    bool valid_vertex(int v) const { return v >= 0 && v < n_vertices; }
    bool valid_plaq(int p) const { return p >= 0 && p < n_plaquettes; }

    // Flat incidence tables, filled by build_torus().
    std::vector<int32_t> link_plaq;    // n_links * plaqs_per_link
    std::vector<int32_t> vertex_star;  // n_vertices * links_per_vertex
    std::vector<int32_t> plaq_link;    // n_plaquettes * 4
    std::vector<int32_t> plaq_cube;    // 3d only: n_plaquettes * 2 (dual edge endpoints)

    const int32_t* plaqs_of_link(int l) const { return &link_plaq[std::size_t(l) * plaqs_per_link]; }
    const int32_t* star_of_vertex(int v) const { return &vertex_star[std::size_t(v) * links_per_vertex]; }
    const int32_t* links_of_plaq(int p) const { return &plaq_link[std::size_t(p) * 4]; }
};

inline Torus build_torus(int dim, const std::vector<int>& extents) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("build_torus: dim must be 2 or 3");
    if (int(extents.size()) != dim)
        throw std::invalid_argument("build_torus: extents size must match dim");
    for (int L : extents)
        if (L < 2) throw std::invalid_argument("build_torus: extents must be >= 2");

    Torus t;
    t.dim = dim;
    for (int a = 0; a < dim; ++a) t.ext[a] = extents[a];
    t.n_sites = t.ext[0] * t.ext[1] * t.ext[2];
    t.n_vertices = t.n_sites;
    t.n_links = dim * t.n_sites;
    t.n_plaquettes = (dim == 2 ? 1 : 3) * t.n_sites;
    t.plaqs_per_link = dim == 2 ? 2 : 4;
    t.links_per_vertex = 2 * dim;

    // plaquette boundaries: face with normal w spans axes u < v at corner s
    t.plaq_link.assign(std::size_t(t.n_plaquettes) * 4, -1);
    for (int p = 0; p < t.n_plaquettes; ++p) {
        int w = dim == 2 ? 2 : t.plaq_normal(p);
        int s = t.plaq_site(p);
        int u = (w == 0) ? 1 : 0;
        int v = (w == 2) ? 1 : 2;
        if (dim == 2) { u = 0; v = 1; }
        int32_t* out = &t.plaq_link[std::size_t(p) * 4];
        out[0] = t.link(u, s);
        out[1] = t.link(u, t.shift(s, v, 1));
        out[2] = t.link(v, s);
        out[3] = t.link(v, t.shift(s, u, 1));
    }

    // link -> incident plaquettes: for each axis b != a, faces at s and s - b
    t.link_plaq.assign(std::size_t(t.n_links) * t.plaqs_per_link, -1);
    for (int l = 0; l < t.n_links; ++l) {
        int a = t.link_axis(l), s = t.link_site(l);
        int32_t* out = &t.link_plaq[std::size_t(l) * t.plaqs_per_link];
        int k = 0;
        for (int b = 0; b < dim; ++b) {
            if (b == a) continue;
            int w = 3 - a - b;  // third axis (2d: unused)
            out[k++] = t.plaq(w, s);
            out[k++] = t.plaq(w, t.shift(s, b, -1));
        }
    }

    // vertex stars
    t.vertex_star.assign(std::size_t(t.n_vertices) * t.links_per_vertex, -1);
    for (int s = 0; s < t.n_vertices; ++s) {
        int32_t* out = &t.vertex_star[std::size_t(s) * t.links_per_vertex];
        int k = 0;
        for (int a = 0; a < dim; ++a) {
            out[k++] = t.link(a, s);
            out[k++] = t.link(a, t.shift(s, a, -1));
        }
    }

    // 3d: dual edge of a face joins the two cubes it separates
    if (dim == 3) {
        t.plaq_cube.assign(std::size_t(t.n_plaquettes) * 2, -1);
        for (int p = 0; p < t.n_plaquettes; ++p) {
            int w = t.plaq_normal(p), s = t.plaq_site(p);
            t.plaq_cube[std::size_t(p) * 2] = s;
            t.plaq_cube[std::size_t(p) * 2 + 1] = t.shift(s, w, -1);
        }
    }
    return t;
}

inline std::vector<int32_t> incident_plaquettes(const Torus& t, int l) {
    if (!t.valid_link(l)) throw std::out_of_range("incident_plaquettes: bad link id");
    const int32_t* p = t.plaqs_of_link(l);
    return std::vector<int32_t>(p, p + t.plaqs_per_link);
}

inline std::vector<int32_t> star_links(const Torus& t, int v) {
    if (!t.valid_vertex(v)) throw std::out_of_range("star_links: bad vertex id");
    const int32_t* p = t.star_of_vertex(v);
    return std::vector<int32_t>(p, p + t.links_per_vertex);
}

inline std::vector<int32_t> boundary_links(const Torus& t, int p) {
    if (!t.valid_plaq(p)) throw std::out_of_range("boundary_links: bad plaquette id");
    const int32_t* q = t.links_of_plaq(p);
    return std::vector<int32_t>(q, q + 4);
}

// ---------------------------------------------------------------------------
// Loops

enum class LoopKind { ContractibleRectangle, StraightNoncontractible };

struct LoopSpec {
    LoopKind kind;
    std::vector<int32_t> links;              // single closed cycle, in order
    std::vector<int32_t> enclosed_plaquettes; // rectangles only
    int perimeter() const { return int(links.size()); }
    int area() const { return int(enclosed_plaquettes.size()); }
};

// Axis-aligned w x h rectangle of plaquettes cornered at `corner`, in the plane
// spanned by (axis_u, axis_v). Rejects spans that reach an extent (those would
// wrap into a cylinder, not a contractible loop).
inline LoopSpec rectangular_loop(const Torus& t, int corner, int axis_u, int axis_v,
                                 int w, int h) {
    if (axis_u == axis_v || axis_u < 0 || axis_v < 0 || axis_u >= t.dim || axis_v >= t.dim)
        throw std::invalid_argument("rectangular_loop: bad plane axes");
    if (w < 1 || h < 1 || w >= t.ext[axis_u] || h >= t.ext[axis_v])
        throw std::invalid_argument("rectangular_loop: widths must fit strictly inside extents");
    if (corner < 0 || corner >= t.n_sites) throw std::out_of_range("rectangular_loop: bad corner");

    LoopSpec loop;
    loop.kind = LoopKind::ContractibleRectangle;
    loop.links.reserve(2 * (w + h));
    int s = corner;
    for (int i = 0; i < w; ++i) { loop.links.push_back(t.link(axis_u, s)); s = t.shift(s, axis_u, 1); }
    for (int j = 0; j < h; ++j) { loop.links.push_back(t.link(axis_v, s)); s = t.shift(s, axis_v, 1); }
    for (int i = 0; i < w; ++i) { s = t.shift(s, axis_u, -1); loop.links.push_back(t.link(axis_u, s)); }
    for (int j = 0; j < h; ++j) { s = t.shift(s, axis_v, -1); loop.links.push_back(t.link(axis_v, s)); }

    int normal = t.dim == 2 ? 2 : 3 - axis_u - axis_v;
    loop.enclosed_plaquettes.reserve(std::size_t(w) * h);
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            int q = t.shift(t.shift(corner, axis_u, i), axis_v, j);
            loop.enclosed_plaquettes.push_back(t.plaq(normal, q));
        }
    return loop;
}

// 2d convenience overload: plane is the lattice plane.
inline LoopSpec rectangular_loop(const Torus& t, int corner, int w, int h) {
    return rectangular_loop(t, corner, 0, 1, w, h);
}

// Straight non-contractible sigma^z line along `axis` through `offset_site`
// (the axis component of the offset is ignored).
inline LoopSpec straight_loop(const Torus& t, int axis, int offset_site = 0) {
    if (axis < 0 || axis >= t.dim) throw std::invalid_argument("straight_loop: bad axis");
    if (offset_site < 0 || offset_site >= t.n_sites) throw std::out_of_range("straight_loop: bad offset");
    LoopSpec loop;
    loop.kind = LoopKind::StraightNoncontractible;
    auto c = t.coords(offset_site);
    c[axis] = 0;
    int s = t.site(c[0], c[1], c[2]);
    for (int i = 0; i < t.ext[axis]; ++i) {
        loop.links.push_back(t.link(axis, s));
        s = t.shift(s, axis, 1);
    }
    return loop;
}

// ---------------------------------------------------------------------------
// Partitions

// Region membership of links plus the derived counts used by the entropy
// formulas. Boundary-crossed links belong to A; a vertex is inside A iff all
// of its star links are in A.
struct PartitionSpec {
    std::vector<int32_t> region_a;      // sorted link ids
    std::vector<char> in_a;             // n_links membership mask
    int interior_vertices = 0;          // |A|
    int boundary_vertices = 0;          // |dA|
    int interior_vertices_abar = 0;     // |Abar|
    int m_a = 0;                        // plaquettes with all boundary links in A
    int p_a = 0;                        // connected components of A's link graph
    int p_abar = 0;                     // same for the complement
    // Model-2 aliases: vertices / plaquettes totally inside A
    int m_v() const { return interior_vertices; }
    int m_p() const { return m_a; }
};

namespace detail {
// components of the graph whose nodes are `links` and whose edges join links
// sharing a vertex
inline int link_graph_components(const Torus& t, const std::vector<char>& member) {
    int n = t.n_links;
    std::vector<int32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int32_t a, int32_t b) {
        a = find(a); b = find(b);
        if (a != b) parent[a] = b;
    };
    for (int v = 0; v < t.n_vertices; ++v) {
        const int32_t* star = t.star_of_vertex(v);
        int32_t first = -1;
        for (int k = 0; k < t.links_per_vertex; ++k) {
            int32_t l = star[k];
            if (!member[l]) continue;
            if (first < 0) first = l;
            else unite(first, l);
        }
    }
    int comps = 0;
    for (int l = 0; l < n; ++l)
        if (member[l] && find(l) == l) ++comps;
    return comps;
}
}  // namespace detail

inline PartitionSpec build_partition(const Torus& t, const std::vector<int32_t>& region_a_links) {
    PartitionSpec ps;
    ps.in_a.assign(t.n_links, 0);
    for (int32_t l : region_a_links) {
        if (!t.valid_link(l)) throw std::out_of_range("build_partition: bad link id");
        if (ps.in_a[l]) throw std::invalid_argument("build_partition: duplicate link in region");
        ps.in_a[l] = 1;
    }
    ps.region_a = region_a_links;
    std::sort(ps.region_a.begin(), ps.region_a.end());

    for (int v = 0; v < t.n_vertices; ++v) {
        const int32_t* star = t.star_of_vertex(v);
        int cnt = 0;
        for (int k = 0; k < t.links_per_vertex; ++k) cnt += ps.in_a[star[k]];
        if (cnt == t.links_per_vertex) ++ps.interior_vertices;
        else if (cnt > 0) ++ps.boundary_vertices;
        else ++ps.interior_vertices_abar;
    }
    for (int p = 0; p < t.n_plaquettes; ++p) {
        const int32_t* q = t.links_of_plaq(p);
        if (ps.in_a[q[0]] && ps.in_a[q[1]] && ps.in_a[q[2]] && ps.in_a[q[3]]) ++ps.m_a;
    }
    ps.p_a = detail::link_graph_components(t, ps.in_a);
    std::vector<char> out(t.n_links);
    for (int l = 0; l < t.n_links; ++l) out[l] = !ps.in_a[l];
    ps.p_abar = detail::link_graph_components(t, out);
    return ps;
}

// Multi-region front end: regions must be disjoint; region 0 is A and the
// partition is computed against the complement of region 0.
inline PartitionSpec build_partition(const Torus& t,
                                     const std::vector<std::vector<int32_t>>& regions) {
    if (regions.empty()) throw std::invalid_argument("build_partition: no regions");
    std::vector<char> seen(t.n_links, 0);
    for (const auto& r : regions)
        for (int32_t l : r) {
            if (!t.valid_link(l)) throw std::out_of_range("build_partition: bad link id");
            if (seen[l]) throw std::invalid_argument("build_partition: overlapping regions");
            seen[l] = 1;
        }
    return build_partition(t, regions[0]);
}

// All links incident to a block of vertices (the Fig.-4 style region: links
// crossed by the boundary are included in A).
inline std::vector<int32_t> vertex_block_region(const Torus& t, int corner, int wx, int wy,
                                                int wz = 1) {
    std::set<int32_t> links;
    int w[3] = {wx, wy, wz};
    for (int k = 0; k < t.dim; ++k)
        if (w[k] < 1 || w[k] > t.ext[k]) throw std::invalid_argument("vertex_block_region: bad widths");
    for (int dz = 0; dz < (t.dim == 3 ? wz : 1); ++dz)
        for (int dy = 0; dy < wy; ++dy)
            for (int dx = 0; dx < wx; ++dx) {
                int s = corner;
                s = t.shift(s, 0, dx);
                s = t.shift(s, 1, dy);
                if (t.dim == 3) s = t.shift(s, 2, dz);
                const int32_t* star = t.star_of_vertex(s);
                for (int k = 0; k < t.links_per_vertex; ++k) links.insert(star[k]);
            }
    return std::vector<int32_t>(links.begin(), links.end());
}

// The four Levin-Wen bipartitions on a 2d torus (needs ext >= 12):
//   1 = annulus (complement disconnected), 2/3 = annulus with one arm cut,
//   4 = annulus with both arms cut (A disconnected).
inline std::array<PartitionSpec, 4> levin_wen_partitions(const Torus& t) {
    if (t.dim != 2 || t.ext[0] < 12 || t.ext[1] < 12)
        throw std::invalid_argument("levin_wen_partitions: need a 2d torus with extents >= 12");

    auto block = [&](int x0, int y0, int w, int h, std::set<std::pair<int, int>>& vs) {
        for (int dy = 0; dy < h; ++dy)
            for (int dx = 0; dx < w; ++dx) vs.insert({x0 + dx, y0 + dy});
    };
    std::set<std::pair<int, int>> ring;
    block(2, 2, 8, 8, ring);
    std::set<std::pair<int, int>> hole;
    block(4, 4, 4, 4, hole);
    for (auto& v : hole) ring.erase(v);
    std::set<std::pair<int, int>> notch_l, notch_r;
    block(2, 5, 2, 2, notch_l);
    block(8, 5, 2, 2, notch_r);

    auto region_links = [&](const std::set<std::pair<int, int>>& vs) {
        std::set<int32_t> links;
        for (auto [x, y] : vs) {
            const int32_t* star = t.star_of_vertex(t.site(x, y));
            for (int k = 0; k < t.links_per_vertex; ++k) links.insert(star[k]);
        }
        return std::vector<int32_t>(links.begin(), links.end());
    };
    auto minus = [](std::set<std::pair<int, int>> a, const std::set<std::pair<int, int>>& b) {
        for (auto& v : b) a.erase(v);
        return a;
    };

    std::array<PartitionSpec, 4> out = {
        build_partition(t, region_links(ring)),
        build_partition(t, region_links(minus(ring, notch_l))),
        build_partition(t, region_links(minus(ring, notch_r))),
        build_partition(t, region_links(minus(minus(ring, notch_l), notch_r))),
    };
    return out;
}

}  // namespace dto
