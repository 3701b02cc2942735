#include "remfiber/persistence.hpp"

#include "remfiber/error.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace remfiber {

int PersistenceDiagram::essential_count(int dim) const {
    if (dim < 0 || dim > max_dim) return 0;
    return static_cast<int>(std::count_if(bars[dim].begin(), bars[dim].end(),
                                          [](const Bar& b) { return b.essential(); }));
}

std::pair<std::vector<std::size_t>, double> maxmin_landmarks(std::span<const Point> points, double cover,
                                                             std::size_t min_count, std::size_t max_count) {
    std::vector<std::size_t> chosen;
    if (points.empty()) return {chosen, 0.0};
    std::vector<double> nearest(points.size(), INFINITY);
    std::size_t next = 0;
    double radius = INFINITY;
    while (chosen.size() < std::min(max_count, points.size())) {
        const std::size_t current = next;
        chosen.push_back(current);
        radius = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest[i] = std::min(nearest[i], distance(points[i], points[current]));
            if (nearest[i] > radius) {
                radius = nearest[i];
                next = i;
            }
        }
        if (radius == 0.0) break;
        if (chosen.size() >= min_count && radius <= cover) break;
    }
    return {chosen, radius};
}

namespace {

struct Simplex {
    double value;
    int dim;
    std::array<int, 4> v;
};

std::uint64_t simplex_key(int dim, const std::array<int, 4>& v) {
    std::uint64_t key = static_cast<std::uint64_t>(dim);
    for (int i = 0; i < 4; ++i) key = (key << 15) | static_cast<std::uint64_t>(i <= dim ? v[i] : 0);
    return key;
}

void symmetric_difference(std::vector<int>& a, const std::vector<int>& b, std::vector<int>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(scratch));
    std::swap(a, scratch);
}

}  // namespace

PersistenceDiagram rips_persistence(std::span<const Point> points, int max_dim, double cap,
                                    const RipsOptions& opts) {
    if (points.empty()) throw domain_error("rips_persistence: empty point cloud");
    if (max_dim < 0 || max_dim > 2) throw domain_error("rips_persistence: max_dim must be 0, 1 or 2");
    if (!(cap > 0)) throw domain_error("rips_persistence: cap must be positive");
    if (points.size() > opts.max_points) {
        throw domain_error("rips_persistence: " + std::to_string(points.size()) + " points exceed the limit of " +
                           std::to_string(opts.max_points) + "; subsample the fiber first");
    }

    PersistenceDiagram pd;
    pd.max_dim = max_dim;
    pd.cap = cap;
    pd.input_points = points.size();
    pd.bars.assign(max_dim + 1, {});

    auto [landmarks, cover] = maxmin_landmarks(points, opts.cover_fraction * cap, opts.min_landmarks,
                                               std::min<std::size_t>(opts.max_landmarks, 30000));
    std::sort(landmarks.begin(), landmarks.end());
    const int L = static_cast<int>(landmarks.size());
    pd.complex_vertices = landmarks.size();
    pd.covering_radius = cover;

    std::vector<double> dist(static_cast<std::size_t>(L) * L, 0.0);
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j)
            dist[i * L + j] = dist[j * L + i] = distance(points[landmarks[i]], points[landmarks[j]]);
    auto d = [&](int i, int j) { return dist[i * L + j]; };
    std::vector<std::vector<int>> up(L);
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j)
            if (d(i, j) <= cap) up[i].push_back(j);

    const int top = max_dim + 1;
    std::vector<Simplex> simplices;
    for (int i = 0; i < L; ++i) simplices.push_back({0.0, 0, {i, 0, 0, 0}});
    for (int i = 0; i < L; ++i) {
        const auto& nb = up[i];
        for (std::size_t a = 0; a < nb.size(); ++a) {
            const int j = nb[a];
            simplices.push_back({d(i, j), 1, {i, j, 0, 0}});
            if (top < 2) continue;
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const int k = nb[b];
                if (d(j, k) > cap) continue;
                const double v3 = std::max({d(i, j), d(i, k), d(j, k)});
                simplices.push_back({v3, 2, {i, j, k, 0}});
                if (top < 3) continue;
                for (std::size_t c = b + 1; c < nb.size(); ++c) {
                    const int l = nb[c];
                    if (d(j, l) > cap || d(k, l) > cap) continue;
                    simplices.push_back({std::max({v3, d(i, l), d(j, l), d(k, l)}), 3, {i, j, k, l}});
                }
            }
        }
    }
    std::sort(simplices.begin(), simplices.end(), [](const Simplex& a, const Simplex& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.v < b.v;
    });
    pd.simplices = simplices.size();

    std::unordered_map<std::uint64_t, int> index;
    index.reserve(simplices.size() * 2);
    for (std::size_t s = 0; s < simplices.size(); ++s) {
        index.emplace(simplex_key(simplices[s].dim, simplices[s].v), static_cast<int>(s));
    }

    const std::size_t S = simplices.size();
    std::vector<int> pivot_owner(S, -1);  // low -> column that owns it
    std::vector<char> cleared(S, 0), negative(S, 0);
    std::vector<std::vector<int>> reduced(S);
    std::vector<int> col, scratch;

    for (int dim = top; dim >= 1; --dim) {
        for (std::size_t s = 0; s < S; ++s) {
            const Simplex& sx = simplices[s];
            if (sx.dim != dim || cleared[s]) continue;
            col.clear();
            for (int drop = 0; drop <= dim; ++drop) {
                std::array<int, 4> face{0, 0, 0, 0};
                for (int q = 0, w = 0; q <= dim; ++q) {
                    if (q != drop) face[w++] = sx.v[q];
                }
                col.push_back(index.at(simplex_key(dim - 1, face)));
            }
            std::sort(col.begin(), col.end());
            while (!col.empty()) {
                const int low = col.back();
                if (pivot_owner[low] < 0) break;
                symmetric_difference(col, reduced[pivot_owner[low]], scratch);
            }
            if (col.empty()) continue;
            const int low = col.back();
            pivot_owner[low] = static_cast<int>(s);
            cleared[low] = 1;
            negative[s] = 1;
            if (simplices[low].dim <= max_dim && simplices[low].value != sx.value) {
                pd.bars[simplices[low].dim].push_back(Bar{simplices[low].value, sx.value});
            }
            reduced[s] = col;
        }
    }
    for (std::size_t s = 0; s < S; ++s) {
        const Simplex& sx = simplices[s];
        if (sx.dim > max_dim || negative[s] || pivot_owner[s] >= 0) continue;
        pd.bars[sx.dim].push_back(Bar{sx.value, INFINITY});
    }
    for (auto& bars : pd.bars) std::sort(bars.begin(), bars.end());
    return pd;
}

PersistenceDiagram rips_persistence(const FiberSample& fs, int max_dim, double cap, const RipsOptions& opts) {
    if (fs.verdict == FiberVerdict::PresumedEmpty || fs.empty()) {
        throw domain_error("rips_persistence: empty fiber sample");
    }
    return rips_persistence(std::span<const Point>(fs.points), max_dim, cap, opts);
}

double suggest_rips_cap(std::span<const Point> all, const RipsOptions& opts) {
    const auto [landmarks, cover] = maxmin_landmarks(all, 0.0, opts.max_landmarks, opts.max_landmarks);
    std::vector<Point> points;
    for (std::size_t i : landmarks) points.push_back(all[i]);
    const std::size_t N = points.size();
    if (N < 2) return 1.0;
    // Prim's algorithm on the complete graph.
    std::vector<double> best(N, INFINITY);
    std::vector<char> in_tree(N, 0);
    std::vector<double> edges;
    best[0] = 0.0;
    for (std::size_t it = 0; it < N; ++it) {
        std::size_t u = N;
        for (std::size_t i = 0; i < N; ++i) {
            if (!in_tree[i] && (u == N || best[i] < best[u])) u = i;
        }
        in_tree[u] = 1;
        if (it > 0) edges.push_back(best[u]);
        for (std::size_t i = 0; i < N; ++i) {
            if (!in_tree[i]) best[i] = std::min(best[i], distance(points[u], points[i]));
        }
    }
    std::sort(edges.begin(), edges.end());
    const double median = edges[edges.size() / 2];
    double gap = median;
    for (double e : edges) {
        if (e <= 10.0 * median) gap = std::max(gap, e);
    }
    // On surfaces the holes between landmarks need more than the MST scale.
    return std::max(1.5 * gap, 5.0 * cover);
}

double landmark_spacing(std::span<const Point> points, double cap, const RipsOptions& opts) {
    if (points.empty()) throw domain_error("landmark_spacing: empty point cloud");
    const auto idx = maxmin_landmarks(points, opts.cover_fraction * cap, opts.min_landmarks, opts.max_landmarks).first;
    std::vector<Point> landmarks;
    for (std::size_t i : idx) landmarks.push_back(points[i]);
    return median_nearest_neighbor(landmarks);
}

ReducedBetti reduced_betti(const FiberSample& fs, const std::optional<PersistenceDiagram>& pd) {
    const int n = fs.n_vars();
    ReducedBetti rb;
    rb.betti.assign(n + 1, 0);
    const bool empty = fs.verdict == FiberVerdict::PresumedEmpty;
    if (empty && !fs.points.empty()) {
        throw domain_error("reduced_betti: presumed-empty verdict with stored points");
    }
    if (empty != !pd.has_value()) {
        throw domain_error("reduced_betti: a persistence diagram is required exactly when the fiber is nonempty");
    }
    if (empty) {
        rb.betti[0] = 1;
        return rb;
    }
    rb.betti[1] = pd->essential_count(0) - 1;
    for (int k = 1; k <= std::min(pd->max_dim, n - 1); ++k) rb.betti[k + 1] = pd->essential_count(k);
    return rb;
}

std::vector<int> predicted_tempered_dims(const ReducedBetti& rb) {
    // H^{k+1} of the tempered complex <-> reduced H^k of the fiber, k >= -1.
    std::vector<int> dims(rb.betti.size());
    for (std::size_t k1 = 0; k1 < rb.betti.size(); ++k1) dims[k1] = rb.betti[k1];
    return dims;
}

nlohmann::json to_json(const PersistenceDiagram& pd) {
    nlohmann::json bars = nlohmann::json::array();
    for (int dim = 0; dim <= pd.max_dim; ++dim) {
        for (const Bar& b : pd.bars[dim]) {
            bars.push_back({{"dim", dim},
                            {"birth", b.birth},
                            {"death", b.essential() ? nlohmann::json(nullptr) : nlohmann::json(b.death)}});
        }
    }
    return {{"max_dim", pd.max_dim},
            {"cap", pd.cap},
            {"input_points", pd.input_points},
            {"complex_vertices", pd.complex_vertices},
            {"covering_radius", pd.covering_radius},
            {"simplices", pd.simplices},
            {"bars", bars}};
}

}  // namespace remfiber
