#pragma once

// Deterministic annealed force-directed layout (weighted Fruchterman-
// Reingold): attraction along edges scales with the edge weight, repulsion
// acts between all pairs, approximated by a uniform grid for large graphs.
// Same graph + same params => bit-identical coordinates.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "wikimap/coocnet.hpp"
#include "wikimap/rng.hpp"

namespace wikimap {

struct EmptyGraph : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteCoordinate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LayoutPoint {
    std::uint32_t node = 0;
    double x = 0.0;
    double y = 0.0;
};

struct LayoutParams {
    std::uint64_t seed = 20051105;
    int iterations = 500;
    double initial_temperature = -1.0;  // < 0 means 0.1 of the layout side
    double cooling = 0.995;
    double min_separation = 1e-4;

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("layout: iterations must be >= 1");
        if (!(cooling > 0.0 && cooling < 1.0))
            throw std::invalid_argument("layout: cooling must be in (0,1)");
        if (!(min_separation > 0.0))
            throw std::invalid_argument("layout: min_separation must be positive");
    }
};

// Plain weighted graph view, so the layout does not care where the nodes
// came from.
struct LayoutGraph {
    struct Edge {
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        double weight = 1.0;
    };
    std::size_t node_count = 0;
    std::vector<Edge> edges;

    static LayoutGraph from_network(const CoocNetwork& net) {
        LayoutGraph g;
        g.node_count = net.nodes.size();
        g.edges.reserve(net.edges.size());
        for (const CoocEdge& e : net.edges) g.edges.push_back({e.cat_i, e.cat_j, e.cos});
        return g;
    }
};

struct LayoutRun {
    std::vector<LayoutPoint> points;
    std::vector<double> temperature;  // per iteration
    std::vector<double> max_step;     // per iteration, for the displacement bound
};

namespace layoutdetail {

// Nodes bucketed on a grid with cells of side 2k; repulsion is evaluated
// against the 3x3 neighborhood and cut off at distance 2k.
class RepulsionGrid {
  public:
    RepulsionGrid(const std::vector<double>& xs, const std::vector<double>& ys, double cell)
        : cell_(cell) {
        for (std::uint32_t i = 0; i < xs.size(); ++i) {
            cells_[key(cell_index(xs[i]), cell_index(ys[i]))].push_back(i);
        }
    }

    template <typename Fn>
    void for_neighbors(double x, double y, Fn&& fn) const {
        const std::int64_t cx = cell_index(x);
        const std::int64_t cy = cell_index(y);
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (std::uint32_t j : it->second) fn(j);
            }
        }
    }

  private:
    std::int64_t cell_index(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
    }

    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace layoutdetail

inline LayoutRun layout_force_run(const LayoutGraph& g, const LayoutParams& params) {
    params.validate();
    const std::size_t n = g.node_count;
    if (n == 0) throw EmptyGraph("layout: graph has no nodes");

    const double side = 1.0;
    const double k = std::sqrt(side * side / static_cast<double>(n));
    double temp = params.initial_temperature > 0.0 ? params.initial_temperature : 0.1 * side;
    const double min_sep = params.min_separation;

    std::vector<double> xs(n), ys(n);
    SplitMix64 rng(params.seed);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rng.next_double() * side;
        ys[i] = rng.next_double() * side;
    }
    LayoutRun run;
    if (n == 1) {
        run.points.push_back({0, xs[0], ys[0]});
        return run;
    }

    const bool exact = n <= 2000;
    const double cutoff = 2.0 * k;
    std::vector<double> dx(n), dy(n);

    for (int iter = 0; iter < params.iterations; ++iter) {
        std::fill(dx.begin(), dx.end(), 0.0);
        std::fill(dy.begin(), dy.end(), 0.0);

        // Repulsion: f = k^2 / d, pushing i away from j.
        auto repulse = [&](std::uint32_t i, std::uint32_t j) {
            if (i == j) return;
            double ddx = xs[i] - xs[j];
            double ddy = ys[i] - ys[j];
            double dist = std::sqrt(ddx * ddx + ddy * ddy);
            if (dist < min_sep) {
                // Coincident nodes get a deterministic pseudo-random nudge.
                SplitMix64 jitter(params.seed ^ (static_cast<std::uint64_t>(i) << 32 | j)
                                  ^ static_cast<std::uint64_t>(iter));
                const double angle = jitter.next_double() * 6.283185307179586;
                ddx = std::cos(angle) * min_sep;
                ddy = std::sin(angle) * min_sep;
                dist = min_sep;
            }
            const double force = k * k / dist;
            dx[i] += ddx / dist * force;
            dy[i] += ddy / dist * force;
        };

        if (exact) {
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t j = 0; j < n; ++j) repulse(i, j);
        } else {
            layoutdetail::RepulsionGrid grid(xs, ys, cutoff);
            for (std::uint32_t i = 0; i < n; ++i) {
                grid.for_neighbors(xs[i], ys[i], [&](std::uint32_t j) {
                    if (i == j) return;
                    const double ddx = xs[i] - xs[j];
                    const double ddy = ys[i] - ys[j];
                    if (ddx * ddx + ddy * ddy > cutoff * cutoff) return;
                    repulse(i, j);
                });
            }
        }

        // Attraction along edges: f = w * d^2 / k.
        for (const LayoutGraph::Edge& e : g.edges) {
            double ddx = xs[e.a] - xs[e.b];
            double ddy = ys[e.a] - ys[e.b];
            double dist = std::sqrt(ddx * ddx + ddy * ddy);
            if (dist < min_sep) continue;  // repulsion jitter will separate them
            const double force = e.weight * dist * dist / k;
            const double fx = ddx / dist * force;
            const double fy = ddy / dist * force;
            dx[e.a] -= fx;
            dy[e.a] -= fy;
            dx[e.b] += fx;
            dy[e.b] += fy;
        }

        // Displacement capped by the current temperature.
        double max_step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double len = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i]);
            if (len <= 0.0) continue;
            const double step = len < temp ? len : temp;
            xs[i] += dx[i] / len * step;
            ys[i] += dy[i] / len * step;
            if (step > max_step) max_step = step;
        }
        run.temperature.push_back(temp);
        run.max_step.push_back(max_step);
        temp *= params.cooling;
    }

    run.points.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) run.points.push_back({i, xs[i], ys[i]});
    return run;
}

inline std::vector<LayoutPoint> layout_force(const LayoutGraph& g, const LayoutParams& params) {
    return layout_force_run(g, params).points;
}

// Affine map of the bounding box into [0,1]^2, aspect ratio preserved; the
// shorter axis is centered. Degenerate boxes collapse to the center.
inline std::vector<LayoutPoint> normalize_coords(std::vector<LayoutPoint> points) {
    if (points.empty()) return points;
    for (const LayoutPoint& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw NonFiniteCoordinate("normalize_coords: non-finite input");
    }
    double min_x = points[0].x, max_x = points[0].x;
    double min_y = points[0].y, max_y = points[0].y;
    for (const LayoutPoint& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double w = max_x - min_x;
    const double h = max_y - min_y;
    const double span = w > h ? w : h;
    if (span <= 0.0) {
        for (LayoutPoint& p : points) {
            p.x = 0.5;
            p.y = 0.5;
        }
        return points;
    }
    const double scale = 1.0 / span;
    const double off_x = (1.0 - w * scale) * 0.5;
    const double off_y = (1.0 - h * scale) * 0.5;
    for (LayoutPoint& p : points) {
        p.x = (p.x - min_x) * scale + off_x;
        p.y = (p.y - min_y) * scale + off_y;
    }
    return points;
}

inline std::string layout_to_tsv(const std::vector<LayoutPoint>& points) {
    std::string out = "node\tx\ty\n";
    char buf[64];
    for (const LayoutPoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%u\t%.9f\t%.9f\n", p.node, p.x, p.y);
        out += buf;
    }
    return out;
}

}  // namespace wikimap
