#include "tvssl/graph.hpp"

#include "tvssl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace tvssl {

SimilarityGraph::SimilarityGraph(std::size_t n_nodes, std::vector<Edge> edges) : n_(n_nodes) {
    for (auto& e : edges) {
        require(e.i < n_ && e.j < n_, ErrorCode::InvalidParameter,
                "edge index out of range: (" + std::to_string(e.i) + ", " +
                    std::to_string(e.j) + ") for " + std::to_string(n_) + " nodes");
        require(e.i != e.j, ErrorCode::InvalidParameter,
                "self-loop at node " + std::to_string(e.i));
        require(std::isfinite(e.w) && e.w > 0.0, ErrorCode::InvalidParameter,
                "edge weight must be positive and finite");
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }),
                edges.end());
    edges_ = std::move(edges);

    degrees_.assign(n_, 0.0);
    std::vector<std::size_t> counts(n_, 0);
    for (const auto& e : edges_) {
        degrees_[e.i] += e.w;
        degrees_[e.j] += e.w;
        ++counts[e.i];
        ++counts[e.j];
    }
    row_start_.assign(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) row_start_[v + 1] = row_start_[v] + counts[v];
    col_.resize(row_start_[n_]);
    val_.resize(row_start_[n_]);
    std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
    for (const auto& e : edges_) {
        col_[fill[e.i]] = e.j;
        val_[fill[e.i]++] = e.w;
        col_[fill[e.j]] = e.i;
        val_[fill[e.j]++] = e.w;
    }
    for (std::size_t v = 0; v < n_; ++v) {
        const auto b = row_start_[v], en = row_start_[v + 1];
        std::vector<std::size_t> idx(en - b);
        std::iota(idx.begin(), idx.end(), b);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto c) { return col_[a] < col_[c]; });
        std::vector<std::size_t> cols;
        std::vector<double> vals;
        for (auto t : idx) {
            cols.push_back(col_[t]);
            vals.push_back(val_[t]);
        }
        std::copy(cols.begin(), cols.end(), col_.begin() + static_cast<std::ptrdiff_t>(b));
        std::copy(vals.begin(), vals.end(), val_.begin() + static_cast<std::ptrdiff_t>(b));
    }
}

double SimilarityGraph::weight(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_ || i == j) return 0.0;
    const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_start_[i]);
    const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_start_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
}

double SimilarityGraph::max_degree() const {
    return degrees_.empty() ? 0.0 : *std::max_element(degrees_.begin(), degrees_.end());
}

Matrix SimilarityGraph::dense_weights() const {
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (const auto& e : edges_) {
        w(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.w;
        w(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = e.w;
    }
    return w;
}

Matrix SimilarityGraph::energy_laplacian() const {
    Matrix l = -dense_weights();
    for (std::size_t v = 0; v < n_; ++v)
        l(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) = degrees_[v];
    return 2.0 * l;
}

namespace {

double squared_distance(const DataMatrix& data, Eigen::Index a, Eigen::Index b) {
    return (data.row(a) - data.row(b)).squaredNorm();
}

void check_length(const SimilarityGraph& g, const NodeFunction& f) {
    require(static_cast<std::size_t>(f.size()) == g.n_nodes(), ErrorCode::DimensionMismatch,
            "node function has length " + std::to_string(f.size()) + ", graph has " +
                std::to_string(g.n_nodes()) + " nodes");
}

}  // namespace

SimilarityGraph build_knn_graph(const DataMatrix& data, std::size_t k, const SigmaMode& sigma_mode) {
    const auto n = static_cast<std::size_t>(data.rows());
    require(n >= 2, ErrorCode::InvalidParameter, "k-NN graph needs at least 2 points");
    require(k >= 1 && k < n, ErrorCode::InvalidParameter,
            "k must satisfy 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
    if (const auto* fixed = std::get_if<FixedSigma>(&sigma_mode)) {
        require(std::isfinite(fixed->sigma) && fixed->sigma > 0.0, ErrorCode::InvalidParameter,
                "fixed sigma must be positive");
    } else {
        const auto m = std::get<SelfTuningSigma>(sigma_mode).m;
        require(m >= 1 && m < n, ErrorCode::InvalidParameter,
                "self-tuning neighbour rank m must satisfy 1 <= m < N");
    }

    // Sorted neighbour lists, ties to the smaller index.
    const std::size_t depth = std::max(k, std::holds_alternative<SelfTuningSigma>(sigma_mode)
                                              ? std::get<SelfTuningSigma>(sigma_mode).m
                                              : std::size_t{0});
    std::vector<std::vector<std::pair<double, std::size_t>>> nearest(n);
    std::vector<std::pair<double, std::size_t>> row;
    row.reserve(n - 1);
    for (std::size_t a = 0; a < n; ++a) {
        row.clear();
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            row.emplace_back(squared_distance(data, static_cast<Eigen::Index>(a),
                                              static_cast<Eigen::Index>(b)),
                             b);
        }
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(depth), row.end());
        nearest[a].assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(depth));
    }

    std::vector<double> scale(n, 0.0);
    if (const auto* st = std::get_if<SelfTuningSigma>(&sigma_mode)) {
        for (std::size_t a = 0; a < n; ++a) {
            scale[a] = std::sqrt(nearest[a][st->m - 1].first);
            require(scale[a] > 0.0, ErrorCode::DegenerateScale,
                    "self-tuning scale is zero at node " + std::to_string(a) +
                        " (duplicate points)");
        }
    }

    std::vector<Edge> edges;
    edges.reserve(n * k);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t t = 0; t < k; ++t) {
            const auto [d2, b] = nearest[a][t];
            double w;
            if (const auto* fixed = std::get_if<FixedSigma>(&sigma_mode)) {
                w = std::exp(-d2 / (fixed->sigma * fixed->sigma));
            } else {
                w = std::exp(-d2 / (scale[a] * scale[b]));
            }
            // exp underflow would drop the edge silently; keep it representable.
            w = std::max(w, std::numeric_limits<double>::min());
            edges.push_back({std::min(a, b), std::max(a, b), w});
        }
    }
    return SimilarityGraph(n, std::move(edges));
}

double dirichlet_energy(const SimilarityGraph& g, const NodeFunction& f) {
    check_length(g, f);
    double s = 0.0;
    for (const auto& e : g.edges()) {
        const double d = f[static_cast<Eigen::Index>(e.i)] - f[static_cast<Eigen::Index>(e.j)];
        s += e.w * d * d;
    }
    return 2.0 * s;
}

double graph_tv(const SimilarityGraph& g, const NodeFunction& f) {
    check_length(g, f);
    double s = 0.0;
    for (const auto& e : g.edges())
        s += e.w * std::abs(f[static_cast<Eigen::Index>(e.i)] - f[static_cast<Eigen::Index>(e.j)]);
    return 2.0 * s;
}

NodeFunction laplacian_apply(const SimilarityGraph& g, const NodeFunction& f) {
    check_length(g, f);
    NodeFunction out = NodeFunction::Zero(f.size());
    for (const auto& e : g.edges()) {
        const auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j);
        const double d = e.w * (f[i] - f[j]);
        out[i] += d;
        out[j] -= d;
    }
    return out;
}

double lower_median(const Vector& v) {
    require(v.size() > 0, ErrorCode::DegenerateInput, "median of an empty vector");
    std::vector<double> tmp(v.data(), v.data() + v.size());
    const auto mid = tmp.begin() + (v.size() - 1) / 2;
    std::nth_element(tmp.begin(), mid, tmp.end());
    return *mid;
}

double ratio_energy(const SimilarityGraph& g, const NodeFunction& f) {
    const double tv = graph_tv(g, f);
    const double med = lower_median(f);
    const double dev = (f.array() - med).abs().sum();
    if (dev <= 0.0) return std::numeric_limits<double>::infinity();
    return tv / dev;
}

void write_edge_list(const SimilarityGraph& g, std::ostream& out) {
    std::ostringstream buf;
    buf << std::setprecision(17);
    for (const auto& e : g.edges()) buf << e.i << ' ' << e.j << ' ' << e.w << '\n';
    out << buf.str();
}

SimilarityGraph read_edge_list(std::istream& in, std::size_t n_nodes_hint) {
    std::vector<Edge> edges;
    std::string line;
    std::size_t line_no = 0;
    std::size_t max_index = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        long long i = -1, j = -1;
        double w = 0.0;
        if (!(ls >> i >> j >> w) || i < 0 || j < 0) {
            fail(ErrorCode::Parse, "edge list line " + std::to_string(line_no) +
                                       ": expected 'i j w' with non-negative indices");
        }
        std::string rest;
        if (ls >> rest)
            fail(ErrorCode::Parse, "edge list line " + std::to_string(line_no) + ": trailing data");
        edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
        max_index = std::max({max_index, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
        any = true;
    }
    const std::size_t n = std::max(n_nodes_hint, any ? max_index + 1 : std::size_t{0});
    return SimilarityGraph(n, std::move(edges));
}

void save_edge_list(const SimilarityGraph& g, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
    write_edge_list(g, out);
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for '" + path + "'");
}

SimilarityGraph load_edge_list(const std::string& path, std::size_t n_nodes_hint) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "'");
    return read_edge_list(in, n_nodes_hint);
}

}  // namespace tvssl
