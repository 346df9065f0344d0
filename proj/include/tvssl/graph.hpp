#pragma once

#include "tvssl/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace tvssl {

struct Edge {
    std::size_t i;
    std::size_t j;
    double w;
};

/// Symmetric weighted graph stored as one edge per unordered pair (i < j).
///
/// Energies follow the ordered double-sum convention: every unordered edge
/// contributes twice, so dirichlet_energy(f) == 2 * f^T (D - W) f.
/// Instances are immutable once built and safe to share across threads.
class SimilarityGraph {
public:
    SimilarityGraph() = default;

    /// Duplicated pairs are merged by keeping the first weight. Throws on
    /// self-loops, out-of-range indices or non-positive weights.
    SimilarityGraph(std::size_t n_nodes, std::vector<Edge> edges);

    std::size_t n_nodes() const { return n_; }
    std::size_t n_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& degrees() const { return degrees_; }

    /// Weight of (i, j), zero when the pair is not connected.
    double weight(std::size_t i, std::size_t j) const;

    double max_degree() const;

    /// Dense W, for tests and small problems.
    Matrix dense_weights() const;

    /// 2 (D - W), the operator whose quadratic form is dirichlet_energy.
    Matrix energy_laplacian() const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> degrees_;
    // CSR adjacency for weight lookup
    std::vector<std::size_t> row_start_;
    std::vector<std::size_t> col_;
    std::vector<double> val_;
};

struct FixedSigma {
    double sigma;
};

struct SelfTuningSigma {
    std::size_t m;  // sigma_i = distance to the m-th nearest neighbour
};

using SigmaMode = std::variant<FixedSigma, SelfTuningSigma>;

/// Union-symmetrized k-NN graph with Gaussian weights. Ties in the neighbour
/// ranking go to the smaller node index.
SimilarityGraph build_knn_graph(const DataMatrix& data, std::size_t k,
                                const SigmaMode& sigma_mode);

double dirichlet_energy(const SimilarityGraph& g, const NodeFunction& f);
double graph_tv(const SimilarityGraph& g, const NodeFunction& f);

/// (D - W) f without forming the dense Laplacian.
NodeFunction laplacian_apply(const SimilarityGraph& g, const NodeFunction& f);

/// Cheeger ratio TV(f) / sum_i |f_i - median(f)| with the lower median.
/// Returns +inf when the denominator vanishes.
double ratio_energy(const SimilarityGraph& g, const NodeFunction& f);

/// Lower median: the sorted element at 0-based index (n - 1) / 2.
double lower_median(const Vector& v);

/// Edge-list text, one "i j w" triple per line with 0-based indices.
void write_edge_list(const SimilarityGraph& g, std::ostream& out);
SimilarityGraph read_edge_list(std::istream& in, std::size_t n_nodes_hint = 0);
void save_edge_list(const SimilarityGraph& g, const std::string& path);
SimilarityGraph load_edge_list(const std::string& path, std::size_t n_nodes_hint = 0);

}  // namespace tvssl
