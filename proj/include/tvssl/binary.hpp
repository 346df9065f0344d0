#pragma once

#include "tvssl/graph.hpp"
#include "tvssl/kernel.hpp"
#include "tvssl/opt_core.hpp"
#include "tvssl/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tvssl {

enum class Variant { Rls, LapRls, TvRls, CheegerRls, Svm, LapSvm, TvSvm, CheegerSvm };

const char* variant_name(Variant v);
/// Accepts the names produced by variant_name ("rls", "lap_rls", "tv_svm", ...).
Variant parse_variant(const std::string& name);
bool is_svm_variant(Variant v);
/// True for the variants that need labels only (no graph, no unlabeled points).
bool is_supervised_variant(Variant v);

/// Labels over all N points: +1 / -1 on labeled points, 0 elsewhere.
class LabeledSet {
public:
    LabeledSet() = default;
    /// `labels[i]` must be +1 or -1 where `mask[i]` is set; other entries are ignored.
    LabeledSet(const std::vector<int>& labels, const std::vector<bool>& mask);

    std::size_t size() const { return mask_.size(); }
    bool is_labeled(std::size_t i) const { return mask_[i]; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<bool>& mask() const { return mask_; }
    std::vector<Eigen::Index> labeled_indices() const;
    std::size_t labeled_count() const;

    /// [y_1, ..., y_n, 0, ..., 0] in node order: zero exactly on unlabeled nodes.
    Vector y_ext() const;
    /// diag(J) as a 0/1 vector.
    Vector j_diag() const;

    /// Throws InsufficientLabels unless both classes carry a label.
    void require_both_classes() const;

private:
    std::vector<int> labels_;
    std::vector<bool> mask_;
};

struct TrainTrace {
    std::vector<double> energy;           // per outer iteration (ratio energy / TV objective)
    std::vector<double> accepted_energy;  // best-so-far energy, non-increasing (Cheeger)
    std::vector<double> consensus;        // ||f - g|| + ||h - g|| (TV splitting)
    int iterations = 0;
    bool converged = false;
};

struct BinaryModel {
    Variant variant = Variant::Rls;
    Vector alpha;                          // kernel expansion coefficients
    std::vector<Eigen::Index> expansion;   // training rows alpha refers to; empty = all N
    Vector node_values;                    // transductive f on the N nodes (empty for rls/svm)
    double bandwidth = 1.0;
    double bias = 0.0;                     // only used when hp.use_bias
    HyperParams hp;
    TrainTrace trace;
};

/// x in class +1 iff f(x) >= 0.
inline int sign_label(double v) { return v >= 0.0 ? 1 : -1; }

// Supervised closed forms over the n labeled points (K is n x n, y is +-1).
BinaryModel rls_train(const KernelMatrix& k, const Vector& y, const HyperParams& hp);
BinaryModel svm_train(const KernelMatrix& k, const Vector& y, const HyperParams& hp);

// Semi-supervised methods over all N points (K is N x N).
BinaryModel lap_rls_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                          const HyperParams& hp);
BinaryModel lap_svm_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                          const HyperParams& hp);

struct SplittingOptions {
    bool normalize = true;                 // ball + zero-mean step on g
    std::optional<Vector> initial_g;       // defaults to y_ext
    std::optional<std::vector<int>> pseudo_labels;  // TV-SVM: overrides the warm start
};

BinaryModel tv_rls_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                         const HyperParams& hp, const SplittingOptions& opts = {});
BinaryModel tv_svm_train(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                         const HyperParams& hp, const SplittingOptions& opts = {});

BinaryModel cheeger_rls_train(const KernelMatrix& k, const SimilarityGraph& g,
                              const LabeledSet& ls, const HyperParams& hp);
BinaryModel cheeger_svm_train(const KernelMatrix& k, const SimilarityGraph& g,
                              const LabeledSet& ls, const HyperParams& hp);

/// State of the two-split augmented Lagrangian loop shared by TV-RLS and
/// TV-SVM. Exposed so single iterations can be inspected.
class TvSplitting {
public:
    TvSplitting(const KernelMatrix& k, const SimilarityGraph& g, const LabeledSet& ls,
                const HyperParams& hp, bool svm_h_step, const SplittingOptions& opts);

    /// One outer iteration; returns ||f - g|| + ||h - g|| after the update.
    double step();

    const Vector& alpha() const { return alpha_; }
    const Vector& f() const { return f_; }
    const Vector& h() const { return h_; }
    const Vector& g() const { return g_; }
    const Vector& lambda1() const { return lam1_; }
    const Vector& lambda2() const { return lam2_; }
    const std::vector<int>& pseudo_labels() const { return pseudo_; }
    double bias() const { return bias_; }

private:
    const KernelMatrix& k_;
    const SimilarityGraph& graph_;
    const LabeledSet& ls_;
    HyperParams hp_;
    bool svm_;
    bool normalize_;
    SpdSolver alpha_solver_;
    Vector y_ext_, j_diag_;
    Vector alpha_, f_, h_, g_, lam1_, lam2_;
    std::vector<int> pseudo_;
    Vector beta_;
    double bias_ = 0.0;
};

/// Binary decisions at query points from a kernel expansion over `train`.
std::vector<int> predict_binary(const BinaryModel& model, const DataMatrix& train,
                                const DataMatrix& query);

/// Decisions on the training nodes (node_values when present, K alpha otherwise).
std::vector<int> predict_transductive(const BinaryModel& model, const KernelMatrix& k);

}  // namespace tvssl
