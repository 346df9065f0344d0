#pragma once

#include "tvssl/binary.hpp"

#include <vector>

namespace tvssl {

/// Class index per node, 0-based, or -1 for unlabeled nodes.
class MultiLabelSet {
public:
    MultiLabelSet() = default;
    MultiLabelSet(std::vector<int> classes, int n_classes);

    std::size_t size() const { return classes_.size(); }
    int n_classes() const { return c_; }
    bool is_labeled(std::size_t i) const { return classes_[i] >= 0; }
    int class_of(std::size_t i) const { return classes_[i]; }
    const std::vector<int>& classes() const { return classes_; }
    std::size_t labeled_count() const;

    /// Channel k target: 1 on nodes labeled k, 0 elsewhere.
    Vector indicator(int k) const;
    /// Channel k one-vs-rest target: +1 on nodes labeled k, -1 on other
    /// labeled nodes, 0 on unlabeled nodes.
    Vector one_vs_rest(int k) const;
    /// 0/1 mask of labeled nodes, shared by every channel.
    Vector j_diag() const;

    /// Throws InsufficientLabels unless every class has a label.
    void require_every_class() const;

private:
    std::vector<int> classes_;
    int c_ = 0;
};

struct MulticlassModel {
    Variant variant = Variant::LapRls;
    Matrix alphas;       // N x c, column k expands channel k
    Matrix node_values;  // N x c channel values on the nodes
    double bandwidth = 1.0;
    HyperParams hp;
    TrainTrace trace;

    int n_classes() const { return static_cast<int>(alphas.cols()); }
};

MulticlassModel lap_rls_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                 const MultiLabelSet& mls, const HyperParams& hp);
MulticlassModel tv_rls_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                const MultiLabelSet& mls, const HyperParams& hp);
MulticlassModel cheeger_rls_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                     const MultiLabelSet& mls, const HyperParams& hp);
MulticlassModel lap_svm_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                 const MultiLabelSet& mls, const HyperParams& hp);
MulticlassModel tv_svm_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                const MultiLabelSet& mls, const HyperParams& hp);
MulticlassModel cheeger_svm_mc_train(const KernelMatrix& k, const SimilarityGraph& g,
                                     const MultiLabelSet& mls, const HyperParams& hp);

/// Dispatch on a semi-supervised variant; rls and svm are rejected.
MulticlassModel multiclass_train(Variant v, const KernelMatrix& k, const SimilarityGraph& g,
                                 const MultiLabelSet& mls, const HyperParams& hp);

/// Row-wise argmax, ties to the smallest class index.
std::vector<int> argmax_rows(const Matrix& channels);

/// Class index (0-based) at query points via the channel kernel expansions.
std::vector<int> predict_multiclass(const MulticlassModel& model, const DataMatrix& train,
                                    const DataMatrix& query);

/// Class index on the training nodes from node_values.
std::vector<int> predict_multiclass_transductive(const MulticlassModel& model);

}  // namespace tvssl
