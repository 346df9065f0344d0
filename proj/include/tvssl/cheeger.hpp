#pragma once

#include "tvssl/binary.hpp"

#include <functional>
#include <optional>

namespace tvssl {

struct CheegerProxOutput {
    Vector alpha;  // expansion coefficients of the kernel step
    Vector e;      // K alpha
};

/// Kernel step of one ratio iteration. Receives the shifted centre
/// g = f + c sign(f) and the current iterate f.
using CheegerProx = std::function<CheegerProxOutput(const Vector& g, const Vector& f)>;

/// Squared-loss step: alpha = (lambda I + r K)^{-1} r g. K must outlive the result.
CheegerProx make_rls_prox(const KernelMatrix& k, const HyperParams& hp);

/// Hinge step with gamma = 0. Margins sit on the labeled points and, with
/// hp.unlabeled_margins, on the unlabeled points with the given pseudo-labels;
/// those are refreshed from sign(f) from the second call on. K and ls must
/// outlive the result.
CheegerProx make_svm_prox(const KernelMatrix& k, const LabeledSet& ls, const HyperParams& hp,
                          std::vector<int> pseudo_labels);

/// Ratio-energy descent: kernel step, TV prox with weight c / E(f), median
/// shift, label clamp and renormalization to ||f|| = target.
class CheegerIteration {
public:
    CheegerIteration(const SimilarityGraph& g, const LabeledSet& ls, const HyperParams& hp,
                     CheegerProx prox, std::optional<Vector> f0 = std::nullopt);

    /// One iteration; returns the ratio energy of the new iterate.
    double step();

    /// Iterates until the energy settles or hp.outer_iters is reached and
    /// returns the lowest-energy iterate seen. alpha is the kernel step of
    /// that iteration rescaled by the same factor as f.
    BinaryModel run();

    const Vector& f() const { return f_; }
    const Vector& h() const { return h_; }
    /// Median-shifted TV output with the labels written in, before rescaling.
    const Vector& clamped() const { return s_; }
    double energy() const { return energy_; }

private:
    const SimilarityGraph& graph_;
    const LabeledSet& ls_;
    HyperParams hp_;
    CheegerProx prox_;
    Vector f_, h_, s_, alpha_;
    double energy_;
};

}  // namespace tvssl
