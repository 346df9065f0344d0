#pragma once

#include "tvssl/binary.hpp"
#include "tvssl/multiclass.hpp"
#include "tvssl/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tvssl {

struct Dataset {
    DataMatrix data;
    std::vector<int> labels;               // class per row, 1..c
    std::vector<std::string> class_names;  // class_names[c - 1] is the raw label text of class c
    std::string name;

    std::size_t size() const { return labels.size(); }
    int n_classes() const { return static_cast<int>(class_names.size()); }
};

/// Numeric CSV, one point per row. `label_column` is 0-based; -1 selects the
/// last column. Class labels are numbered 1..c in order of first appearance.
Dataset parse_csv(std::istream& in, int label_column = 0, bool header = false,
                  const std::string& name = "csv");
Dataset load_csv(const std::string& path, int label_column = 0, bool header = false);
/// Writes the label text first, then the attributes at full precision.
void write_csv(const Dataset& ds, std::ostream& out);
void save_csv(const Dataset& ds, const std::string& path);

/// Two interleaved half circles: class 1 is the upper moon on the unit
/// circle, class 2 the lower one centred at (1, 0.5). n/2 points each,
/// class 1 first, i.i.d. Gaussian noise on both coordinates.
Dataset make_two_moons(std::size_t n, double noise, std::uint64_t seed);

/// Keeps the rows whose raw label is listed, renumbering classes in the
/// order given.
Dataset select_classes(const Dataset& ds, const std::vector<std::string>& keep);

struct SplitSpec {
    std::size_t labels_per_class = 1;
    std::uint64_t seed = 0;
    std::size_t run_count = 1;
};

/// Stratified labeled mask: exactly labels_per_class rows per class, drawn
/// uniformly without replacement from an Rng seeded with spec.seed.
std::vector<bool> make_split_mask(const Dataset& ds, const SplitSpec& spec);

/// Two-class datasets only: class 1 maps to +1, class 2 to -1.
LabeledSet make_binary_split(const Dataset& ds, const SplitSpec& spec);
MultiLabelSet make_multiclass_split(const Dataset& ds, const SplitSpec& spec);

/// +1 / -1 encoding of a two-class dataset's labels.
std::vector<int> binary_labels(const Dataset& ds);

}  // namespace tvssl
