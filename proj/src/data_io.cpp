#include "tvssl/data_io.hpp"

#include "tvssl/error.hpp"
#include "tvssl/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace tvssl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    const auto res = std::from_chars(b, e, v);
    return res.ec == std::errc() && res.ptr == e && std::isfinite(v);
}

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Dataset parse_csv(std::istream& in, int label_column, bool header, const std::string& name) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::string line;
    std::size_t line_no = 0, width = 0;
    bool skipped_header = !header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (width == 0) {
            width = fields.size();
            require(width >= 2, ErrorCode::Parse,
                    "line " + std::to_string(line_no) + ": need a label and at least one attribute");
        }
        require(fields.size() == width, ErrorCode::Parse,
                "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                    " fields, found " + std::to_string(fields.size()));
        const std::size_t lc = label_column < 0 ? width - 1 : static_cast<std::size_t>(label_column);
        require(lc < width, ErrorCode::InvalidParameter,
                "label column " + std::to_string(label_column) + " outside a " +
                    std::to_string(width) + "-column file");
        std::vector<double> row;
        row.reserve(width - 1);
        for (std::size_t j = 0; j < width; ++j) {
            if (j == lc) {
                require(!fields[j].empty(), ErrorCode::Parse,
                        "line " + std::to_string(line_no) + ": empty label");
                raw_labels.push_back(fields[j]);
                continue;
            }
            double v;
            require(parse_double(fields[j], v), ErrorCode::Parse,
                    "line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                        ": not a number: '" + fields[j] + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), ErrorCode::Parse, "CSV input contains no data rows");

    Dataset ds;
    ds.name = name;
    ds.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
    std::map<std::string, int> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < width; ++j)
            ds.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        auto [it, inserted] = ids.emplace(raw_labels[i], static_cast<int>(ids.size()) + 1);
        if (inserted) ds.class_names.push_back(raw_labels[i]);
        ds.labels.push_back(it->second);
    }
    return ds;
}

Dataset load_csv(const std::string& path, int label_column, bool header) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open '" + path + "'");
    return parse_csv(in, label_column, header, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << ds.class_names[static_cast<std::size_t>(ds.labels[i] - 1)];
        for (Eigen::Index j = 0; j < ds.data.cols(); ++j)
            out << ',' << fmt17(ds.data(static_cast<Eigen::Index>(i), j));
        out << '\n';
    }
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::Io, "cannot write '" + path + "'");
    write_csv(ds, out);
    require(out.good(), ErrorCode::Io, "write to '" + path + "' failed");
}

Dataset make_two_moons(std::size_t n, double noise, std::uint64_t seed) {
    require(n >= 2 && n % 2 == 0, ErrorCode::InvalidParameter, "two moons needs an even n >= 2");
    require(std::isfinite(noise) && noise >= 0.0, ErrorCode::InvalidParameter,
            "noise must be non-negative");
    const std::size_t half = n / 2;
    Dataset ds;
    ds.name = "two_moons";
    ds.class_names = {"1", "2"};
    ds.data.resize(static_cast<Eigen::Index>(n), 2);
    ds.labels.resize(n);
    const double denom = half > 1 ? static_cast<double>(half - 1) : 1.0;
    for (std::size_t i = 0; i < half; ++i) {
        const double t = M_PI * static_cast<double>(i) / denom;
        const auto a = static_cast<Eigen::Index>(i);
        const auto b = static_cast<Eigen::Index>(half + i);
        ds.data(a, 0) = std::cos(t);
        ds.data(a, 1) = std::sin(t);
        ds.data(b, 0) = 1.0 - std::cos(t);
        ds.data(b, 1) = 0.5 - std::sin(t);
        ds.labels[i] = 1;
        ds.labels[half + i] = 2;
    }
    if (noise > 0.0) {
        Rng rng(seed);
        for (Eigen::Index i = 0; i < ds.data.rows(); ++i)
            for (Eigen::Index j = 0; j < 2; ++j) ds.data(i, j) += noise * rng.normal();
    }
    return ds;
}

Dataset select_classes(const Dataset& ds, const std::vector<std::string>& keep) {
    require(!keep.empty(), ErrorCode::InvalidParameter, "class selection is empty");
    std::vector<int> remap(ds.class_names.size() + 1, 0);
    for (std::size_t t = 0; t < keep.size(); ++t) {
        const auto it = std::find(ds.class_names.begin(), ds.class_names.end(), keep[t]);
        require(it != ds.class_names.end(), ErrorCode::InvalidParameter,
                "class '" + keep[t] + "' not present in " + ds.name);
        auto& slot = remap[static_cast<std::size_t>(it - ds.class_names.begin()) + 1];
        require(slot == 0, ErrorCode::InvalidParameter, "class '" + keep[t] + "' listed twice");
        slot = static_cast<int>(t) + 1;
    }
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (remap[static_cast<std::size_t>(ds.labels[i])] != 0) rows.push_back(static_cast<Eigen::Index>(i));

    Dataset out;
    out.name = ds.name;
    out.class_names = keep;
    out.data.resize(static_cast<Eigen::Index>(rows.size()), ds.data.cols());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        out.data.row(static_cast<Eigen::Index>(t)) = ds.data.row(rows[t]);
        out.labels.push_back(remap[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(rows[t])])]);
    }
    return out;
}

std::vector<bool> make_split_mask(const Dataset& ds, const SplitSpec& spec) {
    require(spec.labels_per_class >= 1, ErrorCode::InvalidParameter, "labels_per_class must be >= 1");
    const int c = ds.n_classes();
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(c));
    for (std::size_t i = 0; i < ds.size(); ++i) members[static_cast<std::size_t>(ds.labels[i] - 1)].push_back(i);

    Rng rng(spec.seed);
    std::vector<bool> mask(ds.size(), false);
    for (int k = 0; k < c; ++k) {
        auto& m = members[static_cast<std::size_t>(k)];
        require(m.size() >= spec.labels_per_class, ErrorCode::InsufficientLabels,
                "class '" + ds.class_names[static_cast<std::size_t>(k)] + "' has " +
                    std::to_string(m.size()) + " members, " + std::to_string(spec.labels_per_class) +
                    " labels requested");
        rng.partial_shuffle(m, spec.labels_per_class);
        for (std::size_t t = 0; t < spec.labels_per_class; ++t) mask[m[t]] = true;
    }
    return mask;
}

std::vector<int> binary_labels(const Dataset& ds) {
    require(ds.n_classes() == 2, ErrorCode::InvalidParameter,
            "binary methods need exactly two classes, dataset has " + std::to_string(ds.n_classes()));
    std::vector<int> y(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) y[i] = ds.labels[i] == 1 ? 1 : -1;
    return y;
}

LabeledSet make_binary_split(const Dataset& ds, const SplitSpec& spec) {
    const std::vector<int> y = binary_labels(ds);
    return LabeledSet(y, make_split_mask(ds, spec));
}

MultiLabelSet make_multiclass_split(const Dataset& ds, const SplitSpec& spec) {
    const std::vector<bool> mask = make_split_mask(ds, spec);
    std::vector<int> cls(ds.size(), -1);
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (mask[i]) cls[i] = ds.labels[i] - 1;
    return MultiLabelSet(std::move(cls), ds.n_classes());
}

}  // namespace tvssl
