#include "tvssl/model_io.hpp"

#include "json_util.hpp"

namespace tvssl {

using detail::get_as;
using detail::Json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json channels_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) out.push_back(to_std(m.col(k)));
    return out;
}

Matrix channels_from_json(const Json& j, Eigen::Index n, const char* what) {
    require(j.is_array(), ErrorCode::Parse, std::string(what) + " must be an array of channels");
    Matrix m(n, static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto col = j[k].get<std::vector<double>>();
        require(static_cast<Eigen::Index>(col.size()) == n, ErrorCode::Parse,
                std::string(what) + " channel " + std::to_string(k) + " has the wrong length");
        m.col(static_cast<Eigen::Index>(k)) = to_eigen(col);
    }
    return m;
}

}  // namespace

std::string model_to_json(const BinaryModel& m) {
    std::vector<long long> expansion(m.expansion.begin(), m.expansion.end());
    const Json j{{"format", "tvssl-model"},
                 {"version", 1},
                 {"variant", variant_name(m.variant)},
                 {"classes", 2},
                 {"n", m.node_values.size() > 0 ? m.node_values.size() : m.alpha.size()},
                 {"bandwidth", m.bandwidth},
                 {"bias", m.bias},
                 {"hyperparams", detail::hp_to_json(m.hp)},
                 {"expansion", expansion},
                 {"alpha", to_std(m.alpha)},
                 {"node_values", to_std(m.node_values)}};
    return j.dump(2) + "\n";
}

std::string model_to_json(const MulticlassModel& m) {
    const Json j{{"format", "tvssl-model"},
                 {"version", 1},
                 {"variant", variant_name(m.variant)},
                 {"classes", m.alphas.cols()},
                 {"n", m.alphas.rows()},
                 {"bandwidth", m.bandwidth},
                 {"hyperparams", detail::hp_to_json(m.hp)},
                 {"alphas", channels_to_json(m.alphas)},
                 {"node_values", channels_to_json(m.node_values)}};
    return j.dump(2) + "\n";
}

AnyModel model_from_json(const std::string& text) {
    const Json j = detail::parse_json(text, "model");
    require(j.is_object() && j.value("format", "") == "tvssl-model", ErrorCode::Parse,
            "not a tvssl model document");
    require(get_as<int>(j, "version", "model") == 1, ErrorCode::Unsupported, "unsupported model version");
    const Variant v = parse_variant(get_as<std::string>(j, "variant", "model"));
    HyperParams hp;
    detail::hp_from_json(get_as<Json>(j, "hyperparams", "model"), hp, "model.hyperparams");
    const double bw = get_as<double>(j, "bandwidth", "model");
    const auto n = get_as<Eigen::Index>(j, "n", "model");

    if (j.contains("alphas")) {
        MulticlassModel m;
        m.variant = v;
        m.hp = hp;
        m.bandwidth = bw;
        m.alphas = channels_from_json(j["alphas"], n, "alphas");
        m.node_values = channels_from_json(j["node_values"], n, "node_values");
        require(m.alphas.cols() == get_as<Eigen::Index>(j, "classes", "model") && m.alphas.cols() >= 2,
                ErrorCode::Parse, "class count does not match the channel blocks");
        return m;
    }
    BinaryModel m;
    m.variant = v;
    m.hp = hp;
    m.bandwidth = bw;
    m.bias = get_as<double>(j, "bias", "model");
    m.alpha = to_eigen(get_as<std::vector<double>>(j, "alpha", "model"));
    m.node_values = to_eigen(get_as<std::vector<double>>(j, "node_values", "model"));
    for (long long i : get_as<std::vector<long long>>(j, "expansion", "model")) m.expansion.push_back(i);
    require(m.expansion.empty() || m.expansion.size() == static_cast<std::size_t>(m.alpha.size()),
            ErrorCode::Parse, "expansion and alpha lengths differ");
    return m;
}

}  // namespace tvssl
