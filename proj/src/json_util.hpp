#pragma once

#include "tvssl/error.hpp"
#include "tvssl/types.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace tvssl::detail {

using Json = nlohmann::json;

/// Rejects keys outside `allowed` so typos in configs fail loudly.
inline void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    require(obj.is_object(), ErrorCode::Parse, where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok |= it.key() == a;
        require(ok, ErrorCode::Parse, "unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
T get_as(const Json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, where + "." + key + ": " + e.what());
    }
}

template <class T>
void read_opt(const Json& obj, const char* key, T& out, const std::string& where) {
    if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

inline const char* norm_scale_name(NormScale s) { return s == NormScale::N ? "n" : "sqrt_n"; }

inline NormScale parse_norm_scale(const std::string& s) {
    if (s == "n") return NormScale::N;
    if (s == "sqrt_n") return NormScale::SqrtN;
    fail(ErrorCode::Parse, "norm_scale must be \"n\" or \"sqrt_n\", got '" + s + "'");
}

inline Json hp_to_json(const HyperParams& hp) {
    return Json{{"eta", hp.eta},
                {"lambda", hp.lambda},
                {"gamma", hp.gamma},
                {"mu", hp.mu},
                {"r", hp.r},
                {"r1", hp.r1},
                {"r2", hp.r2},
                {"c", hp.c},
                {"outer_iters", hp.outer_iters},
                {"inner_iters", hp.inner_iters},
                {"tol", hp.tol},
                {"qp_tol", hp.qp_tol},
                {"qp_iters", hp.qp_iters},
                {"norm_scale", norm_scale_name(hp.norm_scale)},
                {"simplex_last", hp.simplex_last},
                {"use_bias", hp.use_bias},
                {"unlabeled_margins", hp.unlabeled_margins}};
}

/// Overlays the keys present in `obj` onto `hp`.
inline void hp_from_json(const Json& obj, HyperParams& hp, const std::string& where) {
    check_keys(obj, {"eta", "lambda", "gamma", "mu", "r", "r1", "r2", "c", "outer_iters", "inner_iters",
                     "tol", "qp_tol", "qp_iters", "norm_scale", "simplex_last", "use_bias",
                     "unlabeled_margins"},
               where);
    read_opt(obj, "eta", hp.eta, where);
    read_opt(obj, "lambda", hp.lambda, where);
    read_opt(obj, "gamma", hp.gamma, where);
    read_opt(obj, "mu", hp.mu, where);
    read_opt(obj, "r", hp.r, where);
    read_opt(obj, "r1", hp.r1, where);
    read_opt(obj, "r2", hp.r2, where);
    read_opt(obj, "c", hp.c, where);
    read_opt(obj, "outer_iters", hp.outer_iters, where);
    read_opt(obj, "inner_iters", hp.inner_iters, where);
    read_opt(obj, "tol", hp.tol, where);
    read_opt(obj, "qp_tol", hp.qp_tol, where);
    read_opt(obj, "qp_iters", hp.qp_iters, where);
    if (obj.contains("norm_scale")) hp.norm_scale = parse_norm_scale(get_as<std::string>(obj, "norm_scale", where));
    read_opt(obj, "simplex_last", hp.simplex_last, where);
    read_opt(obj, "use_bias", hp.use_bias, where);
    read_opt(obj, "unlabeled_margins", hp.unlabeled_margins, where);
}

inline Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::Parse, what + ": " + e.what());
    }
}

}  // namespace tvssl::detail
