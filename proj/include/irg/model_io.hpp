#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "types.hpp"

namespace irg {

struct ModelConfig {
    TypeSpace types;
    Measure mu;
    Kernel kappa;
    std::optional<Kernel> kappa_n;  // finite-N kernel override; defaults to kappa

    const Kernel& effective_kappa_n() const { return kappa_n ? *kappa_n : kappa; }
};

namespace detail {

inline Kernel parse_kernel(const nlohmann::json& j, std::size_t n, const std::string& name) {
    if (!j.is_array() || j.size() != n)
        throw std::invalid_argument("model: '" + name + "' must be a " + std::to_string(n) + "x" +
                                    std::to_string(n) + " matrix");
    Kernel k(n);
    for (std::size_t r = 0; r < n; ++r) {
        if (!j[r].is_array() || j[r].size() != n)
            throw std::invalid_argument("model: '" + name + "' row " + std::to_string(r) + " has wrong length");
        for (std::size_t s = 0; s < n; ++s) {
            double v = j[r][s].get<double>();
            if (!(v >= 0))
                throw std::invalid_argument("model: '" + name + "' entry (" + std::to_string(r) + "," +
                                            std::to_string(s) + ") is negative");
            k(r, s) = v;
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r + 1; s < n; ++s)
            if (k(r, s) != k(s, r))
                throw std::invalid_argument("model: '" + name + "' is not symmetric at (" + std::to_string(r) +
                                            "," + std::to_string(s) + ")");
    return k;
}

}  // namespace detail

inline ModelConfig parse_model(const nlohmann::json& j) {
    if (j.contains("schema") && j["schema"].get<int>() != 1)
        throw std::invalid_argument("model: unsupported schema version");
    for (const char* key : {"types", "mu", "kappa"})
        if (!j.contains(key)) throw std::invalid_argument(std::string("model: missing '") + key + "'");

    ModelConfig m;
    for (const auto& label : j["types"]) m.types.labels.push_back(label.get<std::string>());
    m.types.validate();
    const std::size_t n = m.types.size();

    if (!j["mu"].is_array() || j["mu"].size() != n)
        throw std::invalid_argument("model: 'mu' must have one entry per type");
    m.mu = Measure(n);
    for (std::size_t s = 0; s < n; ++s) {
        double v = j["mu"][s].get<double>();
        if (!(v >= 0)) throw std::invalid_argument("model: 'mu' entries must be >= 0");
        if (v > 0 && v < 1e-15)
            throw std::invalid_argument("model: 'mu' entry below 1e-15 is ambiguous (use exact 0)");
        m.mu[s] = v;
    }
    if (std::abs(m.mu.total() - 1.0) > 1e-12)
        throw std::invalid_argument("model: 'mu' must sum to 1 within 1e-12");

    m.kappa = detail::parse_kernel(j["kappa"], n, "kappa");
    if (j.contains("kappa_N")) m.kappa_n = detail::parse_kernel(j["kappa_N"], n, "kappa_N");
    return m;
}

inline ModelConfig load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("model: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("model: " + path + ": " + e.what());
    }
    return parse_model(j);
}

}  // namespace irg
