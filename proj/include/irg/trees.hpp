#pragma once

#include <algorithm>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "numeric.hpp"
#include "types.hpp"

namespace irg {

enum class TauMethod { enumeration, matrix_tree, closed_form };

struct TreeWeight {
    double value;      // exp(log_value); inf if it overflows
    double log_value;  // -inf iff no positive-weight spanning tree exists
    TauMethod method;
};

inline TreeWeight make_tree_weight(double log_value, TauMethod method) {
    return {std::exp(log_value), log_value, method};
}

// Sum over all directed trees on supp(k) rooted at r, edges away from the
// root, edge (s,s') weighted kappa(s,s') * k_s.
inline double delta_r(const TypeConfig& k, const Kernel& kappa, std::size_t r) {
    auto supp = k.support();
    const std::size_t m = supp.size();
    if (m == 0) return 0.0;
    std::size_t root = m;
    for (std::size_t i = 0; i < m; ++i)
        if (supp[i] == r) root = i;
    if (root == m) return 0.0;  // r outside supp(k)
    if (m == 1) return 1.0;     // single-vertex tree, empty product

    // parent map over the non-root vertices; keep only acyclic maps
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < m; ++i)
        if (i != root) others.push_back(i);
    std::vector<std::size_t> parent(m, m);
    double total = 0;
    std::vector<std::size_t> digits(others.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < others.size(); ++i) parent[others[i]] = digits[i];
        bool tree = true;
        for (std::size_t i = 0; i < m && tree; ++i) {
            std::size_t v = i, hops = 0;
            while (v != root) {
                v = parent[v];
                if (++hops > m) {
                    tree = false;
                    break;
                }
            }
        }
        if (tree) {
            double w = 1;
            for (std::size_t child : others) {
                std::size_t p = parent[child];
                w *= kappa(supp[p], supp[child]) * static_cast<double>(k[supp[p]]);
            }
            total += w;
        }
        std::size_t pos = 0;
        while (pos < digits.size() && ++digits[pos] == m) digits[pos++] = 0;
        if (pos == digits.size()) break;
    }
    return total;
}

// tau(k) = (prod_s (kappa k)_s^(k_s - 1)) * Delta_r(k) / k_r, any r in supp(k).
// Returned in log form; -inf encodes tau = 0.
inline double log_tau_closed_form(const TypeConfig& k, const Kernel& kappa, std::size_t r) {
    if (k.total() == 0) return -kInf;
    if (k[r] < 1) throw std::invalid_argument("tau_closed_form: root type needs k_r >= 1");
    std::vector<double> kk(k.size(), 0.0);
    for (std::size_t s = 0; s < k.size(); ++s)
        for (std::size_t u = 0; u < k.size(); ++u) kk[s] += kappa(s, u) * static_cast<double>(k[u]);
    double log_prod = 0;
    for (std::size_t s : k.support()) {
        if (k[s] == 1) continue;  // (kappa k)_s^0 = 1 even when (kappa k)_s = 0
        if (kk[s] == 0) return -kInf;
        log_prod += static_cast<double>(k[s] - 1) * std::log(kk[s]);
    }
    double d = delta_r(k, kappa, r);
    if (d == 0) return -kInf;
    return log_prod + std::log(d) - std::log(static_cast<double>(k[r]));
}

inline TreeWeight tau_closed_form(const TypeConfig& k, const Kernel& kappa, std::size_t r) {
    return make_tree_weight(log_tau_closed_form(k, kappa, r), TauMethod::closed_form);
}

// Exact sum over all |k|^(|k|-2) labeled spanning trees via Prufer sequences.
inline TreeWeight tau_enumerate(const TypeConfig& k, const Kernel& kappa) {
    const std::int64_t n64 = k.total();
    if (n64 == 0) return make_tree_weight(-kInf, TauMethod::enumeration);
    if (n64 > 9) throw std::invalid_argument("tau_enumerate: |k| > 9 exceeds enumeration budget");
    const std::size_t n = static_cast<std::size_t>(n64);
    auto x = expand_types(k);
    if (n == 1) return make_tree_weight(0.0, TauMethod::enumeration);
    if (n == 2) return make_tree_weight(log0(kappa(x[0], x[1])), TauMethod::enumeration);

    double total = 0;
    std::vector<std::size_t> seq(n - 2, 0);
    std::vector<int> degree(n);
    while (true) {
        std::fill(degree.begin(), degree.end(), 1);
        for (std::size_t a : seq) ++degree[a];
        double w = 1;
        for (std::size_t a : seq) {
            std::size_t leaf = 0;
            while (degree[leaf] != 1) ++leaf;
            w *= kappa(x[leaf], x[a]);
            degree[leaf] = 0;
            --degree[a];
        }
        std::size_t u = 0;
        while (degree[u] != 1) ++u;
        std::size_t v = u + 1;
        while (degree[v] != 1) ++v;
        total += w * kappa(x[u], x[v]);

        std::size_t pos = 0;
        while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
        if (pos == seq.size()) break;
    }
    return make_tree_weight(log0(total), TauMethod::enumeration);
}

// Weighted matrix-tree theorem: tau(k) is any principal minor of the weighted
// Laplacian of the complete graph on |k| vertices with weights kappa(x_i,x_j).
inline TreeWeight tau_matrix_tree(const TypeConfig& k, const Kernel& kappa) {
    const std::int64_t n64 = k.total();
    if (n64 == 0) return make_tree_weight(-kInf, TauMethod::matrix_tree);
    const std::size_t n = static_cast<std::size_t>(n64);
    if (n == 1) return make_tree_weight(0.0, TauMethod::matrix_tree);
    auto x = expand_types(k);
    const std::size_t m = n - 1;  // delete the last row/column
    std::vector<double> lap(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double diag = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double w = kappa(x[i], x[j]);
            diag += w;
            if (i < m && j < m) lap[i * m + j] = -w;
        }
        if (i < m) lap[i * m + i] = diag;
    }
    LogDet d = log_det(std::move(lap), m);
    if (d.sign <= 0) return make_tree_weight(-kInf, TauMethod::matrix_tree);
    return make_tree_weight(d.log_abs, TauMethod::matrix_tree);
}

// Cache for the closed-form route; concurrent reads, single writer.
class TauTable {
  public:
    explicit TauTable(Kernel kappa) : kappa_(std::move(kappa)) {}

    const Kernel& kernel() const { return kappa_; }

    double log_tau(const TypeConfig& k) const {
        {
            std::shared_lock lock(mutex_);
            auto it = cache_.find(k);
            if (it != cache_.end()) return it->second;
        }
        auto supp = k.support();
        double v = supp.empty() ? -kInf : log_tau_closed_form(k, kappa_, supp.front());
        std::unique_lock lock(mutex_);
        cache_.emplace(k, v);
        return v;
    }

    double tau(const TypeConfig& k) const { return std::exp(log_tau(k)); }

  private:
    Kernel kappa_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<TypeConfig, double, TypeConfigHash> cache_;
};

struct IdentityCheck {
    double lhs;
    double rhs;
    double residual;  // |lhs - rhs|
};

// Recursion (weight of trees split along one marked edge):
//   sum_{r,s} kappa(r,s) sum_{m + m~ = k} multinomial * tau(m) m_r * tau(m~) m~_s
//   = 2 (|k| - 1) tau(k)
inline IdentityCheck check_recursion(const TypeConfig& k, const Kernel& kappa) {
    if (k.total() < 1 || k.total() > 8) throw std::invalid_argument("check_recursion: need 1 <= |k| <= 8");
    TauTable table(kappa);
    const std::size_t n_types = k.size();
    double lhs = 0;
    TypeConfig m(n_types);
    while (true) {
        TypeConfig mt(n_types);
        for (std::size_t s = 0; s < n_types; ++s) mt[s] = k[s] - m[s];
        if (m.total() > 0 && mt.total() > 0) {
            double multinomial = 1;
            for (std::size_t u = 0; u < n_types; ++u)
                multinomial *= factorial(k[u]) / (factorial(m[u]) * factorial(mt[u]));
            double tm = table.tau(m), tmt = table.tau(mt);
            if (tm > 0 && tmt > 0) {
                for (std::size_t r = 0; r < n_types; ++r) {
                    if (m[r] == 0) continue;
                    for (std::size_t s = 0; s < n_types; ++s) {
                        if (mt[s] == 0 || kappa(r, s) == 0) continue;
                        lhs += kappa(r, s) * multinomial * tm * static_cast<double>(m[r]) * tmt *
                               static_cast<double>(mt[s]);
                    }
                }
            }
        }
        std::size_t pos = 0;
        while (pos < n_types && ++m[pos] > k[pos]) m[pos++] = 0;
        if (pos == n_types) break;
    }
    double rhs = 2.0 * static_cast<double>(k.total() - 1) * table.tau(k);
    return {lhs, rhs, std::abs(lhs - rhs)};
}

// tau(k) k_r = total weight of labeled trees directed away from a root of
// type r, verified against brute-force enumeration of rooted parent maps.
inline IdentityCheck check_directed_identity(const TypeConfig& k, const Kernel& kappa, std::size_t r) {
    const std::int64_t n64 = k.total();
    if (n64 < 1 || n64 > 7) throw std::invalid_argument("check_directed_identity: need 1 <= |k| <= 7");
    auto x = expand_types(k);
    const std::size_t n = static_cast<std::size_t>(n64);

    // brute force over parent maps; the per-root sum depends on the root only
    // through its type, so enumerate once and scale by k_r
    double per_root = 0;
    if (k[r] >= 1) {
        std::size_t root = n;
        for (std::size_t i = 0; i < n; ++i)
            if (x[i] == r) {
                root = i;
                break;
            }
        if (n == 1) {
            per_root = 1;
        } else {
            std::vector<std::size_t> others;
            for (std::size_t i = 0; i < n; ++i)
                if (i != root) others.push_back(i);
            std::vector<std::size_t> parent(n, n);
            std::vector<std::size_t> digits(others.size(), 0);
            while (true) {
                for (std::size_t i = 0; i < others.size(); ++i) parent[others[i]] = digits[i];
                bool tree = true;
                for (std::size_t i = 0; i < n && tree; ++i) {
                    std::size_t v = i, hops = 0;
                    while (v != root) {
                        v = parent[v];
                        if (++hops > n) {
                            tree = false;
                            break;
                        }
                    }
                }
                if (tree) {
                    double w = 1;
                    for (std::size_t child : others) w *= kappa(x[parent[child]], x[child]);
                    per_root += w;
                }
                std::size_t pos = 0;
                while (pos < digits.size() && ++digits[pos] == n) digits[pos++] = 0;
                if (pos == digits.size()) break;
            }
        }
    }
    double rhs = per_root * static_cast<double>(k[r]);
    double lhs = tau_enumerate(k, kappa).value * static_cast<double>(k[r]);
    return {lhs, rhs, std::abs(lhs - rhs)};
}

}  // namespace irg
