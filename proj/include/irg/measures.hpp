#pragma once

#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace irg {

// (kappa nu)(r) = sum_s kappa(r,s) nu_s
inline Measure kappa_apply(const Kernel& kappa, const Measure& nu) {
    if (kappa.n != nu.size()) throw std::invalid_argument("kappa_apply: dimension mismatch");
    Measure out(nu.size());
    for (std::size_t r = 0; r < kappa.n; ++r) {
        double s = 0;
        for (std::size_t c = 0; c < kappa.n; ++c) s += kappa(r, c) * nu[c];
        out[r] = s;
    }
    return out;
}

// H(nu | nu~) for possibly non-normalized measures; +inf when nu has mass
// where nu~ has none.
inline double relative_entropy(const Measure& nu, const Measure& nu_ref) {
    if (nu.size() != nu_ref.size()) throw std::invalid_argument("relative_entropy: dimension mismatch");
    double h = nu_ref.total() - nu.total();
    for (std::size_t s = 0; s < nu.size(); ++s) {
        if (nu[s] == 0) continue;
        if (nu_ref[s] == 0) return kInf;
        h += nu[s] * std::log(nu[s] / nu_ref[s]);
    }
    return h;
}

// c_r(lambda) = sum_k lambda_k k_r
inline Measure integrated_config(const MicroMeasure& lambda, std::size_t n_types) {
    Measure c(n_types);
    for (const auto& [k, w] : lambda.weights) {
        if (k.size() != n_types) throw std::invalid_argument("integrated_config: dimension mismatch");
        for (std::size_t r = 0; r < n_types; ++r) c[r] += w * static_cast<double>(k[r]);
    }
    return c;
}

// c_r(alpha) = sum_n y_n(r)
inline Measure integrated_config(const MacroMeasure& alpha, std::size_t n_types) {
    Measure c(n_types);
    for (const auto& y : alpha.atoms) {
        if (y.size() != n_types) throw std::invalid_argument("integrated_config: dimension mismatch");
        for (std::size_t r = 0; r < n_types; ++r) c[r] += y[r];
    }
    return c;
}

struct IrreducibleClasses {
    std::vector<std::vector<std::size_t>> classes;  // partition of supp(mu)
    std::vector<int> class_of;                      // -1 for types outside supp(mu)

    std::size_t count() const { return classes.size(); }
};

// Maximal classes of supp(mu) connected through strictly positive kappa
// entries. Support uses exact-zero semantics.
inline IrreducibleClasses irreducible_classes(const Kernel& kappa, const Measure& mu) {
    if (kappa.n != mu.size()) throw std::invalid_argument("irreducible_classes: dimension mismatch");
    const std::size_t n = mu.size();
    IrreducibleClasses out;
    out.class_of.assign(n, -1);
    for (std::size_t start = 0; start < n; ++start) {
        if (mu[start] == 0 || out.class_of[start] >= 0) continue;
        int id = static_cast<int>(out.classes.size());
        std::vector<std::size_t> stack{start}, members;
        out.class_of[start] = id;
        while (!stack.empty()) {
            std::size_t r = stack.back();
            stack.pop_back();
            members.push_back(r);
            for (std::size_t s = 0; s < n; ++s) {
                if (mu[s] == 0 || out.class_of[s] >= 0 || kappa(r, s) == 0) continue;
                out.class_of[s] = id;
                stack.push_back(s);
            }
        }
        std::sort(members.begin(), members.end());
        out.classes.push_back(std::move(members));
    }
    return out;
}

inline bool is_irreducible(const Kernel& kappa, const Measure& mu) {
    return irreducible_classes(kappa, mu).count() <= 1;
}

// true iff every atom of alpha is supported inside a single irreducible class
inline bool connectable(const MacroMeasure& alpha, const IrreducibleClasses& classes) {
    for (const auto& y : alpha.atoms) {
        int cls = -2;
        for (std::size_t r = 0; r < y.size(); ++r) {
            if (y[r] == 0) continue;
            if (classes.class_of[r] < 0) return false;
            if (cls == -2)
                cls = classes.class_of[r];
            else if (cls != classes.class_of[r])
                return false;
        }
    }
    return true;
}

}  // namespace irg
