#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chorea/loop.hpp"

// Topological classes: sign vectors of the generating body's y-coordinate at
// the checkpoints k pi/N, the * involution induced by the omega = N frame
// change, and compatibility with the H_N symmetry.

namespace chorea {

inline constexpr double kCheckpointTol = 1e-10;

// xi in {+1,-1}^{N-1}; entry i (0-based) is the sign at checkpoint (i+1) pi/N.
struct SignPattern {
    std::vector<int> xi;

    int n_bodies() const { return static_cast<int>(xi.size()) + 1; }
    bool operator==(const SignPattern& o) const { return xi == o.xi; }
    bool operator!=(const SignPattern& o) const { return !(*this == o); }

    std::string str() const {
        std::string s;
        for (int v : xi) s += (v > 0 ? '+' : '-');
        return s;
    }

    static SignPattern parse(const std::string& text, int n) {
        SignPattern p;
        if (text.find(',') != std::string::npos) {
            size_t pos = 0;
            while (pos < text.size()) {
                size_t next = text.find(',', pos);
                if (next == std::string::npos) next = text.size();
                const std::string tok = text.substr(pos, next - pos);
                if (tok == "1" || tok == "+1")
                    p.xi.push_back(1);
                else if (tok == "-1")
                    p.xi.push_back(-1);
                else
                    throw ConfigError("xi: bad token '" + tok + "'");
                pos = next + 1;
            }
        } else {
            for (char ch : text) {
                if (ch == '+')
                    p.xi.push_back(1);
                else if (ch == '-')
                    p.xi.push_back(-1);
                else
                    throw ConfigError(std::string("xi: bad character '") + ch + "'");
            }
        }
        if (static_cast<int>(p.xi.size()) != n - 1)
            throw ConfigError("xi: expected " + std::to_string(n - 1) + " entries, got " +
                              std::to_string(p.xi.size()));
        return p;
    }
};

// xi_i = sign(y_0(i pi/N)); nullopt when any checkpoint magnitude is below the
// tolerance (the loop sits on the boundary of the class closure).
inline std::optional<SignPattern> classify(const SampledLoop& sl, double tol = kCheckpointTol) {
    require_grid(sl.m, sl.n);
    SignPattern p;
    const int stride = sl.m / (2 * sl.n);
    for (int i = 1; i <= sl.n - 1; ++i) {
        const double y = sl.nodes[i * stride].body(0).y;
        if (std::abs(y) < tol) return std::nullopt;
        p.xi.push_back(y > 0 ? 1 : -1);
    }
    return p;
}

inline std::optional<SignPattern> classify(const FourierLoop& fl, double tol = kCheckpointTol) {
    SignPattern p;
    for (int i = 1; i <= fl.sym.n - 1; ++i) {
        const double y = fl.y_checkpoint(i);
        if (std::abs(y) < tol) return std::nullopt;
        p.xi.push_back(y > 0 ? 1 : -1);
    }
    return p;
}

// xi*_i = -xi_i for odd i, xi_i for even i (1-based checkpoint index).
inline SignPattern xi_star(const SignPattern& p) {
    SignPattern out = p;
    for (size_t j = 0; j < out.xi.size(); ++j) {
        const int i = static_cast<int>(j) + 1;
        if (i % 2 == 1) out.xi[j] = -out.xi[j];
    }
    return out;
}

inline SignPattern negate(const SignPattern& p) {
    SignPattern out = p;
    for (int& v : out.xi) v = -v;
    return out;
}

// Compatibility of the xi-topological constraints with the H_N symmetry:
// |xi_i - xi_{N-i}| = 2 (N odd) or 0 (N even) for all 1 <= i <= [(N-1)/2].
inline bool hn_compatible(const SignPattern& p, int n) {
    if (static_cast<int>(p.xi.size()) != n - 1) return false;
    for (int i = 1; i <= (n - 1) / 2; ++i) {
        const int diff = std::abs(p.xi[i - 1] - p.xi[n - i - 1]);
        if (n % 2 == 1 && diff != 2) return false;
        if (n % 2 == 0 && diff != 0) return false;
    }
    return true;
}

}  // namespace chorea
