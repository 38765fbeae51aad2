#ifndef FZL_DOMAIN_HPP
#define FZL_DOMAIN_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "fzl/vec.hpp"

namespace fzl {

enum class DomainKind { Torus, WholeSpace };

struct Domain {
    DomainKind kind = DomainKind::Torus;
    double side = 1.0; // torus only
    int dim = 2;

    static Domain torus(int d, double L)
    {
        if (L <= 0.0) throw std::invalid_argument("torus side must be positive");
        return Domain{DomainKind::Torus, L, d};
    }
    static Domain whole_space(int d) { return Domain{DomainKind::WholeSpace, 0.0, d}; }

    bool is_torus() const { return kind == DomainKind::Torus; }

    // minimal-image representative of a position difference
    Vec min_image(Vec dx) const
    {
        if (kind == DomainKind::Torus) {
            for (int k = 0; k < dim; ++k) dx[k] -= side * std::rint(dx[k] / side);
        }
        return dx;
    }

    // wrap a position into [0, L)^d
    Vec wrap(Vec x) const
    {
        if (kind == DomainKind::Torus) {
            for (int k = 0; k < dim; ++k) {
                x[k] -= side * std::floor(x[k] / side);
                if (x[k] >= side) x[k] -= side; // floor rounding at the edge
            }
        }
        return x;
    }

    double volume() const
    {
        if (kind != DomainKind::Torus)
            throw std::logic_error("volume only defined on the torus");
        double v = 1.0;
        for (int k = 0; k < dim; ++k) v *= side;
        return v;
    }

    std::string describe() const
    {
        return is_torus() ? ("torus(" + std::to_string(side) + ")") : "whole-space";
    }
};

} // namespace fzl

#endif
