/*
   Copyright 2026 The equitoda Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef EQUITODA_MODEL_HPP
#define EQUITODA_MODEL_HPP

#include <map>

#include "equitoda/shiftop.hpp"

namespace equitoda {

/// v - tau P u, the image of vbar in the reduced model.
inline LocalPoly vbar_image(int order)
{
    LocalPoly pu = p_op(order).apply(lp_var(gen::u, order), DMode::reduced);
    return lp_var(gen::v, order) - lp_tau(order) * pu;
}

/// Maps the free algebra into the reduced model q^{+-1}, jets of u, v, constants z:
/// a_k goes to a supplied expression, abar_k to the reduction of its conjugate,
/// vbar to v - tau P u, and every q jet is rewritten using dq = q du.
class ModelReduction {
public:
    explicit ModelReduction(int order)
        : order_(order), sub_(DMode::reduced, order), vbar_only_(DMode::reduced, order)
    {
        sub_.set(gen::vbar, vbar_image(order));
        vbar_only_.set(gen::vbar, vbar_image(order));
        sub_.require([](Gen g) {
            auto k = gen::kind(g);
            return (k == gen::Kind::a || k == gen::Kind::abar) && gen::index(g) >= 2;
        });
    }

    int order() const { return order_; }

    /// Registers the reduced expression of a_k (k >= 2); abar_k follows by conjugation.
    void set_coefficient(int k, const LocalPoly& expr)
    {
        if (k < 2) {
            throw std::invalid_argument("ModelReduction: a_1 = v is never substituted");
        }
        table_.insert_or_assign(k, expr);
        sub_.set(gen::a(k), expr);
        sub_.set(gen::abar(k), conj_reduced(expr));
    }
    bool has_coefficient(int k) const { return k < 2 || table_.count(k) != 0; }
    const std::map<int, LocalPoly>& table() const { return table_; }

    LocalPoly operator()(const LocalPoly& p) const { return sub_(p); }

    /// Conjugation inside the reduced model: conjugate, then push vbar back into the model.
    LocalPoly conj_reduced(const LocalPoly& p) const { return vbar_only_(conjugate_poly(p)); }

    /// Replaces vbar by v - tau P u and nothing else.
    LocalPoly eliminate_vbar(const LocalPoly& p) const { return vbar_only_(p); }

private:
    int order_;
    Substitution sub_;
    Substitution vbar_only_;
    std::map<int, LocalPoly> table_;
};

inline LocalPoly reduce_to_model(const ModelReduction& r, const LocalPoly& p) { return r(p); }

} // namespace equitoda

#endif // EQUITODA_MODEL_HPP
