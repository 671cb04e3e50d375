#pragma once

#include <algorithm>
#include <string>

#include "frolicher/bicomplex.hpp"
#include "frolicher/models.hpp"
#include "frolicher/rng.hpp"

namespace testutil {

using namespace frolicher;

inline ExteriorModel catalog_model(const std::string& name) {
    return ExteriorModel::build(std::get<StructureSpec>(catalog(name)));
}

inline Form random_form(Rng& rng, const Bicomplex& b, int k) {
    Form u = b.zero_form(k);
    for (auto& [pq, v] : u.components) v = rng.complex_vector(v.size());
    return u;
}

/// 8 seeded h values in the annulus 0.05 <= |h| <= 5 (the property-suite
/// sample).
inline std::vector<Cplx> annulus_sample(std::uint64_t seed = 42, int count = 8) {
    Rng rng(seed);
    std::vector<Cplx> out;
    for (int i = 0; i < count; ++i) out.push_back(rng.annulus(0.05, 5.0));
    return out;
}

inline double op_scale(const Bicomplex& b) {
    double s = 1.0;
    for (int p = 0; p <= b.n(); ++p)
        for (int q = 0; q <= b.n(); ++q) {
            const Mat dl = b.del(p, q);
            const Mat db = b.delbar(p, q);
            if (dl.size()) s = std::max(s, dl.cwiseAbs().maxCoeff());
            if (db.size()) s = std::max(s, db.cwiseAbs().maxCoeff());
        }
    return s;
}

}  // namespace testutil
