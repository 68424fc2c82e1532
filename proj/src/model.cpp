#include "kirchhoff/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kirchhoff {

ParamValidation validate_params(const ModelParams& p, std::optional<double> sobolev_S) {
    ParamValidation v;
    if (!(p.a > 0.0)) v.errors.push_back("model.a must be positive");
    if (!(p.b > 0.0)) v.errors.push_back("model.b must be positive");
    if (p.n != 1 && p.n != 2) v.errors.push_back("spatial dimension must be 1 or 2");

    if (std::isnan(p.q) || p.q < 3.0) {
        v.errors.push_back("model.q must satisfy q > 3, or q = 3 with b < S^4");
    } else if (p.q == 3.0) {
        if (sobolev_S.has_value()) {
            const double s4 = std::pow(*sobolev_S, 4.0);
            if (!(p.b < s4)) {
                std::ostringstream msg;
                msg << "q = 3 requires b < S^4, but b = " << p.b << " and S^4 = " << s4;
                v.errors.push_back(msg.str());
            }
        } else {
            v.notes.push_back("q = 3 accepted provisionally; b < S^4 is checked once S is known");
        }
    }
    if (p.n == 1 || p.n == 2)
        v.notes.push_back("upper growth restriction on q is vacuous for n in {1,2}");
    return v;
}

void ensure_valid(const ModelParams& p, std::optional<double> sobolev_S) {
    const ParamValidation v = validate_params(p, sobolev_S);
    if (v.ok()) return;
    std::string all = "invalid model parameters:";
    for (const auto& e : v.errors) all += "\n  - " + e;
    throw std::domain_error(all);
}

} // namespace kirchhoff
