#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kirchhoff {

/// Coefficients of the diffusion law M(s) = a + b*s and the reaction exponent q,
/// together with the spatial dimension the run targets.
struct ModelParams {
    double a = 1.0;
    double b = 1.0;
    double q = 5.0;
    int n = 1;
};

/// Structural checks that need no mesh: a, b > 0 and q >= 3.
/// The q == 3 case additionally needs b < S^4, which can only be checked once the
/// embedding constant is known; pass it when available. For n in {1,2} the upper
/// restriction on q is vacuous, which the validator records as a note.
struct ParamValidation {
    std::vector<std::string> errors;
    std::vector<std::string> notes;
    bool ok() const { return errors.empty(); }
};

ParamValidation validate_params(const ModelParams& p, std::optional<double> sobolev_S = {});

/// Throws std::domain_error listing all problems if validation fails.
void ensure_valid(const ModelParams& p, std::optional<double> sobolev_S = {});

} // namespace kirchhoff
