#include "adsl/vm/compare.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace adsl::vm {

Tolerance default_tolerance(dsl::DType t) {
    if (t == dsl::DType::F16) return {1e-2, 1e-3};
    return {1e-5, 1e-6};
}

std::string ComparisonReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "FAIL") << " worst_index=" << worst_index << " worst_abs_error=" << worst_abs_error;
    if (!pass) os << " failures=" << failures;
    return os.str();
}

ComparisonReport compare_tensors(const TensorValue& a, const TensorValue& b, double rel_tol, double abs_tol) {
    if (a.shape != b.shape)
        throw std::invalid_argument("shape mismatch: " + shape_string(a.shape) + " vs " + shape_string(b.shape));
    if (a.dtype != b.dtype)
        throw std::invalid_argument("dtype mismatch: " + std::string(dsl::dtype_name(a.dtype)) + " vs " +
                                    std::string(dsl::dtype_name(b.dtype)));
    ComparisonReport r;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double x = a.data[i], y = b.data[i];
        double err = 0.0, excess = 0.0;
        if (std::isnan(x) || std::isnan(y)) {
            if (std::isnan(x) && std::isnan(y)) continue;
            err = INFINITY;
            excess = INFINITY;
        } else if (x != y) {
            err = std::fabs(x - y);
            excess = err - (abs_tol + rel_tol * std::fabs(y));
            if (std::isnan(excess)) excess = INFINITY;  // inf - inf
        } else {
            excess = -(abs_tol + rel_tol * std::fabs(y));
        }
        if (excess > 0) {
            r.pass = false;
            ++r.failures;
        }
        if (excess > worst) {
            worst = excess;
            r.worst_index = static_cast<int64_t>(i);
            r.worst_abs_error = err;
            r.worst_excess = excess;
        }
    }
    return r;
}

}  // namespace adsl::vm
