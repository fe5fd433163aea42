#include "adsl/vm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "adsl/dsl/expr.hpp"

namespace adsl::vm {

using dsl::DType;

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kRmsEps = 1e-6;
constexpr double kSgdLr = 0.1;
constexpr double kAdamLr = 1e-3, kAdamB1 = 0.9, kAdamB2 = 0.999, kAdamEps = 1e-8;
constexpr int kAdamStep = 10;
constexpr int64_t kPool = 4;

// Own rounding so the oracle shares no numeric code with the interpreters.
double to_dtype(DType t, double x) {
    switch (t) {
        case DType::F32: return static_cast<double>(static_cast<float>(x));
        case DType::F16: {
            if (!std::isfinite(x) || x == 0.0) return x;
            const double a = std::fabs(x);
            int e = static_cast<int>(std::floor(std::log2(a)));
            if (std::ldexp(1.0, e) > a) --e;
            if (std::ldexp(1.0, e + 1) <= a) ++e;
            const double quantum = std::ldexp(1.0, std::max(e, -14) - 10);
            const double q = a / quantum;
            double r = std::floor(q);
            const double frac = q - r;
            if (frac > 0.5 || (frac == 0.5 && std::fmod(r, 2.0) != 0.0)) r += 1.0;
            const double v = r * quantum;
            return std::copysign(v >= 65520.0 ? INFINITY : v, x);
        }
        case DType::I32: return std::clamp(std::nearbyint(x), -2147483648.0, 2147483647.0);
        case DType::U8: return std::clamp(std::nearbyint(x), 0.0, 255.0);
    }
    return x;
}

struct Rows {
    int64_t rows = 1;
    int64_t cols = 0;
};

Rows rows_of(const TensorValue& t) {
    if (t.shape.size() == 1) return {1, t.shape[0]};
    if (t.shape.size() == 2) return {t.shape[0], t.shape[1]};
    throw std::invalid_argument("oracle tensors must have rank 1 or 2, got " + shape_string(t.shape));
}

const TensorValue& get(const TensorMap& in, const std::string& name) {
    auto it = in.find(name);
    if (it == in.end()) throw std::invalid_argument("oracle input '" + name + "' is missing");
    return it->second;
}

void same_shape(const TensorValue& a, const TensorValue& b, const char* what) {
    if (a.shape != b.shape)
        throw std::invalid_argument(std::string(what) + ": shape " + shape_string(a.shape) + " vs " +
                                    shape_string(b.shape));
}

TensorValue make(DType t, std::vector<int64_t> shape, std::vector<double> v) {
    for (auto& x : v) x = to_dtype(t, x);
    TensorValue out;
    out.dtype = t;
    out.shape = std::move(shape);
    out.data = std::move(v);
    return out;
}

TensorValue elementwise(const TensorValue& x, const std::function<double(double)>& f) {
    std::vector<double> v(x.data.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(x.data[i]);
    return make(x.dtype, x.shape, std::move(v));
}

// Row-wise map: f(row pointer, cols, out row pointer).
TensorValue per_row(const TensorValue& x, int64_t out_cols,
                    const std::function<void(const double*, int64_t, int64_t, double*)>& f) {
    const Rows r = rows_of(x);
    std::vector<double> v(static_cast<std::size_t>(r.rows * out_cols));
    for (int64_t i = 0; i < r.rows; ++i) f(&x.data[static_cast<std::size_t>(i * r.cols)], r.cols, i, &v[static_cast<std::size_t>(i * out_cols)]);
    std::vector<int64_t> shape = x.shape;
    shape.back() = out_cols;
    return make(x.dtype, std::move(shape), std::move(v));
}

TensorValue row_scalar(const TensorValue& x, const std::function<double(const double*, int64_t, int64_t)>& f) {
    const Rows r = rows_of(x);
    std::vector<double> v(static_cast<std::size_t>(r.rows));
    for (int64_t i = 0; i < r.rows; ++i) v[static_cast<std::size_t>(i)] = f(&x.data[static_cast<std::size_t>(i * r.cols)], r.cols, i);
    return make(x.dtype, {r.rows}, std::move(v));
}

double row_mean(const double* p, int64_t n) {
    double s = 0;
    for (int64_t c = 0; c < n; ++c) s += p[c];
    return s / static_cast<double>(n);
}

using Eval = std::function<TensorMap(const TensorMap&)>;

struct Entry {
    OperatorSpec spec;
    Eval eval;
};

const std::vector<Entry>& entries() {
    using K = InputDomain::Kind;
    static const std::vector<Entry> table = {
        {{"relu", "y = max(x, 0)", {{"x", K::Uniform, -2, 2}}, {"y"}},
         [](const TensorMap& in) {
             return TensorMap{{"y", elementwise(get(in, "x"), [](double v) { return v > 0 ? v : 0.0; })}};
         }},
        {{"sigmoid", "y = 1 / (1 + exp(-x))", {{"x", K::Uniform, -6, 6}}, {"y"}},
         [](const TensorMap& in) {
             return TensorMap{{"y", elementwise(get(in, "x"), [](double v) { return 1.0 / (1.0 + std::exp(-v)); })}};
         }},
        {{"mse_rows", "loss[r] = mean_c (pred[r,c] - target[r,c])^2",
          {{"pred", K::Uniform, -1, 1}, {"target", K::Uniform, -1, 1}}, {"loss"}},
         [](const TensorMap& in) {
             const auto& p = get(in, "pred");
             const auto& t = get(in, "target");
             same_shape(p, t, "mse_rows");
             const Rows r = rows_of(p);
             return TensorMap{{"loss", row_scalar(p, [&](const double* row, int64_t n, int64_t i) {
                                   double s = 0;
                                   for (int64_t c = 0; c < n; ++c) {
                                       const double d = row[c] - t.data[static_cast<std::size_t>(i * r.cols + c)];
                                       s += d * d;
                                   }
                                   return s / static_cast<double>(n);
                               })}};
         }},
        {{"hinge_rows", "loss[r] = mean_c max(0, 1 - label[r,c] * score[r,c])",
          {{"score", K::Uniform, -2, 2}, {"label", K::Sign, -1, 1}}, {"loss"}},
         [](const TensorMap& in) {
             const auto& s = get(in, "score");
             const auto& l = get(in, "label");
             same_shape(s, l, "hinge_rows");
             const Rows r = rows_of(s);
             return TensorMap{{"loss", row_scalar(s, [&](const double* row, int64_t n, int64_t i) {
                                   double acc = 0;
                                   for (int64_t c = 0; c < n; ++c)
                                       acc += std::max(0.0, 1.0 - l.data[static_cast<std::size_t>(i * r.cols + c)] * row[c]);
                                   return acc / static_cast<double>(n);
                               })}};
         }},
        {{"cumsum_rows", "y[r,c] = sum_{k<=c} x[r,k]", {{"x", K::Uniform, 0, 1}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             return TensorMap{{"y", per_row(x, rows_of(x).cols, [](const double* row, int64_t n, int64_t, double* out) {
                                   double s = 0;
                                   for (int64_t c = 0; c < n; ++c) out[c] = s += row[c];
                               })}};
         }},
        {{"masked_cumsum_rows", "y[r,c] = sum_{k<=c} (mask[r,k] != 0 ? x[r,k] : 0)",
          {{"x", K::Uniform, 0, 1}, {"mask", K::Mask, 0, 1}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             const auto& m = get(in, "mask");
             same_shape(x, m, "masked_cumsum_rows");
             const Rows r = rows_of(x);
             return TensorMap{{"y", per_row(x, r.cols, [&](const double* row, int64_t n, int64_t i, double* out) {
                                   double s = 0;
                                   for (int64_t c = 0; c < n; ++c) {
                                       if (m.data[static_cast<std::size_t>(i * r.cols + c)] != 0) s += row[c];
                                       out[c] = s;
                                   }
                               })}};
         }},
        {{"softmax_rows", "y[r,c] = exp(x[r,c] - max_k x[r,k]) / sum_k exp(x[r,k] - max_k x[r,k])",
          {{"x", K::Uniform, -4, 4}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             return TensorMap{{"y", per_row(x, rows_of(x).cols, [](const double* row, int64_t n, int64_t, double* out) {
                                   const double mx = *std::max_element(row, row + n);
                                   double s = 0;
                                   for (int64_t c = 0; c < n; ++c) s += out[c] = std::exp(row[c] - mx);
                                   for (int64_t c = 0; c < n; ++c) out[c] /= s;
                               })}};
         }},
        {{"layernorm_rows", "y = (x - mean) / sqrt(var + 1e-5) * gamma + beta, per row",
          {{"x", K::Uniform, -2, 2}, {"gamma", K::Uniform, 0.5, 1.5}, {"beta", K::Uniform, -0.5, 0.5}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             const auto& g = get(in, "gamma");
             const auto& b = get(in, "beta");
             const Rows r = rows_of(x);
             if (g.numel() != r.cols || b.numel() != r.cols)
                 throw std::invalid_argument("layernorm_rows: gamma/beta must have one element per column");
             return TensorMap{{"y", per_row(x, r.cols, [&](const double* row, int64_t n, int64_t, double* out) {
                                   const double mean = row_mean(row, n);
                                   double var = 0;
                                   for (int64_t c = 0; c < n; ++c) var += (row[c] - mean) * (row[c] - mean);
                                   var /= static_cast<double>(n);
                                   const double inv = 1.0 / std::sqrt(var + kLnEps);
                                   for (int64_t c = 0; c < n; ++c)
                                       out[c] = (row[c] - mean) * inv * g.data[static_cast<std::size_t>(c)] +
                                                b.data[static_cast<std::size_t>(c)];
                               })}};
         }},
        {{"rmsnorm_rows", "y = x / sqrt(mean(x^2) + 1e-6) * gamma, per row",
          {{"x", K::Uniform, -2, 2}, {"gamma", K::Uniform, 0.5, 1.5}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             const auto& g = get(in, "gamma");
             const Rows r = rows_of(x);
             if (g.numel() != r.cols) throw std::invalid_argument("rmsnorm_rows: gamma must have one element per column");
             return TensorMap{{"y", per_row(x, r.cols, [&](const double* row, int64_t n, int64_t, double* out) {
                                   double ss = 0;
                                   for (int64_t c = 0; c < n; ++c) ss += row[c] * row[c];
                                   const double inv = 1.0 / std::sqrt(ss / static_cast<double>(n) + kRmsEps);
                                   for (int64_t c = 0; c < n; ++c) out[c] = row[c] * inv * g.data[static_cast<std::size_t>(c)];
                               })}};
         }},
        {{"maxabs_norm", "y = x / max_i |x_i| over the whole tensor", {{"x", K::Uniform, -3, 3}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             double m = 0;
             for (double v : x.data) m = std::max(m, std::fabs(v));
             return TensorMap{{"y", elementwise(x, [m](double v) { return v / m; })}};
         }},
        {{"sgd", "theta_out = theta - 0.1 * grad", {{"theta", K::Uniform, -1, 1}, {"grad", K::Uniform, -1, 1}},
          {"theta_out"}},
         [](const TensorMap& in) {
             const auto& th = get(in, "theta");
             const auto& g = get(in, "grad");
             same_shape(th, g, "sgd");
             std::vector<double> v(th.data.size());
             for (std::size_t i = 0; i < v.size(); ++i) v[i] = th.data[i] - kSgdLr * g.data[i];
             return TensorMap{{"theta_out", make(th.dtype, th.shape, std::move(v))}};
         }},
        {{"adam",
          "m' = 0.9 m + 0.1 g; v' = 0.999 v + 0.001 g^2; theta' = theta - 1e-3 * mhat / (sqrt(vhat) + 1e-8), "
          "mhat = m' / (1 - 0.9^10), vhat = v' / (1 - 0.999^10)",
          {{"theta", K::Uniform, -1, 1}, {"grad", K::Uniform, -1, 1}, {"m", K::Uniform, -0.1, 0.1}, {"v", K::Uniform, 0.001, 0.01}},
          {"theta_out", "m_out", "v_out"}},
         [](const TensorMap& in) {
             const auto& th = get(in, "theta");
             const auto& g = get(in, "grad");
             const auto& m = get(in, "m");
             const auto& v = get(in, "v");
             same_shape(th, g, "adam");
             same_shape(th, m, "adam");
             same_shape(th, v, "adam");
             const double c1 = 1.0 - std::pow(kAdamB1, kAdamStep);
             const double c2 = 1.0 - std::pow(kAdamB2, kAdamStep);
             const std::size_t n = th.data.size();
             std::vector<double> to(n), mo(n), vo(n);
             for (std::size_t i = 0; i < n; ++i) {
                 mo[i] = kAdamB1 * m.data[i] + (1 - kAdamB1) * g.data[i];
                 vo[i] = kAdamB2 * v.data[i] + (1 - kAdamB2) * g.data[i] * g.data[i];
                 to[i] = th.data[i] - kAdamLr * (mo[i] / c1) / (std::sqrt(vo[i] / c2) + kAdamEps);
             }
             return TensorMap{{"theta_out", make(th.dtype, th.shape, std::move(to))},
                              {"m_out", make(th.dtype, th.shape, std::move(mo))},
                              {"v_out", make(th.dtype, th.shape, std::move(vo))}};
         }},
        {{"sum_rows", "y[r] = sum_c x[r,c]", {{"x", K::Uniform, 0, 1}}, {"y"}},
         [](const TensorMap& in) {
             return TensorMap{{"y", row_scalar(get(in, "x"), [](const double* row, int64_t n, int64_t) {
                                   double s = 0;
                                   for (int64_t c = 0; c < n; ++c) s += row[c];
                                   return s;
                               })}};
         }},
        {{"max_rows", "y[r] = max_c x[r,c]", {{"x", K::Uniform, -10, 10}}, {"y"}},
         [](const TensorMap& in) {
             return TensorMap{{"y", row_scalar(get(in, "x"), [](const double* row, int64_t n, int64_t) {
                                   return *std::max_element(row, row + n);
                               })}};
         }},
        {{"avg_pool", "y[r,j] = mean(x[r, 4j .. 4j+4])", {{"x", K::Uniform, -1, 1}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             return TensorMap{{"y", per_row(x, rows_of(x).cols / kPool, [](const double* row, int64_t n, int64_t, double* out) {
                                   for (int64_t j = 0; j < n / kPool; ++j)
                                       out[j] = (row[4 * j] + row[4 * j + 1] + row[4 * j + 2] + row[4 * j + 3]) / 4.0;
                               })}};
         }},
        {{"max_pool", "y[r,j] = max(x[r, 4j .. 4j+4])", {{"x", K::Uniform, -1, 1}}, {"y"}},
         [](const TensorMap& in) {
             const auto& x = get(in, "x");
             return TensorMap{{"y", per_row(x, rows_of(x).cols / kPool, [](const double* row, int64_t n, int64_t, double* out) {
                                   for (int64_t j = 0; j < n / kPool; ++j)
                                       out[j] = std::max(std::max(row[4 * j], row[4 * j + 1]), std::max(row[4 * j + 2], row[4 * j + 3]));
                               })}};
         }},
    };
    return table;
}

}  // namespace

const std::vector<OperatorSpec>& operator_specs() {
    static const std::vector<OperatorSpec> specs = [] {
        std::vector<OperatorSpec> v;
        for (const auto& e : entries()) v.push_back(e.spec);
        return v;
    }();
    return specs;
}

const OperatorSpec* find_operator(std::string_view id) {
    for (const auto& s : operator_specs()) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

TensorMap reference_eval(std::string_view id, const TensorMap& inputs) {
    for (const auto& e : entries()) {
        if (e.spec.id == id) return e.eval(inputs);
    }
    throw std::invalid_argument("unknown operator '" + std::string(id) + "'");
}

TensorMap random_inputs(const dsl::Program& p, const OperatorSpec& spec, const semantic::ShapeMap& shape,
                        uint64_t seed) {
    std::mt19937_64 rng(seed);
    TensorMap out;
    for (const auto& t : p.host.params) {
        if (t.role != dsl::TensorRole::In) continue;
        std::vector<int64_t> dims;
        for (const auto& d : t.dims) {
            auto v = dsl::evaluate_int(d, [&](std::string_view n) -> std::optional<dsl::Value> {
                auto it = shape.find(std::string(n));
                if (it == shape.end()) return std::nullopt;
                return dsl::Value::of_int(it->second);
            });
            if (!std::holds_alternative<int64_t>(v))
                throw std::invalid_argument("cannot size input '" + t.name + "' for shape " + semantic::shape_to_string(shape));
            dims.push_back(std::get<int64_t>(v));
        }
        InputDomain dom{t.name, InputDomain::Kind::Uniform, -1.0, 1.0};
        for (const auto& d : spec.inputs) {
            if (d.tensor == t.name) dom = d;
        }
        int64_t n = 1;
        for (auto d : dims) n *= d;
        std::vector<double> v(static_cast<std::size_t>(n));
        std::uniform_real_distribution<double> uni(dom.lo, dom.hi);
        std::bernoulli_distribution coin(0.5);
        for (auto& x : v) {
            switch (dom.kind) {
                case InputDomain::Kind::Uniform: x = uni(rng); break;
                case InputDomain::Kind::Sign: x = coin(rng) ? 1.0 : -1.0; break;
                case InputDomain::Kind::Mask: x = coin(rng) ? 1.0 : 0.0; break;
            }
        }
        out[t.name] = TensorValue::from(t.dtype, std::move(dims), std::move(v));
    }
    return out;
}

}  // namespace adsl::vm
