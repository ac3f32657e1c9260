#include "sfib/transfer.hpp"

#include <cmath>

namespace sfib {

namespace {

constexpr double kPlainLimit = 1e150;

SignedLog to_signed_log(double x) {
    if (x == 0.0) return {};
    return {x > 0.0 ? 1 : -1, std::log(std::abs(x))};
}

SignedLog signed_log_add(SignedLog a, SignedLog b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const double top = std::max(a.log_abs, b.log_abs);
    const double v = a.sign * std::exp(a.log_abs - top) + b.sign * std::exp(b.log_abs - top);
    if (v == 0.0) return {};
    return {v > 0.0 ? 1 : -1, top + std::log(std::abs(v))};
}

}  // namespace

std::vector<SignedLog> half_traces_log(double energy, const ModelParams& params, int k_max) {
    if (k_max < 1) throw std::invalid_argument("half_traces_log: k_max must be >= 1");
    std::vector<double> plain{1.0, x0_closed(energy, params), x1_closed(energy, params)};
    std::vector<bool> is_plain{true, true, true};
    std::vector<SignedLog> out{to_signed_log(plain[0]), to_signed_log(plain[1]),
                               to_signed_log(plain[2])};
    const double log2 = std::log(2.0);
    for (int k = 1; k < k_max; ++k) {
        const auto i = static_cast<std::size_t>(k + 1);  // index of x_k
        if (is_plain[i] && is_plain[i - 1] && is_plain[i - 2]) {
            const double next = 2.0 * plain[i] * plain[i - 1] - plain[i - 2];
            if (std::abs(next) <= kPlainLimit) {
                plain.push_back(next);
                is_plain.push_back(true);
                out.push_back(to_signed_log(next));
                continue;
            }
        }
        const SignedLog product{out[i].sign * out[i - 1].sign,
                                log2 + out[i].log_abs + out[i - 1].log_abs};
        const SignedLog tail{-out[i - 2].sign, out[i - 2].log_abs};
        const SignedLog next = signed_log_add(product, tail);
        plain.push_back(0.0);
        is_plain.push_back(false);
        out.push_back(next);
    }
    return out;
}

}  // namespace sfib
