#include "tyrefield/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "tyrefield/errors.hpp"

namespace tyrefield {

namespace {

GaussRule build_rule(int n)
{
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        // map [-1,1] -> [0,1], ascending
        r.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n)
{
    if (n < 1) throw ValidationError("Gauss-Legendre point count must be >= 1");
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
    return *slot;
}

std::vector<double> trapezoid_weights(int N)
{
    if (N < 1) throw ValidationError("trapezoid rule needs at least one cell");
    std::vector<double> w(N + 1, 1.0 / N);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

void exp_moments(std::complex<double> s, int kmax, std::complex<double>* out)
{
    if (kmax < 0 || kmax > kMaxMoment) throw ValidationError("moment order out of range");
    const double as = std::abs(s);
    if (as == 0.0) {
        for (int k = 0; k <= kmax; ++k) out[k] = 1.0 / (k + 1.0);
        return;
    }
    // upward recursion is stable once |s| clearly exceeds the order
    if (as <= 20.0 && as <= 2.0 * kmax + 2.0) {
        // the 48-point rule is exact to rounding for |s| <= 20 and k <= 40
        static const GaussRule& g = gauss_legendre(48);
        for (int k = 0; k <= kmax; ++k) out[k] = 0.0;
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            const double x = g.nodes[j];
            std::complex<double> t = g.weights[j] * std::exp(s * x);
            for (int k = 0; k <= kmax; ++k) {
                out[k] += t;
                t *= x;
            }
        }
        return;
    }
    const std::complex<double> es = std::exp(s);
    out[0] = (es - 1.0) / s;
    for (int k = 1; k <= kmax; ++k) out[k] = (es - double(k) * out[k - 1]) / s;
}

std::complex<double> exp_moment(int k, std::complex<double> s)
{
    std::complex<double> buf[kMaxMoment + 1];
    exp_moments(s, k, buf);
    return buf[k];
}

std::complex<double> exp_moment_dd(int k, std::complex<double> r, std::complex<double> h)
{
    constexpr int kTerms = 18;
    if (std::abs(h) < 0.5) {
        // sum_{n>=1} h^{n-1}/n! F_{k+n}(r)
        std::complex<double> buf[kMaxMoment + 1];
        exp_moments(r, k + kTerms, buf);
        std::complex<double> sum = 0.0, c = 1.0;
        for (int n = 1; n <= kTerms; ++n) {
            c /= double(n);
            sum += c * buf[k + n];
            c *= h;
        }
        return sum;
    }
    return (exp_moment(k, r + h) - exp_moment(k, r)) / h;
}

}  // namespace tyrefield
