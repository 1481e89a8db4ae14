#pragma once

#include <complex>
#include <span>
#include <vector>

namespace tyrefield {

// Gauss-Legendre rule mapped to [0,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Cached per n; safe to call from several threads.
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate_unit(F&& f, int n = 64)
{
    const GaussRule& g = gauss_legendre(n);
    double s = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
        s += g.weights[j] * f(g.nodes[j]);
    return s;
}

// Composite trapezoid weights on N uniform cells of [0,1] (N+1 nodes).
std::vector<double> trapezoid_weights(int N);

// Exponential moments F_k(s) = int_0^1 xi^k e^{s xi} dxi.
constexpr int kMaxMoment = 40;

// Fills out[0..kmax].
void exp_moments(std::complex<double> s, int kmax, std::complex<double>* out);
std::complex<double> exp_moment(int k, std::complex<double> s);

// (F_k(r + h) - F_k(r)) / h, continuous through h = 0.
std::complex<double> exp_moment_dd(int k, std::complex<double> r, std::complex<double> h);

}  // namespace tyrefield
