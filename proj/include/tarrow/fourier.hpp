// fourier.hpp — transform helpers under the fixed convention
//   f(omega) = int dt e^{+i omega t} f(t),   f(t) = int domega/2pi e^{-i omega t} f(omega).

#pragma once

#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <vector>

#include "tarrow/common.hpp"

namespace tarrow::fourier {

// out_j = sum_k in_k e^{-2 pi i k j / n}
inline std::vector<cplx> dft(const std::vector<cplx>& in) {
    Eigen::FFT<double> fft;
    std::vector<cplx> out;
    fft.fwd(out, in);
    return out;
}

// out_j = sum_k in_k e^{+2 pi i k j / n}  (unnormalised)
inline std::vector<cplx> idft(const std::vector<cplx>& in) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> out;
    fft.inv(out, in);
    return out;
}

// Samples of f(t) = int domega/2pi e^{-i omega t} f(omega) on t_j = j*pi/omega_max,
// j = 0..n-1, periodic with period n*pi/omega_max, from f sampled on `grid`.
inline std::vector<cplx> to_time_lattice(const FrequencyGrid& grid, const std::vector<cplx>& samples) {
    require(samples.size() == grid.size(), "sample count must match the frequency grid");
    std::vector<cplx> out = dft(samples);
    const double scale = grid.d_omega() / kTwoPi;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= (j % 2 == 0 ? scale : -scale);
    return out;
}

// Samples of f(omega) = int dt e^{i omega t} f(t) on `grid`, from f sampled on the
// periodic lattice t_j = j*pi/omega_max (negative times wrap to the end).
inline std::vector<cplx> to_frequency(const FrequencyGrid& grid, const std::vector<cplx>& lattice) {
    require(lattice.size() == grid.size(), "lattice size must match the frequency grid");
    std::vector<cplx> tmp(lattice.size());
    for (std::size_t j = 0; j < lattice.size(); ++j) tmp[j] = (j % 2 == 0 ? lattice[j] : -lattice[j]);
    std::vector<cplx> out = idft(tmp);
    const double dt = grid.conjugate_dt();
    for (auto& v : out) v *= dt;
    return out;
}

// Eight-point Lagrange interpolation on a periodic uniform lattice of spacing dt.
template <class T>
T interpolate_periodic(const std::vector<T>& values, double dt, double t) {
    constexpr int kPoints = 8;
    const auto n = static_cast<long long>(values.size());
    const double u = t / dt;
    const double base = std::floor(u);
    const double frac = u - base;
    auto at = [&](long long i) -> const T& { return values[static_cast<std::size_t>(((i % n) + n) % n)]; };
    const auto i0 = static_cast<long long>(base);
    if (frac == 0.0) return at(i0);
    T acc{};
    for (int a = 0; a < kPoints; ++a) {
        const double xa = static_cast<double>(a - kPoints / 2 + 1);
        double w = 1.0;
        for (int b = 0; b < kPoints; ++b) {
            if (b == a) continue;
            const double xb = static_cast<double>(b - kPoints / 2 + 1);
            w *= (frac - xb) / (xa - xb);
        }
        acc += w * at(i0 + a - kPoints / 2 + 1);
    }
    return acc;
}

// Linear convolution y_i = sum_l a_{i-l} b_l for causal sequences (index >= 0).
inline std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::size_t n = 1;
    while (n < a.size() + b.size()) n <<= 1;
    std::vector<cplx> pa(n), pb(n);
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());
    auto fa = dft(pa);
    const auto fb = dft(pb);
    for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
    auto y = idft(fa);
    for (auto& v : y) v /= static_cast<double>(n);
    y.resize(a.size() + b.size() - 1);
    return y;
}

} // namespace tarrow::fourier
