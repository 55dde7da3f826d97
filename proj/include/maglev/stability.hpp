#pragma once

#include <algorithm>
#include <array>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace maglev {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix4 = Eigen::Matrix<double, 4, 4>;

/// Eigenvalues of a small real matrix, sorted by descending real part (ties
/// by imaginary part) so output order is deterministic.
template <int N>
std::array<std::complex<double>, N>
eigenvalues(const Eigen::Matrix<double, N, N>& J) {
    Eigen::EigenSolver<Eigen::Matrix<double, N, N>> solver(J, false);
    std::array<std::complex<double>, N> out;
    for (int i = 0; i < N; ++i) out[i] = solver.eigenvalues()[i];
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

/// An equilibrium is stable when every eigenvalue real part is negative.
template <std::size_t N>
bool all_stable(const std::array<std::complex<double>, N>& eigs) {
    for (const auto& e : eigs)
        if (!(e.real() < 0)) return false;
    return true;
}

} // namespace maglev
