#pragma once

// Independent reference constructions for the test suites. Everything here is
// built element by element from the defining formulas and never calls the
// library's operator builders, Liouvillian assembly or solvers.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline double occupation(int n, double lambda) { return n + (n % 2 != 0 ? 2.0 * lambda : 0.0); }

/// <n-1| a |n> = sqrt(n + 2 lambda [n odd]) on levels 0..n_max.
inline Mat annihilation(int n_max, double lambda) {
    Mat a = Mat::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(occupation(n, lambda));
    return a;
}

/// Composite index with the emitter as the slow index: e * (n_max + 1) + n.
inline int index(int emitter, int n, int n_max) { return emitter * (n_max + 1) + n; }

struct System {
    int n_max;
    Mat a;      // cavity lowering on the composite space
    Mat sigma;  // |G><X|
    Mat h;
};

/// Hamiltonian from matrix elements:
///   <G,n|H|G,n> = (omega_c / 2)(<n|a a^dagger|n> + <n|a^dagger a|n>) - omega_x / 2
///   <X,n|H|X,n> = same cavity part + omega_x / 2
///   <G,n|H|X,n-1> = g sqrt(n + 2 lambda [n odd])
/// The truncated a a^dagger vanishes on the top level.
inline System system(int n_max, double omega_c, double delta, double g, double lambda) {
    const int d = 2 * (n_max + 1);
    System s{n_max, Mat::Zero(d, d), Mat::Zero(d, d), Mat::Zero(d, d)};
    const double omega_x = omega_c + delta;
    for (int e = 0; e < 2; ++e)
        for (int n = 0; n <= n_max; ++n) {
            const double aad = n < n_max ? occupation(n + 1, lambda) : 0.0;
            const double ada = occupation(n, lambda);
            s.h(index(e, n, n_max), index(e, n, n_max)) =
                omega_c / 2 * (aad + ada) + (e == 0 ? -omega_x / 2 : omega_x / 2);
            if (n >= 1) s.a(index(e, n - 1, n_max), index(e, n, n_max)) = std::sqrt(occupation(n, lambda));
        }
    for (int n = 0; n <= n_max; ++n) {
        s.sigma(index(0, n, n_max), index(1, n, n_max)) = 1.0;
        if (n >= 1) {
            const double c = g * std::sqrt(occupation(n, lambda));
            s.h(index(0, n, n_max), index(1, n - 1, n_max)) = c;
            s.h(index(1, n - 1, n_max), index(0, n, n_max)) = c;
        }
    }
    return s;
}

struct Channel {
    double rate;
    Mat jump;
};

inline std::vector<Channel> channels(const System& s, double kappa, double gamma, double pump,
                                     double nbar = 0.0) {
    std::vector<Channel> out;
    out.push_back({kappa * (1 + nbar), s.a});
    if (nbar > 0) out.push_back({kappa * nbar, s.a.adjoint()});
    out.push_back({gamma, s.sigma});
    out.push_back({pump, s.sigma.adjoint()});
    return out;
}

/// d rho / dt in operator form.
inline Mat rhs(const Mat& h, const std::vector<Channel>& chans, const Mat& rho) {
    const cd i(0.0, 1.0);
    Mat out = -i * (h * rho - rho * h);
    for (const auto& c : chans) {
        const Mat od = c.jump.adjoint();
        const Mat oo = od * c.jump;
        out += (c.rate / 2) * (2.0 * c.jump * rho * od - oo * rho - rho * oo);
    }
    return out;
}

/// Classical fixed-step RK4 on the operator equation.
inline Mat integrate(const Mat& h, const std::vector<Channel>& chans, Mat rho, double t_end, double dt) {
    const auto steps = static_cast<long>(std::ceil(t_end / dt));
    const double step = t_end / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) {
        const Mat k1 = rhs(h, chans, rho);
        const Mat k2 = rhs(h, chans, rho + step / 2 * k1);
        const Mat k3 = rhs(h, chans, rho + step / 2 * k2);
        const Mat k4 = rhs(h, chans, rho + step * k3);
        rho += step / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

/// <a^dagger a^dagger a a> / <a^dagger a>^2 by explicit index sums.
inline double g2_by_summation(const Mat& a, const Mat& rho) {
    const Eigen::Index d = a.rows();
    const auto ad = [&](Eigen::Index r, Eigen::Index c) { return std::conj(a(c, r)); };
    cd numerator = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k)
                for (Eigen::Index l = 0; l < d; ++l)
                    for (Eigen::Index m = 0; m < d; ++m)
                        numerator += ad(i, j) * ad(j, k) * a(k, l) * a(l, m) * rho(m, i);
    cd denominator = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k) denominator += ad(i, j) * a(j, k) * rho(k, i);
    return numerator.real() / (denominator.real() * denominator.real());
}

}  // namespace oracle
