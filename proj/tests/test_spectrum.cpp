#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rdjc/spectrum.hpp"

using namespace rdjc;

namespace {

SystemParams rates(double lambda, double delta = 0.0) { return SystemParams::reference_rates(lambda, delta); }

double max_intensity(const SpectrumResult& s) { return *std::max_element(s.intensity.begin(), s.intensity.end()); }

}  // namespace

TEST_CASE("correlation at zero delay is the mean photon number") {
    SystemParams p = rates(0.3, 0.4);
    p.pump = 0.4;
    const SteadyState ss = solve_steady_state(p, FockCutoff{10});
    const oracle::System ref = oracle::system(10, p.omega_c, p.delta, p.g, ss.params.lambda);
    const double tau[] = {0.0};
    const CorrelationResult c = correlation(ss, tau);
    const double mean = (ref.a.adjoint() * ref.a * ss.rho.matrix()).trace().real();
    CHECK(std::abs(c.values[0] - oracle::cd(mean)) < 1e-12);
}

TEST_CASE("regression correlation agrees with direct integration") {
    SystemParams p = rates(0.5, 0.7);
    p.pump = 0.3;
    const SteadyState ss = solve_steady_state(p, FockCutoff{3});
    const oracle::System ref = oracle::system(3, p.omega_c, p.delta, p.g, p.lambda);
    const auto chans = oracle::channels(ref, p.kappa, p.gamma, p.pump);
    const double tau[] = {0.0, 1.5, 4.0};
    const CorrelationResult eig = correlation(ss, tau);
    const CorrelationResult expm = correlation(ss, tau, PropagationOptions{PropagationMethod::MatrixExponential});
    oracle::Mat x = ref.a * ss.rho.matrix();
    double t = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        x = oracle::integrate(ref.h, chans, x, tau[k] - t, 0.005);
        t = tau[k];
        const oracle::cd expected = (ref.a.adjoint() * x).trace();
        CHECK(std::abs(eig.values[k] - expected) < 1e-9);
        CHECK(std::abs(expm.values[k] - expected) < 1e-9);
    }
    CHECK(eig.method == PropagationMethod::Eigenmodes);
    CHECK(expm.method == PropagationMethod::MatrixExponential);
}

TEST_CASE("resonant undeformed spectrum is symmetric about the cavity") {
    const std::vector<double> omega = default_omega_grid();
    const SpectrumResult s = emission_spectrum(rates(0.0), omega);
    const double peak = max_intensity(s);
    for (std::size_t k = 0; k < omega.size(); ++k)
        CHECK(std::abs(s.intensity[k] - s.intensity[omega.size() - 1 - k]) <= 1e-8 * peak);
    CHECK(s.meta.cutoff_valid);
    CHECK(s.meta.normalization == "arbitrary");
    CHECK(std::all_of(s.intensity.begin(), s.intensity.end(), [](double v) { return v >= 0; }));
}

TEST_CASE("peak structure of the reference spectra") {
    const std::vector<double> omega = default_omega_grid();
    const double kappa = rates(0.0).kappa;

    const auto undeformed = find_peaks(emission_spectrum(rates(0.0), omega));
    REQUIRE(undeformed.size() == 4);
    CHECK(std::abs(undeformed.front() + 1.0) <= kappa / 2);
    CHECK(std::abs(undeformed.back() - 1.0) <= kappa / 2);

    const auto plus_half = find_peaks(emission_spectrum(rates(0.5), omega));
    REQUIRE(plus_half.size() == 3);
    CHECK(std::abs(plus_half[1]) <= kappa / 4);
    CHECK(std::abs(plus_half[0] + std::sqrt(2.0)) <= kappa / 2);
    CHECK(std::abs(plus_half[2] - std::sqrt(2.0)) <= kappa / 2);

    const SpectrumResult critical = emission_spectrum(rates(-0.5), omega);
    CHECK(critical.meta.critical_limit);
    CHECK(critical.meta.effective_lambda == -0.5 + critical_lambda_offset);
    const auto minus_half = find_peaks(critical);
    REQUIRE(minus_half.size() == 3);
    CHECK(std::abs(minus_half[0] + std::sqrt(2.0)) <= kappa / 2);
    CHECK(std::abs(minus_half[2] - std::sqrt(2.0)) <= kappa / 2);

    CHECK(find_peaks(emission_spectrum(rates(0.9, 0.7), omega)).size() == 4);
}

TEST_CASE("detuned strong deformation places the outer peaks at the first-rung transitions") {
    const SystemParams p = rates(0.9, 0.7);
    const auto peaks = find_peaks(emission_spectrum(p, default_omega_grid()));
    REQUIRE(peaks.size() == 4);
    const double r1 = generalized_rabi(1, p);
    CHECK(std::abs(peaks.front() - (p.delta / 2 - r1 / 2)) <= p.kappa / 2);
    CHECK(std::abs(peaks.back() - (p.delta / 2 + r1 / 2)) <= p.kappa / 2);
}

TEST_CASE("discrete transform agrees with the eigenmode spectrum") {
    const std::vector<double> omega = default_omega_grid();
    SpectrumOptions discrete;
    discrete.method = SpectrumMethod::DiscreteTransform;
    const SpectrumResult a = emission_spectrum(rates(0.5), omega);
    const SpectrumResult b = emission_spectrum(rates(0.5), omega, {}, discrete);
    CHECK(b.meta.method == SpectrumMethod::DiscreteTransform);
    CHECK(std::isnan(b.meta.eigenbasis_condition));
    const double peak = max_intensity(a);
    double worst = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) worst = std::max(worst, std::abs(a.intensity[k] - b.intensity[k]));
    CHECK(worst <= 0.02 * peak);
}

TEST_CASE("peak normalization") {
    const std::vector<double> omega = default_omega_grid();
    SpectrumOptions opts;
    opts.peak_normalize = true;
    const SpectrumResult s = emission_spectrum(rates(0.0), omega, {}, opts);
    CHECK(max_intensity(s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.meta.normalization == "peak");
}

TEST_CASE("spectrum inputs are validated") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(emission_spectrum(rates(0.0), empty), ConfigError);
    const std::vector<double> unordered{0.5, 0.1};
    CHECK_THROWS_AS(emission_spectrum(rates(0.0), unordered), ConfigError);
    const std::vector<double> bad{0.0, std::nan("")};
    CHECK_THROWS_AS(emission_spectrum(rates(0.0), bad), ConfigError);
    CHECK(default_omega_grid().size() == 2001);
    CHECK(default_omega_grid().front() == -3.0);
    CHECK(default_omega_grid().back() == 3.0);
}

TEST_CASE("g2 from the steady state matches explicit index sums") {
    for (double lambda : {-0.3, 0.0, 0.5, 0.9}) {
        CAPTURE(lambda);
        SystemParams p = rates(lambda, 0.2);
        p.pump = 0.6;
        const SteadyState ss = solve_steady_state(p, FockCutoff{3});
        // The cavity sees the emitter-traced state rho_GG + rho_XX.
        const oracle::Mat& rho = ss.rho.matrix();
        const oracle::Mat cavity = rho.topLeftCorner(4, 4) + rho.bottomRightCorner(4, 4);
        const double value = g2_zero(ss).value;
        CHECK(std::abs(value - oracle::g2_by_summation(oracle::annihilation(3, lambda), cavity)) <= 1e-10);
        const oracle::System ref = oracle::system(3, p.omega_c, p.delta, p.g, lambda);
        CHECK(std::abs(value - oracle::g2_by_summation(ref.a, rho)) <= 1e-10);
    }
}

TEST_CASE("photon-number estimator coincides with the deformed field without deformation") {
    SystemParams p = rates(0.0);
    p.pump = 0.8;
    const SteadyState ss = solve_steady_state(p, FockCutoff{20});
    CHECK(g2_zero(ss, G2Estimator::PhotonNumber).value ==
          doctest::Approx(g2_zero(ss, G2Estimator::DeformedField).value).epsilon(1e-12));

    SystemParams q = rates(0.5);
    q.pump = 0.8;
    const SteadyState deformed = solve_steady_state(q, FockCutoff{20});
    CHECK(std::abs(g2_zero(deformed, G2Estimator::PhotonNumber).value -
                   g2_zero(deformed, G2Estimator::DeformedField).value) > 1e-3);
}

TEST_CASE("g2 is undefined without photons") {
    SystemParams p = rates(0.0);
    p.pump = 0.0;
    CHECK_THROWS_AS(g2_zero(p), UndefinedStatisticsError);
    const G2Result r = g2_zero(rates(-0.5));
    CHECK(r.critical_limit);
    CHECK(r.cutoff_valid);
    CHECK(r.mean_photons > 0);
}
