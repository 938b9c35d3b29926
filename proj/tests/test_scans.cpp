#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "rdjc/scans.hpp"

using namespace rdjc;

namespace {

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("linear and logarithmic grids") {
    const auto lin = linspace(-0.5, 1.0, 301);
    CHECK(lin.size() == 301);
    CHECK(lin.front() == -0.5);
    CHECK(lin.back() == 1.0);
    CHECK(lin[100] == doctest::Approx(0.0).epsilon(1e-15).scale(1));
    CHECK(linspace(2.0, 5.0, 1) == std::vector<double>{2.0});

    const auto log = logspace(1e-3, 10.0, 60);
    CHECK(log.size() == 60);
    CHECK(log.front() == doctest::Approx(1e-3));
    CHECK(log.back() == 10.0);
    for (std::size_t k = 1; k < log.size(); ++k)
        CHECK(log[k] / log[k - 1] == doctest::Approx(std::pow(1e4, 1.0 / 59)));

    CHECK_THROWS_AS(linspace(0, 1, 0), ConfigError);
    CHECK_THROWS_AS(logspace(0, 1, 5), ConfigError);
    CHECK_THROWS_AS(logspace(-1, 1, 5), ConfigError);
}

TEST_CASE("undeformed inner doublets across the first nineteen rungs") {
    SystemParams base;
    base.g = 1.0;
    const double lambdas[] = {0.0};
    const LadderScan scan = doublets_vs_lambda(base, lambdas, 19);
    REQUIRE(scan.points.size() == 1);
    REQUIRE(scan.points[0].doublets.size() == 19);
    for (const auto& d : scan.points[0].doublets) {
        const double expected = std::sqrt(d.rung) - std::sqrt(d.rung - 1);
        CHECK(std::abs(d.from_plus - expected) <= 1e-12);
        CHECK(std::abs(d.from_minus + expected) <= 1e-12);
        CHECK(d.parity == transition_parity(d.rung));
    }
    CHECK(scan.axis == "lambda");
    CHECK(scan.meta.method == "closed-form");
    CHECK_FALSE(scan.meta.cutoff_policy_used);
}

TEST_CASE("frequencies are reported in units of g relative to the cavity") {
    SystemParams base;
    base.g = 2.5;
    base.omega_c = 7.0;
    const double lambdas[] = {0.3};
    const auto d = doublets_vs_lambda(base, lambdas, 3).points[0].doublets;
    SystemParams unit;
    unit.lambda = 0.3;
    for (const auto& rec : d) {
        CHECK(rec.from_plus == doctest::Approx(inner_doublet(rec.rung, unit).from_plus));
        CHECK(rec.rabi == doctest::Approx(generalized_rabi(rec.rung, unit)));
    }
}

TEST_CASE("lambda scans clamp at the admissible bound and show the collapse") {
    const double lambdas[] = {-0.6, -0.5, 0.5};
    const LadderScan scan = doublets_vs_lambda(SystemParams{}, lambdas, 18);
    CHECK(scan.points[0].axis_value == -0.5);
    for (const auto& d : scan.points[1].doublets)
        if (d.rung % 2 == 1) CHECK(std::abs(d.splitting()) <= 1e-12);
    for (const auto& d : scan.points[2].doublets)
        if (d.rung % 2 == 0) CHECK(std::abs(d.splitting()) <= 1e-12);
}

TEST_CASE("detuning scan") {
    SystemParams base;
    base.lambda = -0.5;
    base.g = 2.0;
    const auto deltas = linspace(-4, 4, 401);
    const LadderScan scan = doublets_vs_detuning(base, deltas, 3);
    REQUIRE(scan.points.size() == 401);
    CHECK(scan.axis == "delta");
    const auto& resonant = scan.points[200];
    CHECK(resonant.axis_value == 0.0);
    CHECK(std::abs(resonant.doublets[0].splitting()) <= 1e-12);
    CHECK(resonant.doublets[1].splitting() > 1.0);
    // Far detuned, the first rung approaches |delta| in units of g.
    CHECK(scan.points[0].doublets[0].rabi == doctest::Approx(4.0));
}

TEST_CASE("ladder scan inputs are validated") {
    const std::vector<double> empty;
    const double one[] = {0.0};
    const double nan[] = {std::nan("")};
    SystemParams zero_g;
    zero_g.g = 0.0;
    CHECK_THROWS_AS(doublets_vs_lambda(SystemParams{}, empty), ConfigError);
    CHECK_THROWS_AS(doublets_vs_lambda(SystemParams{}, nan), ConfigError);
    CHECK_THROWS_AS(doublets_vs_lambda(SystemParams{}, one, 0), ConfigError);
    CHECK_THROWS_AS(doublets_vs_lambda(zero_g, one), ConfigError);
    CHECK_THROWS_AS(doublets_vs_detuning(zero_g, one), ConfigError);
}

TEST_CASE("parallel_for covers every index and rethrows the first failure by index") {
    std::vector<int> hits(50, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);

    const auto fail = [](std::size_t i) {
        if (i == 7) throw std::runtime_error("seven");
        if (i == 31) throw std::logic_error("thirty-one");
    };
    for (int workers : {1, 3}) CHECK_THROWS_WITH_AS(parallel_for(40, workers, fail), "seven", std::runtime_error);
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("g2 scans are deterministic across worker counts") {
    const double lambdas[] = {0.0, -0.5, 0.9};
    const double pumps[] = {0.01, 0.05, 0.3};
    const SystemParams rates = SystemParams::reference_rates(0.0);
    const G2Scan serial = g2_vs_pump(lambdas, pumps, rates, {}, G2Estimator::DeformedField, 1);
    const G2Scan threaded = g2_vs_pump(lambdas, pumps, rates, {}, G2Estimator::DeformedField, 3);
    REQUIRE(serial.records.size() == 9);
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(same_bits(serial.records[k].g2, threaded.records[k].g2));
        CHECK(same_bits(serial.records[k].mean_photons, threaded.records[k].mean_photons));
        CHECK(serial.records[k].n_max == threaded.records[k].n_max);
    }
    CHECK(serial.records[3].lambda == -0.5);
    CHECK(serial.records[3].pump == 0.01);
    CHECK(serial.records[3].critical_limit);
    CHECK_FALSE(serial.records[0].critical_limit);
    CHECK(serial.warnings.empty());
    CHECK(serial.meta.cutoff_policy_used);
}

TEST_CASE("g2 scan records undefined statistics as NaN with a warning") {
    const double lambdas[] = {0.0};
    const double pumps[] = {0.0, 0.05};
    const G2Scan scan = g2_vs_pump(lambdas, pumps, SystemParams::reference_rates(0.0));
    CHECK(std::isnan(scan.records[0].g2));
    CHECK_FALSE(scan.records[0].defined);
    CHECK(scan.records[1].defined);
    REQUIRE(scan.warnings.size() == 1);
    CHECK(scan.warnings[0].find("P = 0") != std::string::npos);
}

TEST_CASE("scans refuse points whose cutoff never validated") {
    const double lambdas[] = {0.0};
    const double pumps[] = {5.0};
    SteadyStateOptions capped;
    capped.cutoff.maximum = 15;
    CHECK_THROWS_AS(g2_vs_pump(lambdas, pumps, SystemParams::reference_rates(0.0), capped), PhysicsValidityError);

    SystemParams strong = SystemParams::reference_rates(0.0);
    strong.pump = 5.0;
    const SpectrumConfig config[] = {{0.0, 0.0}};
    const auto omega = linspace(-3, 3, 11);
    CHECK_THROWS_AS(spectra_suite(config, strong, omega, capped), PhysicsValidityError);
    CHECK_THROWS_AS(spectra_suite(std::span<const SpectrumConfig>{}, strong, omega), ConfigError);
}

TEST_CASE("spectrum suite follows the configuration order") {
    const auto configs = reference_spectrum_configs();
    REQUIRE(configs.size() == 5);
    const auto omega = linspace(-3, 3, 61);
    const auto spectra = spectra_suite(configs, SystemParams::reference_rates(0.0), omega, {}, {}, 2);
    REQUIRE(spectra.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(spectra[k].meta.params.lambda == configs[k].lambda);
        CHECK(spectra[k].meta.params.delta == configs[k].delta);
    }
    CHECK(spectra[2].meta.critical_limit);
}
