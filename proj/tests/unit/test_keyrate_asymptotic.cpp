#include <cmath>
#include <random>

#include "doctest.h"

#include "cvqkd/errors.hpp"
#include "cvqkd/keyrate_asymptotic.hpp"
#include "oracles/gaussian_oracle.hpp"

using namespace cvqkd;

namespace {

LinkParams het(double T, double eta = 0.95) {
    return {5.0, T, eta, 0.95, ProtocolKind::heterodyne};
}

const NoiseBudget table_noise(ChannelNoiseComponents::reference_daylight(),
                              DetectorNoiseComponents::reference());

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("G function") {
    CHECK(g_von_neumann(0.0) == 0.0);
    CHECK(g_von_neumann(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g_von_neumann(0.5) == doctest::Approx(1.5 * std::log2(1.5) + 0.5).epsilon(1e-14));
    CHECK(g_von_neumann(0.5) == doctest::Approx(1.37744).epsilon(1e-5));
    CHECK(g_von_neumann(1e-300) > 0.0);
    CHECK_THROWS_AS(g_von_neumann(-1e-12), DomainError);
}

TEST_CASE("covariance coefficients") {
    SUBCASE("vacuum input") {
        const auto c = covariance_coefficients({1e-300, 0.5, 0.9, 0.95, ProtocolKind::homodyne}, 0.0);
        CHECK(c.a == doctest::Approx(1.0));
        CHECK(c.c == doctest::Approx(0.0).scale(1e-100));
    }
    SUBCASE("pure two-mode squeezed state") {
        const auto c = covariance_coefficients({5.0, 1.0, 1.0, 1.0, ProtocolKind::homodyne}, 0.0);
        CHECK(c.a == 6.0);
        CHECK(c.b == 6.0);
        CHECK(c.c == doctest::Approx(std::sqrt(35.0)));
        CHECK(c.a * c.b - c.c * c.c == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("lossy heterodyne link against direct arithmetic") {
        const LinkParams p = het(0.1);
        const auto chi = chi_terms(p, 0.0186, 0.0133);
        const auto c = covariance_coefficients(p, chi.chi);
        const double g = 0.95 * 0.1 / 2;
        CHECK(c.a == 6.0);
        CHECK(c.b == doctest::Approx(g * (5.0 + chi.chi + 1.0)).epsilon(1e-14));
        CHECK(c.c == doctest::Approx(std::sqrt(g * 35.0)).epsilon(1e-14));
    }
    SUBCASE("uncertainty bound on random draws") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(1e-3, 1.0), n(0.0, 0.1), v(0.1, 30.0);
        for (int i = 0; i < 500; ++i) {
            const LinkParams p{v(rng), u(rng), u(rng), 0.95,
                               i % 2 ? ProtocolKind::heterodyne : ProtocolKind::homodyne};
            const auto c = covariance_coefficients(p, chi_terms(p, n(rng), n(rng)).chi);
            CHECK(c.a >= 1.0);
            CHECK(c.b >= 1.0 - 1e-12);
            CHECK(c.a * c.b - c.c * c.c >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("mutual information") {
    CHECK(mutual_information({3.0, 1.0, 1.0, 1.0, ProtocolKind::homodyne}, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-15));
    const LinkParams p = het(0.1);
    const double via_xi = mutual_information_xi(p, 0.0186, 0.0133);
    const double g = 0.95 * 0.1 / 2;
    CHECK(via_xi == doctest::Approx(std::log2((g * (5.0 + 0.0186) + 0.0133 + 1.0) /
                                              (g * 0.0186 + 0.0133 + 1.0)))
                        .epsilon(1e-14));
    CHECK(via_xi == doctest::Approx(0.3036).epsilon(2e-4));
    CHECK(mutual_information(p, chi_terms(p, 0.0186, 0.0133).chi) ==
          doctest::Approx(via_xi).epsilon(1e-13));
    CHECK(mutual_information(het(1e-12), chi_terms(het(1e-12), 0.0186, 0.0133).chi) < 1e-10);
    CHECK_THROWS_AS(mutual_information(p, -1.0), DomainError);

    // Equal mu and chi give equal I_AB regardless of other fields.
    LinkParams a = het(0.3), b = het(0.7, 0.5);
    CHECK(mutual_information(a, 2.5) == mutual_information(b, 2.5));
}

TEST_CASE("Alice-Bob symplectic eigenvalues") {
    SUBCASE("identity channel is pure") {
        for (double V_A : {0.5, 5.0, 40.0}) {
            const auto l = symplectic_ab(V_A, 1.0, 0.0);
            CHECK(l.first == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(l.second == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("vanishing transmission") {
        const auto l = symplectic_ab(5.0, 1e-8, chi_channel(1e-8, 0.0));
        CHECK(l.first == doctest::Approx(6.0).epsilon(1e-6));
        CHECK(l.second == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("matrix oracle at V_A = 5, T = 0.5, xi_ch = 0.02") {
        const double T = 0.5;
        const auto l = symplectic_ab(5.0, T, chi_channel(T, 0.02));
        const auto o = oracle::symplectic_eigenvalues(oracle::alice_bob(5.0, T, 0.02));
        CHECK(rel(l.first, o[1]) < 1e-9);
        CHECK(rel(l.second, o[0]) < 1e-9);
    }
    CHECK_THROWS_AS(symplectic_ab(5.0, 0.0, 1.0), DomainError);
}

TEST_CASE("closed-form eigenvalues match the matrix oracle on random draws") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> v(0.5, 20.0), t(1e-3, 1.0), eta(0.3, 0.99),
        noise(0.0, 0.1);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ProtocolKind kind = i % 2 ? ProtocolKind::heterodyne : ProtocolKind::homodyne;
        const LinkParams p{v(rng), t(rng), eta(rng), 0.95, kind};
        const double xi_ch = noise(rng), xi_d = noise(rng);
        const auto chi = chi_terms(p, xi_ch, xi_d);
        const auto h = holevo_bound_detailed(p, chi);
        const auto o = oracle::holevo(p.V_A, p.T, p.eta_d, p.mu(), xi_ch, xi_d);

        std::vector<double> closed_ab = {h.eigenvalues[1], h.eigenvalues[0]};
        std::vector<double> closed_c = {h.eigenvalues[2], h.eigenvalues[3], h.eigenvalues[4]};
        std::sort(closed_c.begin(), closed_c.end());
        for (int k = 0; k < 2; ++k) worst = std::max(worst, rel(closed_ab[k], o.ab[k]));
        for (int k = 0; k < 3; ++k) worst = std::max(worst, rel(closed_c[k], o.conditional[k]));
        CHECK(h.s_e == doctest::Approx(o.s_ab).epsilon(1e-7).scale(1e-9));
        CHECK(h.s_e_given_b == doctest::Approx(o.s_conditional).epsilon(1e-7).scale(1e-9));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("conditional eigenvalues") {
    SUBCASE("ideal homodyne on a pure state") {
        const auto l = symplectic_conditional(ProtocolKind::homodyne, 5.0, 1.0, 0.0, 0.0,
                                              chi_total(0.0, 0.0, 1.0));
        CHECK(l.lambda3 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(l.lambda4 == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("lambda_5 is one") {
        for (auto kind : {ProtocolKind::homodyne, ProtocolKind::heterodyne})
            CHECK(symplectic_conditional(kind, 5.0, 0.1, 9.1, 1.2, 21.0).lambda5 == 1.0);
    }
    SUBCASE("heterodyne at T = 0.1 with table noise against the matrix oracle") {
        const LinkParams p = het(0.1);
        const auto chi = chi_terms(p, 0.0186, 0.0133);
        const auto l =
            symplectic_conditional(p.protocol, p.V_A, p.T, chi.chi_ch, chi.chi_d, chi.chi);
        const auto o = oracle::holevo(5.0, 0.1, 0.95, 2, 0.0186, 0.0133);
        std::vector<double> closed = {l.lambda3, l.lambda4, l.lambda5};
        std::sort(closed.begin(), closed.end());
        for (int k = 0; k < 3; ++k) CHECK(rel(closed[k], o.conditional[k]) < 1e-9);
    }
}

TEST_CASE("Holevo bound") {
    SUBCASE("identity channel leaves nothing for the eavesdropper") {
        const LinkParams p{5.0, 1.0, 1.0, 1.0, ProtocolKind::heterodyne};
        const auto h = holevo_bound_detailed(p, chi_terms(p, 0.0, 0.0));
        CHECK(h.s_e < 1e-9);
        CHECK(h.bound <= 1e-9);
    }
    SUBCASE("detector noise only reaches the conditional eigenvalues") {
        const LinkParams p = het(0.1);
        const auto a = holevo_bound_detailed(p, chi_terms(p, 0.0186, 0.0));
        const auto b = holevo_bound_detailed(p, chi_terms(p, 0.0186, 0.05));
        CHECK(a.eigenvalues[0] == b.eigenvalues[0]);
        CHECK(a.eigenvalues[1] == b.eigenvalues[1]);
        CHECK(a.eigenvalues[2] != b.eigenvalues[2]);
        CHECK(a.s_e == b.s_e);
    }
    SUBCASE("baseline at 20 dB against the matrix oracle") {
        const LinkParams p = het(0.01);
        const auto h = holevo_bound_detailed(p, chi_terms(p, 0.0186, 0.0133));
        const auto o = oracle::holevo(5.0, 0.01, 0.95, 2, 0.0186, 0.0133);
        CHECK(h.bound == doctest::Approx(o.s_ab - o.s_conditional).epsilon(1e-8));
    }
    SUBCASE("unphysical input is reported") {
        const LinkParams p = het(0.5);
        // chi_ch below the vacuum level (1 - T)/T violates the uncertainty principle.
        CHECK_THROWS_AS(holevo_bound(p, -0.9, 1.0, -0.9 + 2.0), NumericalError);
    }
}

TEST_CASE("asymptotic key rate") {
    SUBCASE("noiseless identity link gives K = I_AB") {
        const LinkParams p{5.0, 1.0, 1.0, 1.0, ProtocolKind::homodyne};
        const auto k = key_rate_asymptotic(p, NoiseBudget::from_totals(0.0, 0.0));
        CHECK(k.key_rate_raw == doctest::Approx(k.mutual_info).epsilon(1e-9));
        CHECK(k.mutual_info == doctest::Approx(0.5 * std::log2(6.0)));
    }
    SUBCASE("raw and clamped values") {
        const auto k = key_rate_asymptotic(het(transmissivity_from_loss_db(40.0)),
                                           NoiseBudget::from_totals(0.05, 0.0133));
        CHECK(k.key_rate_raw < 0.0);
        CHECK(k.key_rate == 0.0);
    }
    SUBCASE("upper-bounds the finite-size rate quoted at 15 dB") {
        const auto k = key_rate_asymptotic(het(transmissivity_from_loss_db(15.0)),
                                           NoiseBudget::from_totals(0.0126, 0.0133));
        CHECK(k.key_rate > 2.6e-3);
    }
    SUBCASE("heterodyne beats homodyne at low loss") {
        for (double db = 0.0; db <= 5.0; db += 0.5) {
            const double T = transmissivity_from_loss_db(db);
            LinkParams hom = het(T);
            hom.protocol = ProtocolKind::homodyne;
            CHECK(key_rate_asymptotic(het(T), table_noise).key_rate >
                  key_rate_asymptotic(hom, table_noise).key_rate);
        }
    }
    SUBCASE("monotonicity on a transmissivity grid") {
        for (auto kind : {ProtocolKind::homodyne, ProtocolKind::heterodyne}) {
            double previous = 1e9;
            for (double lt = 0.0; lt >= -3.0; lt -= 0.05) {
                LinkParams p = het(std::pow(10.0, lt));
                p.protocol = kind;
                const auto base = key_rate_asymptotic(p, table_noise);
                CHECK(base.key_rate <= previous);
                previous = base.key_rate;

                LinkParams better = p;
                better.beta = 0.98;
                CHECK(key_rate_asymptotic(better, table_noise).key_rate_raw >= base.key_rate_raw);
                CHECK(key_rate_asymptotic(p, NoiseBudget::from_totals(0.03, table_noise.xi_d()))
                          .key_rate_raw <= base.key_rate_raw);
                DetectorNoiseComponents noisier = DetectorNoiseComponents::reference();
                noisier.v_el = 0.05;
                CHECK(key_rate_asymptotic(
                          p, NoiseBudget(ChannelNoiseComponents::reference_daylight(), noisier))
                          .key_rate_raw <= base.key_rate_raw);
            }
        }
    }
    CHECK_THROWS_AS(key_rate_asymptotic(het(0.0), table_noise), DomainError);
    CHECK_THROWS_AS(key_rate_asymptotic({0.0, 0.1, 0.9, 0.9}, table_noise), DomainError);
}

TEST_CASE("lossless noiseless link with trusted detector noise") {
    // Conditional eigenvalues are degenerate at 1 here; both protocols must
    // still evaluate.
    for (ProtocolKind kind : {ProtocolKind::homodyne, ProtocolKind::heterodyne}) {
        const LinkParams p{5.0, 1.0, 0.95, 0.95, kind};
        const auto r = key_rate_asymptotic(p, NoiseBudget::from_totals(0.0, 0.0133));
        for (double l : r.eigenvalues) CHECK(l >= 1.0);
        CHECK(r.eigenvalues[0] == 1.0);
        CHECK(r.eigenvalues[1] == 1.0);
        CHECK(r.key_rate > 0.0);
        const auto o = oracle::holevo(5.0, 1.0, 0.95, p.mu(), 0.0, 0.0133);
        CHECK(r.holevo == doctest::Approx(o.s_ab - o.s_conditional).scale(1.0).epsilon(1e-6));
    }
}
