#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace patchflow;
using pftest::make_patch;
using pftest::rel;
using pftest::table_for;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec2> transformed(const std::vector<Vec2>& v, double scale, double angle, Vec2 shift) {
    std::vector<Vec2> out;
    for (const auto& p : v) {
        out.push_back(Vec2{std::cos(angle) * p.x - std::sin(angle) * p.y, std::sin(angle) * p.x + std::cos(angle) * p.y} *
                          scale +
                      shift);
    }
    return out;
}

/// Defect inside a circle of radius R at distance r from the centre: S_rho is
/// {cos th < c}, the half circle is {cos th <= 0}.
double circle_defect(double big_r, double r, double rho) {
    const double c = (big_r * big_r - r * r - rho * rho) / (2.0 * r * rho);
    if (c >= 1.0) return kPi;
    if (c <= -1.0) return kPi;
    return std::abs(kPi - 2.0 * std::acos(c));
}

}  // namespace

TEST(Holder, CircleClosedForm) {
    const auto c = circle_nodes({0.3, -0.1}, 1.0, 512);
    for (double g : {0.25, 0.5, 0.75}) EXPECT_NEAR(holder_seminorm(c, 1, g), std::pow(2.0, 1.0 - g), 1e-8) << g;
    EXPECT_NEAR(w_inf(c), 1.0, 1e-12);
    EXPECT_NEAR(delta_gamma(c, 0.5), std::sqrt(2.0) + 1.0, 1e-8);
    EXPECT_NEAR(max_curvature(c), 1.0, 1e-10);
}

TEST(Holder, DilationAndRigidMotion) {
    const auto e = fourier_nodes({0, 0}, 1.0, {{3, 0.1, 0.05}, {2, 0.0, 0.08}}, 256);
    const double lam = 2.5;
    const auto big = transformed(e, lam, 0.0, {0, 0});
    const auto moved = transformed(e, 1.0, 0.83, {0.4, 1.7});
    for (double g : {0.3, 0.5, 0.8}) {
        for (int k : {1, 2}) {
            const double h = holder_seminorm(e, k, g);
            EXPECT_LT(rel(holder_seminorm(big, k, g), std::pow(lam, 1.0 - g) * h), 1e-10) << k << " " << g;
            EXPECT_LT(rel(holder_seminorm(moved, k, g), h), 1e-10) << k << " " << g;
        }
        EXPECT_LT(rel(delta_gamma(moved, g), delta_gamma(e, g)), 1e-10);
        EXPECT_LT(rel(delta_gamma(big, g) - 1.0, std::pow(lam, -g) * (delta_gamma(e, g) - 1.0)), 1e-10);
    }
}

TEST(Holder, ArgumentChecks) {
    const auto c = circle_nodes({0, 0}, 1.0, 64);
    EXPECT_THROW(holder_seminorm(c, 0, 0.5), DomainError);
    EXPECT_THROW(holder_seminorm(c, 1, 1.0), DomainError);
    EXPECT_THROW(holder_seminorm(circle_nodes({0, 0}, 1.0, 8), 2, 0.5), DomainError);
}

TEST(Defect, CircleClosedForm) {
    const auto c = circle_nodes({0, 0}, 1.0, 4096);
    for (auto [r, rho] : {std::pair{0.9, 0.5}, std::pair{0.95, 0.1}, std::pair{0.5, 0.3}, std::pair{0.99, 0.02}}) {
        // On the bisector of an edge, so the nearest polygon point is unique.
        const double th = kPi / 4096.0;
        const auto d = geometric_defect(c, Vec2{std::cos(th), std::sin(th)} * r, rho);
        // The polygon sags h^2 / 8 below the circle; the defect moves by about that over rho.
        EXPECT_NEAR(d.defect, circle_defect(1.0, r, rho), 1e-6 / rho) << r << " " << rho;
        EXPECT_NEAR(d.d_x, 1.0 - r, 1e-6);
        EXPECT_FALSE(d.ambiguous);
    }
}

TEST(Defect, DeepInteriorIsHalfCircle) {
    const auto c = circle_nodes({0, 0}, 1.0, 512);
    EXPECT_NEAR(geometric_defect(c, {0.1, 0.05}, 0.3).defect, kPi, 1e-12);
}

TEST(Defect, FlatBoundaryHasNoDefect) {
    const auto sq = polygon_nodes({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, 64);
    EXPECT_NEAR(geometric_defect(sq, {0.2, -1.0}, 0.05).defect, 0.0, 1e-9);
    EXPECT_NEAR(geometric_defect(sq, {0.2, -0.9}, 0.05).defect, kPi, 1e-12);
    EXPECT_THROW((void)geometric_defect(sq, {0, 0}, 0.0), DomainError);
}

TEST(Defect, BoundHoldsOnDiskAndEllipse) {
    for (const auto& nodes : {circle_nodes({0, 0}, 1.0, 1024), ellipse_nodes({0, 0}, 1.0, 0.5, 0.0, 1024)}) {
        for (double g : {0.25, 0.5, 0.75}) {
            const double big_d = delta_gamma(nodes, g);
            const double dg = std::pow(big_d, -1.0 / g);
            for (double rf : {0.05, 0.2, 0.5, 1.0}) {
                const double rho = rf * dg;
                for (std::size_t k : {std::size_t{0}, std::size_t{300}, std::size_t{700}}) {
                    const Vec2 inward = (Vec2{0, 0} - nodes[k]) * (1.0 / nodes[k].norm());
                    for (double f : {0.0, 0.1, 0.5}) {
                        const auto d = geometric_defect(nodes, nodes[k] + inward * (f * rho), rho);
                        EXPECT_LE(d.defect, geometric_defect_bound(d.d_x, rho, g, big_d));
                    }
                }
            }
        }
    }
}

TEST(Envelope, ConstantSeriesNeedsNoGrowth) {
    const OsgoodProfile prof(MultiplierSymbol::euler());
    const std::vector<double> t{0.0, 0.5, 1.0};
    const std::vector<double> s{0.1, 0.1, 0.1};
    const auto chk = envelope_check(t, s, prof, EnvelopeKind::FlowPair);
    EXPECT_TRUE(chk.pass);
    EXPECT_LT(rel(chk.fitted_c, kEnvelopeCMin), 1e-12);
    ASSERT_EQ(chk.lower.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(chk.lower[i], s[i]);
}

TEST(Envelope, RecoversGrowthConstant) {
    const OsgoodProfile prof(MultiplierSymbol::euler());
    std::vector<double> t;
    std::vector<double> s;
    for (int i = 0; i <= 10; ++i) {
        t.push_back(0.1 * i);
        s.push_back(std::pow(0.05, std::exp(2.0 * 0.1 * i)));
    }
    const auto chk = envelope_check(t, s, prof, EnvelopeKind::FlowPair);
    EXPECT_TRUE(chk.pass);
    EXPECT_LT(rel(chk.fitted_c, 2.0), 1e-5);
    const auto sep = envelope_check(t, s, prof, EnvelopeKind::Separation);
    EXPECT_TRUE(sep.pass);
    EXPECT_TRUE(std::isinf(sep.upper.back()));
}

TEST(Envelope, AdversarialSeriesFails) {
    const OsgoodProfile prof(MultiplierSymbol::euler());
    const auto chk = envelope_check({0.0, 1e-9}, {0.1, 0.2}, prof, EnvelopeKind::FlowPair);
    EXPECT_FALSE(chk.pass);
    EXPECT_TRUE(std::isinf(chk.fitted_c));
    EXPECT_THROW((void)envelope_check({}, {}, prof, EnvelopeKind::FlowPair), DomainError);
}

TEST(Envelope, RefinementRatio) {
    EnvelopeCheck a;
    a.fitted_c = 2.0;
    EnvelopeCheck b;
    b.fitted_c = 3.0;
    attach_refinement(a, b);
    EXPECT_DOUBLE_EQ(a.refinement_ratio, 1.5);
}

TEST(FlowDivergence, IdenticalAndWeighted) {
    const std::vector<std::vector<Vec2>> a{{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}};
    EXPECT_EQ(flow_divergence(a, a, {1.0, 2.0}), (std::vector<double>{0.0, 0.0}));
    auto b = a;
    b[1][1] = {1, 1.3};
    const auto d = flow_divergence(a, b, {1.0, -3.0});
    EXPECT_NEAR(d[1], 3.0 * 0.3 / 4.0, 1e-15);
    EXPECT_THROW((void)flow_divergence(a, {a[0]}, {1.0, 1.0}), DomainError);
    EXPECT_THROW((void)flow_divergence(a, a, {1.0}), DomainError);
}

TEST(Strain, DiskAndKirchhoffEllipse) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    EXPECT_LT(grad_u_tangential_max({make_patch(circle_nodes({0, 0}, 1.0, 256))}, tab), 1e-8);
    // Inside an a:b ellipse the strain is uniform with off-diagonal (b - a) / (2 (a + b)).
    for (int n : {256, 512}) {
        const double g = grad_u_tangential_max({make_patch(ellipse_nodes({0, 0}, 2.0, 1.0, 0.4, n))}, tab);
        EXPECT_NEAR(g, 1.0 / 6.0, 1e-5) << n;
    }
}

TEST(Strain, VelocityModulusAndFarField) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    const auto disk = make_patch(circle_nodes({0, 0}, 1.0, 128));
    const BiotSavart bs({disk}, tab);
    EXPECT_NEAR(velocity_modulus_ratio(disk, bs.velocity_nodes()[0], MultiplierSymbol::euler()), 0.25, 1e-9);
    const double d = 1.5;
    const std::vector<PatchCurve> pair{make_patch(circle_nodes({0, 0}, 1.0, 256), 1.0, "a"),
                                       make_patch(circle_nodes({2.0 + d, 0}, 1.0, 256), 3.0, "b")};
    EXPECT_NEAR(far_field_ratio(pair, 0, tab), d / (4.0 * (1.0 + d)), 1e-9);
}

TEST(Record, DiskValuesAndPairs) {
    DiagnosticSettings ds;
    ds.gammas = {0.25, 0.5};
    ds.max_k = 2;
    ds.tracer_pairs = {{0, 1}};
    const std::vector<PatchCurve> curves{make_patch(circle_nodes({0, 0}, 1.0, 256), 1.0, "a"),
                                         make_patch(circle_nodes({3, 0}, 0.5, 256), 1.0, "b")};
    const auto rec = compute_record(0.5, curves, {{0, 0}, {3, 4}}, ds);
    ASSERT_EQ(rec.patches.size(), 2u);
    EXPECT_NEAR(rec.patches[0].area, kPi, 1e-12);
    EXPECT_NEAR(rec.patches[1].perimeter, kPi, 1e-12);
    EXPECT_NEAR(rec.patches[1].max_curvature, 2.0, 1e-9);
    EXPECT_NEAR(rec.patches[0].holder.at({2, 0.5}), std::pow(2.0, 0.5), 1e-6);
    EXPECT_NEAR(rec.min_dist, 1.5, 1e-4);
    ASSERT_EQ(rec.tracer_pair_sep.size(), 1u);
    EXPECT_DOUBLE_EQ(rec.tracer_pair_sep[0], 5.0);
    ds.tracer_pairs = {{0, 5}};
    EXPECT_THROW((void)compute_record(0.0, curves, {{0, 0}}, ds), ConfigError);
    ds.gammas = {1.2};
    EXPECT_THROW(ds.validate(), ConfigError);
}
