#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "common.hpp"

using namespace patchflow;
using pftest::make_patch;
using pftest::rel;
using pftest::table_for;

namespace {

constexpr double kPi = std::numbers::pi;

/// Boundary speed of the unit disk for G = c rho^-a, from u = -oint Phi(|x - z|) dz
/// with Phi' = G / rho, as a one-dimensional singular integral.
double alpha_disk_speed(double a) {
    const double c = a * std::pow(2.0, a - 1.0) * std::tgamma(0.5 * a) / (2.0 * kPi * std::tgamma(1.0 - 0.5 * a));
    boost::math::quadrature::tanh_sinh<double> ts;
    const double half = ts.integrate([&](double phi) { return std::pow(2.0 * std::sin(0.5 * phi), -a) * std::cos(phi); },
                                     0.0, kPi, 1e-14);
    return c / a * 2.0 * half;
}

/// oint u . n ds with spectral tangents.
double normal_flux(const std::vector<Vec2>& nodes, const std::vector<Vec2>& u) {
    const TrigCurve tc(nodes);
    const auto dz = tc.derivative_at_nodes(1, false);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += u[i].x * dz[i].imag() - u[i].y * dz[i].real();
    return s * 2.0 * kPi / static_cast<double>(nodes.size());
}

}  // namespace

TEST(Velocity, EulerDiskNodesAndRegions) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    const auto disk = make_patch(circle_nodes({0, 0}, 1.0, 256));
    const BiotSavart bs({disk}, tab);
    const auto v = bs.velocity_nodes()[0];
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 x = disk.nodes[i];
        EXPECT_NEAR(v[i].x, -0.5 * x.y, 1e-10);
        EXPECT_NEAR(v[i].y, 0.5 * x.x, 1e-10);
    }
    for (double r : {0.0, 0.3, 0.99, 0.9999}) EXPECT_NEAR(bs.velocity(Vec2{0, r}).x, -0.5 * r, 1e-9) << r;
    for (double r : {1.0001, 1.01, 2.0, 10.0}) EXPECT_NEAR(bs.velocity(Vec2{0, r}).x, -0.5 / r, 1e-9) << r;
}

TEST(Velocity, AlphaDiskMatchesSingularIntegral) {
    for (double a : {0.3, 0.5}) {
        const auto& tab = table_for(MultiplierSymbol::alpha_sqg(a));
        const auto disk = make_patch(circle_nodes({0, 0}, 1.0, 256));
        const BiotSavart bs({disk}, tab);
        const double expect = alpha_disk_speed(a);
        const auto v = bs.velocity_nodes();
        for (const auto& u : v[0]) EXPECT_LT(rel(u.norm(), expect), 1e-6) << a;
        EXPECT_LT(bs.velocity(Vec2{0, 0}).norm(), 1e-12);
    }
}

TEST(Velocity, EulerFarFieldApproachesPointVortex) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    const auto disk = make_patch(circle_nodes({0.0, 0.0}, 0.7, 128));
    const auto ell = make_patch(ellipse_nodes({0.0, 0.0}, 1.0, 0.5, 0.0, 128));
    const BiotSavart bd({disk}, tab);
    const BiotSavart be({ell}, tab);
    const double ad = spectral_area(disk.nodes);
    const double ae = spectral_area(ell.nodes);
    double dev_prev = 1.0;
    for (double r : {10.0, 20.0}) {
        const Vec2 x{r * std::cos(0.7), r * std::sin(0.7)};
        EXPECT_NEAR(bd.velocity(x).norm() * 2.0 * kPi * r / ad, 1.0, 1e-10);
        const double dev = std::abs(be.velocity(x).norm() * 2.0 * kPi * r / ae - 1.0);
        EXPECT_LT(dev, 0.01) << r;
        EXPECT_LT(dev, dev_prev / 3.0) << r;
        dev_prev = dev;
    }
}

TEST(Velocity, TranslationEquivariant) {
    const auto& tab = table_for(MultiplierSymbol::alpha_sqg(0.5));
    const auto a = make_patch(ellipse_nodes({0, 0}, 1.0, 0.6, 0.2, 128), 1.0, "a");
    const auto b = make_patch(circle_nodes({3.0, 0.5}, 0.5, 128), -0.7, "b");
    const Vec2 shift{0.37, -1.25};
    auto shifted = [&](PatchCurve c) {
        for (auto& p : c.nodes) p += shift;
        return c;
    };
    const BiotSavart b0({a, b}, tab);
    const BiotSavart b1({shifted(a), shifted(b)}, tab);
    const auto v0 = b0.velocity_nodes();
    const auto v1 = b1.velocity_nodes();
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < v0[c].size(); ++i) EXPECT_NEAR((v0[c][i] - v1[c][i]).norm(), 0.0, 1e-12);
    }
    for (Vec2 x : {Vec2{0.1, 0.1}, Vec2{1.5, 1.5}, Vec2{3.0, 0.9}}) {
        EXPECT_NEAR((b0.velocity(x) - b1.velocity(x + shift)).norm(), 0.0, 1e-12);
    }
}

TEST(Velocity, DivergenceFreeFlux) {
    for (const auto& sym : {MultiplierSymbol::euler(), MultiplierSymbol::alpha_sqg(0.5)}) {
        const auto& tab = table_for(sym);
        const auto ell = make_patch(ellipse_nodes({0, 0}, 1.0, 0.5, 0.3, 256));
        const BiotSavart bs({ell}, tab);
        EXPECT_LE(std::abs(normal_flux(ell.nodes, bs.velocity_nodes()[0])), 1e-8);
    }
}

TEST(Velocity, OracleAgreesAndConverges) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    const auto ell = make_patch(ellipse_nodes({0, 0}, 1.0, 0.5, 0.3, 256));
    const BiotSavart bs({ell}, tab);
    const double ca = std::cos(0.3);
    const double sa = std::sin(0.3);
    for (Vec2 x : {Vec2{1.4, 0.3}, Vec2{0.2, -0.1}, Vec2{0.5, 0.1}}) {
        const Vec2 u = bs.velocity(x);
        const double e256 = (velocity_oracle({ell}, tab, x, 256) - u).norm();
        const double e1024 = (velocity_oracle({ell}, tab, x, 1024) - u).norm();
        EXPECT_LT(e1024, 1e-4 * u.norm());
        EXPECT_LT(e1024, 0.5 * e256);
        if (inside_polygon(ell.nodes, x)) {
            // Kirchhoff: inside an ellipse u = (-a y, b x) / (a + b) in body axes.
            const double bx = ca * x.x + sa * x.y;
            const double by = -sa * x.x + ca * x.y;
            const Vec2 ub{-by / 1.5, 0.5 * bx / 1.5};
            EXPECT_NEAR((u - Vec2{ca * ub.x - sa * ub.y, sa * ub.x + ca * ub.y}).norm(), 0.0, 1e-9);
        }
    }
    EXPECT_THROW(velocity_oracle({ell}, tab, {0, 0}, 2), DomainError);
}

TEST(Gradient, MatchesFiniteDifferences) {
    const auto& tab = table_for(MultiplierSymbol::alpha_sqg(0.5));
    const auto ell = make_patch(ellipse_nodes({0, 0}, 1.0, 0.5, 0.3, 256));
    const BiotSavart bs({ell}, tab);
    const double h = 1e-5;
    for (Vec2 x : {Vec2{0.2, 0.1}, Vec2{1.6, -0.4}}) {
        const Mat2 g = bs.grad_u_sym(x);
        const Vec2 dx = (bs.velocity(x + Vec2{h, 0}) - bs.velocity(x - Vec2{h, 0})) * (0.5 / h);
        const Vec2 dy = (bs.velocity(x + Vec2{0, h}) - bs.velocity(x - Vec2{0, h})) * (0.5 / h);
        // Entry (i, j) = d u_i / d x_j.
        const Mat2 fd{dx.x, dy.x, dx.y, dy.y};
        const Mat2 s = fd.sym_traceless();
        const double scale = s.frobenius() + 1e-3;
        EXPECT_NEAR(g.a11, s.a11, 1e-6 * scale);
        EXPECT_NEAR(g.a12, s.a12, 1e-6 * scale);
        EXPECT_NEAR(g.a21, s.a21, 1e-6 * scale);
        EXPECT_NEAR(g.a11 + g.a22, 0.0, 1e-14);
    }
}

TEST(Gradient, DiskCenterAndBoundaryGuard) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    const auto disk = make_patch(circle_nodes({0, 0}, 1.0, 128));
    const BiotSavart bs({disk}, tab);
    const Mat2 g = bs.grad_u_sym({0, 0});
    EXPECT_NEAR(g.frobenius(), 0.0, 1e-12);
    EXPECT_THROW((void)bs.grad_u_sym(disk.nodes[3]), DomainError);
}

TEST(Velocity, ContactRaisesSolverHalt) {
    const auto& tab = table_for(MultiplierSymbol::euler());
    const auto a = make_patch(circle_nodes({0, 0}, 1.0, 64), 1.0, "a");
    auto b = make_patch(circle_nodes({2, 0}, 1.0, 64), 1.0, "b");
    const BiotSavart bs({a, b}, tab);
    // Node 32 of b is (1, 0), which is node 0 of a.
    EXPECT_THROW((void)bs.velocity(VelocityQuery{b.nodes[32], std::make_pair(std::size_t{1}, std::size_t{32})}),
                 SolverHalt);
}

TEST(Velocity, RejectsNonIntegrableKernel) {
    KernelTableConfig cfg;
    cfg.rho_min = 1e-4;
    cfg.rho_max = 1e2;
    const auto& tab = table_for(MultiplierSymbol::alpha_sqg(1.0), cfg);
    const auto disk = make_patch(circle_nodes({0, 0}, 1.0, 64));
    const BiotSavart bs({disk}, tab);
    EXPECT_THROW((void)bs.velocity_nodes(), DomainError);
    EXPECT_NO_THROW((void)bs.velocity(Vec2{3.0, 0.0}));
}

TEST(Quadrature, SettingsValidation) {
    QuadratureSettings qs;
    qs.far_order = 0;
    EXPECT_THROW(qs.validate(), ConfigError);
    qs = {};
    qs.window_nodes = 0;
    EXPECT_THROW(qs.validate(), ConfigError);
}
