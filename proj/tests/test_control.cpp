#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rcfhe/control.hpp"

using namespace rcfhe;

namespace {

const QFormat q1022{10, 22, 64};

void check_poly(const std::vector<double>& got, const std::vector<double>& want, double tol)
{
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) < tol);
}

const LinearModel& pendulum_model()
{
    static const LinearModel m = linearize(PlantParams{}, 0.01);
    return m;
}

const Vec5 theta0(0.0289, 0.0669, 0.1156, 0.0049, 0.0);

}  // namespace

TEST_CASE("char_poly examples")
{
    check_poly(char_poly(Eigen::MatrixXd::Identity(2, 2)), {1, -2, 1}, 1e-15);
    check_poly(char_poly(Eigen::MatrixXd::Zero(3, 3)), {1, 0, 0, 0}, 1e-15);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 0.5;
    d(1, 1) = 0.25;
    check_poly(char_poly(d), {1, -0.75, 0.125}, 1e-15);
    Eigen::MatrixXd c(2, 2);
    c << 1, 2, 3, 4;  // z^2 - 5z - 2
    check_poly(char_poly(c), {1, -5, -2}, 1e-14);
}

TEST_CASE("poly_from_roots expands products")
{
    const std::vector<double> r{0.5, 0.25};
    check_poly(poly_from_roots(r), {1, -0.75, 0.125}, 1e-15);
    const std::vector<double> none;
    check_poly(poly_from_roots(none), {1}, 1e-15);
}

TEST_CASE("numeric_rank")
{
    Eigen::MatrixXd a(3, 3);
    a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
    CHECK(numeric_rank(a) == 2);
    CHECK(numeric_rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
    CHECK(numeric_rank(Eigen::MatrixXd::Zero(2, 3)) == 0);
}

TEST_CASE("place_observer: scalar system")
{
    Eigen::MatrixXd A(1, 1), C(1, 1);
    A << 0.5;
    C << 1.0;
    const std::vector<double> poles{0.2};
    const auto L = place_observer(A, C, poles);
    CHECK(L(0, 0) == doctest::Approx(0.3));
}

TEST_CASE("place_observer: diagonal plant with full output")
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 2;
    A(1, 1) = 3;
    const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2, 2);
    const std::vector<double> poles{0.5, 0.5};
    const auto L = place_observer(A, C, poles);
    check_poly(char_poly(A - L * C), poly_from_roots(poles), 1e-8);
    // One valid answer from the example; the check is on the polynomial.
    Eigen::MatrixXd L0 = Eigen::MatrixXd::Zero(2, 2);
    L0(0, 0) = 1.5;
    L0(1, 1) = 2.5;
    check_poly(char_poly(A - L0 * C), poly_from_roots(poles), 1e-12);
}

TEST_CASE("place_observer rejects unobservable pairs")
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1;
    A(1, 1) = 2;
    Eigen::MatrixXd C(1, 2);
    C << 1, 0;
    const std::vector<double> poles{0.1, 0.2};
    CHECK_THROWS_AS(place_observer(A, C, poles), NotObservable);
}

TEST_CASE("place_observer reports a combination that cannot place")
{
    // With w = [1, 0] only the first output is used; the second mode is hidden.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 2;
    A(1, 1) = 3;
    const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2, 2);
    PlacementOptions opts;
    opts.combination = Eigen::Vector2d(1, 0);
    const std::vector<double> poles{0.5, 0.5};
    CHECK_THROWS_AS(place_observer(A, C, poles, opts), PlacementFailed);
}

TEST_CASE("pendulum observer reaches the target polynomial")
{
    const auto& m = pendulum_model();
    const auto poles = observer_poles();
    const auto target = poly_from_roots(poles);
    // 0.7 * 0.5 * 0.8 * 0.6 * 0.85, the constant term up to sign.
    CHECK(target.back() == doctest::Approx(-0.1428));
    CHECK(target[1] == doctest::Approx(-3.45));

    for (std::uint64_t seed : {1u, 2u, 3u}) {
        PlacementOptions opts;
        opts.seed = seed;
        const auto L = place_observer(m.A_d, m.C_d, poles, opts);
        check_poly(char_poly(m.A_d - L * m.C_d), target, 1e-8);
    }
    const auto d = design_controller(PlantParams{}, 0.01, theta0);
    check_poly(char_poly(d.model.A_d - d.L * d.model.C_d), target, 1e-8);
    CHECK(d.combination.norm() == doctest::Approx(1.0));
}

TEST_CASE("feedback gain and loop stability")
{
    const Row5 k = nominal_feedback_gain();
    CHECK(k[0] == -12.6);
    CHECK(k[4] == 0.015);
    CHECK(applied_feedback_gain() == -k);

    const auto& m = pendulum_model();
    auto radius = [](const Mat5& a) { return a.eigenvalues().cwiseAbs().maxCoeff(); };
    CHECK(radius(m.A_d) > 1.0);  // upright is unstable
    CHECK(radius(m.A_d + m.B_d * applied_feedback_gain()) < 1.0);
}

TEST_CASE("composite gains")
{
    const auto d = design_controller(PlantParams{}, 0.01, theta0);
    const GainSet g = composite_gains(d.model, d.L, d.K, q1022);
    CHECK(g.F_A() == d.model.A_d - d.L * d.model.C_d);
    CHECK(g.F_B() == d.model.B_d);
    CHECK(g.F_L() == d.L);
    CHECK((g.K_A() - d.K * g.F_A()).norm() < 1e-14);
    CHECK(g.K_B() == doctest::Approx((d.K * d.model.B_d)(0, 0)));
    CHECK((g.K_L() - d.K * d.L).norm() < 1e-15);

    const double half_step = std::ldexp(1.0, -23);
    for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 5; ++i)
            CHECK(std::abs(q_decode(g.xq(i, j), 22, 64) - g.x(i, j)) <= half_step);
        CHECK(std::abs(q_decode(g.uq(0, j), 22, 64) - g.u(0, j)) <= half_step);
    }
    CHECK(std::abs(nominal_feedback_gain().maxCoeff()) < 512);

    const GainSet zero = composite_gains(d.model, Mat52::Zero(), d.K, q1022);
    CHECK(zero.F_A() == d.model.A_d);
    CHECK((zero.K_A() - d.K * d.model.A_d).norm() < 1e-14);

    CHECK_THROWS_AS(composite_gains(d.model, d.L, d.K * 1000, q1022), OutOfRange);
}

TEST_CASE("composite and two-stage controllers agree")
{
    const auto d = design_controller(PlantParams{}, 0.01, theta0);
    const GainSet g = composite_gains(d.model, d.L, d.K, q1022);
    Vec5 xa = Vec5::Zero(), xb = Vec5::Zero();
    double ua = 0, ub = 0;
    // Each controller closes its own loop; on its own the controller is not
    // a stable system, so it cannot be driven open loop.
    Vec5 pa = theta0, pb = theta0;
    double worst = 0, scale = 0;
    for (int k = 0; k < 500; ++k) {
        const FloatStep a = float_composite_step(g, xa, ua, d.model.C_d * pa);
        const FloatStep b = float_two_stage_step(d.model, d.L, d.K, xb, ub, d.model.C_d * pb);
        pa = d.model.A_d * pa + d.model.B_d * ua;
        pb = d.model.A_d * pb + d.model.B_d * ub;
        xa = a.xhat;
        ua = a.u;
        xb = b.xhat;
        ub = b.u;
        worst = std::max({worst, (xa - xb).norm(), std::abs(ua - ub)});
        scale = std::max({scale, xb.norm(), std::abs(ub)});
    }
    // Machine precision relative to the size of the transient.
    CHECK(worst <= 1e-13 * scale);
}

TEST_CASE("plain controller step")
{
    const auto d = design_controller(PlantParams{}, 0.01, theta0);
    const GainSet g = composite_gains(d.model, d.L, d.K, q1022);

    const std::array<Word, 5> zx{};
    const std::array<Word, 2> zy{};
    const PlainStep z = plain_controller_step(g, zx, 0, zy);
    CHECK(z.u == 0);
    CHECK(z.u_wide == 0);
    for (int i = 0; i < 5; ++i)
        CHECK(z.xhat[static_cast<std::size_t>(i)] == 0);

    // From xhat = 0, u = 0 only the F_L column pair contributes.
    const std::array<Word, 2> y{q_encode(0.0289, q1022), q_encode(0.1156, q1022)};
    const PlainStep s = plain_controller_step(g, zx, 0, y);
    for (std::size_t i = 0; i < 5; ++i) {
        const __int128 wide = static_cast<__int128>(centered(g.xq(i, 6), 64)) * centered(y[0], 64) +
                              static_cast<__int128>(centered(g.xq(i, 7), 64)) * centered(y[1], 64);
        CHECK(centered(s.xhat_wide[i], 64) == static_cast<std::int64_t>(wide));
        __int128 floor = wide >> 22;  // arithmetic shift floors
        CHECK(centered(s.xhat[i], 64) == static_cast<std::int64_t>(floor));
        const double real = g.F_L().row(static_cast<Eigen::Index>(i)).dot(Vec2(0.0289, 0.1156));
        CHECK(std::abs(q_decode(s.xhat[i], 22, 64) - real) < 1e-5);
    }
}

TEST_CASE("fixed-point controller tracks the double-precision one")
{
    const auto d = design_controller(PlantParams{}, 0.01, theta0);
    const GainSet g = composite_gains(d.model, d.L, d.K, q1022);
    const double lsb = std::ldexp(1.0, -22);

    // One step from the same inputs: gain and input quantization (half an
    // LSB each) plus the final floor (one LSB).
    {
        const std::array<Word, 5> zx{};
        const Vec2 y(0.0289, 0.1156);
        const std::array<Word, 2> yw{q_encode(y[0], q1022), q_encode(y[1], q1022)};
        const PlainStep ps = plain_controller_step(g, zx, 0, yw);
        const FloatStep fs = float_composite_step(g, Vec5::Zero(), 0.0, y);
        for (int i = 0; i < 5; ++i) {
            const double bound = g.x.row(i).cwiseAbs().sum() * lsb / 2 + y.cwiseAbs().sum() * lsb / 2 +
                                 lsb;
            CHECK(std::abs(q_decode(ps.xhat[static_cast<std::size_t>(i)], 22, 64) - fs.xhat[i]) <=
                  bound);
        }
        const double ubound = g.u.cwiseAbs().sum() * lsb / 2 + y.cwiseAbs().sum() * lsb / 2 + lsb;
        CHECK(std::abs(q_decode(ps.u, 22, 64) - fs.u) <= ubound);
    }

    // Closed loops on the linear model, one per controller.
    std::array<Word, 5> xw{};
    Word uw = 0;
    Vec5 xf = Vec5::Zero();
    double uf = 0;
    Vec5 pw = theta0, pf = theta0;
    double worst = 0, peak = 0, last = 0;
    for (int k = 0; k < 300; ++k) {
        const Vec2 yq = d.model.C_d * pw;
        const std::array<Word, 2> yw{q_encode(yq[0], q1022), q_encode(yq[1], q1022)};
        const PlainStep ps = plain_controller_step(g, xw, uw, yw);
        const FloatStep fs = float_composite_step(g, xf, uf, d.model.C_d * pf);
        pw = d.model.A_d * pw + d.model.B_d * q_decode(uw, 22, 64);
        pf = d.model.A_d * pf + d.model.B_d * uf;
        xw = ps.xhat;
        uw = ps.u;
        xf = fs.xhat;
        uf = fs.u;
        last = std::abs(q_decode(uw, 22, 64) - uf);
        for (int i = 0; i < 5; ++i)
            last = std::max(last, std::abs(q_decode(xw[static_cast<std::size_t>(i)], 22, 64) - xf[i]));
        worst = std::max(worst, last);
        peak = std::max({peak, xf.cwiseAbs().maxCoeff(), std::abs(uf)});
    }
    MESSAGE("max fixed-vs-float deviation " << worst << " against peak " << peak);
    CHECK(worst <= 1e-3 * peak);
    // Floor rounding leaves a small residual cycle instead of exact convergence.
    CHECK(last < 1e-3);
}

TEST_CASE("gain CSV lists all 48 composite entries")
{
    const auto d = design_controller(PlantParams{}, 0.01, theta0);
    const GainSet g = composite_gains(d.model, d.L, d.K, q1022);
    std::ostringstream os;
    write_gain_csv(os, g);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "name,row,col,real,word,quantized");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 48);
    CHECK(gain_count == 48);
}
