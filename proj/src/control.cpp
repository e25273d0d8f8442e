#include "rcfhe/control.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rcfhe/rng.hpp"

namespace rcfhe {

std::vector<double> char_poly(const Eigen::MatrixXd& a)
{
    const auto n = a.rows();
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
    coeffs[0] = 1.0;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + coeffs[k - 1] * id;
        coeffs[k] = -(a * m).trace() / static_cast<double>(k);
    }
    return coeffs;
}

std::vector<double> poly_from_roots(std::span<const double> roots)
{
    std::vector<double> p{1.0};
    for (double r : roots) {
        p.push_back(0.0);
        for (std::size_t i = p.size() - 1; i > 0; --i)
            p[i] -= r * p[i - 1];
    }
    return p;
}

std::size_t numeric_rank(const Eigen::MatrixXd& a, double tol)
{
    Eigen::MatrixXd w = a;
    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    const Eigen::Index limit = std::min(w.rows(), w.cols());
    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < limit; ++k) {
        Eigen::Index pr = 0, pc = 0;
        const double pivot =
            w.bottomRightCorner(w.rows() - k, w.cols() - k).cwiseAbs().maxCoeff(&pr, &pc);
        if (pivot <= tol * scale)
            break;
        w.row(k).swap(w.row(k + pr));
        w.col(k).swap(w.col(k + pc));
        for (Eigen::Index r = k + 1; r < w.rows(); ++r) {
            const double f = w(r, k) / w(k, k);
            w.row(r).tail(w.cols() - k) -= f * w.row(k).tail(w.cols() - k);
        }
        ++rank;
    }
    return rank;
}

namespace {

Eigen::MatrixXd poly_of_matrix(const std::vector<double>& p, const Eigen::MatrixXd& a)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (double c : p)
        out = out * a + c * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    return out;
}

std::optional<Eigen::MatrixXd> try_place(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                                         const std::vector<double>& target,
                                         const Eigen::VectorXd& w, double tol)
{
    const auto n = a.rows();
    const Eigen::MatrixXd at = a.transpose();
    const Eigen::VectorXd b = c.transpose() * w;

    Eigen::MatrixXd ctrb(n, n);
    Eigen::VectorXd col = b;
    for (Eigen::Index i = 0; i < n; ++i) {
        ctrb.col(i) = col;
        col = at * col;
    }
    if (numeric_rank(ctrb) < static_cast<std::size_t>(n))
        return std::nullopt;

    Eigen::VectorXd last = Eigen::VectorXd::Zero(n);
    last[n - 1] = 1.0;
    const Eigen::RowVectorXd row = ctrb.transpose().partialPivLu().solve(last).transpose();
    const Eigen::RowVectorXd k = row * poly_of_matrix(target, at);
    const Eigen::MatrixXd L = k.transpose() * w.transpose();

    const auto got = char_poly(a - L * c);
    for (std::size_t i = 0; i < got.size(); ++i)
        if (!(std::abs(got[i] - target[i]) < tol))
            return std::nullopt;
    return L;
}

}  // namespace

Eigen::MatrixXd place_observer(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                               std::span<const double> poles, const PlacementOptions& opts)
{
    const auto n = a.rows();
    if (a.cols() != n || c.cols() != n || static_cast<Eigen::Index>(poles.size()) != n)
        throw std::invalid_argument("place_observer: inconsistent dimensions");

    Eigen::MatrixXd obs(c.rows() * n, n);
    Eigen::MatrixXd block = c;
    for (Eigen::Index i = 0; i < n; ++i) {
        obs.middleRows(i * c.rows(), c.rows()) = block;
        block = block * a;
    }
    if (numeric_rank(obs) < static_cast<std::size_t>(n))
        throw NotObservable("pair (A, C) is not observable");

    const auto target = poly_from_roots(poles);
    if (opts.combination) {
        if (opts.combination->size() != c.rows())
            throw std::invalid_argument("place_observer: combination has wrong length");
        if (auto L = try_place(a, c, target, *opts.combination, opts.tol))
            return *L;
        throw PlacementFailed("placement failed for the given output combination");
    }

    Rng rng(opts.seed);
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        Eigen::VectorXd w(c.rows());
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w[i] = 2.0 * rng.uniform_real() - 1.0;
        if (w.norm() == 0.0)
            continue;
        w.normalize();
        if (auto L = try_place(a, c, target, w, opts.tol))
            return *L;
    }
    std::ostringstream os;
    os << "placement failed after " << opts.max_attempts << " attempts";
    throw PlacementFailed(os.str());
}

std::array<double, 5> observer_poles() { return {0.7, 0.5, 0.8, 0.6, 0.85}; }

Row5 nominal_feedback_gain() { return Row5(-12.6, -1.8, -9.8, -0.95, 0.015); }

Row5 applied_feedback_gain() { return -nominal_feedback_gain(); }

double linear_peak_theta2(const LinearModel& m, const Eigen::MatrixXd& L, const Row5& k,
                          const Vec5& x0, int steps)
{
    Vec5 x = x0;
    Vec5 xhat = Vec5::Zero();
    double u = 0.0;
    double peak = std::abs(x[2]);
    for (int i = 0; i < steps; ++i) {
        const Vec2 y = m.C_d * x;
        const Vec5 xhat_next = m.A_d * xhat + m.B_d * u + L * (y - m.C_d * xhat);
        x = m.A_d * x + m.B_d * u;
        xhat = xhat_next;
        u = k * xhat;
        const double v = std::abs(x[2]);
        if (!std::isfinite(v))
            return std::numeric_limits<double>::infinity();
        peak = std::max(peak, v);
    }
    return peak;
}

Eigen::Vector2d select_observer_combination(const LinearModel& model, const Row5& k,
                                            std::span<const double> poles, const Vec5& x0,
                                            int samples, int steps)
{
    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::Vector2d best = Eigen::Vector2d::Zero();
    for (int i = 0; i < samples; ++i) {
        const double phi = std::numbers::pi * i / samples;
        const Eigen::Vector2d w(std::cos(phi), std::sin(phi));
        PlacementOptions opts;
        opts.combination = Eigen::VectorXd(w);
        Eigen::MatrixXd L;
        try {
            L = place_observer(model.A_d, model.C_d, poles, opts);
        } catch (const PlacementFailed&) {
            continue;
        }
        const double cost = linear_peak_theta2(model, L, k, x0, steps);
        if (cost < best_cost) {
            best_cost = cost;
            best = w;
        }
    }
    if (!std::isfinite(best_cost))
        throw PlacementFailed("no output combination admits placement");
    return best;
}

GainSet composite_gains(const LinearModel& model, const Mat52& L, const Row5& K,
                        const QFormat& fmt)
{
    GainSet g;
    g.model = model;
    g.L = L;
    g.K = K;
    g.fmt = fmt;

    const Mat5 F_A = model.A_d - L * model.C_d;
    g.x << F_A, model.B_d, L;
    g.u << K * F_A, K * model.B_d, K * L;

    g.xq = WordMatrix(5, signal_length);
    g.uq = WordMatrix(1, signal_length);
    for (std::size_t j = 0; j < signal_length; ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < 5; ++i)
            g.xq(i, j) = q_encode(g.x(static_cast<Eigen::Index>(i), c), fmt);
        g.uq(0, j) = q_encode(g.u(0, c), fmt);
    }
    return g;
}

ControllerDesign design_controller(const PlantParams& plant, double T_s, const Vec5& x0)
{
    ControllerDesign d;
    d.model = linearize(plant, T_s);
    d.K = applied_feedback_gain();
    const auto poles = observer_poles();
    d.combination = select_observer_combination(d.model, d.K, poles, x0);
    PlacementOptions opts;
    opts.combination = Eigen::VectorXd(d.combination);
    d.L = place_observer(d.model.A_d, d.model.C_d, poles, opts);
    return d;
}

PlainStep plain_controller_step(const GainSet& g, std::span<const Word, 5> xhat, Word u,
                                std::span<const Word, 2> y)
{
    const unsigned ell = g.fmt.ell;
    const std::array<Word, signal_length> z{xhat[0], xhat[1], xhat[2], xhat[3], xhat[4],
                                            u,       y[0],    y[1]};
    auto dot = [&](const WordMatrix& gains, std::size_t row) {
        Word acc = 0;
        for (std::size_t j = 0; j < signal_length; ++j)
            acc = q_add_plain(acc, q_mul_plain(gains(row, j), z[j], ell), ell);
        return acc;
    };

    PlainStep out;
    for (std::size_t i = 0; i < 5; ++i) {
        out.xhat_wide[i] = dot(g.xq, i);
        out.xhat[i] = rescale(out.xhat_wide[i], g.fmt.n_q, ell);
    }
    out.u_wide = dot(g.uq, 0);
    out.u = rescale(out.u_wide, g.fmt.n_q, ell);
    return out;
}

FloatStep float_composite_step(const GainSet& g, const Vec5& xhat, double u, const Vec2& y)
{
    Eigen::Matrix<double, 8, 1> z;
    z << xhat, u, y;
    return {g.x * z, (g.u * z)(0, 0)};
}

FloatStep float_two_stage_step(const LinearModel& m, const Mat52& L, const Row5& K,
                               const Vec5& xhat, double u, const Vec2& y)
{
    const Vec5 next = m.A_d * xhat + m.B_d * u + L * (y - m.C_d * xhat);
    return {next, K * next};
}

void write_gain_csv(std::ostream& os, const GainSet& g)
{
    const unsigned ell = g.fmt.ell;
    const unsigned frac = g.fmt.n_q;
    os << "name,row,col,real,word,quantized\n";
    os.precision(17);
    auto emit = [&](const char* name, int r, int c, double v, Word w) {
        os << name << ',' << r << ',' << c << ',' << v << ',' << w << ','
           << q_decode(w, frac, ell) << '\n';
    };
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            emit("F_A", i, j, g.x(i, j), g.xq(i, j));
    for (int i = 0; i < 5; ++i)
        emit("F_B", i, 0, g.x(i, 5), g.xq(i, 5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 2; ++j)
            emit("F_L", i, j, g.x(i, 6 + j), g.xq(i, 6 + j));
    for (int j = 0; j < 5; ++j)
        emit("K_A", 0, j, g.u(0, j), g.uq(0, j));
    emit("K_B", 0, 0, g.u(0, 5), g.uq(0, 5));
    for (int j = 0; j < 2; ++j)
        emit("K_L", 0, j, g.u(0, 6 + j), g.uq(0, 6 + j));
}

}  // namespace rcfhe
