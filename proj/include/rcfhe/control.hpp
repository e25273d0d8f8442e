#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rcfhe/fixed_point.hpp"
#include "rcfhe/pendulum.hpp"
#include "rcfhe/word.hpp"

namespace rcfhe {

class NotObservable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PlacementFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Monic characteristic polynomial by Faddeev-LeVerrier, highest degree first.
std::vector<double> char_poly(const Eigen::MatrixXd& a);

/// Coefficients of prod (z - r_i), highest degree first.
std::vector<double> poly_from_roots(std::span<const double> roots);

/// Rank by Gaussian elimination with full pivoting; pivots below
/// tol * max(1, max|a_ij|) count as zero.
std::size_t numeric_rank(const Eigen::MatrixXd& a, double tol = 1e-10);

struct PlacementOptions {
    /// Output combination w for the single-input reduction. Random when unset.
    std::optional<Eigen::VectorXd> combination;
    std::uint64_t seed = 1;
    int max_attempts = 10;
    double tol = 1e-8;
};

/// L such that A - L*C has the requested characteristic polynomial. Works on
/// the dual pair (A^T, C^T w), places with Ackermann's formula and returns
/// L = k^T w^T.
Eigen::MatrixXd place_observer(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c,
                               std::span<const double> poles, const PlacementOptions& opts = {});

std::array<double, 5> observer_poles();

/// Nominal feedback row [-12.6 -1.8 -9.8 -0.95 0.015].
Row5 nominal_feedback_gain();

/// Gain actually applied, u = k*xhat. The nominal row is used with its sign
/// flipped; as given, the loop has a pole outside the unit circle.
Row5 applied_feedback_gain();

/// Peak |theta2| of the linearized observer loop started from x0 with
/// xhat = 0 and u = 0, over `steps` samples.
double linear_peak_theta2(const LinearModel& model, const Eigen::MatrixXd& L, const Row5& k,
                          const Vec5& x0, int steps);

/// Sweeps the direction of w over half a turn and keeps the one whose
/// linearized response from x0 has the smallest theta2 peak.
Eigen::Vector2d select_observer_combination(const LinearModel& model, const Row5& k,
                                            std::span<const double> poles, const Vec5& x0,
                                            int samples = 720, int steps = 1000);

/// Composite depth-1 gains. Row i of `x` produces xhat+_i and `u` produces
/// u+, both acting on the stacked signal z = [xhat; u; y].
struct GainSet {
    LinearModel model;
    Mat52 L;
    Row5 K;
    Eigen::Matrix<double, 5, 8> x;
    Eigen::Matrix<double, 1, 8> u;
    QFormat fmt;
    WordMatrix xq;  // 5 x 8
    WordMatrix uq;  // 1 x 8

    Mat5 F_A() const { return x.block<5, 5>(0, 0); }
    Vec5 F_B() const { return x.col(5); }
    Mat52 F_L() const { return x.block<5, 2>(0, 6); }
    Row5 K_A() const { return u.block<1, 5>(0, 0); }
    double K_B() const { return u(0, 5); }
    Row2 K_L() const { return u.block<1, 2>(0, 6); }
};

inline constexpr std::size_t signal_length = 8;
inline constexpr std::size_t gain_count = 48;

GainSet composite_gains(const LinearModel& model, const Mat52& L, const Row5& K,
                        const QFormat& fmt);

struct ControllerDesign {
    LinearModel model;
    Mat52 L;
    Row5 K;
    Eigen::Vector2d combination;
};

/// Linearize, choose w, place the observer poles.
ControllerDesign design_controller(const PlantParams& plant, double T_s, const Vec5& x0);

/// Outputs of one fixed-point controller step. The wide words carry 2*n_q
/// fraction bits; the others are rescaled back to n_q.
struct PlainStep {
    std::array<Word, 5> xhat_wide{};
    Word u_wide = 0;
    std::array<Word, 5> xhat{};
    Word u = 0;
};

PlainStep plain_controller_step(const GainSet& g, std::span<const Word, 5> xhat, Word u,
                                std::span<const Word, 2> y);

struct FloatStep {
    Vec5 xhat;
    double u = 0;
};

FloatStep float_composite_step(const GainSet& g, const Vec5& xhat, double u, const Vec2& y);

/// xhat+ = A xhat + B u + L (y - C xhat), u+ = K xhat+.
FloatStep float_two_stage_step(const LinearModel& m, const Mat52& L, const Row5& K,
                               const Vec5& xhat, double u, const Vec2& y);

/// name,row,col,real,word,quantized
void write_gain_csv(std::ostream& os, const GainSet& g);

}  // namespace rcfhe
