#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>

namespace rcfhe {

class SingularMass : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Vec2 = Eigen::Vector2d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Mat25 = Eigen::Matrix<double, 2, 5>;
using Mat52 = Eigen::Matrix<double, 5, 2>;
using Row5 = Eigen::Matrix<double, 1, 5>;
using Row2 = Eigen::Matrix<double, 1, 2>;

/// Physical constants of the base-driven double pendulum.
struct PlantParams {
    double m1 = 0.125, m2 = 0.05;      // kg
    double l1 = 0.1, l2 = 0.1;         // m
    double c1 = -0.04, c2 = 0.06;      // m, signed
    double I1 = 0.074, I2 = 0.00012;   // kg m^2
    double b1 = 4.8, b2 = 0.0002;      // kg/s
    double k_m = 50.0;                 // N m
    double tau_e = 0.03;               // s
    double grav = 9.81;                // m/s^2

    double P1() const { return m1 * c1 * c1 + m2 * l1 * l1 + I1; }
    double P2() const { return m2 * c2 * c2 + I2; }
    double P3() const { return m2 * l1 * c2; }
    double g1() const { return (m1 * c1 + m2 * l1) * grav; }
    double g2() const { return m2 * c2 * grav; }
};

/// x = [theta1, dtheta1, theta2, dtheta2, T].
struct PlantState {
    double theta1 = 0, dtheta1 = 0, theta2 = 0, dtheta2 = 0, torque = 0;

    Vec5 vec() const { return {theta1, dtheta1, theta2, dtheta2, torque}; }
    static PlantState from(const Vec5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
    bool operator==(const PlantState&) const = default;
};

struct LinearModel {
    Mat5 A_d;
    Vec5 B_d;
    Mat25 C_d;
    double T_s = 0;
};

Eigen::Matrix2d mass_matrix(double theta2, const PlantParams& p);

/// Time derivative of the state. The motor torque drives joint 1 only;
/// `xi` is an additive disturbance on the joint accelerations.
PlantState dynamics(const PlantState& x, double u, const PlantParams& p,
                    const std::optional<Vec2>& xi = std::nullopt);

PlantState rk4_step(const PlantState& x, double u, double dt, const PlantParams& p);

/// Zero-order hold of u over one period, split into `substeps` RK4 steps.
PlantState advance_sample(const PlantState& x, double u, double T_s, int substeps,
                          const PlantParams& p);

/// y = [theta1, theta2] + eta.
Vec2 measure(const PlantState& x, const std::optional<Vec2>& eta = std::nullopt);

/// Scaling-and-squaring with a truncated Taylor series.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// Central-difference Jacobians at the upright origin, then exact ZOH.
LinearModel linearize(const PlantParams& p, double T_s);

}  // namespace rcfhe
