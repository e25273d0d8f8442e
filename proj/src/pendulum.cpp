#include "rcfhe/pendulum.hpp"

#include <cmath>

namespace rcfhe {

Eigen::Matrix2d mass_matrix(double theta2, const PlantParams& p)
{
    const double c = std::cos(theta2);
    const double off = p.P2() + p.P3() * c;
    Eigen::Matrix2d m;
    m << p.P1() + p.P2() + 2 * p.P3() * c, off, off, p.P2();
    return m;
}

PlantState dynamics(const PlantState& x, double u, const PlantParams& p,
                    const std::optional<Vec2>& xi)
{
    const Eigen::Matrix2d M = mass_matrix(x.theta2, p);
    const double det = M.determinant();
    if (std::abs(det) < 1e-12)
        throw SingularMass("mass matrix is singular");

    const double s2 = std::sin(x.theta2);
    const double P3 = p.P3();
    Eigen::Matrix2d C;
    C << p.b1 - P3 * x.dtheta2 * s2, -P3 * (x.dtheta1 + x.dtheta2) * s2,
        P3 * x.dtheta1 * s2, p.b2;
    const double s12 = std::sin(x.theta1 + x.theta2);
    const Vec2 G(-p.g1() * std::sin(x.theta1) - p.g2() * s12, -p.g2() * s12);
    const Vec2 rates(x.dtheta1, x.dtheta2);
    const Vec2 torque(x.torque, 0.0);

    Vec2 acc = M.inverse() * (torque - C * rates - G);
    if (xi)
        acc += *xi;

    return {x.dtheta1, acc[0], x.dtheta2, acc[1], (p.k_m * u - x.torque) / p.tau_e};
}

PlantState rk4_step(const PlantState& x, double u, double dt, const PlantParams& p)
{
    const Vec5 x0 = x.vec();
    const Vec5 k1 = dynamics(x, u, p).vec();
    const Vec5 k2 = dynamics(PlantState::from(x0 + 0.5 * dt * k1), u, p).vec();
    const Vec5 k3 = dynamics(PlantState::from(x0 + 0.5 * dt * k2), u, p).vec();
    const Vec5 k4 = dynamics(PlantState::from(x0 + dt * k3), u, p).vec();
    return PlantState::from(x0 + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
}

PlantState advance_sample(const PlantState& x, double u, double T_s, int substeps,
                          const PlantParams& p)
{
    if (substeps < 1)
        throw std::invalid_argument("advance_sample: substeps must be >= 1");
    const double dt = T_s / substeps;
    PlantState s = x;
    for (int i = 0; i < substeps; ++i)
        s = rk4_step(s, u, dt, p);
    return s;
}

Vec2 measure(const PlantState& x, const std::optional<Vec2>& eta)
{
    Vec2 y(x.theta1, x.theta2);
    if (eta)
        y += *eta;
    return y;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a)
{
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5)
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXd scaled = a / std::ldexp(1.0, squarings);

    const auto n = a.rows();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k < 40; ++k) {
        term = term * scaled / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-12 * 1e-6)
            break;
    }
    for (int i = 0; i < squarings; ++i)
        result = result * result;
    return result;
}

LinearModel linearize(const PlantParams& p, double T_s)
{
    constexpr double h = 1e-6;
    Mat5 A_c;
    Vec5 B_c;
    for (int i = 0; i < 5; ++i) {
        Vec5 e = Vec5::Zero();
        e[i] = h;
        A_c.col(i) = (dynamics(PlantState::from(e), 0.0, p).vec() -
                      dynamics(PlantState::from(-e), 0.0, p).vec()) /
                     (2 * h);
    }
    B_c = (dynamics(PlantState{}, h, p).vec() - dynamics(PlantState{}, -h, p).vec()) / (2 * h);

    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(6, 6);
    aug.topLeftCorner(5, 5) = A_c;
    aug.topRightCorner(5, 1) = B_c;
    const Eigen::MatrixXd phi = expm(aug * T_s);

    LinearModel model;
    model.A_d = phi.topLeftCorner(5, 5);
    model.B_d = phi.topRightCorner(5, 1);
    model.C_d = Mat25::Zero();
    model.C_d(0, 0) = 1;
    model.C_d(1, 2) = 1;
    model.T_s = T_s;
    return model;
}

}  // namespace rcfhe
