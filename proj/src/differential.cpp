#include "eqfvio/differential.hpp"

#include <stdexcept>

namespace eqfvio {

Eigen::VectorXd numeric_derivative(const std::function<Eigen::VectorXd(double)>& f, double step, bool richardson) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("numeric_derivative: step must be positive");
    }
    const Eigen::VectorXd d1 = (f(step) - f(-step)) / (2.0 * step);
    if (!richardson) {
        return d1;
    }
    const Eigen::VectorXd d2 = (f(0.5 * step) - f(-0.5 * step)) / step;
    return (4.0 * d2 - d1) / 3.0;
}

Eigen::MatrixXd numeric_differential(const VectorMap& f, const Eigen::VectorXd& x0, double step, bool richardson) {
    Eigen::MatrixXd J;
    for (Eigen::Index j = 0; j < x0.size(); ++j) {
        const Eigen::VectorXd col = numeric_derivative(
            [&](double h) {
                Eigen::VectorXd x = x0;
                x(j) += h;
                return f(x);
            },
            step, richardson);
        if (j == 0) {
            J.resize(col.size(), x0.size());
        }
        J.col(j) = col;
    }
    if (x0.size() == 0) {
        J.resize(f(x0).size(), 0);
    }
    return J;
}

}  // namespace eqfvio
