#include "rigtk/lm.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "rigtk/errors.hpp"

namespace rigtk {

LmReport solve_levenberg_marquardt(LeastSquaresProblem& problem,
                                   const LmOptions& options) {
  const int dim = problem.tangent_dim();
  LmReport report;

  Eigen::VectorXd residuals;
  Eigen::SparseMatrix<double> jacobian;
  problem.evaluate(residuals, &jacobian);

  double cost = 0.5 * residuals.squaredNorm();
  Eigen::SparseMatrix<double> hessian = jacobian.transpose() * jacobian;
  Eigen::VectorXd gradient = jacobian.transpose() * residuals;

  report.initial_cost = cost;
  report.initial_gradient_norm = gradient.norm();
  const double gradient_target =
      options.gradient_reduction * std::max(report.initial_gradient_norm, 1e-300);

  double lambda = options.initial_lambda;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    report.iterations = iter + 1;
    if (gradient.norm() <= gradient_target) {
      report.converged = true;
      report.stop_reason = "gradient";
      break;
    }

    // H + lambda * diag(H), with a floor on the diagonal so damping always
    // regularizes unobserved directions.
    Eigen::SparseMatrix<double> damped = hessian;
    double max_diag = 0.0;
    for (int i = 0; i < dim; ++i) max_diag = std::max(max_diag, hessian.coeff(i, i));
    if (max_diag <= 0.0) max_diag = 1.0;
    for (int i = 0; i < dim; ++i) {
      const double d = hessian.coeff(i, i);
      damped.coeffRef(i, i) = d + lambda * std::max(d, 1e-12 * max_diag);
    }

    solver.compute(damped);
    if (solver.info() != Eigen::Success) {
      lambda *= options.lambda_up;
      continue;
    }
    const Eigen::VectorXd dx = solver.solve(-gradient);
    if (solver.info() != Eigen::Success || !dx.allFinite()) {
      lambda *= options.lambda_up;
      continue;
    }

    if (dx.norm() < options.step_tolerance) {
      report.converged = true;
      report.stop_reason = "step";
      break;
    }

    problem.save_state();
    problem.apply_step(dx);
    Eigen::VectorXd new_residuals;
    problem.evaluate(new_residuals, nullptr);
    const double new_cost = 0.5 * new_residuals.squaredNorm();

    if (std::isfinite(new_cost) && new_cost < cost) {
      lambda = std::max(lambda / options.lambda_down, 1e-12);
      problem.evaluate(residuals, &jacobian);
      cost = 0.5 * residuals.squaredNorm();
      hessian = jacobian.transpose() * jacobian;
      gradient = jacobian.transpose() * residuals;
    } else {
      problem.rollback();
      lambda *= options.lambda_up;
      if (lambda > 1e16) {
        report.stop_reason = "lambda overflow";
        break;
      }
    }
  }

  report.final_cost = cost;
  report.final_gradient_norm = gradient.norm();
  if (!report.converged && report.final_gradient_norm <= gradient_target) {
    report.converged = true;
    report.stop_reason = "gradient";
  }
  return report;
}

}  // namespace rigtk
