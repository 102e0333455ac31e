#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace rigtk {

struct LmOptions {
  double initial_lambda{1e-3};
  double lambda_up{10.0};    // on rejected step
  double lambda_down{3.0};   // on accepted step
  int max_iterations{200};
  double step_tolerance{1e-10};
  double gradient_reduction{1e-6};  // relative to the initial gradient norm
};

struct LmReport {
  bool converged{false};
  int iterations{0};
  double initial_cost{0.0};
  double final_cost{0.0};
  double initial_gradient_norm{0.0};
  double final_gradient_norm{0.0};
  const char* stop_reason{""};
};

/// Nonlinear least-squares problem on a manifold. evaluate() returns the
/// residual vector and Jacobian at the current state; apply_step retracts a
/// tangent increment. save/rollback support rejected steps.
class LeastSquaresProblem {
 public:
  virtual ~LeastSquaresProblem() = default;
  virtual int tangent_dim() const = 0;
  virtual void evaluate(Eigen::VectorXd& residuals,
                        Eigen::SparseMatrix<double>* jacobian) const = 0;
  virtual void apply_step(const Eigen::VectorXd& dx) = 0;
  virtual void save_state() = 0;
  virtual void rollback() = 0;
};

/// Levenberg-Marquardt with multiplicative diagonal damping
/// (H + lambda * diag(H)). Convergence when the step norm drops below
/// step_tolerance or the gradient norm falls below gradient_reduction times
/// its initial value.
LmReport solve_levenberg_marquardt(LeastSquaresProblem& problem,
                                   const LmOptions& options = {});

}  // namespace rigtk
