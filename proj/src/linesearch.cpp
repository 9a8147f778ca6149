#include "vikit/linesearch.hpp"

#include <string>

namespace vikit {

LineSearchOutcome armijo(const VIOperator& f, const Vector& w, const Vector& r,
                         double gamma, double sigma, int max_backtracks) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("armijo: gamma must be in (0,1)");
  if (!(sigma > 0.0)) throw ConfigError("armijo: sigma must be positive");
  if (w.size() != r.size()) throw DimensionError("armijo: w and r size mismatch");

  const double threshold = 0.5 * sigma * norm_sq(r);
  double eta = 1.0;
  for (int m = 0; m <= max_backtracks; ++m) {
    Vector y = add_scaled(w, -eta, r);
    Vector f_y = f.eval(y);
    if (dot(f_y, r) >= threshold) {
      return {eta, m, std::move(y), std::move(f_y), m + 1};
    }
    eta *= gamma;
  }
  throw LineSearchError("armijo: no acceptable step within " +
                            std::to_string(max_backtracks) + " backtracks",
                        max_backtracks);
}

}  // namespace vikit
