#include "unigroup/observables.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "unigroup/matrix_io.hpp"

namespace unigroup {

double expectation(const ParticularOperator& b, const Vector& psi) {
  if (b.gram == nullptr) throw std::invalid_argument("expectation: detached operator");
  const GramMatrix& gram = *b.gram;
  if (psi.size() != gram.size()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  const double denominator = gram.inner(psi, psi).real();
  if (!(denominator > 0.0)) throw std::invalid_argument("expectation of the zero state");
  return gram.inner((b.matrix * psi).eval(), psi).real() / denominator;
}

Vector normalize(const GramMatrix& gram, const Vector& psi) {
  const double n = gram.norm(psi);
  if (!(n > 0.0)) throw std::invalid_argument("normalize: zero state");
  return psi / n;
}

std::vector<double> energy_variation(const ExpectationSeries& series, double tau) {
  if (series.values.size() < 2) {
    throw std::invalid_argument("energy_variation needs at least two samples");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("energy_variation: tau > 0");
  std::vector<double> d(series.values.size() - 1);
  for (size_t i = 0; i + 1 < series.values.size(); ++i) {
    d[i] = (series.values[i + 1] - series.values[i]) / tau;
  }
  return d;
}

ExpectationSeries track_expectation(const ParticularOperator& b,
                                    const DiscreteGroup& group, const Vector& psi0,
                                    int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("track_expectation: n_steps >= 0");
  ExpectationSeries series;
  series.steps.reserve(static_cast<size_t>(n_steps) + 1);
  series.values.reserve(static_cast<size_t>(n_steps) + 1);
  Vector psi = psi0;
  for (int n = 0; n <= n_steps; ++n) {
    series.steps.push_back(n);
    series.values.push_back(expectation(b, psi));
    if (n < n_steps) psi = group.apply(1, std::move(psi));
  }
  return series;
}

ConstantOfMotionReport verify_constant_of_motion(const ParticularOperator& a,
                                                 const ParticularOperator& h,
                                                 const DiscreteGroup& group,
                                                 const Vector& psi0, int n_steps) {
  if (a.gram == nullptr || a.gram != h.gram) {
    throw std::invalid_argument("verify_constant_of_motion: gram mismatch");
  }
  const GramMatrix& gram = *a.gram;
  if (!(gram.norm(psi0) > 0.0)) {
    throw std::invalid_argument("verify_constant_of_motion: zero state");
  }

  ConstantOfMotionReport report;
  const Matrix comm = a.matrix * h.matrix - h.matrix * a.matrix;
  report.commutator_residual = gram.operator_norm(comm);
  report.commutator_tolerance =
      1e-11 * gram.operator_norm(a.matrix) * gram.operator_norm(h.matrix);
  report.compatible = report.commutator_residual <= report.commutator_tolerance;
  if (!report.compatible) return report;  // drift check skipped

  const ExpectationSeries series = track_expectation(a, group, psi0, n_steps);
  double drift = 0.0;
  for (double v : series.values) drift = std::max(drift, std::abs(v - series.values[0]));
  report.max_drift = drift;
  report.drift_tolerance = 1e-9 * (1.0 + std::abs(series.values[0]));
  report.constant = drift <= report.drift_tolerance;
  return report;
}

void write_series_csv(std::ostream& out, const ExpectationSeries& series) {
  out << "n,value\n";
  for (size_t i = 0; i < series.values.size(); ++i) {
    out << series.steps[i] << ',' << format_double(series.values[i]) << '\n';
  }
}

}  // namespace unigroup
