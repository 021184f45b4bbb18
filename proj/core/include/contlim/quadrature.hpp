#pragma once

#include <array>
#include <cstddef>

namespace contlim {

// Gauss-Legendre rules on [-1, 1].
struct GaussRule5 {
  static constexpr std::array<double, 5> nodes = {
      -0.90617984593866399, -0.53846931010568309, 0.0,
      0.53846931010568309, 0.90617984593866399};
  static constexpr std::array<double, 5> weights = {
      0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
      0.47862867049936647, 0.23692688505618909};
};

struct GaussRule8 {
  static constexpr std::array<double, 8> nodes = {
      -0.96028985649753623, -0.79666647741362674, -0.52553240991632899,
      -0.18343464249564980, 0.18343464249564980, 0.52553240991632899,
      0.79666647741362674, 0.96028985649753623};
  static constexpr std::array<double, 8> weights = {
      0.10122853629037626, 0.22238103445337447, 0.31370664587788729,
      0.36268378337836198, 0.36268378337836198, 0.31370664587788729,
      0.22238103445337447, 0.10122853629037626};
};

// Integrate f over [a, b] with one application of the rule.
template <typename Rule, typename F>
double gauss_panel(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t q = 0; q < Rule::nodes.size(); ++q) {
    sum += Rule::weights[q] * f(mid + half * Rule::nodes[q]);
  }
  return half * sum;
}

// Composite rule over uniform panels.
template <typename Rule, typename F>
double gauss_composite(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += gauss_panel<Rule>(f, a + i * h, a + (i + 1) * h);
  }
  return sum;
}

}  // namespace contlim
