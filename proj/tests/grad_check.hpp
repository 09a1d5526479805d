#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nds/nn/model.hpp"

namespace nds::testing {

// Loss L = sum_i r_i y_i + 0.5 |y|^2 with fixed random r.
struct ProbeLoss {
  std::vector<double> r;
  double value(const nn::Tensor<double>& y) const {
    double s = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i) s += r[i] * y.data[i] + 0.5 * y.data[i] * y.data[i];
    return s;
  }
  nn::Tensor<double> grad(const nn::Tensor<double>& y) const {
    auto g = y;
    for (std::size_t i = 0; i < y.data.size(); ++i) g.data[i] = r[i] + y.data[i];
    return g;
  }
};

inline ProbeLoss make_probe(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  ProbeLoss p;
  for (std::size_t i = 0; i < n; ++i) p.r.push_back(d(gen));
  return p;
}

struct GradCheckResult {
  double max_param_rel = 0;  // worst per-array relative error
  double input_rel = 0;
};

inline double rel_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den_a = 0, den_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den_a += a[i] * a[i];
    den_b += b[i] * b[i];
  }
  const double den = std::sqrt(std::max(den_a, den_b));
  return den == 0 ? std::sqrt(num) : std::sqrt(num) / den;
}

// Central differences over every trainable entry (or `max_entries` random
// entries per array when nonzero) and over the input.
inline GradCheckResult grad_check(nn::Model<double>& model, const nn::Tensor<double>& x,
                                  nn::Phase phase = nn::Phase::train, std::size_t max_entries = 0,
                                  double h = 1e-6) {
  const auto y0 = model.forward(x, phase, Exec::serial);
  const auto probe = make_probe(y0.data.size(), 77);
  nn::Gradients<double> g;
  const auto dx = model.backward(probe.grad(y0), g, Exec::serial);
  auto loss = [&](const nn::Tensor<double>& in) {
    return probe.value(model.forward(in, phase, Exec::serial));
  };
  GradCheckResult res;
  std::mt19937_64 gen(5);
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    auto& par = model.params()[p];
    if (!par.trainable) continue;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < par.value.size(); ++i) idx.push_back(i);
    if (max_entries && idx.size() > max_entries) {
      std::shuffle(idx.begin(), idx.end(), gen);
      idx.resize(max_entries);
    }
    std::vector<double> num, ana;
    for (auto i : idx) {
      const double keep = par.value[i];
      par.value[i] = keep + h;
      const double lp = loss(x);
      par.value[i] = keep - h;
      const double lm = loss(x);
      par.value[i] = keep;
      num.push_back((lp - lm) / (2 * h));
      ana.push_back(g[p][i]);
    }
    res.max_param_rel = std::max(res.max_param_rel, rel_norm(ana, num));
  }
  std::vector<double> num;
  auto xp = x;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    xp.data[i] = x.data[i] + h;
    const double lp = loss(xp);
    xp.data[i] = x.data[i] - h;
    const double lm = loss(xp);
    xp.data[i] = x.data[i];
    num.push_back((lp - lm) / (2 * h));
  }
  res.input_rel = rel_norm(dx.data, num);
  return res;
}

inline nn::Tensor<double> random_tensor(std::size_t b, std::size_t h, std::size_t c,
                                        std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  nn::Tensor<double> t(b, h, c);
  for (auto& v : t.data) v = d(gen);
  return t;
}

}  // namespace nds::testing
