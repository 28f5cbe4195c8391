#include "pfn/networks.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "pfn/error.hpp"

namespace pfn {

namespace {

Vector unit(std::size_t d, std::size_t i) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(d));
  e[static_cast<Eigen::Index>(i)] = 1.0;
  return e;
}

std::string tuple_label(const std::vector<std::size_t>& parts) {
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(parts[i]);
  }
  return s + ")";
}

bool strongly_connected(const Matrix& P) {
  const auto d = P.rows();
  auto reach = [&](bool forward) {
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < d; ++j) {
        const double w = forward ? P(i, j) : P(j, i);
        if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          stack.push_back(j);
        }
      }
    }
    for (bool s : seen)
      if (!s) return false;
    return true;
  };
  return reach(true) && reach(false);
}

}  // namespace

ProductFormModel build_two_state() {
  std::vector<TransitionTemplate> t;
  t.push_back({0, 1, 1.0, unit(1, 0)});
  t.push_back({1, 0, 1.0, Vector::Zero(1)});
  Matrix A(2, 1);
  A << 0.0, 1.0;
  return ProductFormModel(StateSpace({"0", "1"}), std::move(t), std::move(A), Vector::Zero(2));
}

ProductFormModel build_birth_death(const BirthDeathSpec& spec) {
  const std::size_t n = spec.n;
  if (n < 2) throw ModelError("birth-death chain needs n >= 2");
  if (spec.mu.size() != n)
    throw ModelError("birth-death chain needs " + std::to_string(n) + " down-rates");
  for (double m : spec.mu)
    if (!(m > 0.0) || !std::isfinite(m)) throw ModelError("down-rates must be positive");

  std::vector<std::string> labels;
  for (std::size_t x = 0; x <= n; ++x) labels.push_back(std::to_string(x));

  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n));
  Vector b = Vector::Zero(static_cast<Eigen::Index>(n + 1));
  std::vector<TransitionTemplate> t;
  for (std::size_t x = 0; x <= n; ++x) {
    const auto xi = static_cast<Eigen::Index>(x);
    for (std::size_t i = 1; i <= x; ++i) A(xi, static_cast<Eigen::Index>(i - 1)) = 1.0;
    if (x > 0) b[xi] = b[xi - 1] - std::log(spec.mu[x - 1]);
    if (x < n) t.push_back({x, x + 1, 1.0, unit(n, x)});
    if (x > 0) t.push_back({x, x - 1, spec.mu[x - 1], Vector::Zero(static_cast<Eigen::Index>(n))});
  }
  return ProductFormModel(StateSpace(std::move(labels)), std::move(t), std::move(A), std::move(b));
}

Vector traffic_solution(const Matrix& P) {
  const auto d = P.rows();
  if (d < 2 || P.cols() != d) throw ModelError("routing matrix must be square with d >= 2");
  if (!P.allFinite() || (P.array() < 0.0).any())
    throw ModelError("routing matrix entries must be finite and nonnegative");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
      throw ModelError("routing matrix row " + std::to_string(i + 1) + " does not sum to 1");
  }
  if (!strongly_connected(P)) throw ModelError("routing matrix is reducible");

  // lambda (P - I) = 0 with the first equation replaced by lambda_1 = 1.
  Matrix M = (P - Matrix::Identity(d, d)).transpose();
  M.row(0).setZero();
  M(0, 0) = 1.0;
  Vector rhs = Vector::Zero(d);
  rhs[0] = 1.0;
  Vector lambda = M.fullPivLu().solve(rhs);
  if (!(lambda.array() > 0.0).all()) throw ModelError("traffic equation has no positive solution");
  return lambda;
}

ProductFormModel build_jackson(const JacksonSpec& spec) {
  const std::size_t d = spec.d;
  if (d < 2) throw ModelError("Jackson network needs d >= 2 queues");
  if (spec.n < 1) throw ModelError("Jackson network needs n >= 1 customers");
  if (static_cast<std::size_t>(spec.P.rows()) != d)
    throw ModelError("routing matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  const Vector lambda = traffic_solution(spec.P);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto a = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
      const double fwd = lambda[a] * spec.P(a, c), bwd = lambda[c] * spec.P(c, a);
      if (std::abs(fwd - bwd) > 1e-12 * std::max({1.0, fwd, bwd})) {
        throw ModelError("routing is not reversible: lambda_" + std::to_string(i + 1) + " P_" +
                         std::to_string(i + 1) + std::to_string(j + 1) + " != lambda_" +
                         std::to_string(j + 1) + " P_" + std::to_string(j + 1) +
                         std::to_string(i + 1));
      }
    }
  }

  std::vector<std::vector<std::size_t>> states;
  std::vector<std::size_t> cur(d, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t q, std::size_t left) {
    if (q + 1 == d) {
      cur[q] = left;
      states.push_back(cur);
      return;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
      cur[q] = k;
      rec(q + 1, left - k);
    }
  };
  rec(0, spec.n);

  std::vector<std::string> labels;
  for (const auto& s : states) labels.push_back(tuple_label(s));
  StateSpace space(std::move(labels));

  const auto S = static_cast<Eigen::Index>(states.size());
  Matrix A(S, static_cast<Eigen::Index>(d));
  Vector b(S);
  std::vector<TransitionTemplate> t;
  for (Eigen::Index x = 0; x < S; ++x) {
    const auto& s = states[static_cast<std::size_t>(x)];
    b[x] = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      A(x, ii) = -static_cast<double>(s[i]);
      b[x] += static_cast<double>(s[i]) * std::log(lambda[ii]);
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (s[i] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const double p = spec.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (i == j || p <= 0.0) continue;
        auto next = s;
        --next[i];
        ++next[j];
        t.push_back({static_cast<std::size_t>(x), space.index_of(tuple_label(next)), p, unit(d, i)});
      }
    }
  }
  return ProductFormModel(std::move(space), std::move(t), std::move(A), std::move(b));
}

std::string_view to_string(CsmaScheme scheme) {
  return scheme == CsmaScheme::single_param ? "single_param" : "per_class";
}

CsmaScheme parse_csma_scheme(std::string_view text) {
  if (text == "single" || text == "single_param" || text == "single-param" || text == "i")
    return CsmaScheme::single_param;
  if (text == "per_class" || text == "per-class" || text == "ii") return CsmaScheme::per_class;
  throw ParseError("unknown CSMA scheme '" + std::string(text) + "'");
}

ProductFormModel build_csma(const CsmaPartiteSpec& spec) {
  const std::size_t K = spec.sizes.size();
  if (K < 2) throw ModelError("CSMA network needs at least 2 classes");
  for (std::size_t nk : spec.sizes)
    if (nk < 1) throw ModelError("CSMA class sizes must be positive");
  const bool single = spec.scheme == CsmaScheme::single_param;
  const std::size_t d = single ? 1 : K;

  std::vector<std::string> labels{"0"};
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t l = 1; l <= spec.sizes[k]; ++l) labels.push_back(tuple_label({k + 1, l}));
  StateSpace space(std::move(labels));

  const auto S = static_cast<Eigen::Index>(space.size());
  Matrix A = Matrix::Zero(S, static_cast<Eigen::Index>(d));
  Vector b = Vector::Zero(S);
  std::vector<TransitionTemplate> t;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t nk = spec.sizes[k];
    const std::size_t param = single ? 0 : k;
    auto index = [&](std::size_t l) { return l == 0 ? 0 : space.index_of(tuple_label({k + 1, l})); };
    for (std::size_t l = 0; l <= nk; ++l) {
      const auto x = static_cast<Eigen::Index>(index(l));
      if (l > 0) {
        A(x, static_cast<Eigen::Index>(param)) = static_cast<double>(l);
        b[x] = std::lgamma(nk + 1.0) - std::lgamma(l + 1.0) - std::lgamma(nk - l + 1.0);
        t.push_back({index(l), index(l - 1), static_cast<double>(l),
                     Vector::Zero(static_cast<Eigen::Index>(d))});
      }
      if (l < nk) t.push_back({index(l), index(l + 1), static_cast<double>(nk - l), unit(d, param)});
    }
  }
  return ProductFormModel(std::move(space), std::move(t), std::move(A), std::move(b));
}

}  // namespace pfn
