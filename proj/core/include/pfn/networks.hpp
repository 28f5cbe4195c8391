#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pfn/model.hpp"
#include "pfn/types.hpp"

namespace pfn {

/// Two states {0, 1}: 0 -> 1 at rate e^r, 1 -> 0 at rate 1.
/// A = [[0], [1]], b = 0, so pi_1 = e^r / (1 + e^r).
ProductFormModel build_two_state();

/// Birth-death chain on {0, ..., n}. Up-rates x -> x+1 are e^{r_{x+1}},
/// down-rates x -> x-1 are mu_x (fixed).
struct BirthDeathSpec {
  std::size_t n = 2;
  std::vector<double> mu;
};

/// A_{x,i} = 1{x >= i}, b_x = -sum_{i<=x} ln mu_i.
ProductFormModel build_birth_death(const BirthDeathSpec& spec);

/// Closed network of d queues and n customers with routing matrix P.
/// Service at queue i runs at rate e^{r_i}.
struct JacksonSpec {
  std::size_t d = 2;
  std::size_t n = 1;
  Matrix P;
};

/// Solution of lambda = lambda P with lambda_1 = 1. Throws ModelError if P is
/// not row-stochastic or not irreducible.
Vector traffic_solution(const Matrix& P);

/// States are compositions of n into d parts, listed with x_1 decreasing.
/// x -> x - e_i + e_j at rate e^{r_i} P_ij; A_{x,i} = -x_i,
/// b_x = sum_i x_i ln lambda_i.
///
/// The law is reversible only when lambda_i P_ij = lambda_j P_ji; other
/// routing matrices are rejected.
ProductFormModel build_jackson(const JacksonSpec& spec);

enum class CsmaScheme { single_param, per_class };

std::string_view to_string(CsmaScheme scheme);
/// Accepts "single", "single_param", "i" and "per_class", "per-class", "ii".
CsmaScheme parse_csma_scheme(std::string_view text);

/// Complete K-partite interference graph: at most one class is active, and
/// node activations happen within that class.
struct CsmaPartiteSpec {
  std::vector<std::size_t> sizes;
  CsmaScheme scheme = CsmaScheme::per_class;
};

/// States 0 and (k, l), 1 <= l <= n_k. Activation (k, l) -> (k, l+1) at
/// rate (n_k - l) e^{r_k} (a shared r under single_param), deactivation
/// (k, l) -> (k, l-1) at rate l. b_{(k,l)} = ln C(n_k, l); A is l or
/// l 1{k = i}.
ProductFormModel build_csma(const CsmaPartiteSpec& spec);

}  // namespace pfn
