#pragma once

#include "catmap/arith.hpp"
#include "catmap/error.hpp"
#include "oracles.hpp"

namespace test {

inline const catmap::CatMap& cat() {
  static const catmap::CatMap A = catmap::validate_map(2, 1, 3, 2);
  return A;
}

inline oracle::M2 m2(const catmap::CatMap& A) { return {A.a, A.b, A.c, A.d}; }

/// The Errc thrown by fn, if any.
template <class F>
std::optional<catmap::Errc> error_of(F&& fn) {
  try {
    fn();
  } catch (const catmap::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace test
