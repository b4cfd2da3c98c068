#pragma once

#include <stdexcept>
#include <string>

#include "comodule/types.hpp"

namespace comodule {

/// Base class for every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- data errors ---

struct DimensionMismatch : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct NonFinite : Error {
  using Error::Error;
};

struct ConstantColumn : Error {
  Index column;
  explicit ConstantColumn(Index col)
      : Error("column " + std::to_string(col) + " has zero variance"), column(col) {}
};

struct ZeroVariance : Error {
  using Error::Error;
};

struct ParseError : Error {
  Index row, col;
  ParseError(Index r, Index c, const std::string& what)
      : Error("parse error at row " + std::to_string(r) + ", column " +
              std::to_string(c) + ": " + what),
        row(r),
        col(c) {}
};

struct IncompatibleFiles : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// --- solver errors ---

struct ZeroInput : Error {
  using Error::Error;
};

struct BadBudget : Error {
  using Error::Error;
};

struct Infeasible : Error {
  using Error::Error;
};

struct DegenerateStep : Error {
  using Error::Error;
};

struct ZeroMatrix : Error {
  using Error::Error;
};

struct ZeroSignal : Error {
  using Error::Error;
};

struct CannotMatch : Error {
  Index nearest_nnz_u, nearest_nnz_v;
  CannotMatch(Index nu, Index nv)
      : Error("cannot match requested sparsity; nearest achievable nnz = (" +
              std::to_string(nu) + ", " + std::to_string(nv) + ")"),
        nearest_nnz_u(nu),
        nearest_nnz_v(nv) {}
};

struct EmptySelection : Error {
  using Error::Error;
};

struct InsufficientSamples : Error {
  int round;
  explicit InsufficientSamples(int r)
      : Error("not enough samples remain at extraction round " + std::to_string(r)),
        round(r) {}
};

}  // namespace comodule
