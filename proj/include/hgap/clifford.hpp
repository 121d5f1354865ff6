#pragma once

// Integer matrix families U^(1..n) that define an H-type group on R^(m+n).
//
// Every valid family consists of skew-symmetric orthogonal m x m matrices with
// entries in {-1, 0, +1} that pairwise anticommute. All checks here run in
// exact integer arithmetic.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hgap {

/// Dense square integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int dim) : dim_(dim), entries_(static_cast<std::size_t>(dim) * dim, 0) {}
  IntMatrix(int dim, std::vector<int> row_major);

  static IntMatrix identity(int dim);

  int dim() const noexcept { return dim_; }
  int operator()(int row, int col) const { return entries_[index(row, col)]; }
  int& operator()(int row, int col) { return entries_[index(row, col)]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  IntMatrix transpose() const;
  bool is_zero() const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * dim_ + col;
  }

  int dim_ = 0;
  std::vector<int> entries_;
};

/// Kronecker product a (x) b; a selects the block, b fills it.
IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b);

/// Structure of an H-type group: horizontal dimension m, center dimension n,
/// and the generator matrices. Construction does not validate; use
/// verify_structure() or load through structure_from_json().
class HTypeStructure {
 public:
  HTypeStructure() = default;
  HTypeStructure(int m, int n, std::vector<IntMatrix> generators);

  /// Degenerate n = 0 structure: plain Brownian motion in R^m, homogeneous
  /// norm equal to the Euclidean norm. Used to calibrate estimators.
  static HTypeStructure euclidean(int m);

  int m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  const std::vector<IntMatrix>& generators() const noexcept { return generators_; }
  const IntMatrix& generator(int i) const { return generators_.at(static_cast<std::size_t>(i)); }

  friend bool operator==(const HTypeStructure&, const HTypeStructure&) = default;

 private:
  int m_ = 0;
  int n_ = 0;
  std::vector<IntMatrix> generators_;
};

/// Hurwitz-Radon number: rho(m) = 2^q + 8p where m = odd * 2^(4p+q), 0 <= q <= 3.
int hurwitz_radon(std::int64_t m);

/// Least m with n < rho(m).
std::int64_t min_rep_dimension(int n);

/// An H-type algebra with dim z^perp = m and dim z = n exists iff n < rho(m).
bool admissible(std::int64_t m, int n);

/// Canonical generator family for (m, n). Deterministic; for (2, 1) it is
/// [[0, -1], [1, 0]].
/// Throws NotAdmissible when n >= rho(m), DimensionMismatch when m is not a
/// multiple of min_rep_dimension(n).
HTypeStructure build_generators(int m, int n);

struct VerificationReport {
  bool shape_ok = false;       // n matrices, each m x m
  bool skew = false;           // U + U^T = 0
  bool orthogonal = false;     // U U^T = I
  bool anticommute = false;    // U_i U_j + U_j U_i = 0 for i != j
  bool admissible = false;     // n < rho(m)
  bool spot_check = false;     // <U_i x, U_j x> = 0 on sampled integer x
  int spot_check_vectors = 0;
  std::vector<std::string> failures;

  bool passed() const noexcept {
    return shape_ok && skew && orthogonal && anticommute && admissible && spot_check;
  }
};

/// Exact verification of all structure axioms. Never throws on bad input;
/// failures are reported.
VerificationReport verify_structure(const HTypeStructure& structure, int spot_check_vectors = 64,
                                    std::uint64_t spot_check_seed = 0x5eedULL);

/// Row-permutation form of an integer orthogonal matrix: (U x)_r = sign[r] * x[column[r]].
struct SignedPermutation {
  std::vector<int> column;
  std::vector<int> sign;
};

/// Fails (returns false) unless every row has exactly one nonzero entry of +-1
/// and the columns form a permutation.
bool to_signed_permutation(const IntMatrix& matrix, SignedPermutation& out);

// Serialization. Schema: {"format_version": 1, "m": int, "n": int,
// "U": [[[int, ...], ...], ...]} with row-major matrices.
inline constexpr int kStructureFormatVersion = 1;

nlohmann::json structure_to_json(const HTypeStructure& structure);

/// Parses without verifying. Throws InvalidStructure on schema errors
/// (missing keys, non-integer entries, ragged matrices).
HTypeStructure parse_structure(const nlohmann::json& doc);

/// Parses and runs verify_structure(); throws InvalidStructure on failure.
HTypeStructure structure_from_json(const nlohmann::json& doc);

HTypeStructure load_structure(const std::filesystem::path& path);
void save_structure(const HTypeStructure& structure, const std::filesystem::path& path);

}  // namespace hgap
