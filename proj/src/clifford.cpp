#include "hgap/clifford.hpp"

#include <fstream>
#include <random>
#include <string_view>

#include "hgap/error.hpp"

namespace hgap {

IntMatrix::IntMatrix(int dim, std::vector<int> row_major)
    : dim_(dim), entries_(std::move(row_major)) {
  if (dim < 0 || entries_.size() != static_cast<std::size_t>(dim) * dim) {
    throw Error(ErrorCode::DimensionMismatch, "IntMatrix: entry count does not match dim^2");
  }
}

IntMatrix IntMatrix::identity(int dim) {
  IntMatrix out(dim);
  for (int i = 0; i < dim; ++i) out(i, i) = 1;
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix out(dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

bool IntMatrix::is_zero() const {
  for (int v : entries_)
    if (v != 0) return false;
  return true;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "IntMatrix product");
  const int d = a.dim();
  IntMatrix out(d);
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k) {
      const int ark = a(r, k);
      if (ark == 0) continue;
      for (int c = 0; c < d; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "IntMatrix sum");
  IntMatrix out = a;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c) out(r, c) += b(r, c);
  return out;
}

IntMatrix kronecker(const IntMatrix& a, const IntMatrix& b) {
  const int da = a.dim();
  const int db = b.dim();
  IntMatrix out(da * db);
  for (int ar = 0; ar < da; ++ar)
    for (int ac = 0; ac < da; ++ac) {
      const int s = a(ar, ac);
      if (s == 0) continue;
      for (int br = 0; br < db; ++br)
        for (int bc = 0; bc < db; ++bc) out(ar * db + br, ac * db + bc) = s * b(br, bc);
    }
  return out;
}

HTypeStructure::HTypeStructure(int m, int n, std::vector<IntMatrix> generators)
    : m_(m), n_(n), generators_(std::move(generators)) {}

HTypeStructure HTypeStructure::euclidean(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "euclidean structure needs m >= 1");
  return HTypeStructure(m, 0, {});
}

int hurwitz_radon(std::int64_t m) {
  if (m < 1) throw Error(ErrorCode::DomainError, "hurwitz_radon: m must be positive");
  int v = 0;
  while ((m & 1) == 0) {
    m >>= 1;
    ++v;
  }
  const int p = v / 4;
  const int q = v % 4;
  return (1 << q) + 8 * p;
}

std::int64_t min_rep_dimension(int n) {
  if (n < 1) throw Error(ErrorCode::DomainError, "min_rep_dimension: n must be positive");
  for (int v = 0; v < 62; ++v) {
    const std::int64_t m = std::int64_t{1} << v;
    if (n < hurwitz_radon(m)) return m;
  }
  throw Error(ErrorCode::DomainError, "min_rep_dimension: n too large for 64-bit dimensions");
}

bool admissible(std::int64_t m, int n) {
  if (m < 1 || n < 0) return false;
  return n < hurwitz_radon(m);
}

namespace {

// 2x2 building blocks. J is the only skew one; J, K, L pairwise anticommute.
const IntMatrix kI2 = IntMatrix::identity(2);
const IntMatrix kJ(2, {0, -1, 1, 0});
const IntMatrix kK(2, {1, 0, 0, -1});
const IntMatrix kL(2, {0, 1, 1, 0});

IntMatrix from_word(std::string_view word) {
  IntMatrix out = IntMatrix::identity(1);
  for (char c : word) {
    switch (c) {
      case 'I': out = kronecker(out, kI2); break;
      case 'J': out = kronecker(out, kJ); break;
      case 'K': out = kronecker(out, kK); break;
      case 'L': out = kronecker(out, kL); break;
      default: throw Error(ErrorCode::InvalidArgument, "bad block letter");
    }
  }
  return out;
}

// A tensor word is skew iff it has an odd number of J factors. Two words
// anticommute iff they differ (both non-I) in an odd number of slots.
std::vector<IntMatrix> words_to_family(std::initializer_list<std::string_view> words, int count) {
  std::vector<IntMatrix> out;
  for (auto w : words) {
    if (static_cast<int>(out.size()) == count) break;
    out.push_back(from_word(w));
  }
  return out;
}

// Minimal family for 1 <= n <= 8 on R^d(n), d = 2, 4, 4, 8, 8, 8, 8, 16.
std::vector<IntMatrix> base_family(int n) {
  if (n == 1) return {kJ};
  if (n <= 3) return words_to_family({"KJ", "JI", "LJ"}, n);
  if (n <= 7) return words_to_family({"IIJ", "IJK", "JIL", "JKK", "JLK", "KJL", "LJL"}, n);
  // n == 8: double the seven-element octonionic family.
  std::vector<IntMatrix> out;
  const IntMatrix id8 = IntMatrix::identity(8);
  for (const auto& e : base_family(7)) out.push_back(kronecker(kK, e));
  out.push_back(kronecker(kJ, id8));
  return out;
}

// Family of n anticommuting complex structures on R^min_rep_dimension(n).
// Beyond n = 8 uses the period-8 step: with F_1..F_8 on R^16 and
// Omega = F_1 ... F_8 (symmetric, Omega^2 = I, anticommuting with each F_i),
// {F_i (x) I} together with {Omega (x) E_j} is a family of size 8 + k.
std::vector<IntMatrix> minimal_family(int n) {
  if (n <= 8) return base_family(n);
  const auto periodic = base_family(8);
  IntMatrix omega = IntMatrix::identity(16);
  for (const auto& f : periodic) omega = omega * f;
  const auto inner = minimal_family(n - 8);
  const IntMatrix inner_id = IntMatrix::identity(inner.front().dim());
  std::vector<IntMatrix> out;
  for (const auto& f : periodic) out.push_back(kronecker(f, inner_id));
  for (const auto& e : inner) out.push_back(kronecker(omega, e));
  return out;
}

}  // namespace

HTypeStructure build_generators(int m, int n) {
  if (m < 1 || n < 1) throw Error(ErrorCode::DomainError, "build_generators: m, n must be positive");
  if (!admissible(m, n)) {
    throw Error(ErrorCode::NotAdmissible, "(m, n) = (" + std::to_string(m) + ", " +
                                              std::to_string(n) + ") violates n < rho(m)");
  }
  const auto d = min_rep_dimension(n);
  if (m % d != 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "m must be a multiple of the minimal module dimension " + std::to_string(d));
  }
  const int copies = static_cast<int>(m / d);
  auto family = minimal_family(n);
  if (copies > 1) {
    const IntMatrix id = IntMatrix::identity(copies);
    for (auto& u : family) u = kronecker(id, u);
  }
  return HTypeStructure(m, n, std::move(family));
}

VerificationReport verify_structure(const HTypeStructure& s, int spot_check_vectors,
                                    std::uint64_t spot_check_seed) {
  VerificationReport rep;
  const int m = s.m();
  const int n = s.n();
  const auto& us = s.generators();

  rep.shape_ok = m >= 1 && n >= 0 && static_cast<int>(us.size()) == n;
  for (const auto& u : us) rep.shape_ok = rep.shape_ok && u.dim() == m;
  if (!rep.shape_ok) {
    rep.failures.push_back("shape: expected " + std::to_string(n) + " matrices of size " +
                           std::to_string(m));
    return rep;
  }

  rep.admissible = admissible(m, n);
  if (!rep.admissible) rep.failures.push_back("admissibility: n >= rho(m)");

  const IntMatrix id = IntMatrix::identity(m);
  rep.skew = true;
  rep.orthogonal = true;
  for (int i = 0; i < n; ++i) {
    const IntMatrix& u = us[static_cast<std::size_t>(i)];
    const IntMatrix ut = u.transpose();
    if (!(u + ut).is_zero()) {
      rep.skew = false;
      rep.failures.push_back("skew: U^(" + std::to_string(i + 1) + ") is not skew-symmetric");
    }
    if (!(u * ut == id)) {
      rep.orthogonal = false;
      rep.failures.push_back("orthogonal: U^(" + std::to_string(i + 1) + ") U^T != I");
    }
  }

  rep.anticommute = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto& a = us[static_cast<std::size_t>(i)];
      const auto& b = us[static_cast<std::size_t>(j)];
      if (!(a * b + b * a).is_zero()) {
        rep.anticommute = false;
        rep.failures.push_back("anticommute: U^(" + std::to_string(i + 1) + "), U^(" +
                               std::to_string(j + 1) + ")");
      }
    }

  // <U_i x, U_j x> = 0 on integer vectors in [-10, 10]^m, exact in 64-bit.
  rep.spot_check = true;
  rep.spot_check_vectors = spot_check_vectors;
  std::mt19937_64 gen(spot_check_seed);
  std::uniform_int_distribution<int> coord(-10, 10);
  std::vector<std::int64_t> x(static_cast<std::size_t>(m));
  std::vector<std::vector<std::int64_t>> ux(static_cast<std::size_t>(n),
                                            std::vector<std::int64_t>(static_cast<std::size_t>(m)));
  for (int k = 0; k < spot_check_vectors && rep.spot_check; ++k) {
    for (auto& xi : x) xi = coord(gen);
    for (int i = 0; i < n; ++i) {
      const auto& u = us[static_cast<std::size_t>(i)];
      for (int r = 0; r < m; ++r) {
        std::int64_t acc = 0;
        for (int c = 0; c < m; ++c) acc += static_cast<std::int64_t>(u(r, c)) * x[static_cast<std::size_t>(c)];
        ux[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = acc;
      }
    }
    for (int i = 0; i < n && rep.spot_check; ++i)
      for (int j = i + 1; j < n; ++j) {
        std::int64_t dot = 0;
        for (int r = 0; r < m; ++r)
          dot += ux[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] *
                 ux[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
        if (dot != 0) {
          rep.spot_check = false;
          rep.failures.push_back("pointwise orthogonality: <U^(" + std::to_string(i + 1) + ")x, U^(" +
                                 std::to_string(j + 1) + ")x> != 0");
          break;
        }
      }
  }
  return rep;
}

bool to_signed_permutation(const IntMatrix& matrix, SignedPermutation& out) {
  const int d = matrix.dim();
  out.column.assign(static_cast<std::size_t>(d), -1);
  out.sign.assign(static_cast<std::size_t>(d), 0);
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      const int v = matrix(r, c);
      if (v == 0) continue;
      if ((v != 1 && v != -1) || out.column[static_cast<std::size_t>(r)] != -1) return false;
      out.column[static_cast<std::size_t>(r)] = c;
      out.sign[static_cast<std::size_t>(r)] = v;
    }
    const int c = out.column[static_cast<std::size_t>(r)];
    if (c < 0 || used[static_cast<std::size_t>(c)]) return false;
    used[static_cast<std::size_t>(c)] = true;
  }
  return true;
}

nlohmann::json structure_to_json(const HTypeStructure& s) {
  nlohmann::json u = nlohmann::json::array();
  for (const auto& g : s.generators()) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < g.dim(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < g.dim(); ++c) row.push_back(g(r, c));
      rows.push_back(std::move(row));
    }
    u.push_back(std::move(rows));
  }
  return {{"format_version", kStructureFormatVersion}, {"m", s.m()}, {"n", s.n()}, {"U", std::move(u)}};
}

HTypeStructure parse_structure(const nlohmann::json& doc) {
  auto fail = [](const std::string& why) -> HTypeStructure {
    throw Error(ErrorCode::InvalidStructure, "structure file: " + why);
  };
  if (!doc.is_object()) return fail("top level must be an object");
  if (doc.contains("format_version") &&
      (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != kStructureFormatVersion)) {
    return fail("unsupported format_version");
  }
  for (const char* key : {"m", "n", "U"})
    if (!doc.contains(key)) return fail(std::string("missing key '") + key + "'");
  if (!doc["m"].is_number_integer() || !doc["n"].is_number_integer()) return fail("m and n must be integers");
  const int m = doc["m"].get<int>();
  const int n = doc["n"].get<int>();
  if (m < 1 || n < 0) return fail("m must be >= 1 and n >= 0");
  const auto& u = doc["U"];
  if (!u.is_array() || static_cast<int>(u.size()) != n) return fail("U must be an array of n matrices");
  std::vector<IntMatrix> gens;
  for (const auto& mat : u) {
    if (!mat.is_array() || static_cast<int>(mat.size()) != m) return fail("each matrix must have m rows");
    std::vector<int> entries;
    entries.reserve(static_cast<std::size_t>(m) * m);
    for (const auto& row : mat) {
      if (!row.is_array() || static_cast<int>(row.size()) != m) return fail("each row must have m entries");
      for (const auto& v : row) {
        if (!v.is_number_integer()) return fail("entries must be exact integers");
        entries.push_back(v.get<int>());
      }
    }
    gens.emplace_back(m, std::move(entries));
  }
  return HTypeStructure(m, n, std::move(gens));
}

HTypeStructure structure_from_json(const nlohmann::json& doc) {
  auto s = parse_structure(doc);
  const auto rep = verify_structure(s);
  if (!rep.passed()) {
    std::string why = "structure fails verification";
    for (const auto& f : rep.failures) why += "; " + f;
    throw Error(ErrorCode::InvalidStructure, why);
  }
  return s;
}

namespace {
nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidStructure, path.string() + ": " + e.what());
  }
}
}  // namespace

HTypeStructure load_structure(const std::filesystem::path& path) {
  return structure_from_json(read_json_file(path));
}

void save_structure(const HTypeStructure& structure, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << structure_to_json(structure).dump() << '\n';
}

}  // namespace hgap
